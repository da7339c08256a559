#include "abpress/solver.hpp"

#include <cerrno>
#include <csignal>
#include <cstring>
#include <poll.h>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

namespace abpress {

SmtLibSolver::SmtLibSolver( std::string command, std::chrono::milliseconds timeout )
    : _command( std::move( command ) ), _timeout( timeout )
{
    start();
    send( "(set-option :print-success false)\n(set-option :produce-models true)\n(set-logic QF_LIA)\n" );
}

SmtLibSolver::~SmtLibSolver()
{
    if ( _to_child >= 0 )
    {
        const char bye[] = "(exit)\n";
        [[maybe_unused]] auto n = ::write( _to_child, bye, sizeof( bye ) - 1 );
        ::close( _to_child );
    }
    if ( _from_child >= 0 )
        ::close( _from_child );
    if ( _pid > 0 )
    {
        int status = 0;
        if ( ::waitpid( _pid, &status, WNOHANG ) == 0 )
        {
            ::kill( _pid, SIGTERM );
            ::waitpid( _pid, &status, 0 );
        }
    }
}

void SmtLibSolver::start()
{
    std::vector< std::string > argv_storage;
    std::istringstream words( _command );
    for ( std::string w; words >> w; )
        argv_storage.push_back( w );
    if ( argv_storage.empty() )
        throw SolverFailure( "empty external solver command" );

    int in_pipe[ 2 ], out_pipe[ 2 ];
    if ( ::pipe( in_pipe ) != 0 || ::pipe( out_pipe ) != 0 )
        throw SolverFailure( "pipe() failed: " + std::string( std::strerror( errno ) ) );

    ::signal( SIGPIPE, SIG_IGN );
    _pid = ::fork();
    if ( _pid < 0 )
        throw SolverFailure( "fork() failed" );
    if ( _pid == 0 )
    {
        ::dup2( in_pipe[ 0 ], STDIN_FILENO );
        ::dup2( out_pipe[ 1 ], STDOUT_FILENO );
        ::close( in_pipe[ 1 ] );
        ::close( out_pipe[ 0 ] );
        std::vector< char* > argv;
        for ( auto& a : argv_storage )
            argv.push_back( a.data() );
        argv.push_back( nullptr );
        ::execvp( argv[ 0 ], argv.data() );
        ::_exit( 127 );
    }
    ::close( in_pipe[ 0 ] );
    ::close( out_pipe[ 1 ] );
    _to_child = in_pipe[ 1 ];
    _from_child = out_pipe[ 0 ];
}

void SmtLibSolver::send( const std::string& text )
{
    size_t off = 0;
    while ( off < text.size() )
    {
        auto n = ::write( _to_child, text.data() + off, text.size() - off );
        if ( n <= 0 )
            throw SolverFailure( "external solver closed its input (" + _command + ")" );
        off += static_cast< size_t >( n );
    }
}

// Reads one balanced s-expression or bare atom from the child.
std::string SmtLibSolver::read_sexpr()
{
    auto deadline = std::chrono::steady_clock::now() + _timeout;
    for ( ;; )
    {
        // Try to cut a complete expression out of the buffer.
        size_t i = 0;
        while ( i < _buffer.size() && std::isspace( static_cast< unsigned char >( _buffer[ i ] ) ) )
            ++i;
        if ( i < _buffer.size() )
        {
            if ( _buffer[ i ] == '(' )
            {
                int depth = 0;
                bool in_string = false;
                for ( size_t j = i; j < _buffer.size(); ++j )
                {
                    char c = _buffer[ j ];
                    if ( c == '"' )
                        in_string = !in_string;
                    if ( in_string )
                        continue;
                    depth += c == '(';
                    depth -= c == ')';
                    if ( depth == 0 )
                    {
                        std::string out = _buffer.substr( i, j + 1 - i );
                        _buffer.erase( 0, j + 1 );
                        return out;
                    }
                }
            }
            else
            {
                size_t j = i;
                while ( j < _buffer.size() && !std::isspace( static_cast< unsigned char >( _buffer[ j ] ) ) )
                    ++j;
                if ( j < _buffer.size() )
                {
                    std::string out = _buffer.substr( i, j - i );
                    _buffer.erase( 0, j );
                    return out;
                }
            }
        }

        auto left = std::chrono::duration_cast< std::chrono::milliseconds >( deadline - std::chrono::steady_clock::now() );
        if ( left.count() <= 0 )
            throw SolverFailure( "external solver timed out (" + _command + ")" );
        pollfd pfd{ _from_child, POLLIN, 0 };
        int r = ::poll( &pfd, 1, static_cast< int >( left.count() ) );
        if ( r <= 0 )
            continue;
        char chunk[ 4096 ];
        auto n = ::read( _from_child, chunk, sizeof( chunk ) );
        if ( n <= 0 )
            throw SolverFailure( "external solver exited unexpectedly (" + _command + ")" );
        _buffer.append( chunk, static_cast< size_t >( n ) );
    }
}

namespace {

// Tokenises an s-expression into atoms and parentheses.
std::vector< std::string > tokens( const std::string& s )
{
    std::vector< std::string > out;
    for ( size_t i = 0; i < s.size(); )
    {
        char c = s[ i ];
        if ( std::isspace( static_cast< unsigned char >( c ) ) )
            ++i;
        else if ( c == '(' || c == ')' )
        {
            out.emplace_back( 1, c );
            ++i;
        }
        else
        {
            size_t j = i;
            while ( j < s.size() && !std::isspace( static_cast< unsigned char >( s[ j ] ) ) && s[ j ] != '(' && s[ j ] != ')' )
                ++j;
            out.push_back( s.substr( i, j - i ) );
            i = j;
        }
    }
    return out;
}

} // namespace

SatResult SmtLibSolver::do_check( const Formula& f )
{
    auto vars = f.vars();
    std::ostringstream q;
    q << "(push 1)\n";
    for ( auto v : vars )
        q << "(declare-const " << smtlib_var( v ) << " Int)\n";
    q << "(assert " << to_smtlib( f ) << ")\n(check-sat)\n";
    send( q.str() );

    auto answer = read_sexpr();
    SatResult result;
    if ( answer == "unsat" )
        result.sat = false;
    else if ( answer == "sat" )
    {
        result.sat = true;
        for ( auto v : vars )
            result.model[ v ] = 0;
        if ( !vars.empty() )
        {
            send( "(get-model)\n" );
            auto toks = tokens( read_sexpr() );
            // (define-fun NAME () Int VALUE) where VALUE is N or (- N)
            for ( size_t i = 0; i + 5 < toks.size(); ++i )
            {
                if ( toks[ i ] != "define-fun" )
                    continue;
                const std::string& name = toks[ i + 1 ];
                size_t k = i + 5; // skip NAME ( ) Int
                int64_t value = 0;
                if ( toks[ k ] == "(" && k + 2 < toks.size() && toks[ k + 1 ] == "-" )
                    value = -std::stoll( toks[ k + 2 ] );
                else
                    value = std::stoll( toks[ k ] );
                for ( auto v : vars )
                    if ( smtlib_var( v ) == name )
                        result.model[ v ] = value;
            }
        }
    }
    else
        throw SolverFailure( "unexpected answer from external solver: " + answer );

    send( "(pop 1)\n" );
    return result;
}

} // namespace abpress
