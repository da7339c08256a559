#include "abpress/model.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace abpress {

namespace {

class ThreadLowering
{
public:
    ThreadLowering( Program& prog, int thread ) : _prog( prog ), _thread( thread ) {}

    int fresh() { return _next_loc++; }

    void block( const std::vector< Stmt >& stmts, int from, int to )
    {
        if ( stmts.empty() )
        {
            if ( from != to )
                add( from, to, ActionKind::Assume, Formula::top(), -1, {}, "skip" );
            return;
        }
        for ( size_t i = 0; i < stmts.size(); ++i )
        {
            int next = i + 1 == stmts.size() ? to : fresh();
            stmt( stmts[ i ], from, next );
            from = next;
        }
    }

    void finish( int entry, int err )
    {
        // Number locations by first appearance, error location last.
        std::map< int, int > renumber;
        renumber[ entry ] = 0;
        for ( int id : _created )
            for ( int raw : { _prog.actions[ id ].entry, _prog.actions[ id ].exit } )
                if ( raw != err && !renumber.count( raw ) )
                    renumber.emplace( raw, static_cast< int >( renumber.size() ) );
        int n = static_cast< int >( renumber.size() );
        renumber[ err ] = n;

        Thread& t = _prog.threads[ _thread ];
        t.num_locations = n + 1;
        t.l0 = 0;
        t.l_err = n;
        t.out.assign( t.num_locations, {} );
        for ( int id : _created )
        {
            Action& a = _prog.actions[ id ];
            a.entry = renumber.at( a.entry );
            a.exit = renumber.at( a.exit );
            t.out[ a.entry ].push_back( id );
        }
    }

    void add( int from, int to, ActionKind kind, Formula guard, int target, LinTerm rhs, std::string text )
    {
        Action a;
        a.id = static_cast< int >( _prog.actions.size() );
        a.thread = _thread;
        a.entry = from;
        a.exit = to;
        a.kind = kind;
        a.guard = std::move( guard );
        a.target = target;
        a.rhs = std::move( rhs );
        a.text = std::move( text );

        std::set< int > reads;
        for ( auto v : a.guard.vars() )
            reads.insert( v.var );
        if ( target >= 0 )
        {
            for ( const auto& [ v, c ] : a.rhs.coeffs() )
                reads.insert( v.var );
            a.writes.push_back( target );
        }
        a.reads.assign( reads.begin(), reads.end() );

        std::vector< Formula > parts{ a.guard };
        for ( int v = 0; v < static_cast< int >( _prog.vars.size() ); ++v )
        {
            LinTerm primed = LinTerm::variable( VarRef{ v, 1 } );
            if ( v == target )
                parts.push_back( Formula::eq( primed - a.rhs ) );
            else
                parts.push_back( Formula::eq( primed - LinTerm::variable( VarRef{ v, 0 } ) ) );
        }
        a.instr = Formula::conj( std::move( parts ) );

        _created.push_back( a.id );
        _prog.actions.push_back( std::move( a ) );
    }

    int err = -1;

private:
    Formula cond( const Cond& c ) { return to_formula( c, _prog.vars ); }

    std::string show( const Formula& f ) { return f.to_string( frame_namer( _prog.vars ) ); }

    int var_index( const std::string& name )
    {
        return static_cast< int >( std::find( _prog.vars.begin(), _prog.vars.end(), name ) - _prog.vars.begin() );
    }

    void stmt( const Stmt& s, int from, int to )
    {
        switch ( s.kind )
        {
        case Stmt::Kind::Assign:
        {
            LinTerm rhs = to_term( *s.expr, _prog.vars );
            add( from, to, ActionKind::Assign, Formula::top(), var_index( s.name ), rhs,
                 s.name + " = " + rhs.to_string( frame_namer( _prog.vars ) ) );
            break;
        }
        case Stmt::Kind::Assume:
        {
            Formula c = cond( *s.cond );
            add( from, to, ActionKind::Assume, c, -1, {}, "assume(" + show( c ) + ")" );
            break;
        }
        case Stmt::Kind::Assert:
        {
            Formula c = cond( *s.cond );
            add( from, to, ActionKind::Assume, c, -1, {}, "assume(" + show( c ) + ")" );
            Formula nc = Formula::negate( c );
            add( from, err, ActionKind::Assume, nc, -1, {}, "assume(" + show( nc ) + ")" );
            break;
        }
        case Stmt::Kind::If:
        {
            Formula c = cond( *s.cond );
            branch( c, s.then_block, from, to );
            branch( Formula::negate( c ), s.else_block, from, to );
            break;
        }
        case Stmt::Kind::While:
        {
            Formula c = cond( *s.cond );
            if ( s.then_block.empty() )
                add( from, from, ActionKind::Assume, c, -1, {}, "assume(" + show( c ) + ")" );
            else
            {
                int body = fresh();
                add( from, body, ActionKind::Assume, c, -1, {}, "assume(" + show( c ) + ")" );
                block( s.then_block, body, from );
            }
            Formula nc = Formula::negate( c );
            add( from, to, ActionKind::Assume, nc, -1, {}, "assume(" + show( nc ) + ")" );
            break;
        }
        case Stmt::Kind::Lock:
        {
            int m = var_index( s.name );
            add( from, to, ActionKind::Lock, Formula::eq( LinTerm::variable( VarRef{ m, 0 } ) ), m, LinTerm::constant( 1 ),
                 "lock(" + s.name + ")" );
            break;
        }
        case Stmt::Kind::Unlock:
            add( from, to, ActionKind::Unlock, Formula::top(), var_index( s.name ), LinTerm::constant( 0 ),
                 "unlock(" + s.name + ")" );
            break;
        case Stmt::Kind::Skip:
            add( from, to, ActionKind::Assume, Formula::top(), -1, {}, "skip" );
            break;
        }
    }

    void branch( const Formula& c, const std::vector< Stmt >& body, int from, int to )
    {
        if ( body.empty() )
        {
            add( from, to, ActionKind::Assume, c, -1, {}, "assume(" + show( c ) + ")" );
            return;
        }
        int start = fresh();
        add( from, start, ActionKind::Assume, c, -1, {}, "assume(" + show( c ) + ")" );
        block( body, start, to );
    }

    Program& _prog;
    int _thread;
    int _next_loc = 0;
    std::vector< int > _created;
};

} // namespace

Program lower( const ProgramAst& ast )
{
    Program prog;
    for ( const auto& d : ast.shared )
    {
        prog.vars.push_back( d.name );
        prog.init.push_back( d.init );
    }

    for ( const auto& t : ast.threads )
    {
        Thread th;
        th.id = static_cast< int >( prog.threads.size() );
        th.name = t.name;
        prog.threads.push_back( th );

        ThreadLowering lw( prog, th.id );
        int entry = lw.fresh();
        int exit = lw.fresh();
        lw.err = lw.fresh();
        lw.block( t.body, entry, exit );
        lw.finish( entry, lw.err );
    }

    if ( ast.final_assert )
    {
        Thread th;
        th.id = static_cast< int >( prog.threads.size() );
        th.name = "final";
        th.checker = true;
        prog.threads.push_back( th );
        prog.checker = th.id;

        ThreadLowering lw( prog, th.id );
        int entry = lw.fresh();
        lw.err = lw.fresh();
        Formula nc = Formula::negate( to_formula( *ast.final_assert, prog.vars ) );
        lw.add( entry, lw.err, ActionKind::Assume, nc, -1, {}, "assume(" + nc.to_string( frame_namer( prog.vars ) ) + ")" );
        lw.finish( entry, lw.err );
    }
    return prog;
}

Program load_program( const std::string& source ) { return lower( parse( source ) ); }

Program load_program_file( const std::string& path )
{
    std::ifstream in( path );
    if ( !in )
        throw std::runtime_error( "cannot read " + path );
    std::stringstream ss;
    ss << in.rdbuf();
    return load_program( ss.str() );
}

} // namespace abpress
