#include "abpress/dpor.hpp"
#include "abpress/model.hpp"

#include <algorithm>
#include <map>

namespace abpress {

namespace {

bool meets( const std::vector< int >& a, const std::vector< int >& b )
{
    for ( int x : a )
        if ( std::binary_search( b.begin(), b.end(), x ) )
            return true;
    return false;
}

void join( std::vector< int >& into, const std::vector< int >& from )
{
    for ( size_t t = 0; t < into.size(); ++t )
        into[ t ] = std::max( into[ t ], from[ t ] );
}

} // namespace

Step step_of( const Program& prog, int action )
{
    const Action& a = prog.actions[ action ];
    return { a.thread, a.reads, a.writes, prog.threads[ a.thread ].checker };
}

Step ghost( const Signature& e ) { return { e.thread, e.reads, e.writes, false }; }

bool dependent( const Step& a, const Step& b )
{
    if ( a.thread == b.thread || a.checker || b.checker )
        return true;
    return meets( a.writes, b.reads ) || meets( a.writes, b.writes ) || meets( b.writes, a.reads );
}

HbIndex::HbIndex( const std::vector< Step >& path, int num_threads )
{
    std::vector< int > last_of_thread( num_threads, -1 );
    std::map< int, int > last_write;
    std::map< int, std::vector< int > > reads_since_write;
    std::vector< int > checker_steps;

    for ( size_t i = 0; i < path.size(); ++i )
    {
        const Step& s = path[ i ];
        std::vector< int > c( num_threads, -1 );
        auto pull = [ & ]( int j ) {
            if ( j >= 0 )
                join( c, _clock[ j ] );
        };

        pull( last_of_thread[ s.thread ] );
        if ( s.checker )
            for ( size_t j = 0; j < i; ++j )
                pull( static_cast< int >( j ) );
        for ( int j : checker_steps )
            pull( j );
        for ( int v : s.reads )
            if ( auto w = last_write.find( v ); w != last_write.end() )
                pull( w->second );
        for ( int v : s.writes )
        {
            if ( auto w = last_write.find( v ); w != last_write.end() )
                pull( w->second );
            for ( int r : reads_since_write[ v ] )
                pull( r );
        }
        c[ s.thread ] = static_cast< int >( i );

        _thread.push_back( s.thread );
        _clock.push_back( std::move( c ) );

        last_of_thread[ s.thread ] = static_cast< int >( i );
        if ( s.checker )
            checker_steps.push_back( static_cast< int >( i ) );
        for ( int v : s.reads )
            reads_since_write[ v ].push_back( static_cast< int >( i ) );
        for ( int v : s.writes )
        {
            last_write[ v ] = static_cast< int >( i );
            reads_since_write[ v ].clear();
        }
    }
}

bool HbIndex::hb( int i, int j ) const
{
    return i < j && _clock[ j ][ _thread[ i ] ] >= i;
}

std::vector< std::pair< int, int > > races( const std::vector< Step >& path, const HbIndex& hb )
{
    std::vector< std::pair< int, int > > out;
    int n = static_cast< int >( path.size() );
    if ( n == 0 )
        return out;
    int threads = static_cast< int >( hb.clock( 0 ).size() );
    for ( int j = 1; j < n; ++j )
    {
        if ( path[ j ].checker )
            continue;
        // Join of the clocks of every k in (i, j) with k -> j, filled in
        // while walking i downwards.
        std::vector< int > later( threads, -1 );
        std::vector< std::pair< int, int > > found;
        for ( int i = j - 1; i >= 0; --i )
        {
            if ( !hb.hb( i, j ) )
                continue;
            bool blocked = later[ path[ i ].thread ] >= i;
            if ( !blocked && path[ i ].thread != path[ j ].thread && !path[ i ].checker )
                found.emplace_back( i, j );
            join( later, hb.clock( i ) );
        }
        out.insert( out.end(), found.rbegin(), found.rend() );
    }
    return out;
}

std::vector< int > not_dep( const HbIndex& hb, int u, int v )
{
    std::vector< int > out;
    for ( int k = u + 1; k < v; ++k )
        if ( !hb.hb( u, k ) )
            out.push_back( k );
    return out;
}

std::set< int > initials( const std::vector< Step >& seq )
{
    // reach[k]: indices j < k with j ->* k inside seq.
    std::vector< std::vector< bool > > before( seq.size(), std::vector< bool >( seq.size(), false ) );
    std::set< int > out;
    std::set< int > seen;
    for ( size_t k = 0; k < seq.size(); ++k )
    {
        bool has_pred = false;
        for ( size_t j = 0; j < k; ++j )
        {
            if ( dependent( seq[ j ], seq[ k ] ) )
            {
                before[ k ][ j ] = true;
                for ( size_t i = 0; i < j; ++i )
                    if ( before[ j ][ i ] )
                        before[ k ][ i ] = true;
            }
        }
        for ( size_t j = 0; j < k; ++j )
            has_pred = has_pred || before[ k ][ j ];
        if ( seen.insert( seq[ k ].thread ).second && !has_pred )
            out.insert( seq[ k ].thread );
    }
    return out;
}

std::set< int > weak_initials( const std::vector< Step >& seq, const std::vector< Step >& next )
{
    auto out = initials( seq );
    for ( const auto& p : next )
    {
        bool independent = std::none_of( seq.begin(), seq.end(), [ & ]( const Step& s ) { return dependent( p, s ); } );
        if ( independent )
            out.insert( p.thread );
    }
    return out;
}

} // namespace abpress
