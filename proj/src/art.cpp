#include "abpress/art.hpp"

#include <functional>

namespace abpress {

bool Art::covered( int n ) const
{
    for ( ; n >= 0; n = nodes[ n ].parent )
        if ( nodes[ n ].covered_by >= 0 )
            return true;
    return false;
}

bool Art::dormant( int n ) const
{
    if ( n < 0 || nodes[ n ].parent < 0 )
        return false;
    return covered( nodes[ n ].parent );
}

std::vector< int > Art::path_to( int n ) const
{
    std::vector< int > out;
    for ( ; n >= 0; n = nodes[ n ].parent )
        out.push_back( n );
    return { out.rbegin(), out.rend() };
}

std::vector< int > Art::actions_to( int n ) const
{
    std::vector< int > out;
    for ( ; nodes[ n ].parent >= 0; n = nodes[ n ].parent )
        out.push_back( nodes[ n ].action );
    return { out.rbegin(), out.rend() };
}

bool Art::descends( int n, int ancestor ) const
{
    for ( ; n >= 0; n = nodes[ n ].parent )
        if ( n == ancestor )
            return true;
    return false;
}

int Art::child_with( int n, int action ) const
{
    for ( int c : nodes[ n ].children )
        if ( nodes[ c ].action == action )
            return c;
    return -1;
}

namespace {

int climb( const Art& art, int n )
{
    // Covering never forms a cycle: a coverer is always uncovered.
    while ( art.nodes[ n ].covered_by >= 0 )
        n = art.nodes[ n ].covered_by;
    return n;
}

} // namespace

PathCorrespondence covers_path( const Art& art, const std::vector< int >& actions )
{
    PathCorrespondence out;
    int cur = 0;
    out.nodes.push_back( cur );
    for ( size_t i = 0; i < actions.size(); ++i )
    {
        int c = art.child_with( climb( art, cur ), actions[ i ] );
        if ( c < 0 )
        {
            out.failed_at = i;
            return out;
        }
        cur = c;
        out.nodes.push_back( cur );
    }
    out.covered = true;
    return out;
}

TraceCorrespondence covers_trace( const Art& art, const Program& prog, const std::vector< int >& actions )
{
    TraceCorrespondence out;
    size_t n = actions.size();
    std::set< std::pair< int, std::vector< bool > > > failed;
    std::vector< bool > used( n, false );

    std::function< bool( int ) > search = [&]( int node ) -> bool {
        if ( out.linearization.size() == n )
            return true;
        int at = climb( art, node );
        if ( failed.count( { at, used } ) )
            return false;
        for ( size_t k = 0; k < n; ++k )
        {
            if ( used[ k ] )
                continue;
            bool minimal = true;
            for ( size_t i = 0; i < k && minimal; ++i )
                if ( !used[ i ] && prog.dependent( actions[ i ], actions[ k ] ) )
                    minimal = false;
            if ( !minimal )
                continue;
            int c = art.child_with( at, actions[ k ] );
            if ( c < 0 )
                continue;
            used[ k ] = true;
            out.linearization.push_back( actions[ k ] );
            out.nodes.push_back( c );
            if ( search( c ) )
                return true;
            used[ k ] = false;
            out.linearization.pop_back();
            out.nodes.pop_back();
        }
        failed.insert( { at, used } );
        return false;
    };

    out.nodes.push_back( 0 );
    out.covered = search( 0 );
    if ( !out.covered )
        out.nodes.clear();
    return out;
}

std::vector< std::vector< int > > explored_executions( const Art& art, const Program& prog, size_t cap )
{
    std::vector< std::vector< int > > out;
    std::vector< int > cur;

    std::function< void( int, const std::vector< int64_t >& ) > walk = [&]( int node, const std::vector< int64_t >& state ) {
        if ( out.size() >= cap || cur.size() > 4 * art.nodes.size() )
            return;
        int at = climb( art, node );
        const GlobalLoc& loc = art.nodes[ at ].loc;
        if ( !prog.is_error( loc ) )
        {
            for ( int c : art.nodes[ at ].children )
            {
                auto next = prog.execute( art.nodes[ c ].action, state );
                if ( !next )
                    continue;
                cur.push_back( art.nodes[ c ].action );
                walk( c, *next );
                cur.pop_back();
            }
        }
        bool maximal = prog.is_error( loc );
        if ( !maximal )
        {
            maximal = true;
            for ( int a : prog.enabled( loc ) )
                if ( prog.execute( a, state ) )
                    maximal = false;
        }
        if ( maximal )
            out.push_back( cur );
    };

    walk( 0, prog.init );
    return out;
}

} // namespace abpress
