#include "abpress/art.hpp"

#include <functional>

namespace abpress {

namespace {

std::string node_name( int n ) { return "node " + std::to_string( n ); }

/// Concrete maximal executions from (loc, state), at most `cap`.
std::vector< std::vector< int > > concrete_runs( const Program& prog, const GlobalLoc& loc, const std::vector< int64_t >& state,
                                                 size_t cap )
{
    std::vector< std::vector< int > > out;
    std::vector< int > cur;
    std::function< void( const GlobalLoc&, const std::vector< int64_t >& ) > dfs = [&]( const GlobalLoc& l,
                                                                                       const std::vector< int64_t >& s ) {
        if ( out.size() >= cap )
            return;
        bool any = false;
        if ( !prog.is_error( l ) )
            for ( int a : prog.enabled( l ) )
            {
                auto next = prog.execute( a, s );
                if ( !next )
                    continue;
                any = true;
                cur.push_back( a );
                dfs( prog.step( l, a ), *next );
                cur.pop_back();
            }
        if ( !any )
            out.push_back( cur );
    };
    dfs( loc, state );
    return out;
}

} // namespace

AuditReport audit( const Art& art, const Program& prog, Solver& solver, bool check_source_sets, size_t path_cap )
{
    AuditReport r;
    const auto& nodes = art.nodes;

    if ( !solver.implies( prog.init_formula(), art.root().phi ) )
        r.inductiveness.push_back( "root label is not implied by the initial condition" );

    for ( const auto& n : nodes )
    {
        if ( n.parent >= 0 )
        {
            const ArtNode& p = nodes[ n.parent ];
            Formula pre = p.phi && prog.actions[ n.action ].instr;
            if ( !solver.implies( pre, n.phi.shifted( 1 ) ) )
                r.inductiveness.push_back( node_name( p.id ) + " -> " + node_name( n.id ) + " is not inductive" );
        }

        if ( n.covered_by >= 0 )
        {
            const ArtNode& w = nodes[ n.covered_by ];
            if ( w.loc != n.loc )
                r.covers.push_back( node_name( n.id ) + " covered at a different location" );
            if ( art.covered( w.id ) )
                r.covers.push_back( node_name( n.id ) + " covered by covered " + node_name( w.id ) );
            if ( art.descends( w.id, n.id ) )
                r.covers.push_back( node_name( n.id ) + " covered by its own descendant" );
            if ( !solver.implies( n.phi, w.phi ) )
                r.covers.push_back( node_name( n.id ) + " label does not imply its coverer's" );
        }

        if ( art.dormant( n.id ) )
            continue;
        if ( n.error && !n.phi.is_false() )
            r.error_nodes.push_back( node_name( n.id ) + " is an error node with a satisfiable label" );

        if ( n.covered_by >= 0 || n.phi.is_false() || n.error )
            continue;
        auto en = prog.enabled_threads( n.loc );
        if ( !en.empty() && n.expanded.empty() )
            r.completeness.push_back( node_name( n.id ) + " has enabled threads but none expanded" );
        for ( int t : n.sset )
            if ( !n.expanded.count( t ) && !prog.next( n.loc, t ).empty() )
                r.completeness.push_back( node_name( n.id ) + " leaves thread " + prog.threads[ t ].name + " unexpanded" );
        for ( int t : n.expanded )
            for ( int a : prog.next( n.loc, t ) )
                if ( art.child_with( n.id, a ) < 0 )
                    r.completeness.push_back( node_name( n.id ) + " is missing the edge for " + prog.action_label( a ) );
    }

    if ( !check_source_sets )
        return r;

    // Source-set condition on concretely reachable states: every maximal
    // run from the state has an initial in the node's source set.
    for ( const auto& n : nodes )
    {
        if ( art.covered( n.id ) || n.phi.is_false() || n.error )
            continue;
        std::vector< int64_t > state = prog.init;
        bool feasible = true;
        for ( int a : art.actions_to( n.id ) )
        {
            auto next = prog.execute( a, state );
            if ( !next )
            {
                feasible = false;
                break;
            }
            state = std::move( *next );
        }
        if ( !feasible )
            continue;
        for ( const auto& run : concrete_runs( prog, n.loc, state, path_cap ) )
        {
            if ( run.empty() )
                continue;
            std::vector< Step > steps;
            for ( int a : run )
                steps.push_back( step_of( prog, a ) );
            bool hit = false;
            for ( int t : initials( steps ) )
                hit = hit || n.sset.count( t );
            if ( !hit )
            {
                std::string text;
                for ( int a : run )
                    text += " " + prog.action_label( a );
                r.source_sets.push_back( node_name( n.id ) + " has no initial of run" + text );
                break;
            }
        }
    }
    return r;
}

} // namespace abpress
