#include "abpress/art.hpp"

#include <algorithm>
#include <functional>

namespace abpress {

const char* to_string( PorMode m )
{
    switch ( m )
    {
    case PorMode::None: return "none";
    case PorMode::Source: return "source";
    case PorMode::SourceSum: return "source-sum";
    case PorMode::SourcePaths: return "source-paths";
    }
    return "?";
}

std::optional< PorMode > parse_por_mode( const std::string& s )
{
    for ( auto m : { PorMode::None, PorMode::Source, PorMode::SourceSum, PorMode::SourcePaths } )
        if ( s == to_string( m ) )
            return m;
    return std::nullopt;
}

const char* to_string( VerdictKind k )
{
    switch ( k )
    {
    case VerdictKind::Safe: return "SAFE";
    case VerdictKind::Unsafe: return "UNSAFE";
    case VerdictKind::ResourceLimit: return "UNKNOWN";
    }
    return "?";
}

namespace {

bool has_loops( const Program& prog )
{
    for ( const auto& t : prog.threads )
    {
        // Iterative DFS colouring over the location graph.
        std::vector< int > colour( t.num_locations, 0 );
        for ( int s = 0; s < t.num_locations; ++s )
        {
            if ( colour[ s ] )
                continue;
            std::vector< std::pair< int, size_t > > stack{ { s, 0 } };
            colour[ s ] = 1;
            while ( !stack.empty() )
            {
                auto& [ l, i ] = stack.back();
                if ( i < t.out[ l ].size() )
                {
                    int next = prog.actions[ t.out[ l ][ i++ ] ].exit;
                    if ( colour[ next ] == 1 )
                        return true;
                    if ( colour[ next ] == 0 )
                    {
                        colour[ next ] = 1;
                        stack.push_back( { next, 0 } );
                    }
                }
                else
                {
                    colour[ l ] = 2;
                    stack.pop_back();
                }
            }
        }
    }
    return false;
}

} // namespace

Engine::Engine( const Program& prog, Solver& solver, EngineConfig cfg )
    : _prog( prog ), _solver( solver ), _cfg( cfg )
{
    ArtNode root;
    root.id = 0;
    root.loc = prog.initial();
    root.phi = prog.init_formula();
    root.error = prog.is_error( root.loc );
    _art.nodes.push_back( root );
    _by_loc[ root.loc ].push_back( 0 );
    _queued.push_back( false );
    _covering.push_back( 0 );
}

int Engine::make_node( int parent, int action )
{
    ArtNode n;
    n.id = static_cast< int >( _art.nodes.size() );
    n.loc = _prog.step( _art.nodes[ parent ].loc, action );
    n.phi = Formula::top();
    n.parent = parent;
    n.action = action;
    n.error = _prog.is_error( n.loc );
    n.depth = _art.nodes[ parent ].depth + 1;
    _by_loc[ n.loc ].push_back( n.id );
    _art.nodes[ parent ].children.push_back( n.id );
    _art.nodes.push_back( std::move( n ) );
    _queued.push_back( false );
    _covering.push_back( 0 );
    return static_cast< int >( _art.nodes.size() ) - 1;
}

void Engine::enqueue( int n )
{
    if ( _queued[ n ] )
        return;
    _queued[ n ] = true;
    _queue.push_back( n );
}

void Engine::enqueue_backtrack( int n )
{
    // Pending work below n goes first, as in a recursive search.
    if ( _queued[ n ] )
        return;
    _queued[ n ] = true;
    auto at = _queue.end();
    while ( at != _queue.begin() && _art.descends( *( at - 1 ), n ) )
        --at;
    _queue.insert( at, n );
}

bool Engine::out_of_budget( Verdict& out )
{
    if ( _art.nodes.size() > _cfg.max_nodes )
    {
        out.kind = VerdictKind::ResourceLimit;
        out.reason = "node budget exhausted";
        return true;
    }
    if ( _cfg.timeout.count() > 0 && std::chrono::steady_clock::now() - _start > _cfg.timeout )
    {
        out.kind = VerdictKind::ResourceLimit;
        out.reason = "timeout";
        return true;
    }
    return false;
}

Verdict Engine::run()
{
    _start = std::chrono::steady_clock::now();
    auto solver_before = _solver.stats();
    Verdict out;
    bool done = false;
    enqueue( 0 );

    try
    {
        while ( !done )
        {
            while ( !_queue.empty() )
            {
                if ( out_of_budget( out ) )
                {
                    done = true;
                    break;
                }
                int v = _queue.back();
                _queue.pop_back();
                _queued[ v ] = false;
                if ( _art.dormant( v ) )
                    continue;

                close( v );
                if ( _art.nodes[ v ].covered_by >= 0 )
                    continue;
                if ( _art.nodes[ v ].error && !_art.nodes[ v ].phi.is_false() && refine( v, out ) )
                {
                    done = true;
                    break;
                }
                expand( v );
            }
            if ( done )
                break;

            // Quiescent: every summary is complete, so covered nodes can
            // now race their prefixes against what lies below the coveree.
            if ( !uses_dpor() || !uses_covering() || _cfg.unsound_stop_at_cover )
                break;
            _summaries = compute_summaries();
            bool grew = false;
            for ( size_t v = 0; v < _art.nodes.size(); ++v )
                if ( _art.nodes[ v ].covered_by >= 0 && !_art.dormant( static_cast< int >( v ) ) )
                    grew = covered_event( static_cast< int >( v ) ) || grew;
            if ( !grew )
                break;
        }
    }
    catch ( const PathExplosion& e )
    {
        out.kind = VerdictKind::ResourceLimit;
        out.reason = e.what();
    }
    catch ( const SolverFailure& e )
    {
        throw EngineError( std::string( "solver failure: " ) + e.what() );
    }

    if ( out.kind == VerdictKind::Safe || uses_covering() )
        _summaries = compute_summaries();

    _stats.nodes = _art.nodes.size();
    _stats.edges = _art.nodes.size() - 1;
    _stats.covers = 0;
    for ( const auto& n : _art.nodes )
        if ( n.covered_by >= 0 )
            ++_stats.covers;
    _stats.solver_calls = _solver.stats().calls - solver_before.calls;
    _stats.interpolant_chains = _itp_stats.chains;
    _stats.interpolant_steps_checked = _itp_stats.checked_steps;
    if ( _cfg.timing )
    {
        _stats.solver_time_ms = std::chrono::duration< double, std::milli >( _solver.stats().time - solver_before.time ).count();
        _stats.time_ms = std::chrono::duration< double, std::milli >( std::chrono::steady_clock::now() - _start ).count();
    }
    return out;
}

void Engine::close( int v )
{
    if ( !uses_covering() || _art.nodes[ v ].covered_by >= 0 || _art.nodes[ v ].phi.is_false() )
        return;
    const ArtNode& node = _art.nodes[ v ];
    for ( int w : _by_loc[ node.loc ] )
    {
        if ( w >= v )
            break;
        if ( _art.covered( w ) )
            continue;
        if ( _solver.implies( node.phi, _art.nodes[ w ].phi ) )
        {
            cover( v, w );
            break;
        }
    }
    if ( _art.nodes[ v ].covered_by >= 0 && uses_dpor() )
        backtrack_path( v );
}

void Engine::cover( int v, int w )
{
    _art.nodes[ v ].covered_by = w;
    ++_covering[ w ];
    // Nodes covered by v or by anything below it lose their cover.
    if ( _art.nodes[ v ].children.empty() && _covering[ v ] == 0 )
        return;
    for ( auto& x : _art.nodes )
        if ( x.covered_by >= 0 && _art.descends( x.covered_by, v ) )
            uncover( x.id );
}

void Engine::uncover( int x )
{
    --_covering[ _art.nodes[ x ].covered_by ];
    _art.nodes[ x ].covered_by = -1;
    reopen( x );
}

void Engine::reopen( int n )
{
    std::vector< int > stack{ n };
    while ( !stack.empty() )
    {
        int x = stack.back();
        stack.pop_back();
        const ArtNode& node = _art.nodes[ x ];
        if ( x != n && node.covered_by >= 0 )
            continue;
        if ( node.status != NodeStatus::Final )
            enqueue( x );
        for ( auto it = node.children.rbegin(); it != node.children.rend(); ++it )
            stack.push_back( *it );
    }
}

bool Engine::refine( int v, Verdict& out )
{
    auto path = _art.path_to( v );
    auto actions = _art.actions_to( v );
    auto itp = interpolate( _prog, actions, _solver, _cfg.check_interpolants, &_itp_stats );
    if ( itp.feasible )
    {
        out.kind = VerdictKind::Unsafe;
        out.trace = concrete_trace( actions );
        if ( out.trace.size() != actions.size() || !_prog.is_error( _art.nodes[ v ].loc ) )
            throw EngineError( "feasible error path does not replay concretely" );
        return true;
    }

    ++_stats.refinements;
    for ( size_t i = 0; i < path.size(); ++i )
    {
        ArtNode& n = _art.nodes[ path[ i ] ];
        const Formula& a = itp.itps[ i ];
        if ( _solver.implies( n.phi, a ) )
            continue;
        if ( a.is_false() )
        {
            kill( n.id );
            break;
        }
        n.phi = n.phi && a;
        drop_covers_of( n.id );
    }
    // Stronger labels may now be covered.
    for ( int n : path )
    {
        if ( _art.nodes[ n ].phi.is_false() || _art.covered( n ) )
            break;
        close( n );
    }
    return false;
}

void Engine::drop_covers_of( int n )
{
    if ( _covering[ n ] == 0 )
        return;
    for ( auto& x : _art.nodes )
        if ( x.covered_by == n )
            uncover( x.id );
}

void Engine::kill( int n )
{
    // Everything below an infeasible node is infeasible too.
    std::vector< int > stack{ n };
    while ( !stack.empty() )
    {
        int x = stack.back();
        stack.pop_back();
        ArtNode& node = _art.nodes[ x ];
        node.phi = Formula::bottom();
        node.status = NodeStatus::Final;
        if ( node.covered_by >= 0 )
        {
            --_covering[ node.covered_by ];
            node.covered_by = -1;
        }
        drop_covers_of( x );
        for ( int c : node.children )
            stack.push_back( c );
    }
}

bool Engine::may_block( int v, int t ) const
{
    const ArtNode& n = _art.nodes[ v ];
    std::vector< Formula > guards;
    for ( int a : _prog.next( n.loc, t ) )
    {
        if ( _prog.actions[ a ].guard.is_true() )
            return false;
        guards.push_back( _prog.actions[ a ].guard );
    }
    return guards.empty() || !_solver.implies( n.phi, Formula::disj( std::move( guards ) ) );
}

void Engine::widen( int v )
{
    // A run from v in which every thread of the source set stays blocked
    // starts with some other thread, so one of those must be explored too.
    ArtNode& n = _art.nodes[ v ];
    for ( int t : n.sset )
        if ( !may_block( v, t ) )
            return;
    for ( int t : _prog.enabled_threads( n.loc ) )
        if ( !n.sset.count( t ) )
        {
            n.sset.insert( t );
            ++_stats.sset_additions;
            return;
        }
}

std::optional< int > Engine::choose( int v ) const
{
    const ArtNode& n = _art.nodes[ v ];
    if ( n.expanded.empty() && n.sset.empty() )
    {
        auto en = _prog.enabled_threads( n.loc );
        if ( en.empty() )
            return std::nullopt;
        return en.front();
    }
    for ( int t : n.sset )
        if ( !n.expanded.count( t ) && !_prog.next( n.loc, t ).empty() )
            return t;
    return std::nullopt;
}

void Engine::expand( int v )
{
    ArtNode& n = _art.nodes[ v ];
    if ( n.phi.is_false() || n.error )
    {
        n.status = NodeStatus::Final;
        if ( uses_dpor() )
            backtrack_path( v );
        return;
    }

    if ( !uses_dpor() )
    {
        if ( n.status != NodeStatus::Open )
            return;
        auto en = _prog.enabled_threads( n.loc );
        n.status = en.empty() ? NodeStatus::Final : NodeStatus::Expanded;
        std::vector< int > fresh;
        for ( int t : en )
        {
            _art.nodes[ v ].expanded.insert( t );
            _art.nodes[ v ].sset.insert( t );
            for ( int a : _prog.next( _art.nodes[ v ].loc, t ) )
                fresh.push_back( make_node( v, a ) );
        }
        for ( auto it = fresh.rbegin(); it != fresh.rend(); ++it )
            enqueue( *it );
        return;
    }

    auto t = choose( v );
    if ( !t )
    {
        if ( n.children.empty() )
        {
            n.status = NodeStatus::Final;
            backtrack_path( v );
        }
        return;
    }
    n.sset.insert( *t );
    n.expanded.insert( *t );
    n.status = NodeStatus::Expanded;
    widen( v );
    if ( choose( v ) )
        enqueue( v );
    expand_thread( *t, v );
}

void Engine::expand_thread( int t, int v )
{
    std::vector< int > fresh;
    for ( int a : _prog.next( _art.nodes[ v ].loc, t ) )
        fresh.push_back( make_node( v, a ) );
    for ( auto it = fresh.rbegin(); it != fresh.rend(); ++it )
        enqueue( *it );
}

std::vector< Step > Engine::path_steps( int v ) const
{
    std::vector< Step > out;
    for ( int a : _art.actions_to( v ) )
        out.push_back( step_of( _prog, a ) );
    return out;
}

std::optional< int > Engine::compute_bt( const std::vector< int >& nodes, std::vector< Step > seq, int u_index,
                                         std::map< int, std::set< int > >& sset ) const
{
    int u = nodes[ u_index ];
    const ArtNode& node = _art.nodes[ u ];
    if ( node.phi.is_false() )
        return std::nullopt;
    auto init = initials( seq );
    auto& s = sset[ u ];
    for ( int t : init )
        if ( s.count( t ) )
            return std::nullopt;

    // The first step of NotDep(u,v).v is always an initial; prefer it, then
    // any other initial that has an action here.
    std::vector< int > order{ seq.front().thread };
    order.insert( order.end(), init.begin(), init.end() );
    for ( int t : order )
    {
        if ( !init.count( t ) || _prog.threads[ t ].checker || _prog.next( node.loc, t ).empty() )
            continue;
        s.insert( t );
        return t;
    }
    return std::nullopt;
}

void Engine::apply_additions( const std::map< int, std::set< int > >& before, const std::map< int, std::set< int > >& after )
{
    for ( const auto& [ n, threads ] : after )
    {
        auto b = before.find( n );
        for ( int t : threads )
        {
            if ( b != before.end() && b->second.count( t ) )
                continue;
            if ( !_art.nodes[ n ].sset.insert( t ).second )
                continue;
            ++_stats.sset_additions;
            if ( _art.nodes[ n ].status != NodeStatus::Open )
                enqueue_backtrack( n );
        }
    }
}

void Engine::backtrack_path( int v )
{
    auto steps = path_steps( v );
    if ( steps.empty() )
        return;
    auto nodes = _art.path_to( v );
    HbIndex hb( steps, static_cast< int >( _prog.threads.size() ) );
    auto rs = races( steps, hb );

    std::map< int, std::set< int > > start;
    for ( size_t i = 0; i + 1 < nodes.size(); ++i )
        start[ nodes[ i ] ] = _art.nodes[ nodes[ i ] ].sset;
    auto work = start;

    for ( auto [ i, j ] : rs )
    {
        if ( _logged_races.insert( { nodes[ i + 1 ], nodes[ j + 1 ] } ).second )
        {
            ++_stats.races;
            if ( _cfg.race_log )
            {
                std::vector< int > via;
                for ( int x : steps[ i ].writes )
                    if ( std::binary_search( steps[ j ].reads.begin(), steps[ j ].reads.end(), x ) ||
                         std::binary_search( steps[ j ].writes.begin(), steps[ j ].writes.end(), x ) )
                        via.push_back( x );
                for ( int x : steps[ j ].writes )
                    if ( std::binary_search( steps[ i ].reads.begin(), steps[ i ].reads.end(), x ) )
                        via.push_back( x );
                std::sort( via.begin(), via.end() );
                via.erase( std::unique( via.begin(), via.end() ), via.end() );
                *_cfg.race_log << nodes[ i + 1 ] << " ⋈ " << nodes[ j + 1 ] << " via {";
                for ( size_t k = 0; k < via.size(); ++k )
                    *_cfg.race_log << ( k ? "," : "" ) << _prog.vars[ via[ k ] ];
                *_cfg.race_log << "}\n";
            }
        }
        std::vector< Step > seq;
        for ( int k : not_dep( hb, i, j ) )
            seq.push_back( steps[ k ] );
        seq.push_back( steps[ j ] );
        compute_bt( nodes, std::move( seq ), i, work );
    }
    apply_additions( start, work );
}

std::map< int, std::set< int > > Engine::summary_additions( int v, int z, const std::map< int, std::set< int > >& start ) const
{
    auto work = start;
    auto steps = path_steps( v );
    auto nodes = _art.path_to( v );
    HbIndex hb( steps, static_cast< int >( _prog.threads.size() ) );
    auto found = _summaries.find( z );
    if ( found == _summaries.end() )
        return work;
    auto es = entries( found->second );
    int k = static_cast< int >( steps.size() );
    for ( int j = 0; j < k; ++j )
    {
        if ( steps[ j ].checker )
            continue;
        Signature sj{ steps[ j ].thread, steps[ j ].reads, steps[ j ].writes };
        for ( const auto& e : es )
        {
            if ( !summary_races( sj, e ) )
                continue;
            std::vector< Step > seq;
            for ( int i : not_dep( hb, j, k ) )
                seq.push_back( steps[ i ] );
            seq.push_back( ghost( e ) );
            compute_bt( nodes, std::move( seq ), j, work );
        }
    }
    return work;
}

void Engine::suffix_paths( int z, std::vector< int >& cur, std::vector< std::vector< int > >& out, size_t& budget ) const
{
    int n = z;
    while ( _art.nodes[ n ].covered_by >= 0 )
        n = _art.nodes[ n ].covered_by;
    const auto& kids = _art.nodes[ n ].children;
    if ( kids.empty() || cur.size() > 4 * _art.nodes.size() )
    {
        if ( budget == 0 )
            throw PathExplosion( "more than the allowed number of suffix paths" );
        --budget;
        out.push_back( cur );
        return;
    }
    for ( int c : kids )
    {
        cur.push_back( _art.nodes[ c ].action );
        suffix_paths( c, cur, out, budget );
        cur.pop_back();
    }
}

std::set< int > Engine::usable_initials( int u, const std::vector< Step >& seq ) const
{
    std::set< int > out;
    const ArtNode& node = _art.nodes[ u ];
    if ( node.phi.is_false() )
        return out;
    for ( int t : initials( seq ) )
        if ( !_prog.threads[ t ].checker && !_prog.next( node.loc, t ).empty() )
            out.insert( t );
    return out;
}

std::map< int, std::set< int > > Engine::path_additions( int v, int z, const std::map< int, std::set< int > >& start,
                                                         std::vector< Requirement >* reqs ) const
{
    auto work = start;
    auto nodes = _art.path_to( v );
    auto prefix = _art.actions_to( v );
    int k = static_cast< int >( prefix.size() );

    std::vector< std::vector< int > > suffixes;
    std::vector< int > cur;
    size_t budget = _cfg.path_cap;
    suffix_paths( z, cur, suffixes, budget );

    for ( const auto& suffix : suffixes )
    {
        std::vector< Step > steps;
        for ( int a : prefix )
            steps.push_back( step_of( _prog, a ) );
        for ( int a : suffix )
            steps.push_back( step_of( _prog, a ) );
        HbIndex hb( steps, static_cast< int >( _prog.threads.size() ) );
        for ( auto [ i, j ] : races( steps, hb ) )
        {
            if ( i >= k || j < k )
                continue;
            std::vector< Step > seq;
            for ( int x : not_dep( hb, i, j ) )
                seq.push_back( steps[ x ] );
            seq.push_back( steps[ j ] );
            if ( reqs )
                reqs->push_back( { nodes[ i ], usable_initials( nodes[ i ], seq ) } );
            compute_bt( nodes, std::move( seq ), i, work );
        }
    }
    return work;
}

bool Engine::covered_event( int v )
{
    int z = _art.nodes[ v ].covered_by;
    auto nodes = _art.path_to( v );
    std::map< int, std::set< int > > start;
    for ( size_t i = 0; i + 1 < nodes.size(); ++i )
        start[ nodes[ i ] ] = _art.nodes[ nodes[ i ] ].sset;

    ++_stats.covered_events;
    std::map< int, std::set< int > > adds;
    if ( _cfg.por == PorMode::SourceSum )
    {
        adds = summary_additions( v, z, start );
        if ( _cfg.check_dominance )
        {
            std::vector< Requirement > reqs;
            std::map< int, std::set< int > > per_path;
            try
            {
                per_path = path_additions( v, z, start, &reqs );
                ++_stats.dominance_checks;
            }
            catch ( const PathExplosion& )
            {
                ++_stats.dominance_skipped;
            }
            for ( const auto& [ n, threads ] : per_path )
                for ( int t : threads )
                    if ( !adds[ n ].count( t ) )
                    {
                        ++_stats.dominance_violations;
                        _violations.push_back( { v, z, n, t, false } );
                    }
            for ( const auto& r : reqs )
            {
                if ( r.initials.empty() )
                    continue;
                bool met = false;
                for ( int t : r.initials )
                    met = met || adds[ r.node ].count( t );
                if ( !met )
                {
                    ++_stats.dominance_unmet;
                    _violations.push_back( { v, z, r.node, *r.initials.begin(), true } );
                }
            }
        }
    }
    else
        adds = path_additions( v, z, start );

    uint64_t before = _stats.sset_additions;
    apply_additions( start, adds );
    return _stats.sset_additions != before;
}

std::map< int, NodeSummary > Engine::compute_summaries() const
{
    bool loops = has_loops( _prog );
    std::map< int, NodeSummary > s;
    bool changed = true;
    while ( changed )
    {
        changed = false;
        for ( int n = static_cast< int >( _art.nodes.size() ) - 1; n >= 0; --n )
        {
            if ( _art.dormant( n ) )
                continue;
            const ArtNode& node = _art.nodes[ n ];
            NodeSummary next;
            if ( node.covered_by >= 0 )
            {
                next = s[ node.covered_by ];
                // Paths through the covering relation may be infinite; keep
                // every finite prefix so no earliest access is lost.
                if ( loops )
                    next.insert( PathSum{} );
            }
            else if ( node.children.empty() )
                next = leaf_summary();
            else
                for ( int c : node.children )
                {
                    const auto& below = s[ c ];
                    int a = _art.nodes[ c ].action;
                    if ( _prog.threads[ _prog.actions[ a ].thread ].checker )
                        next.insert( below.begin(), below.end() );
                    else
                    {
                        auto part = combine( sig( _prog, a ), below );
                        next.insert( part.begin(), part.end() );
                    }
                }
            auto& cur = s[ n ];
            if ( next != cur )
            {
                cur = std::move( next );
                changed = true;
            }
        }
    }
    return s;
}

std::vector< TraceStep > Engine::concrete_trace( const std::vector< int >& actions ) const
{
    std::vector< TraceStep > out;
    std::vector< int64_t > state = _prog.init;
    for ( int a : actions )
    {
        auto next = _prog.execute( a, state );
        if ( !next )
            break;
        state = std::move( *next );
        out.push_back( { _prog.actions[ a ].thread, a, state } );
    }
    return out;
}

} // namespace abpress
