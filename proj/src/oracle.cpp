#include "abpress/oracle.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace abpress {

std::string TraceKey::to_string( const Program& prog ) const
{
    std::string out;
    for ( const auto& level : levels )
    {
        out += "[";
        for ( size_t i = 0; i < level.size(); ++i )
            out += ( i ? " | " : "" ) + prog.action_label( level[ i ] );
        out += "]";
    }
    return out;
}

TraceKey canonical_trace( const Program& prog, const std::vector< int >& interleaving )
{
    std::vector< size_t > level( interleaving.size(), 0 );
    TraceKey key;
    for ( size_t j = 0; j < interleaving.size(); ++j )
    {
        size_t l = 0;
        for ( size_t i = 0; i < j; ++i )
            if ( prog.dependent( interleaving[ i ], interleaving[ j ] ) )
                l = std::max( l, level[ i ] + 1 );
        level[ j ] = l;
        if ( key.levels.size() <= l )
            key.levels.resize( l + 1 );
        key.levels[ l ].push_back( interleaving[ j ] );
    }
    for ( auto& lv : key.levels )
        std::sort( lv.begin(), lv.end() );
    return key;
}

OracleResult enumerate( const Program& prog, int loop_bound, uint64_t max_interleavings )
{
    OracleResult r;
    std::set< std::pair< GlobalLoc, std::vector< int64_t > > > seen;
    std::vector< int > trace;
    std::vector< std::vector< int > > visits( prog.threads.size() );
    for ( const auto& t : prog.threads )
        visits[ t.id ].assign( t.num_locations, 0 );
    for ( const auto& t : prog.threads )
        visits[ t.id ][ t.l0 ] = 1;

    std::function< void( const GlobalLoc&, const std::vector< int64_t >& ) > dfs = [&]( const GlobalLoc& loc,
                                                                                       const std::vector< int64_t >& vals ) {
        seen.insert( { loc, vals } );
        bool moved = false;
        bool cut = false;
        if ( !prog.is_error( loc ) )
            for ( int a : prog.enabled( loc ) )
            {
                auto next = prog.execute( a, vals );
                if ( !next )
                    continue;
                const Action& act = prog.actions[ a ];
                int& count = visits[ act.thread ][ act.exit ];
                if ( count > loop_bound )
                {
                    cut = true;
                    continue;
                }
                moved = true;
                ++count;
                trace.push_back( a );
                dfs( prog.step( loc, a ), *next );
                trace.pop_back();
                --count;
            }
        if ( cut )
            r.bound_hit = true;
        if ( moved || cut )
            return;
        if ( ++r.interleavings > max_interleavings )
            throw StateBudgetExceeded( "more than " + std::to_string( max_interleavings ) + " interleavings" );
        r.traces.insert( canonical_trace( prog, trace ) );
        if ( prog.is_error( loc ) && !r.error_trace )
            r.error_trace = trace;
    };

    dfs( prog.initial(), prog.init );
    r.states = seen.size();
    if ( r.error_trace )
        r.verdict = VerdictKind::Unsafe;
    else if ( r.bound_hit )
        r.verdict = VerdictKind::ResourceLimit;
    return r;
}

ReplayResult replay( const Program& prog, const std::vector< int >& actions )
{
    ReplayResult r;
    ConcreteState s{ prog.init, prog.initial(), 0 };
    r.states.push_back( s );
    for ( size_t i = 0; i < actions.size(); ++i )
    {
        int a = actions[ i ];
        const Action& act = prog.actions[ a ];
        auto options = prog.next( s.loc, act.thread );
        bool offered = std::find( options.begin(), options.end(), a ) != options.end();
        auto next = offered ? prog.execute( a, s.vals ) : std::nullopt;
        if ( !next )
        {
            r.assume_violated = i;
            return r;
        }
        s.vals = std::move( *next );
        s.loc[ act.thread ] = act.exit;
        ++s.steps;
        r.states.push_back( s );
    }
    r.reaches_error = prog.is_error( s.loc );
    return r;
}

} // namespace abpress
