#include "abpress/art.hpp"
#include "abpress/oracle.hpp"
#include "abpress/random_program.hpp"
#include "util.hpp"

#include <gtest/gtest.h>

#include <functional>

using namespace abpress;

namespace {

const PorMode all_modes[] = { PorMode::None, PorMode::Source, PorMode::SourceSum, PorMode::SourcePaths };

struct Outcome
{
    Verdict verdict;
    Stats stats;
    Art art;
};

Outcome run( const Program& p, PorMode m, EngineConfig cfg = {} )
{
    BuiltinSolver s;
    cfg.por = m;
    Engine e( p, s, cfg );
    Verdict v = e.run();
    return { v, e.stats(), e.art() };
}

std::set< TraceKey > keys_of( const Program& p, const Art& art )
{
    std::set< TraceKey > out;
    for ( const auto& e : explored_executions( art, p, 1000000 ) )
        out.insert( canonical_trace( p, e ) );
    return out;
}

} // namespace

TEST( Engine, ModeNames )
{
    for ( auto m : all_modes )
        EXPECT_EQ( parse_por_mode( to_string( m ) ), m );
    EXPECT_FALSE( parse_por_mode( "dpor" ) );
    EXPECT_STREQ( to_string( VerdictKind::ResourceLimit ), "UNKNOWN" );
}

TEST( Engine, RacySumSafeInEveryMode )
{
    Program p = load_program_file( test::corpus_file( "racy_sum" ) );
    for ( auto m : all_modes )
    {
        Outcome r = run( p, m );
        EXPECT_EQ( r.verdict.kind, VerdictKind::Safe ) << to_string( m );
        BuiltinSolver s;
        EXPECT_TRUE( audit( r.art, p, s, true ).ok() ) << to_string( m );
    }
}

TEST( Engine, MutantTraceReplays )
{
    Program p = load_program_file( test::corpus_file( "racy_sum_mutant" ) );
    for ( auto m : all_modes )
    {
        Outcome r = run( p, m );
        ASSERT_EQ( r.verdict.kind, VerdictKind::Unsafe ) << to_string( m );
        std::vector< int > actions;
        for ( const auto& st : r.verdict.trace )
            actions.push_back( st.action );
        ReplayResult rep = replay( p, actions );
        EXPECT_FALSE( rep.assume_violated );
        EXPECT_TRUE( rep.reaches_error );
        EXPECT_EQ( rep.states.back().vals, r.verdict.trace.back().state );
    }
}

TEST( Engine, NodeBudget )
{
    Program p = load_program_file( test::corpus_file( "peterson" ) );
    EngineConfig cfg;
    cfg.max_nodes = 50;
    Outcome r = run( p, PorMode::None, cfg );
    EXPECT_EQ( r.verdict.kind, VerdictKind::ResourceLimit );
    EXPECT_EQ( r.verdict.reason, "node budget exhausted" );
}

TEST( Engine, ExploresEveryOracleTrace )
{
    for ( const char* name : { "racy_sum", "cover_hides_race", "message_passing", "lock_counter", "guarded_swap" } )
    {
        Program p = load_program_file( test::corpus_file( name ) );
        OracleResult o = enumerate( p, 0 );
        ASSERT_EQ( o.verdict, VerdictKind::Safe ) << name;
        for ( auto m : all_modes )
        {
            Outcome r = run( p, m );
            ASSERT_EQ( r.verdict.kind, VerdictKind::Safe ) << name << " " << to_string( m );
            EXPECT_EQ( keys_of( p, r.art ), o.traces ) << name << " " << to_string( m );
            if ( m == PorMode::None )
            {
                // Without reduction every concrete interleaving is a path.
                std::vector< int > cur;
                std::function< void( GlobalLoc, std::vector< int64_t > ) > walk = [ & ]( GlobalLoc l, std::vector< int64_t > s ) {
                    bool any = false;
                    for ( int a : p.enabled( l ) )
                        if ( auto n = p.execute( a, s ) )
                        {
                            any = true;
                            cur.push_back( a );
                            walk( p.step( l, a ), *n );
                            cur.pop_back();
                        }
                    if ( !any )
                    {
                        EXPECT_TRUE( covers_path( r.art, cur ).covered ) << name;
                    }
                };
                walk( p.initial(), p.init );
            }
        }
    }
}

TEST( Engine, ReducedModesCoverInterleavingsUpToTraces )
{
    Program p = load_program_file( test::corpus_file( "causal_chain" ) );
    OracleResult o = enumerate( p, 0 );
    Outcome r = run( p, PorMode::SourceSum );
    for ( const auto& key : o.traces )
    {
        std::vector< int > lin;
        for ( const auto& level : key.levels )
            lin.insert( lin.end(), level.begin(), level.end() );
        EXPECT_TRUE( covers_trace( r.art, p, lin ).covered ) << key.to_string( p );
    }
}

TEST( Engine, IndependentWritersReduce )
{
    Program p = load_program_file( test::corpus_file( "indep_writers_3" ) );
    Outcome none = run( p, PorMode::None );
    Outcome src = run( p, PorMode::Source );
    EXPECT_EQ( src.stats.nodes, 7u ); // one path of six actions
    EXPECT_GE( none.stats.nodes, 27u );
    EXPECT_EQ( keys_of( p, src.art ).size(), 1u );
}

TEST( Engine, StopAtCoverLosesRace )
{
    Program p = load_program_file( test::corpus_file( "cover_hides_race" ) );
    OracleResult o = enumerate( p, 0 );
    Outcome sound = run( p, PorMode::SourceSum );
    EngineConfig cfg;
    cfg.unsound_stop_at_cover = true;
    Outcome unsound = run( p, PorMode::SourceSum, cfg );
    EXPECT_EQ( keys_of( p, sound.art ), o.traces );
    EXPECT_LT( keys_of( p, unsound.art ).size(), o.traces.size() );
    EXPECT_LT( unsound.stats.sset_additions, sound.stats.sset_additions );
}

TEST( Engine, InterpolantChainsChecked )
{
    Program p = load_program_file( test::corpus_file( "lost_update" ) );
    for ( auto m : all_modes )
    {
        Outcome r = run( p, m );
        EXPECT_EQ( r.verdict.kind, VerdictKind::Unsafe );
        EXPECT_EQ( r.stats.interpolant_chains, r.stats.refinements );
    }
}

TEST( Engine, SummariesOfFinalArt )
{
    Program p = load_program_file( test::corpus_file( "racy_sum" ) );
    BuiltinSolver s;
    Engine e( p, s );
    ASSERT_EQ( e.run().kind, VerdictKind::Safe );
    EXPECT_EQ( e.summaries(), e.compute_summaries() );
    EXPECT_FALSE( e.summaries().empty() );
}

TEST( Engine, RandomProgramsMatchOracle )
{
    for ( uint64_t seed = 0; seed < 60; ++seed )
    {
        Program p = load_program( random_program( seed ) );
        OracleResult o = enumerate( p, 0 );
        for ( auto m : all_modes )
        {
            Outcome r = run( p, m );
            EXPECT_EQ( r.verdict.kind, o.verdict ) << "seed " << seed << " " << to_string( m );
            if ( r.verdict.kind == VerdictKind::Safe )
            {
                BuiltinSolver s;
                EXPECT_TRUE( audit( r.art, p, s ).ok() ) << "seed " << seed;
                EXPECT_EQ( keys_of( p, r.art ), o.traces ) << "seed " << seed << " " << to_string( m );
            }
        }
    }
}

TEST( Audit, DetectsBrokenLabels )
{
    Program p = load_program_file( test::corpus_file( "racy_sum" ) );
    Outcome r = run( p, PorMode::None );
    Art art = r.art;
    BuiltinSolver s;
    ASSERT_TRUE( audit( art, p, s ).ok() );
    // An error node with a satisfiable label.
    for ( auto& n : art.nodes )
        if ( n.error && !art.dormant( n.id ) )
        {
            n.phi = Formula::top();
            break;
        }
    EXPECT_FALSE( audit( art, p, s ).ok() );
}
