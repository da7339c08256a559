// Acceptance checks. Prints one line per criterion and exits non-zero if
// any criterion fails.

#include "abpress/art.hpp"
#include "abpress/export.hpp"
#include "abpress/oracle.hpp"
#include "abpress/random_program.hpp"
#include "util.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <sys/wait.h>

using namespace abpress;
using Clock = std::chrono::steady_clock;

namespace {

constexpr int random_programs = 500;
constexpr double racy_limit_s = 5.0;
constexpr double oracle_limit_s = 600.0;
constexpr int summary_trees = 1000;

const PorMode all_modes[] = { PorMode::None, PorMode::Source, PorMode::SourceSum, PorMode::SourcePaths };

double seconds_since( Clock::time_point t ) { return std::chrono::duration< double >( Clock::now() - t ).count(); }

struct Run
{
    Verdict verdict;
    Stats stats;
    Art art;
    std::string json;
    std::string dot;
    double seconds = 0;
    bool interpolant_failure = false;
    std::string error;
};

Run verify( const Program& p, PorMode m, bool dominance = false, bool unsound = false )
{
    Run r;
    BuiltinSolver s;
    EngineConfig cfg;
    cfg.por = m;
    cfg.check_dominance = dominance;
    cfg.unsound_stop_at_cover = unsound;
    Engine e( p, s, cfg );
    auto t = Clock::now();
    try
    {
        r.verdict = e.run();
    }
    catch ( const InternalError& ex )
    {
        r.interpolant_failure = true;
        r.error = ex.what();
        r.verdict.kind = VerdictKind::ResourceLimit;
    }
    r.seconds = seconds_since( t );
    r.stats = e.stats();
    r.art = e.art();
    r.json = stats_json( r.verdict, r.stats );
    r.dot = to_dot( r.art, p );
    return r;
}

std::set< TraceKey > explored_keys( const Program& p, const Art& art )
{
    std::set< TraceKey > out;
    for ( const auto& e : explored_executions( art, p, 2000000 ) )
        out.insert( canonical_trace( p, e ) );
    return out;
}

/// Every concretely maximal interleaving of a loop-free program.
std::vector< std::vector< int > > interleavings( const Program& p )
{
    std::vector< std::vector< int > > out;
    std::vector< int > cur;
    std::function< void( const GlobalLoc&, const std::vector< int64_t >& ) > dfs = [ & ]( const GlobalLoc& l,
                                                                                        const std::vector< int64_t >& s ) {
        bool any = false;
        if ( !p.is_error( l ) )
            for ( int a : p.enabled( l ) )
                if ( auto n = p.execute( a, s ) )
                {
                    any = true;
                    cur.push_back( a );
                    dfs( p.step( l, a ), *n );
                    cur.pop_back();
                }
        if ( !any )
            out.push_back( cur );
    };
    dfs( p.initial(), p.init );
    return out;
}

struct Subject
{
    std::string name;
    std::string expect; // corpus only
    Program prog;
    OracleResult oracle;
    std::map< PorMode, Run > runs;
    bool corpus = false;
};

struct Line
{
    bool pass = false;
    std::string text;
};

void report( int n, const std::string& title, const Line& l )
{
    std::cout << "criterion " << n << " [" << ( l.pass ? "PASS" : "FAIL" ) << "] " << title << ": " << l.text << std::endl;
}

std::string fmt( double s )
{
    char buf[ 32 ];
    std::snprintf( buf, sizeof buf, "%.2f s", s );
    return buf;
}

Line racy_sum_reproduction()
{
    Program safe = load_program_file( test::corpus_file( "racy_sum" ) );
    Program mutant = load_program_file( test::corpus_file( "racy_sum_mutant" ) );
    bool ok = true;
    double worst = 0;
    std::string why;
    for ( auto m : all_modes )
    {
        Run a = verify( safe, m );
        Run b = verify( mutant, m );
        worst = std::max( { worst, a.seconds, b.seconds } );
        if ( a.verdict.kind != VerdictKind::Safe )
        {
            ok = false;
            why += std::string( " racy_sum not SAFE in " ) + to_string( m ) + ";";
        }
        if ( b.verdict.kind != VerdictKind::Unsafe )
        {
            ok = false;
            why += std::string( " mutant not UNSAFE in " ) + to_string( m ) + ";";
            continue;
        }
        std::vector< int > actions;
        for ( const auto& st : b.verdict.trace )
            actions.push_back( st.action );
        ReplayResult rep = replay( mutant, actions );
        if ( rep.assume_violated || !rep.reaches_error )
        {
            ok = false;
            why += std::string( " mutant trace does not replay in " ) + to_string( m ) + ";";
        }
    }
    ok = ok && worst < racy_limit_s;
    return { ok, "racy_sum SAFE and mutant UNSAFE with replaying trace in 4 modes; slowest run " + fmt( worst ) + " (limit " +
                     fmt( racy_limit_s ) + ")" + why };
}

Line oracle_equivalence( std::vector< Subject >& subjects, double seconds )
{
    int cases = 0, mismatches = 0, corpus = 0, expect_bad = 0;
    std::string first;
    for ( auto& s : subjects )
    {
        corpus += s.corpus;
        if ( s.corpus && s.expect != to_string( s.oracle.verdict ) )
        {
            ++expect_bad;
            first += " " + s.name + " oracle disagrees with its expect line;";
        }
        for ( auto& [ m, r ] : s.runs )
        {
            ++cases;
            if ( r.verdict.kind != s.oracle.verdict )
            {
                if ( !mismatches )
                    first += " first mismatch " + s.name + " " + to_string( m ) + ": " + to_string( r.verdict.kind ) +
                             " vs oracle " + to_string( s.oracle.verdict ) + ";";
                ++mismatches;
            }
        }
    }
    bool ok = mismatches == 0 && expect_bad == 0 && corpus >= 20 && seconds < oracle_limit_s;
    return { ok, std::to_string( corpus ) + " corpus + " + std::to_string( subjects.size() - corpus ) +
                     " random programs, " + std::to_string( cases ) + " runs, " + std::to_string( mismatches ) +
                     " verdict mismatches; " + fmt( seconds ) + " (limit " + fmt( oracle_limit_s ) + ")" + first };
}

Line trace_completeness( std::vector< Subject >& subjects )
{
    int programs = 0, paths = 0, path_misses = 0, key_misses = 0;
    std::string first;
    for ( auto& s : subjects )
    {
        if ( !s.corpus || s.oracle.verdict != VerdictKind::Safe )
            continue;
        ++programs;
        auto all = interleavings( s.prog );
        for ( auto& [ m, r ] : s.runs )
        {
            if ( r.verdict.kind != VerdictKind::Safe )
                continue;
            for ( const auto& il : all )
            {
                ++paths;
                // Without reduction every interleaving is an ART path; the
                // reduced modes keep one interleaving per trace.
                bool hit = m == PorMode::None ? covers_path( r.art, il ).covered : covers_trace( r.art, s.prog, il ).covered;
                if ( !hit )
                {
                    if ( !path_misses )
                        first += " first uncovered interleaving in " + s.name + " " + to_string( m ) + ";";
                    ++path_misses;
                }
            }
            if ( explored_keys( s.prog, r.art ) != s.oracle.traces )
            {
                if ( !key_misses )
                    first += " trace keys differ in " + s.name + " " + to_string( m ) + ";";
                ++key_misses;
            }
        }
    }
    return { path_misses == 0 && key_misses == 0,
             std::to_string( programs ) + " SAFE corpus programs, " + std::to_string( paths ) +
                 " interleaving checks, " + std::to_string( path_misses ) + " uncovered, " + std::to_string( key_misses ) +
                 " trace-key set mismatches" + first };
}

Line summarization_soundness( std::vector< Subject >& subjects )
{
    uint64_t events = 0, checks = 0, skipped = 0, violations = 0, unmet = 0;
    int programs_hit = 0;
    for ( auto& s : subjects )
    {
        const Stats& st = s.runs.at( PorMode::SourceSum ).stats;
        events += st.covered_events;
        checks += st.dominance_checks;
        skipped += st.dominance_skipped;
        violations += st.dominance_violations;
        unmet += st.dominance_unmet;
        programs_hit += st.dominance_violations > 0;
    }
    return { violations == 0 && skipped == 0,
             std::to_string( checks ) + " covered-node events compared (" + std::to_string( skipped ) +
                 " skipped), " + std::to_string( violations ) + " per-path additions missing from summary additions in " +
                 std::to_string( programs_hit ) + " programs, " + std::to_string( unmet ) +
                 " race obligations left without an initial in the summary-mode source set" };
}

SigTree random_tree( std::mt19937& rng, int max_depth, int max_degree )
{
    SigTree tree;
    std::uniform_int_distribution< int > thread( 0, 3 ), mask( 0, 7 ), degree( 0, max_degree );
    auto vars = [ & ] {
        std::vector< int > out;
        int m = mask( rng );
        for ( int v = 0; v < 3; ++v )
            if ( m & ( 1 << v ) )
                out.push_back( v );
        return out;
    };
    tree.out.emplace_back();
    std::vector< std::pair< int, int > > stack{ { 0, 0 } };
    while ( !stack.empty() )
    {
        auto [ n, depth ] = stack.back();
        stack.pop_back();
        if ( depth == max_depth )
            continue;
        int k = degree( rng );
        for ( int i = 0; i < k; ++i )
        {
            int c = static_cast< int >( tree.out.size() );
            tree.out.emplace_back();
            tree.out[ n ].push_back( { Signature{ thread( rng ), vars(), vars() }, c } );
            stack.push_back( { c, depth + 1 } );
        }
    }
    return tree;
}

Line summary_algebra()
{
    std::mt19937 rng( 20240 );
    int violations = 0, nodes = 0;
    for ( int i = 0; i < summary_trees; ++i )
    {
        SigTree t = random_tree( rng, 5, 6 );
        for ( int n = 0; n < static_cast< int >( t.out.size() ); ++n )
        {
            std::set< Signature > per_path;
            NodeSummary exact;
            for ( const auto& p : t.paths( n ) )
            {
                PathSum ps = path_sum( p );
                exact.insert( ps );
                per_path.insert( ps.begin(), ps.end() );
            }
            NodeSummary edgewise = t.node_summary( n );
            violations += edgewise != exact || entries( edgewise ) != per_path;
            ++nodes;
        }
    }

    constexpr int x = 0, y = 1;
    SigTree fixture;
    fixture.out.resize( 5 );
    fixture.out[ 0 ] = { { { 2, { y }, {} }, 1 }, { { 3, {}, { x } }, 3 } };
    fixture.out[ 1 ] = { { { 2, {}, { x } }, 2 } };
    fixture.out[ 3 ] = { { { 2, {}, { x } }, 4 } };
    bool fixture_ok = entries( fixture.node_summary( 0 ) ) == std::set< Signature >{ { 2, { y }, { x } }, { 3, {}, { x } } };

    return { violations == 0 && fixture_ok, std::to_string( summary_trees ) + " trees, " + std::to_string( nodes ) +
                                                 " nodes, " + std::to_string( violations ) +
                                                 " edge-wise/per-path differences; covering-node fixture " +
                                                 ( fixture_ok ? "{(t2,{y},{x}), (t3,{},{x})}" : "wrong" ) };
}

Line audit_safe_runs( std::vector< Subject >& subjects )
{
    int audited = 0, failed = 0;
    std::string first;
    for ( auto& s : subjects )
        for ( auto& [ m, r ] : s.runs )
        {
            if ( r.verdict.kind != VerdictKind::Safe )
                continue;
            BuiltinSolver fresh;
            AuditReport a = audit( r.art, s.prog, fresh );
            ++audited;
            if ( !a.ok() )
            {
                if ( !failed )
                    first = "; first failure " + s.name + " " + to_string( m );
                ++failed;
            }
        }
    return { failed == 0, std::to_string( audited ) + " SAFE runs audited, " + std::to_string( failed ) + " failed" + first };
}

Line interpolant_validity( std::vector< Subject >& subjects )
{
    uint64_t chains = 0, steps = 0, refinements = 0;
    int failures = 0;
    std::string first;
    for ( auto& s : subjects )
        for ( auto& [ m, r ] : s.runs )
        {
            chains += r.stats.interpolant_chains;
            steps += r.stats.interpolant_steps_checked;
            refinements += r.stats.refinements;
            if ( r.interpolant_failure )
            {
                if ( !failures )
                    first = "; " + s.name + ": " + r.error;
                ++failures;
            }
        }
    return { failures == 0 && chains >= refinements,
             std::to_string( chains ) + " chains over " + std::to_string( refinements ) + " refinements, " +
                 std::to_string( steps ) + " steps re-checked, " + std::to_string( failures ) + " failures" + first };
}

Line reduction_effect( std::vector< Subject >& subjects )
{
    bool ok = true;
    std::ostringstream text;
    for ( int n = 2; n <= 5; ++n )
    {
        Program p = load_program_file( test::corpus_file( "indep_writers_" + std::to_string( n ) ) );
        Run none = verify( p, PorMode::None );
        Run src = verify( p, PorMode::Source );
        uint64_t product = 1, actions = 0;
        for ( const auto& t : p.threads )
        {
            uint64_t k = 0;
            for ( const auto& a : p.actions )
                k += a.thread == t.id;
            product *= k + 1;
            actions += k;
        }
        size_t maximal = explored_executions( src.art, p, 100 ).size();
        bool row = none.stats.nodes >= product && maximal == 1 && src.stats.nodes == actions + 1;
        ok = ok && row;
        text << "n=" << n << " none " << none.stats.nodes << " (>= " << product << "), source " << src.stats.nodes
             << " nodes/" << maximal << " maximal path; ";
    }
    int worse = 0;
    std::string which;
    for ( auto& s : subjects )
    {
        if ( !s.corpus )
            continue;
        uint64_t a = s.runs.at( PorMode::SourceSum ).stats.nodes, b = s.runs.at( PorMode::None ).stats.nodes;
        if ( a > b )
        {
            ++worse;
            which += " " + s.name + " (" + std::to_string( a ) + " > " + std::to_string( b ) + ")";
        }
    }
    ok = ok && worse == 0;
    text << "corpus programs with nodes(source-sum) > nodes(none): " << worse << which;
    return { ok, text.str() };
}

int run_cli( const std::string& args )
{
    std::string cmd = std::string( ABPRESS_CLI ) + " " + args + " > /dev/null 2>&1";
    int status = std::system( cmd.c_str() );
    return WIFEXITED( status ) ? WEXITSTATUS( status ) : -1;
}

Line unsoundness_demo()
{
    std::string path = test::corpus_file( "cover_hides_race" );
    Program p = load_program_file( path );
    OracleResult o = enumerate( p, 0 );
    Run sound = verify( p, PorMode::SourceSum );
    Run unsound = verify( p, PorMode::SourceSum, false, true );

    // Node ids agree up to the point where the unsound run stops.
    int missed = 0;
    for ( const auto& n : unsound.art.nodes )
        for ( int t : sound.art.nodes[ n.id ].sset )
            missed += !n.sset.count( t );

    auto sound_keys = explored_keys( p, sound.art );
    auto unsound_keys = explored_keys( p, unsound.art );
    int lost = 0;
    for ( const auto& k : o.traces )
        lost += !unsound_keys.count( k ) && sound_keys.count( k );
    int gate = run_cli( "diff --unsound-stop-at-cover " + path );
    int gate_sound = run_cli( "diff " + path );
    bool ok = missed > 0 && lost > 0 && gate == 1 && gate_sound == 0;
    return { ok, std::to_string( missed ) + " sset additions missed, " + std::to_string( lost ) +
                     " oracle traces explored only by source-sum; diff exits " + std::to_string( gate ) +
                     " with the unsound flag and " + std::to_string( gate_sound ) + " without" };
}

Line determinism( std::vector< Subject >& subjects )
{
    int runs = 0, differ = 0;
    std::string which;
    for ( auto& s : subjects )
    {
        if ( !s.corpus )
            continue;
        for ( auto& [ m, r ] : s.runs )
        {
            Run again = verify( s.prog, m, m == PorMode::SourceSum );
            ++runs;
            if ( again.json != r.json || again.dot != r.dot )
            {
                ++differ;
                which += " " + s.name + "/" + to_string( m );
            }
        }
    }
    return { differ == 0, std::to_string( runs ) + " corpus runs repeated, " + std::to_string( differ ) +
                              " with differing stats JSON or DOT" + which };
}

} // namespace

int main()
{
    std::vector< Subject > subjects;
    for ( const auto& c : test::corpus() )
    {
        Subject s;
        s.name = c.name;
        s.expect = c.expect;
        s.prog = load_program_file( c.path );
        s.corpus = true;
        subjects.push_back( std::move( s ) );
    }
    for ( int seed = 0; seed < random_programs; ++seed )
    {
        Subject s;
        s.name = "seed" + std::to_string( seed );
        s.prog = load_program( random_program( seed ) );
        subjects.push_back( std::move( s ) );
    }

    auto start = Clock::now();
    for ( auto& s : subjects )
    {
        s.oracle = enumerate( s.prog, 0 );
        for ( auto m : all_modes )
            s.runs[ m ] = verify( s.prog, m, m == PorMode::SourceSum );
    }
    double verify_seconds = seconds_since( start );

    std::vector< Line > lines;
    lines.push_back( racy_sum_reproduction() );
    report( 1, "racy-sum reproduction", lines.back() );
    lines.push_back( oracle_equivalence( subjects, verify_seconds ) );
    report( 2, "oracle equivalence", lines.back() );
    lines.push_back( trace_completeness( subjects ) );
    report( 3, "trace-representative completeness", lines.back() );
    lines.push_back( summarization_soundness( subjects ) );
    report( 4, "summarization soundness", lines.back() );
    lines.push_back( summary_algebra() );
    report( 5, "summary algebra", lines.back() );
    lines.push_back( audit_safe_runs( subjects ) );
    report( 6, "well-labeledness audit", lines.back() );
    lines.push_back( interpolant_validity( subjects ) );
    report( 7, "interpolant validity", lines.back() );
    lines.push_back( reduction_effect( subjects ) );
    report( 8, "reduction effect", lines.back() );
    lines.push_back( unsoundness_demo() );
    report( 9, "unsoundness demonstration", lines.back() );
    lines.push_back( determinism( subjects ) );
    report( 10, "determinism", lines.back() );

    int failed = 0;
    for ( const auto& l : lines )
        failed += !l.pass;
    std::cout << ( lines.size() - failed ) << "/" << lines.size() << " criteria passed" << std::endl;
    return failed ? 1 : 0;
}
