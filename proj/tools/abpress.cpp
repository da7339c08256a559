#include "abpress/art.hpp"
#include "abpress/export.hpp"
#include "abpress/oracle.hpp"
#include "abpress/random_program.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>

using namespace abpress;

namespace {

enum Exit { ExitSafe = 0, ExitUnsafe = 1, ExitLimit = 2, ExitUsage = 3 };

struct Config
{
    std::string input;
    std::string por = "source-sum";
    std::string solver = "builtin";
    size_t max_nodes = 200000;
    double timeout = 0; // seconds
    int loop_bound = 2;
    std::string dot;
    std::string stats;
    std::string smt_log;
    bool dump_summaries = false;
    bool log_races = false;
    bool json = false;
    bool unsound = false;
    bool timing = false;
    uint64_t seed = 0;
};

int exit_code( VerdictKind k )
{
    switch ( k )
    {
    case VerdictKind::Safe: return ExitSafe;
    case VerdictKind::Unsafe: return ExitUnsafe;
    case VerdictKind::ResourceLimit: return ExitLimit;
    }
    return ExitUsage;
}

void write_file( const std::string& path, const std::string& text )
{
    std::ofstream out( path );
    if ( !out )
        throw std::runtime_error( "cannot write " + path );
    out << text;
}

std::string state_string( const Program& prog, const std::vector< int64_t >& state )
{
    std::string s;
    for ( size_t i = 0; i < state.size(); ++i )
        s += ( i ? ", " : "" ) + prog.vars[ i ] + "=" + std::to_string( state[ i ] );
    return "[" + s + "]";
}

void print_trace( const Program& prog, const std::vector< TraceStep >& trace )
{
    for ( const auto& st : trace )
        std::cout << "  " << std::left << std::setw( 28 ) << prog.action_label( st.action ) << state_string( prog, st.state )
                  << "\n";
}

EngineConfig engine_config( const Config& cfg, PorMode mode )
{
    EngineConfig ec;
    ec.por = mode;
    ec.max_nodes = cfg.max_nodes;
    ec.timeout = std::chrono::milliseconds( static_cast< int64_t >( cfg.timeout * 1000 ) );
    ec.unsound_stop_at_cover = cfg.unsound;
    ec.timing = cfg.timing;
    return ec;
}

PorMode mode_of( const Config& cfg )
{
    auto m = parse_por_mode( cfg.por );
    if ( !m )
        throw CLI::ValidationError( "--por", "unknown mode " + cfg.por );
    return *m;
}

int run_verify( const Config& cfg )
{
    Program prog = load_program_file( cfg.input );
    auto solver = make_solver( cfg.solver );
    std::ofstream smt;
    if ( !cfg.smt_log.empty() )
    {
        smt.open( cfg.smt_log );
        solver->set_query_log( &smt );
    }
    EngineConfig ec = engine_config( cfg, mode_of( cfg ) );
    if ( cfg.log_races )
        ec.race_log = &std::cerr;
    Engine engine( prog, *solver, ec );
    Verdict v = engine.run();

    switch ( v.kind )
    {
    case VerdictKind::Safe: std::cout << "SAFE\n"; break;
    case VerdictKind::Unsafe:
        std::cout << "UNSAFE\n";
        print_trace( prog, v.trace );
        break;
    case VerdictKind::ResourceLimit: std::cout << "UNKNOWN (limit: " << v.reason << ")\n"; break;
    }

    if ( !cfg.dot.empty() )
        write_file( cfg.dot, to_dot( engine.art(), prog ) );
    if ( !cfg.stats.empty() )
        write_file( cfg.stats, stats_json( v, engine.stats() ) + "\n" );
    if ( cfg.json )
        std::cout << stats_json( v, engine.stats() ) << "\n";
    if ( cfg.dump_summaries )
        std::cout << dump_summaries( engine.summaries(), prog );
    return exit_code( v.kind );
}

int run_oracle( const Config& cfg )
{
    Program prog = load_program_file( cfg.input );
    OracleResult r;
    try
    {
        r = enumerate( prog, cfg.loop_bound );
    }
    catch ( const StateBudgetExceeded& e )
    {
        std::cerr << "oracle: " << e.what() << "\n";
        return ExitLimit;
    }
    if ( cfg.json )
    {
        nlohmann::ordered_json j;
        j[ "verdict" ] = to_string( r.verdict );
        j[ "interleavings" ] = r.interleavings;
        j[ "traces" ] = r.traces.size();
        j[ "states" ] = r.states;
        if ( r.error_trace )
        {
            std::vector< std::string > t;
            for ( int a : *r.error_trace )
                t.push_back( prog.action_label( a ) );
            j[ "error_trace" ] = t;
        }
        std::cout << j.dump() << "\n";
    }
    else
    {
        std::cout << to_string( r.verdict ) << ( r.bound_hit ? " (loop bound reached)" : "" ) << "\n"
                  << "interleavings: " << r.interleavings << "\ntraces: " << r.traces.size() << "\nstates: " << r.states
                  << "\n";
        if ( r.error_trace )
        {
            auto rep = replay( prog, *r.error_trace );
            for ( size_t i = 0; i < r.error_trace->size(); ++i )
                std::cout << "  " << std::left << std::setw( 28 ) << prog.action_label( ( *r.error_trace )[ i ] )
                          << state_string( prog, rep.states[ i + 1 ].vals ) << "\n";
        }
    }
    return exit_code( r.verdict );
}

int run_diff( const Config& cfg )
{
    Program prog = load_program_file( cfg.input );
    std::optional< OracleResult > oracle;
    try
    {
        oracle = enumerate( prog, cfg.loop_bound );
    }
    catch ( const StateBudgetExceeded& e )
    {
        std::cerr << "oracle: " << e.what() << "\n";
    }

    bool fail = false;
    std::cout << std::left << std::setw( 14 ) << "mode" << std::setw( 9 ) << "verdict" << std::right << std::setw( 8 )
              << "nodes" << std::setw( 8 ) << "covers" << std::setw( 8 ) << "ssets" << std::setw( 9 ) << "solver"
              << std::setw( 8 ) << "traces" << "\n";
    for ( auto mode : { PorMode::None, PorMode::Source, PorMode::SourceSum, PorMode::SourcePaths } )
    {
        auto solver = make_solver( cfg.solver );
        EngineConfig ec = engine_config( cfg, mode );
        ec.unsound_stop_at_cover = cfg.unsound && mode == PorMode::SourceSum;
        ec.check_dominance = mode == PorMode::SourceSum && !ec.unsound_stop_at_cover;
        Engine engine( prog, *solver, ec );
        Verdict v = engine.run();

        std::string traces = "-";
        bool keys_checked = oracle && !oracle->bound_hit && v.kind == VerdictKind::Safe && oracle->verdict == VerdictKind::Safe;
        bool keys_ok = true;
        if ( keys_checked )
        {
            std::set< TraceKey > keys;
            for ( const auto& e : explored_executions( engine.art(), prog, 1000000 ) )
                keys.insert( canonical_trace( prog, e ) );
            keys_ok = keys == oracle->traces;
            traces = std::to_string( keys.size() );
        }
        const Stats& s = engine.stats();
        std::cout << std::left << std::setw( 14 ) << to_string( mode ) << std::setw( 9 ) << to_string( v.kind ) << std::right
                  << std::setw( 8 ) << s.nodes << std::setw( 8 ) << s.covers << std::setw( 8 ) << s.sset_additions
                  << std::setw( 9 ) << s.solver_calls << std::setw( 8 ) << traces << "\n";

        if ( oracle && oracle->verdict != VerdictKind::ResourceLimit && v.kind != VerdictKind::ResourceLimit &&
             v.kind != oracle->verdict )
        {
            std::cout << "  verdict differs from the oracle\n";
            fail = true;
        }
        if ( !keys_ok )
        {
            std::cout << "  explored traces differ from the oracle's\n";
            fail = true;
        }
        if ( s.dominance_violations || s.dominance_unmet )
        {
            std::cout << "  dominance: " << s.dominance_violations << " missing additions, " << s.dominance_unmet
                      << " unmet requirements over " << s.dominance_checks << " covered events";
            if ( s.dominance_skipped )
                std::cout << " (" << s.dominance_skipped << " skipped)";
            std::cout << "\n";
            fail = true;
        }
    }
    if ( oracle )
        std::cout << std::left << std::setw( 14 ) << "oracle" << std::setw( 9 ) << to_string( oracle->verdict ) << std::right
                  << std::setw( 8 ) << oracle->states << std::setw( 8 ) << "-" << std::setw( 8 ) << "-" << std::setw( 9 )
                  << "-" << std::setw( 8 ) << oracle->traces.size() << "\n";
    return fail ? ExitUnsafe : ExitSafe;
}

int run_cfg( const Config& cfg )
{
    std::cout << load_program_file( cfg.input ).dump_cfg();
    return 0;
}

int run_gen( const Config& cfg )
{
    std::cout << random_program( cfg.seed );
    return 0;
}

} // namespace

int main( int argc, char** argv )
{
    Config cfg;
    CLI::App app{ "abpress: lazy abstraction with partial-order reduction for shared-memory programs" };
    app.require_subcommand( 1 );

    auto add_input = [&]( CLI::App* sub ) { sub->add_option( "file", cfg.input, "program file" )->required(); };
    auto add_engine = [&]( CLI::App* sub ) {
        sub->add_option( "--por", cfg.por, "none | source | source-sum | source-paths" )->capture_default_str();
        sub->add_option( "--solver", cfg.solver, "builtin | external:<command>" )->capture_default_str();
        sub->add_option( "--max-nodes", cfg.max_nodes, "ART node budget" )->capture_default_str();
        sub->add_option( "--timeout", cfg.timeout, "seconds, 0 for none" );
        sub->add_flag( "--timing", cfg.timing, "record wall-clock times in the stats" );
        sub->add_flag( "--unsound-stop-at-cover", cfg.unsound )->group( "" );
    };

    auto* verify = app.add_subcommand( "verify", "verify a program" );
    add_input( verify );
    add_engine( verify );
    verify->add_option( "--dot", cfg.dot, "write the final ART as DOT" );
    verify->add_option( "--stats", cfg.stats, "write stats JSON" );
    verify->add_flag( "--dump-summaries", cfg.dump_summaries, "print node summaries" );
    verify->add_flag( "--log-races", cfg.log_races, "print detected races to stderr" );
    verify->add_option( "--log-smt", cfg.smt_log, "write solver queries" );
    verify->add_flag( "--json", cfg.json, "print stats JSON" );

    auto* oracle = app.add_subcommand( "oracle", "enumerate every interleaving concretely" );
    add_input( oracle );
    oracle->add_option( "--loop-bound", cfg.loop_bound, "location re-entries allowed per thread" )->capture_default_str();
    oracle->add_flag( "--json", cfg.json, "print JSON" );

    auto* diff = app.add_subcommand( "diff", "compare every mode against the oracle" );
    add_input( diff );
    add_engine( diff );
    diff->add_option( "--loop-bound", cfg.loop_bound, "oracle loop bound" )->capture_default_str();

    auto* cfg_cmd = app.add_subcommand( "cfg", "print the lowered control-flow graph" );
    add_input( cfg_cmd );

    auto* gen = app.add_subcommand( "gen", "print a random loop-free program" );
    gen->add_option( "--seed", cfg.seed, "generator seed" )->capture_default_str();

    try
    {
        app.parse( argc, argv );
    }
    catch ( const CLI::CallForHelp& e )
    {
        return app.exit( e );
    }
    catch ( const CLI::ParseError& e )
    {
        app.exit( e );
        return ExitUsage;
    }

    try
    {
        if ( *verify )
            return run_verify( cfg );
        if ( *oracle )
            return run_oracle( cfg );
        if ( *diff )
            return run_diff( cfg );
        if ( *cfg_cmd )
            return run_cfg( cfg );
        if ( *gen )
            return run_gen( cfg );
    }
    catch ( const LangError& e )
    {
        std::cerr << cfg.input << ":" << e.what() << "\n";
    }
    catch ( const CLI::ValidationError& e )
    {
        std::cerr << e.what() << "\n";
    }
    catch ( const std::exception& e )
    {
        std::cerr << "error: " << e.what() << "\n";
    }
    return ExitUsage;
}
