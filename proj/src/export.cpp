#include "abpress/export.hpp"

#include <json.hpp>

#include <sstream>

namespace abpress {

namespace {

std::string escape( const std::string& s )
{
    std::string out;
    for ( char c : s )
    {
        if ( c == '"' || c == '\\' )
            out += '\\';
        out += c;
    }
    return out;
}

} // namespace

std::string to_dot( const Art& art, const Program& prog )
{
    auto name = prog.namer();
    std::ostringstream os;
    os << "digraph art {\n  node [shape=box, fontname=monospace];\n";
    for ( const auto& n : art.nodes )
    {
        os << "  n" << n.id << " [label=\"" << n.id << "\\n" << escape( prog.loc_string( n.loc ) ) << "\\n"
           << escape( n.phi.to_string( name ) ) << "\"";
        if ( n.error )
            os << ", color=red";
        os << "];\n";
    }
    for ( const auto& n : art.nodes )
        if ( n.parent >= 0 )
        {
            const Action& a = prog.actions[ n.action ];
            os << "  n" << n.parent << " -> n" << n.id << " [label=\""
               << escape( prog.threads[ a.thread ].name + ":" + a.instr.to_string( name ) ) << "\"];\n";
        }
    for ( const auto& n : art.nodes )
        if ( n.covered_by >= 0 )
            os << "  n" << n.id << " -> n" << n.covered_by << " [style=dashed];\n";
    os << "}\n";
    return os.str();
}

std::string stats_json( const Verdict& v, const Stats& s )
{
    nlohmann::ordered_json j;
    j[ "verdict" ] = to_string( v.kind );
    j[ "nodes" ] = s.nodes;
    j[ "edges" ] = s.edges;
    j[ "covers" ] = s.covers;
    j[ "refinements" ] = s.refinements;
    j[ "solver_calls" ] = s.solver_calls;
    j[ "solver_time_ms" ] = s.solver_time_ms;
    j[ "sset_additions" ] = s.sset_additions;
    j[ "races" ] = s.races;
    j[ "time_ms" ] = s.time_ms;
    return j.dump();
}

std::string dump_summaries( const std::map< int, NodeSummary >& summaries, const Program& prog )
{
    std::vector< std::string > threads;
    for ( const auto& t : prog.threads )
        threads.push_back( t.name );
    std::ostringstream os;
    for ( const auto& [ id, s ] : summaries )
    {
        os << id << ": {";
        bool first = true;
        for ( const auto& e : entries( s ) )
        {
            os << ( first ? "" : "," ) << to_string( e, prog.vars, threads );
            first = false;
        }
        os << "}\n";
    }
    return os.str();
}

} // namespace abpress
