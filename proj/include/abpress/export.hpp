#pragma once

#include "abpress/art.hpp"

#include <string>

namespace abpress {

std::string to_dot( const Art& art, const Program& prog );
std::string stats_json( const Verdict& v, const Stats& s ); // one line, fixed key order
std::string dump_summaries( const std::map< int, NodeSummary >& summaries, const Program& prog );

} // namespace abpress
