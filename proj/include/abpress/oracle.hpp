#pragma once

#include "abpress/art.hpp"
#include "abpress/model.hpp"

#include <compare>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace abpress {

/// Foata normal form: each level holds the (sorted) action ids whose
/// dependent predecessors all sit in earlier levels.
struct TraceKey
{
    std::vector< std::vector< int > > levels;

    auto operator<=>( const TraceKey& ) const = default;
    [[nodiscard]] std::string to_string( const Program& prog ) const;
};

TraceKey canonical_trace( const Program& prog, const std::vector< int >& interleaving );

struct ConcreteState
{
    std::vector< int64_t > vals;
    GlobalLoc loc;
    size_t steps = 0;
};

struct StateBudgetExceeded : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct OracleResult
{
    VerdictKind verdict = VerdictKind::Safe;
    uint64_t interleavings = 0;
    uint64_t states = 0; // distinct (locations, valuation) pairs visited
    std::set< TraceKey > traces;
    std::optional< std::vector< int > > error_trace;
    bool bound_hit = false;
};

/// Depth-first search over every schedule from the initial state. A
/// thread may enter each of its locations at most `loop_bound + 1` times;
/// schedules cut by that bound count as neither safe nor maximal.
OracleResult enumerate( const Program& prog, int loop_bound, uint64_t max_interleavings = 5000000 );

struct ReplayResult
{
    std::vector< ConcreteState > states; // initial state first
    std::optional< size_t > assume_violated;
    bool reaches_error = false;
};

ReplayResult replay( const Program& prog, const std::vector< int >& actions );

} // namespace abpress
