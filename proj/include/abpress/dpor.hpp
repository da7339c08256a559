#pragma once

#include "abpress/summary.hpp"

#include <set>
#include <utility>
#include <vector>

namespace abpress {

class Program;

/// One step of an explored path, or a ghost built from a summary entry.
struct Step
{
    int thread = 0;
    std::vector< int > reads;
    std::vector< int > writes;
    bool checker = false;
};

Step step_of( const Program& prog, int action );
Step ghost( const Signature& e );

bool dependent( const Step& a, const Step& b );

/// Happens-before over a path, built with per-thread vector clocks and
/// per-variable last-access tracking.
class HbIndex
{
public:
    HbIndex( const std::vector< Step >& path, int num_threads );

    /// i ->_pi j (strict).
    [[nodiscard]] bool hb( int i, int j ) const;
    [[nodiscard]] const std::vector< int >& clock( int i ) const { return _clock[ i ]; }
    [[nodiscard]] size_t size() const { return _clock.size(); }

private:
    std::vector< int > _thread;
    std::vector< std::vector< int > > _clock; // per thread: latest step index ordered before-or-equal
};

/// Pairs (i, j), i < j, of different threads with i -> j and no k between
/// them with i -> k -> j. Steps of checker threads never race.
std::vector< std::pair< int, int > > races( const std::vector< Step >& path, const HbIndex& hb );

/// Indices strictly between u and v that do not happen after u.
std::vector< int > not_dep( const HbIndex& hb, int u, int v );

/// Threads whose first step in `seq` has no happens-before predecessor in
/// `seq`.
std::set< int > initials( const std::vector< Step >& seq );

/// initials(seq) plus every thread in `next` whose next step is independent
/// of all of `seq`. `next` lists, per enabled thread, the union footprint
/// of its actions at the node.
std::set< int > weak_initials( const std::vector< Step >& seq, const std::vector< Step >& next );

} // namespace abpress
