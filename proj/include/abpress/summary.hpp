#pragma once

#include <compare>
#include <set>
#include <string>
#include <vector>

namespace abpress {

class Program;

/// Owner thread plus the shared variables read and written (sorted).
struct Signature
{
    int thread = 0;
    std::vector< int > reads;
    std::vector< int > writes;

    auto operator<=>( const Signature& ) const = default;
};

Signature sig( const Program& prog, int action );

/// Summary of one path: at most one entry per thread, sorted by thread.
using PathSum = std::vector< Signature >;

/// sum(e.p') from Sig(e) and sum(p'). Same-thread entries merge; other
/// threads' accesses to a variable that `s` writes are shadowed, and
/// entries left with no accesses are dropped.
PathSum combine( const Signature& s, const PathSum& suffix );

/// Node summary kept as the set of distinct path summaries below a node.
/// A leaf has exactly one (empty) path.
using NodeSummary = std::set< PathSum >;

NodeSummary leaf_summary();
NodeSummary combine( const Signature& s, const NodeSummary& suffix );

/// The flat entry set, i.e. the union of all path summaries.
std::set< Signature > entries( const NodeSummary& s );

bool summary_races( const Signature& a, const Signature& b );

/// Generic labelled tree for exercising the summary algebra.
struct SigTree
{
    struct Edge
    {
        Signature sig;
        int child;
    };
    std::vector< std::vector< Edge > > out; // node 0 is the root

    /// Edge-wise bottom-up node summary.
    [[nodiscard]] NodeSummary node_summary( int n ) const;
    /// Every root-to-leaf edge sequence starting at `n`.
    [[nodiscard]] std::vector< std::vector< Signature > > paths( int n ) const;
};

/// sum(p) of an explicit edge sequence, folded right to left.
PathSum path_sum( const std::vector< Signature >& path );

std::string to_string( const Signature& s, const std::vector< std::string >& vars, const std::vector< std::string >& threads );

} // namespace abpress
