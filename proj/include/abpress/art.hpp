#pragma once

#include "abpress/dpor.hpp"
#include "abpress/logic.hpp"
#include "abpress/model.hpp"
#include "abpress/solver.hpp"
#include "abpress/summary.hpp"

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

namespace abpress {

/// none: no reduction. source: source-set DPOR, covering disabled.
/// source-sum: DPOR with covering and node summaries. source-paths: like
/// source-sum but enumerates the suffix paths below the coveree instead of
/// consulting its summary.
enum class PorMode { None, Source, SourceSum, SourcePaths };

const char* to_string( PorMode m );
std::optional< PorMode > parse_por_mode( const std::string& s );

enum class NodeStatus { Open, Expanded, Final };

struct ArtNode
{
    int id = 0;
    GlobalLoc loc;
    Formula phi;
    int parent = -1;
    int action = -1; // action on the edge from the parent
    std::vector< int > children;
    int covered_by = -1;
    std::set< int > expanded;
    std::set< int > sset;
    NodeStatus status = NodeStatus::Open;
    bool error = false;
    int depth = 0;
};

struct Art
{
    std::vector< ArtNode > nodes;

    [[nodiscard]] const ArtNode& root() const { return nodes.front(); }
    /// Covered directly or through an ancestor.
    [[nodiscard]] bool covered( int n ) const;
    /// Below a covered node (the node itself excluded).
    [[nodiscard]] bool dormant( int n ) const;
    [[nodiscard]] std::vector< int > path_to( int n ) const; // root first
    [[nodiscard]] std::vector< int > actions_to( int n ) const;
    [[nodiscard]] bool descends( int n, int ancestor ) const; // ancestor ->* n
    [[nodiscard]] int child_with( int n, int action ) const;
};

enum class VerdictKind { Safe, Unsafe, ResourceLimit };

const char* to_string( VerdictKind k );

struct TraceStep
{
    int thread = 0;
    int action = 0;
    std::vector< int64_t > state;
};

struct Verdict
{
    VerdictKind kind = VerdictKind::Safe;
    std::vector< TraceStep > trace;
    std::string reason;
};

struct Stats
{
    uint64_t nodes = 0;
    uint64_t edges = 0;
    uint64_t covers = 0;
    uint64_t refinements = 0;
    uint64_t solver_calls = 0;
    double solver_time_ms = 0;
    uint64_t sset_additions = 0;
    uint64_t races = 0;
    double time_ms = 0;

    uint64_t covered_events = 0;
    uint64_t dominance_checks = 0;
    uint64_t dominance_skipped = 0;    // suffix paths beyond path_cap
    uint64_t dominance_violations = 0; // per-path addition missing from the summary additions
    uint64_t dominance_unmet = 0;      // per-path backtrack requirement the summary sset leaves unmet
    uint64_t interpolant_chains = 0;
    uint64_t interpolant_steps_checked = 0;
};

struct EngineConfig
{
    PorMode por = PorMode::SourceSum;
    bool unsound_stop_at_cover = false;
    size_t max_nodes = 200000;
    std::chrono::milliseconds timeout{ 0 }; // zero: none
    bool check_interpolants = true;
    /// At every covered-node event also run the per-path baseline from the
    /// same snapshot and compare additions node by node.
    bool check_dominance = false;
    size_t path_cap = 200000;
    bool timing = false;
    std::ostream* race_log = nullptr;
};

/// One covered-node event where the per-path baseline added a thread that
/// the summary-driven analysis did not. `unmet` marks the stronger failure:
/// no initial of the per-path race sequence is in the summary-mode sset.
struct DominanceViolation
{
    int covered = 0;
    int coveree = 0;
    int node = 0;
    int thread = 0;
    bool unmet = false;
};

/// A backtrack obligation from one race: some thread of `initials` must be
/// in the source set of `node`.
struct Requirement
{
    int node = 0;
    std::set< int > initials;
};

/// Thrown when the per-path baseline exceeds `path_cap` suffix paths.
struct PathExplosion : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct EngineError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

class Engine
{
public:
    Engine( const Program& prog, Solver& solver, EngineConfig cfg = {} );

    Verdict run();

    [[nodiscard]] const Art& art() const { return _art; }
    [[nodiscard]] const Stats& stats() const { return _stats; }
    [[nodiscard]] const Program& program() const { return _prog; }
    [[nodiscard]] const EngineConfig& config() const { return _cfg; }
    [[nodiscard]] const std::vector< DominanceViolation >& violations() const { return _violations; }

    /// Finalized node summaries of the last quiescent state.
    [[nodiscard]] const std::map< int, NodeSummary >& summaries() const { return _summaries; }
    [[nodiscard]] std::map< int, NodeSummary > compute_summaries() const;

private:
    bool uses_covering() const { return _cfg.por != PorMode::Source; }
    bool uses_dpor() const { return _cfg.por != PorMode::None; }

    int make_node( int parent, int action );
    void enqueue( int n );
    void enqueue_backtrack( int n );
    void close( int v );
    bool refine( int v, Verdict& out );
    void expand( int v );
    void expand_thread( int t, int v );
    std::optional< int > choose( int v ) const;
    void backtrack_path( int v );
    bool covered_event( int v ); // true when sset grew
    void cover( int v, int w );
    void uncover( int v );
    void reopen( int n );
    void drop_covers_of( int n );
    void kill( int n );
    bool may_block( int v, int t ) const;
    void widen( int v );

    std::vector< Step > path_steps( int v ) const;
    /// Adds to `sset` (indexed by node) following ComputeBT; returns the
    /// thread added, if any.
    std::optional< int > compute_bt( const std::vector< int >& nodes, std::vector< Step > seq, int u_index,
                                     std::map< int, std::set< int > >& sset ) const;
    void apply_additions( const std::map< int, std::set< int > >& before, const std::map< int, std::set< int > >& after );

    std::map< int, std::set< int > > summary_additions( int v, int z, const std::map< int, std::set< int > >& start ) const;
    std::map< int, std::set< int > > path_additions( int v, int z, const std::map< int, std::set< int > >& start,
                                                     std::vector< Requirement >* reqs = nullptr ) const;
    std::set< int > usable_initials( int u, const std::vector< Step >& seq ) const;
    void suffix_paths( int z, std::vector< int >& cur, std::vector< std::vector< int > >& out, size_t& budget ) const;

    bool out_of_budget( Verdict& out );
    std::vector< TraceStep > concrete_trace( const std::vector< int >& actions ) const;

    const Program& _prog;
    Solver& _solver;
    EngineConfig _cfg;
    Art _art;
    Stats _stats;
    std::vector< int > _queue;
    std::vector< bool > _queued;
    std::vector< int > _covering; // number of nodes each node covers
    std::map< GlobalLoc, std::vector< int > > _by_loc;
    std::map< int, NodeSummary > _summaries;
    std::vector< DominanceViolation > _violations;
    std::chrono::steady_clock::time_point _start;
    InterpolationStats _itp_stats;
    std::set< std::pair< int, int > > _logged_races;
};

/// Follows `actions` from the root, climbing the covering relation at
/// covered nodes. Returns the matched node per position (root first), or
/// the index of the first action that has no edge.
struct PathCorrespondence
{
    bool covered = false;
    std::vector< int > nodes;
    size_t failed_at = 0;
};

PathCorrespondence covers_path( const Art& art, const std::vector< int >& actions );

/// Like covers_path, but accepts any interleaving equivalent to `actions`
/// under `Program::dependent`. On success `nodes` and `linearization`
/// describe the ART path that was found.
struct TraceCorrespondence
{
    bool covered = false;
    std::vector< int > nodes;
    std::vector< int > linearization;
};

TraceCorrespondence covers_trace( const Art& art, const Program& prog, const std::vector< int >& actions );

/// Concretely feasible maximal executions represented by the ART (covers
/// are unfolded). Stops after `cap` paths.
std::vector< std::vector< int > > explored_executions( const Art& art, const Program& prog, size_t cap );

struct AuditReport
{
    std::vector< std::string > inductiveness;
    std::vector< std::string > covers;
    std::vector< std::string > error_nodes;
    std::vector< std::string > completeness;
    std::vector< std::string > source_sets; // filled only when requested

    [[nodiscard]] bool ok() const
    {
        return inductiveness.empty() && covers.empty() && error_nodes.empty() && completeness.empty() && source_sets.empty();
    }
};

AuditReport audit( const Art& art, const Program& prog, Solver& solver, bool check_source_sets = false,
                   size_t path_cap = 20000 );

} // namespace abpress
