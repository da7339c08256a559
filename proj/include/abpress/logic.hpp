#pragma once

#include "abpress/model.hpp"
#include "abpress/solver.hpp"

#include <stdexcept>
#include <vector>

namespace abpress {

struct InternalError : std::logic_error
{
    using std::logic_error::logic_error;
};

/// Init^(0) followed by R_i shifted i frames, one conjunct per step.
struct PathFormula
{
    std::vector< Formula > conjuncts;

    [[nodiscard]] Formula conjunction() const { return Formula::conj( conjuncts ); }
};

PathFormula path_formula( const Program& prog, const std::vector< int >& actions );

/// Weakest precondition of a current-frame formula.
Formula wp( const Program& prog, int action, const Formula& post );

struct Interpolation
{
    bool feasible = false;
    Model model;                      // frames 0..N when feasible
    std::vector< Formula > itps;      // A_0..A_N over frame 0 when infeasible
};

struct InterpolationStats
{
    uint64_t chains = 0;
    uint64_t checked_steps = 0;
};

/// WP-chain sequent interpolants for an error path. With `check` set, every
/// side condition is re-verified and InternalError thrown on failure.
Interpolation interpolate( const Program& prog, const std::vector< int >& actions, Solver& solver, bool check,
                           InterpolationStats* stats = nullptr );

/// Checks A_{i-1} && R_i => A_i', A_N == false and Init => A_0.
bool valid_chain( const Program& prog, const std::vector< int >& actions, const std::vector< Formula >& itps, Solver& solver );

} // namespace abpress
