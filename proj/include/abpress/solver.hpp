#pragma once

#include "abpress/formula.hpp"

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>

namespace abpress {

struct SolverFailure : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

using Model = std::map< VarRef, int64_t >;

struct SatResult
{
    bool sat = false;
    Model model; // total over the query's variables when sat
};

struct SolverStats
{
    uint64_t calls = 0;
    std::chrono::nanoseconds time{ 0 };
};

/// Satisfiability for quantifier-free linear integer arithmetic.
/// Not reentrant per instance: one query at a time.
class Solver
{
public:
    virtual ~Solver() = default;

    SatResult check( const Formula& f );
    bool is_sat( const Formula& f ) { return check( f ).sat; }
    /// Validity of `a => b`.
    bool implies( const Formula& a, const Formula& b );

    [[nodiscard]] const SolverStats& stats() const { return _stats; }
    void reset_stats() { _stats = {}; }

    /// Every query is appended as one `(assert ...)` line.
    void set_query_log( std::ostream* log ) { _log = log; }

    [[nodiscard]] virtual std::string name() const = 0;

protected:
    virtual SatResult do_check( const Formula& f ) = 0;

private:
    SolverStats _stats;
    std::ostream* _log = nullptr;
};

/// DPLL over atom literals with a Fourier-Motzkin + branch-and-bound
/// theory check. Stateless between queries.
class BuiltinSolver final : public Solver
{
public:
    [[nodiscard]] std::string name() const override { return "builtin"; }

protected:
    SatResult do_check( const Formula& f ) override;
};

/// Talks SMT-LIB2 to a child process (e.g. `z3 -in`). One `(set-logic
/// QF_LIA)` prologue, then `(push)`/`(pop)` around every query.
class SmtLibSolver final : public Solver
{
public:
    explicit SmtLibSolver( std::string command, std::chrono::milliseconds timeout = std::chrono::seconds( 30 ) );
    ~SmtLibSolver() override;

    SmtLibSolver( const SmtLibSolver& ) = delete;
    SmtLibSolver& operator=( const SmtLibSolver& ) = delete;

    [[nodiscard]] std::string name() const override { return "smtlib:" + _command; }

protected:
    SatResult do_check( const Formula& f ) override;

private:
    void start();
    void send( const std::string& text );
    std::string read_sexpr();

    std::string _command;
    std::chrono::milliseconds _timeout;
    int _pid = -1;
    int _to_child = -1;
    int _from_child = -1;
    std::string _buffer;
};

/// `builtin` or `external:<command line>`.
std::unique_ptr< Solver > make_solver( const std::string& spec );

std::string smtlib_var( VarRef v );
std::string to_smtlib( const Formula& f );
std::string to_smtlib( const LinTerm& t );

} // namespace abpress
