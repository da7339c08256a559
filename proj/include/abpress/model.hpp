#pragma once

#include "abpress/formula.hpp"
#include "abpress/lang.hpp"

#include <optional>
#include <string>
#include <vector>

namespace abpress {

enum class ActionKind { Assign, Assume, Lock, Unlock };

const char* to_string( ActionKind k );

/// One CFG edge (l, c, l'). Every action is a guard followed by at most one
/// assignment; `instr` is the resulting transition formula over frames 0
/// and 1 with explicit frame equalities.
struct Action
{
    int id = 0;
    int thread = 0;
    int entry = 0;
    int exit = 0;
    ActionKind kind = ActionKind::Assume;
    Formula guard;            // frame 0
    int target = -1;          // assigned variable, -1 for none
    LinTerm rhs;              // frame 0
    Formula instr;            // frames 0/1
    std::vector< int > reads; // sorted
    std::vector< int > writes;
    std::string text; // source-like rendering
};

struct Thread
{
    int id = 0;
    std::string name;
    int num_locations = 0;
    int l0 = 0;
    int l_err = 0;
    bool checker = false;
    std::vector< std::vector< int > > out; // location -> action ids, ascending
};

using GlobalLoc = std::vector< int >;

struct Footprint
{
    std::vector< int > reads;
    std::vector< int > writes;
};

class Program
{
public:
    std::vector< std::string > vars;
    std::vector< int64_t > init;
    std::vector< Thread > threads;
    std::vector< Action > actions;
    int checker = -1; // thread id of the final-assert checker, -1 if none

    [[nodiscard]] GlobalLoc initial() const;
    [[nodiscard]] std::vector< int > enabled( const GlobalLoc& l ) const;
    [[nodiscard]] std::vector< int > next( const GlobalLoc& l, int thread ) const;
    [[nodiscard]] std::vector< int > enabled_threads( const GlobalLoc& l ) const;
    [[nodiscard]] int proc( int action ) const { return actions[ action ].thread; }
    [[nodiscard]] Footprint footprint( int action ) const;
    [[nodiscard]] bool dependent( int a, int b ) const;

    [[nodiscard]] bool is_error( const GlobalLoc& l ) const;
    [[nodiscard]] bool all_terminated( const GlobalLoc& l ) const;
    [[nodiscard]] GlobalLoc step( const GlobalLoc& l, int action ) const;

    [[nodiscard]] Formula init_formula() const; // over frame 0
    [[nodiscard]] VarNamer namer() const;
    [[nodiscard]] std::string loc_string( const GlobalLoc& l ) const;
    [[nodiscard]] std::string action_label( int action ) const; // "T:text"

    /// One line per action, ordered by (thread, entry, id).
    [[nodiscard]] std::string dump_cfg() const;

    /// Concrete semantics: nullopt when the guard fails.
    [[nodiscard]] std::optional< std::vector< int64_t > > execute( int action, const std::vector< int64_t >& state ) const;
};

Program lower( const ProgramAst& ast );
Program load_program( const std::string& source );
Program load_program_file( const std::string& path );

} // namespace abpress
