#pragma once

#include "abpress/formula.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace abpress {

struct SourcePos
{
    int line = 1;
    int col = 1;
};

enum class LangErrorKind { LexError, SyntaxError, UndeclaredVariable, DuplicateThreadName, NoThreads };

const char* to_string( LangErrorKind k );

/// Front-end diagnostic. what() reads `line:col: Kind: message`.
class LangError : public std::runtime_error
{
public:
    LangError( LangErrorKind kind, SourcePos pos, const std::string& msg );

    [[nodiscard]] LangErrorKind kind() const { return _kind; }
    [[nodiscard]] SourcePos pos() const { return _pos; }

private:
    LangErrorKind _kind;
    SourcePos _pos;
};

struct Expr
{
    enum class Kind { Const, Var, Add, Sub, Neg, Mul };

    Kind kind = Kind::Const;
    int64_t value = 0; // Const, and the constant factor of Mul
    std::string name;  // Var
    std::vector< Expr > kids;
    SourcePos pos;
};

struct Cond
{
    enum class Kind { Cmp, And, Or, Not };

    Kind kind = Kind::Cmp;
    CmpOp op = CmpOp::Eq;
    std::vector< Expr > operands; // Cmp: lhs, rhs
    std::vector< Cond > kids;
    SourcePos pos;
};

struct Stmt
{
    enum class Kind { Assign, Assume, Assert, If, While, Lock, Unlock, Skip };

    Kind kind = Kind::Skip;
    SourcePos pos;
    std::string name; // Assign target, Lock/Unlock variable
    std::optional< Expr > expr;
    std::optional< Cond > cond;
    std::vector< Stmt > then_block; // If, While body
    std::vector< Stmt > else_block;
};

struct SharedDecl
{
    std::string name;
    int64_t init = 0;
    SourcePos pos;
};

struct ThreadAst
{
    std::string name;
    std::vector< Stmt > body;
    SourcePos pos;
};

struct ProgramAst
{
    std::vector< SharedDecl > shared;
    std::vector< ThreadAst > threads;
    std::optional< Cond > final_assert;
};

ProgramAst parse( const std::string& source );

/// Source text that parses back to an equivalent AST.
std::string print( const ProgramAst& ast );

/// Number of statements, counting nested ones.
size_t statement_count( const ProgramAst& ast );

LinTerm to_term( const Expr& e, const std::vector< std::string >& vars );
Formula to_formula( const Cond& c, const std::vector< std::string >& vars );

} // namespace abpress
