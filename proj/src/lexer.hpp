#pragma once

#include "abpress/lang.hpp"

#include <string>
#include <vector>

namespace abpress::detail {

enum class Tok
{
    Ident, Int, End,
    KwShared, KwInt, KwThread, KwFinal, KwAssert, KwAssume, KwIf, KwElse, KwWhile, KwLock, KwUnlock, KwSkip,
    LBrace, RBrace, LParen, RParen, Semi, Assign,
    EqEq, NotEq, Lt, Le, Gt, Ge, AndAnd, OrOr, Bang, Plus, Minus, Star,
};

struct Token
{
    Tok kind;
    std::string text;
    int64_t value = 0;
    SourcePos pos;
};

std::vector< Token > lex( const std::string& source );
const char* describe( Tok t );

} // namespace abpress::detail
