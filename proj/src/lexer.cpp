#include "lexer.hpp"

#include <cctype>
#include <map>

namespace abpress::detail {

const char* describe( Tok t )
{
    switch ( t )
    {
    case Tok::Ident: return "identifier";
    case Tok::Int: return "integer";
    case Tok::End: return "end of input";
    case Tok::KwShared: return "'shared'";
    case Tok::KwInt: return "'int'";
    case Tok::KwThread: return "'thread'";
    case Tok::KwFinal: return "'final'";
    case Tok::KwAssert: return "'assert'";
    case Tok::KwAssume: return "'assume'";
    case Tok::KwIf: return "'if'";
    case Tok::KwElse: return "'else'";
    case Tok::KwWhile: return "'while'";
    case Tok::KwLock: return "'lock'";
    case Tok::KwUnlock: return "'unlock'";
    case Tok::KwSkip: return "'skip'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Semi: return "';'";
    case Tok::Assign: return "'='";
    case Tok::EqEq: return "'=='";
    case Tok::NotEq: return "'!='";
    case Tok::Lt: return "'<'";
    case Tok::Le: return "'<='";
    case Tok::Gt: return "'>'";
    case Tok::Ge: return "'>='";
    case Tok::AndAnd: return "'&&'";
    case Tok::OrOr: return "'||'";
    case Tok::Bang: return "'!'";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    }
    return "?";
}

std::vector< Token > lex( const std::string& src )
{
    static const std::map< std::string, Tok > keywords = {
        { "shared", Tok::KwShared }, { "int", Tok::KwInt },       { "thread", Tok::KwThread },
        { "final", Tok::KwFinal },   { "assert", Tok::KwAssert }, { "assume", Tok::KwAssume },
        { "if", Tok::KwIf },         { "else", Tok::KwElse },     { "while", Tok::KwWhile },
        { "lock", Tok::KwLock },     { "unlock", Tok::KwUnlock }, { "skip", Tok::KwSkip },
    };

    std::vector< Token > out;
    SourcePos pos;
    size_t i = 0;

    auto advance = [&]( size_t n ) {
        for ( ; n > 0; --n, ++i )
        {
            if ( src[ i ] == '\n' )
            {
                ++pos.line;
                pos.col = 1;
            }
            else
                ++pos.col;
        }
    };

    while ( i < src.size() )
    {
        char c = src[ i ];
        if ( std::isspace( static_cast< unsigned char >( c ) ) )
        {
            advance( 1 );
            continue;
        }
        if ( c == '/' && i + 1 < src.size() && src[ i + 1 ] == '/' )
        {
            while ( i < src.size() && src[ i ] != '\n' )
                advance( 1 );
            continue;
        }

        Token t{ Tok::End, "", 0, pos };
        if ( std::isalpha( static_cast< unsigned char >( c ) ) || c == '_' )
        {
            size_t j = i;
            while ( j < src.size() && ( std::isalnum( static_cast< unsigned char >( src[ j ] ) ) || src[ j ] == '_' ) )
                ++j;
            t.text = src.substr( i, j - i );
            auto kw = keywords.find( t.text );
            t.kind = kw == keywords.end() ? Tok::Ident : kw->second;
            advance( j - i );
            out.push_back( t );
            continue;
        }
        if ( std::isdigit( static_cast< unsigned char >( c ) ) )
        {
            size_t j = i;
            int64_t v = 0;
            while ( j < src.size() && std::isdigit( static_cast< unsigned char >( src[ j ] ) ) )
            {
                int d = src[ j ] - '0';
                if ( v > ( INT64_MAX - d ) / 10 )
                    throw LangError( LangErrorKind::LexError, pos, "integer literal out of range" );
                v = v * 10 + d;
                ++j;
            }
            t.kind = Tok::Int;
            t.text = src.substr( i, j - i );
            t.value = v;
            advance( j - i );
            out.push_back( t );
            continue;
        }

        auto two = src.substr( i, 2 );
        static const std::map< std::string, Tok > pairs = {
            { "==", Tok::EqEq }, { "!=", Tok::NotEq }, { "<=", Tok::Le },
            { ">=", Tok::Ge },   { "&&", Tok::AndAnd }, { "||", Tok::OrOr },
        };
        if ( auto p = pairs.find( two ); p != pairs.end() )
        {
            t.kind = p->second;
            t.text = two;
            advance( 2 );
            out.push_back( t );
            continue;
        }
        switch ( c )
        {
        case '{': t.kind = Tok::LBrace; break;
        case '}': t.kind = Tok::RBrace; break;
        case '(': t.kind = Tok::LParen; break;
        case ')': t.kind = Tok::RParen; break;
        case ';': t.kind = Tok::Semi; break;
        case '=': t.kind = Tok::Assign; break;
        case '<': t.kind = Tok::Lt; break;
        case '>': t.kind = Tok::Gt; break;
        case '!': t.kind = Tok::Bang; break;
        case '+': t.kind = Tok::Plus; break;
        case '-': t.kind = Tok::Minus; break;
        case '*': t.kind = Tok::Star; break;
        default:
            throw LangError( LangErrorKind::LexError, pos, std::string( "unexpected character '" ) + c + "'" );
        }
        t.text = std::string( 1, c );
        advance( 1 );
        out.push_back( t );
    }
    out.push_back( Token{ Tok::End, "", 0, pos } );
    return out;
}

} // namespace abpress::detail
