#include "abpress/lang.hpp"
#include "lexer.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace abpress {

using detail::Tok;
using detail::Token;

const char* to_string( LangErrorKind k )
{
    switch ( k )
    {
    case LangErrorKind::LexError: return "LexError";
    case LangErrorKind::SyntaxError: return "SyntaxError";
    case LangErrorKind::UndeclaredVariable: return "UndeclaredVariable";
    case LangErrorKind::DuplicateThreadName: return "DuplicateThreadName";
    case LangErrorKind::NoThreads: return "NoThreads";
    }
    return "?";
}

LangError::LangError( LangErrorKind kind, SourcePos pos, const std::string& msg )
    : std::runtime_error( std::to_string( pos.line ) + ":" + std::to_string( pos.col ) + ": " + to_string( kind ) + ": " + msg ),
      _kind( kind ), _pos( pos )
{}

namespace {

class Parser
{
public:
    explicit Parser( std::vector< Token > toks ) : _toks( std::move( toks ) ) {}

    ProgramAst program()
    {
        ProgramAst ast;
        while ( peek().kind != Tok::End )
        {
            switch ( peek().kind )
            {
            case Tok::KwShared: ast.shared.push_back( shared() ); break;
            case Tok::KwThread: ast.threads.push_back( thread() ); break;
            case Tok::KwFinal:
            {
                auto at = next().pos;
                expect( Tok::KwAssert );
                expect( Tok::LParen );
                auto c = cond();
                expect( Tok::RParen );
                expect( Tok::Semi );
                if ( ast.final_assert )
                    throw LangError( LangErrorKind::SyntaxError, at, "more than one final assert" );
                ast.final_assert = std::move( c );
                break;
            }
            default: fail( "expected 'shared', 'thread' or 'final'" );
            }
        }
        return ast;
    }

private:
    const Token& peek( size_t ahead = 0 ) const { return _toks[ std::min( _at + ahead, _toks.size() - 1 ) ]; }
    const Token& next() { return _toks[ std::min( _at++, _toks.size() - 1 ) ]; }

    bool accept( Tok k )
    {
        if ( peek().kind != k )
            return false;
        ++_at;
        return true;
    }

    [[noreturn]] void fail( const std::string& what ) const
    {
        const auto& t = peek();
        std::string got = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
        throw LangError( LangErrorKind::SyntaxError, t.pos, what + ", got " + got );
    }

    const Token& expect( Tok k )
    {
        if ( peek().kind != k )
            fail( std::string( "expected " ) + detail::describe( k ) );
        return next();
    }

    SharedDecl shared()
    {
        SharedDecl d;
        d.pos = expect( Tok::KwShared ).pos;
        expect( Tok::KwInt );
        d.name = expect( Tok::Ident ).text;
        if ( accept( Tok::Assign ) )
        {
            bool neg = accept( Tok::Minus );
            d.init = expect( Tok::Int ).value;
            if ( neg )
                d.init = -d.init;
        }
        expect( Tok::Semi );
        return d;
    }

    ThreadAst thread()
    {
        ThreadAst t;
        t.pos = expect( Tok::KwThread ).pos;
        t.name = expect( Tok::Ident ).text;
        t.body = block();
        return t;
    }

    std::vector< Stmt > block()
    {
        expect( Tok::LBrace );
        std::vector< Stmt > out;
        while ( !accept( Tok::RBrace ) )
            out.push_back( stmt() );
        return out;
    }

    Stmt stmt()
    {
        Stmt s;
        s.pos = peek().pos;
        auto paren_cond = [&] {
            expect( Tok::LParen );
            s.cond = cond();
            expect( Tok::RParen );
        };
        auto paren_name = [&] {
            expect( Tok::LParen );
            s.name = expect( Tok::Ident ).text;
            expect( Tok::RParen );
            expect( Tok::Semi );
        };

        switch ( next().kind )
        {
        case Tok::Ident:
            s.kind = Stmt::Kind::Assign;
            s.name = _toks[ _at - 1 ].text;
            expect( Tok::Assign );
            s.expr = expr();
            expect( Tok::Semi );
            break;
        case Tok::KwAssume:
            s.kind = Stmt::Kind::Assume;
            paren_cond();
            expect( Tok::Semi );
            break;
        case Tok::KwAssert:
            s.kind = Stmt::Kind::Assert;
            paren_cond();
            expect( Tok::Semi );
            break;
        case Tok::KwIf:
            s.kind = Stmt::Kind::If;
            paren_cond();
            s.then_block = block();
            if ( accept( Tok::KwElse ) )
                s.else_block = block();
            break;
        case Tok::KwWhile:
            s.kind = Stmt::Kind::While;
            paren_cond();
            s.then_block = block();
            break;
        case Tok::KwLock:
            s.kind = Stmt::Kind::Lock;
            paren_name();
            break;
        case Tok::KwUnlock:
            s.kind = Stmt::Kind::Unlock;
            paren_name();
            break;
        case Tok::KwSkip:
            s.kind = Stmt::Kind::Skip;
            expect( Tok::Semi );
            break;
        default:
            --_at;
            fail( "expected a statement" );
        }
        return s;
    }

    static bool is_cmp( Tok k )
    {
        return k == Tok::EqEq || k == Tok::NotEq || k == Tok::Lt || k == Tok::Le || k == Tok::Gt || k == Tok::Ge;
    }

    Cond cond()
    {
        Cond lhs = cond_and();
        if ( peek().kind != Tok::OrOr )
            return lhs;
        Cond c;
        c.kind = Cond::Kind::Or;
        c.pos = lhs.pos;
        c.kids.push_back( std::move( lhs ) );
        while ( accept( Tok::OrOr ) )
            c.kids.push_back( cond_and() );
        return c;
    }

    Cond cond_and()
    {
        Cond lhs = cond_unary();
        if ( peek().kind != Tok::AndAnd )
            return lhs;
        Cond c;
        c.kind = Cond::Kind::And;
        c.pos = lhs.pos;
        c.kids.push_back( std::move( lhs ) );
        while ( accept( Tok::AndAnd ) )
            c.kids.push_back( cond_unary() );
        return c;
    }

    Cond cond_unary()
    {
        auto pos = peek().pos;
        if ( accept( Tok::Bang ) )
        {
            Cond c;
            c.kind = Cond::Kind::Not;
            c.pos = pos;
            c.kids.push_back( cond_unary() );
            return c;
        }
        if ( peek().kind == Tok::LParen )
        {
            // "(" opens either a nested condition or an arithmetic operand.
            size_t save = _at;
            try
            {
                next();
                Cond inner = cond();
                expect( Tok::RParen );
                auto k = peek().kind;
                if ( !is_cmp( k ) && k != Tok::Plus && k != Tok::Minus && k != Tok::Star )
                    return inner;
            }
            catch ( const LangError& )
            {
            }
            _at = save;
        }
        return comparison();
    }

    Cond comparison()
    {
        Cond c;
        c.kind = Cond::Kind::Cmp;
        c.pos = peek().pos;
        c.operands.push_back( expr() );
        switch ( peek().kind )
        {
        case Tok::EqEq: c.op = CmpOp::Eq; break;
        case Tok::NotEq: c.op = CmpOp::Ne; break;
        case Tok::Lt: c.op = CmpOp::Lt; break;
        case Tok::Le: c.op = CmpOp::Le; break;
        case Tok::Gt: c.op = CmpOp::Gt; break;
        case Tok::Ge: c.op = CmpOp::Ge; break;
        default: fail( "expected a comparison operator" );
        }
        next();
        c.operands.push_back( expr() );
        return c;
    }

    Expr expr()
    {
        Expr lhs = product();
        while ( peek().kind == Tok::Plus || peek().kind == Tok::Minus )
        {
            Expr e;
            e.pos = peek().pos;
            e.kind = next().kind == Tok::Plus ? Expr::Kind::Add : Expr::Kind::Sub;
            e.kids.push_back( std::move( lhs ) );
            e.kids.push_back( product() );
            lhs = std::move( e );
        }
        return lhs;
    }

    static std::optional< int64_t > literal( const Expr& e )
    {
        if ( e.kind == Expr::Kind::Const )
            return e.value;
        if ( e.kind == Expr::Kind::Neg && e.kids[ 0 ].kind == Expr::Kind::Const )
            return -e.kids[ 0 ].value;
        return std::nullopt;
    }

    Expr product()
    {
        Expr lhs = unary();
        while ( peek().kind == Tok::Star )
        {
            auto pos = next().pos;
            Expr rhs = unary();
            Expr e;
            e.kind = Expr::Kind::Mul;
            e.pos = pos;
            if ( auto k = literal( lhs ) )
            {
                e.value = *k;
                e.kids.push_back( std::move( rhs ) );
            }
            else if ( auto k2 = literal( rhs ) )
            {
                e.value = *k2;
                e.kids.push_back( std::move( lhs ) );
            }
            else
                throw LangError( LangErrorKind::SyntaxError, pos, "non-linear product; one factor must be an integer literal" );
            lhs = std::move( e );
        }
        return lhs;
    }

    Expr unary()
    {
        Expr e;
        e.pos = peek().pos;
        switch ( peek().kind )
        {
        case Tok::Minus:
            next();
            e.kind = Expr::Kind::Neg;
            e.kids.push_back( unary() );
            return e;
        case Tok::Int:
            e.kind = Expr::Kind::Const;
            e.value = next().value;
            return e;
        case Tok::Ident:
            e.kind = Expr::Kind::Var;
            e.name = next().text;
            return e;
        case Tok::LParen:
        {
            next();
            Expr inner = expr();
            expect( Tok::RParen );
            return inner;
        }
        default: fail( "expected an expression" );
        }
    }

    std::vector< Token > _toks;
    size_t _at = 0;
};

void check_expr( const Expr& e, const std::set< std::string >& vars )
{
    if ( e.kind == Expr::Kind::Var && !vars.count( e.name ) )
        throw LangError( LangErrorKind::UndeclaredVariable, e.pos, "'" + e.name + "' is not a declared shared variable" );
    for ( const auto& k : e.kids )
        check_expr( k, vars );
}

void check_cond( const Cond& c, const std::set< std::string >& vars )
{
    for ( const auto& e : c.operands )
        check_expr( e, vars );
    for ( const auto& k : c.kids )
        check_cond( k, vars );
}

void check_block( const std::vector< Stmt >& block, const std::set< std::string >& vars )
{
    for ( const auto& s : block )
    {
        if ( !s.name.empty() && !vars.count( s.name ) )
            throw LangError( LangErrorKind::UndeclaredVariable, s.pos, "'" + s.name + "' is not a declared shared variable" );
        if ( s.expr )
            check_expr( *s.expr, vars );
        if ( s.cond )
            check_cond( *s.cond, vars );
        check_block( s.then_block, vars );
        check_block( s.else_block, vars );
    }
}

} // namespace

ProgramAst parse( const std::string& source )
{
    ProgramAst ast = Parser( detail::lex( source ) ).program();

    std::set< std::string > vars;
    for ( const auto& d : ast.shared )
        if ( !vars.insert( d.name ).second )
            throw LangError( LangErrorKind::SyntaxError, d.pos, "shared variable '" + d.name + "' declared twice" );

    std::set< std::string > names;
    for ( const auto& t : ast.threads )
        if ( !names.insert( t.name ).second )
            throw LangError( LangErrorKind::DuplicateThreadName, t.pos, "thread '" + t.name + "' defined twice" );

    for ( const auto& t : ast.threads )
        check_block( t.body, vars );
    if ( ast.final_assert )
        check_cond( *ast.final_assert, vars );

    if ( ast.threads.empty() )
        throw LangError( LangErrorKind::NoThreads, SourcePos{}, "program defines no threads" );
    return ast;
}

namespace {

void print_expr( std::ostream& os, const Expr& e )
{
    auto kid = [&]( const Expr& k ) {
        bool atomic = k.kind == Expr::Kind::Const || k.kind == Expr::Kind::Var;
        if ( !atomic )
            os << "(";
        print_expr( os, k );
        if ( !atomic )
            os << ")";
    };
    switch ( e.kind )
    {
    case Expr::Kind::Const: os << e.value; break;
    case Expr::Kind::Var: os << e.name; break;
    case Expr::Kind::Add: kid( e.kids[ 0 ] ); os << " + "; kid( e.kids[ 1 ] ); break;
    case Expr::Kind::Sub: kid( e.kids[ 0 ] ); os << " - "; kid( e.kids[ 1 ] ); break;
    case Expr::Kind::Neg: os << "-"; kid( e.kids[ 0 ] ); break;
    case Expr::Kind::Mul:
        if ( e.value < 0 )
            os << "-" << -e.value;
        else
            os << e.value;
        os << " * ";
        kid( e.kids[ 0 ] );
        break;
    }
}

void print_cond( std::ostream& os, const Cond& c )
{
    static const char* ops[] = { "==", "!=", "<", "<=", ">", ">=" };
    switch ( c.kind )
    {
    case Cond::Kind::Cmp:
        print_expr( os, c.operands[ 0 ] );
        os << " " << ops[ static_cast< int >( c.op ) ] << " ";
        print_expr( os, c.operands[ 1 ] );
        break;
    case Cond::Kind::Not:
        os << "!(";
        print_cond( os, c.kids[ 0 ] );
        os << ")";
        break;
    case Cond::Kind::And:
    case Cond::Kind::Or:
        for ( size_t i = 0; i < c.kids.size(); ++i )
        {
            if ( i )
                os << ( c.kind == Cond::Kind::And ? " && " : " || " );
            os << "(";
            print_cond( os, c.kids[ i ] );
            os << ")";
        }
        break;
    }
}

void print_block( std::ostream& os, const std::vector< Stmt >& block, int depth )
{
    std::string ind( 4 * depth, ' ' );
    for ( const auto& s : block )
    {
        os << ind;
        switch ( s.kind )
        {
        case Stmt::Kind::Assign: os << s.name << " = "; print_expr( os, *s.expr ); os << ";\n"; break;
        case Stmt::Kind::Assume: os << "assume("; print_cond( os, *s.cond ); os << ");\n"; break;
        case Stmt::Kind::Assert: os << "assert("; print_cond( os, *s.cond ); os << ");\n"; break;
        case Stmt::Kind::Lock: os << "lock(" << s.name << ");\n"; break;
        case Stmt::Kind::Unlock: os << "unlock(" << s.name << ");\n"; break;
        case Stmt::Kind::Skip: os << "skip;\n"; break;
        case Stmt::Kind::If:
            os << "if (";
            print_cond( os, *s.cond );
            os << ") {\n";
            print_block( os, s.then_block, depth + 1 );
            os << ind << "}";
            if ( !s.else_block.empty() )
            {
                os << " else {\n";
                print_block( os, s.else_block, depth + 1 );
                os << ind << "}";
            }
            os << "\n";
            break;
        case Stmt::Kind::While:
            os << "while (";
            print_cond( os, *s.cond );
            os << ") {\n";
            print_block( os, s.then_block, depth + 1 );
            os << ind << "}\n";
            break;
        }
    }
}

size_t count_block( const std::vector< Stmt >& block )
{
    size_t n = 0;
    for ( const auto& s : block )
        n += 1 + count_block( s.then_block ) + count_block( s.else_block );
    return n;
}

} // namespace

std::string print( const ProgramAst& ast )
{
    std::ostringstream os;
    for ( const auto& d : ast.shared )
        os << "shared int " << d.name << " = " << d.init << ";\n";
    for ( const auto& t : ast.threads )
    {
        os << "thread " << t.name << " {\n";
        print_block( os, t.body, 1 );
        os << "}\n";
    }
    if ( ast.final_assert )
    {
        os << "final assert(";
        print_cond( os, *ast.final_assert );
        os << ");\n";
    }
    return os.str();
}

size_t statement_count( const ProgramAst& ast )
{
    size_t n = 0;
    for ( const auto& t : ast.threads )
        n += count_block( t.body );
    return n;
}

LinTerm to_term( const Expr& e, const std::vector< std::string >& vars )
{
    switch ( e.kind )
    {
    case Expr::Kind::Const: return LinTerm::constant( e.value );
    case Expr::Kind::Var:
    {
        auto it = std::find( vars.begin(), vars.end(), e.name );
        if ( it == vars.end() )
            throw LangError( LangErrorKind::UndeclaredVariable, e.pos, "'" + e.name + "' is not a declared shared variable" );
        return LinTerm::variable( VarRef{ static_cast< int >( it - vars.begin() ), 0 } );
    }
    case Expr::Kind::Add: return to_term( e.kids[ 0 ], vars ) + to_term( e.kids[ 1 ], vars );
    case Expr::Kind::Sub: return to_term( e.kids[ 0 ], vars ) - to_term( e.kids[ 1 ], vars );
    case Expr::Kind::Neg: return -to_term( e.kids[ 0 ], vars );
    case Expr::Kind::Mul: return to_term( e.kids[ 0 ], vars ) * e.value;
    }
    return {};
}

Formula to_formula( const Cond& c, const std::vector< std::string >& vars )
{
    std::vector< Formula > parts;
    for ( const auto& k : c.kids )
        parts.push_back( to_formula( k, vars ) );
    switch ( c.kind )
    {
    case Cond::Kind::Cmp: return compare( c.op, to_term( c.operands[ 0 ], vars ), to_term( c.operands[ 1 ], vars ) );
    case Cond::Kind::Not: return Formula::negate( parts[ 0 ] );
    case Cond::Kind::And: return Formula::conj( std::move( parts ) );
    case Cond::Kind::Or: return Formula::disj( std::move( parts ) );
    }
    return Formula::top();
}

} // namespace abpress
