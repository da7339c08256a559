#include "abpress/lang.hpp"
#include "abpress/model.hpp"
#include "util.hpp"

#include <gtest/gtest.h>

using namespace abpress;

namespace {

const char* racy_sum = R"(
shared int x = 0;
shared int y = 0;
thread T1 { x = 1; x = x + 1; x = y; }
thread T2 { y = -1; y = y + 1; }
final assert(y >= 0);
)";

LangErrorKind error_of( const std::string& src )
{
    try
    {
        (void)parse( src );
    }
    catch ( const LangError& e )
    {
        return e.kind();
    }
    ADD_FAILURE() << "no error for: " << src;
    return LangErrorKind::NoThreads;
}

} // namespace

TEST( Parse, RacySumEncoding )
{
    ProgramAst ast = parse( racy_sum );
    ASSERT_EQ( ast.threads.size(), 2u );
    EXPECT_EQ( ast.shared.size(), 2u );
    EXPECT_EQ( statement_count( ast ), 5u );
    EXPECT_TRUE( ast.final_assert.has_value() );
    EXPECT_EQ( ast.threads[ 1 ].body[ 0 ].kind, Stmt::Kind::Assign );
}

TEST( Parse, AllStatementKinds )
{
    ProgramAst ast = parse( R"(
shared int m;
shared int a = -2;
thread P {
  lock(m);
  if (a < 0 && !(a == -3)) { a = 2 * (a + 1) - a; } else { skip; }
  while (a != 0) { a = a - 1; }
  assume(a >= 0 || a <= -5);
  assert(a == 0);
  unlock(m);
}
)" );
    ASSERT_EQ( ast.threads.size(), 1u );
    const auto& body = ast.threads[ 0 ].body;
    ASSERT_EQ( body.size(), 6u );
    EXPECT_EQ( body[ 0 ].kind, Stmt::Kind::Lock );
    EXPECT_EQ( body[ 1 ].kind, Stmt::Kind::If );
    EXPECT_EQ( body[ 1 ].else_block.size(), 1u );
    EXPECT_EQ( body[ 2 ].kind, Stmt::Kind::While );
    EXPECT_EQ( body[ 3 ].kind, Stmt::Kind::Assume );
    EXPECT_EQ( body[ 4 ].kind, Stmt::Kind::Assert );
    EXPECT_EQ( body[ 5 ].kind, Stmt::Kind::Unlock );
    EXPECT_EQ( ast.shared[ 1 ].init, -2 );
    EXPECT_EQ( statement_count( ast ), 9u );
}

TEST( Parse, Errors )
{
    EXPECT_EQ( error_of( "" ), LangErrorKind::NoThreads );
    EXPECT_EQ( error_of( "shared int x;" ), LangErrorKind::NoThreads );
    EXPECT_EQ( error_of( "thread t { x = 1; }" ), LangErrorKind::UndeclaredVariable );
    EXPECT_EQ( error_of( "shared int x; thread t { x = 1 }" ), LangErrorKind::SyntaxError );
    EXPECT_EQ( error_of( "shared int x; thread t { x = x * x; }" ), LangErrorKind::SyntaxError );
    EXPECT_EQ( error_of( "shared int x; thread t { x = $; }" ), LangErrorKind::LexError );
    EXPECT_EQ( error_of( "shared int x; thread t { skip; } thread t { skip; }" ), LangErrorKind::DuplicateThreadName );
}

TEST( Parse, ErrorPosition )
{
    try
    {
        (void)parse( "shared int y;\nthread t {\n  skip;\n  x = 1;\n}" );
        FAIL();
    }
    catch ( const LangError& e )
    {
        EXPECT_EQ( e.kind(), LangErrorKind::UndeclaredVariable );
        EXPECT_EQ( e.pos().line, 4 );
        EXPECT_EQ( e.pos().col, 3 );
        EXPECT_EQ( std::string( e.what() ).rfind( "4:3: UndeclaredVariable", 0 ), 0u );
    }
}

TEST( Parse, PrintRoundTrips )
{
    for ( const auto& entry : test::corpus() )
    {
        ProgramAst ast = parse( test::read_file( entry.path ) );
        std::string once = print( ast );
        ProgramAst again = parse( once );
        EXPECT_EQ( print( again ), once ) << entry.name;
        EXPECT_EQ( statement_count( again ), statement_count( ast ) ) << entry.name;
        EXPECT_EQ( lower( again ).dump_cfg(), lower( ast ).dump_cfg() ) << entry.name;
    }
}

TEST( Parse, TermsAndConditions )
{
    ProgramAst ast = parse( "shared int a; shared int b; thread t { a = 3 * (b - 1) + -a; assume(!(a < b)); }" );
    std::vector< std::string > vars{ "a", "b" };
    LinTerm t = to_term( *ast.threads[ 0 ].body[ 0 ].expr, vars );
    EXPECT_EQ( t.coeff( { 0, 0 } ), -1 );
    EXPECT_EQ( t.coeff( { 1, 0 } ), 3 );
    EXPECT_EQ( t.constant_part(), -3 );
    Formula f = to_formula( *ast.threads[ 0 ].body[ 1 ].cond, vars );
    auto at = [ & ]( int64_t a, int64_t b ) {
        return *f.evaluate( [ & ]( VarRef r ) -> std::optional< int64_t > { return r.var == 0 ? a : b; } );
    };
    EXPECT_TRUE( at( 2, 2 ) );
    EXPECT_FALSE( at( 1, 2 ) );
}
