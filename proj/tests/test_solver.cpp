#include "abpress/solver.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <sstream>

using namespace abpress;

namespace {

LinTerm v( int i ) { return LinTerm::variable( { i, 0 } ); }
LinTerm c( int64_t k ) { return LinTerm::constant( k ); }

bool model_satisfies( const Formula& f, const Model& m )
{
    auto r = f.evaluate( [ & ]( VarRef x ) -> std::optional< int64_t > {
        auto it = m.find( x );
        return it == m.end() ? std::optional< int64_t >{} : it->second;
    } );
    return r && *r;
}

Formula random_formula( std::mt19937& rng, int depth )
{
    std::uniform_int_distribution< int > coef( -3, 3 ), pick( 0, 5 ), var( 0, 2 );
    if ( depth == 0 || pick( rng ) < 2 )
    {
        LinTerm t = v( var( rng ) ) * coef( rng ) + v( var( rng ) ) * coef( rng ) + c( coef( rng ) );
        switch ( pick( rng ) % 3 )
        {
        case 0: return Formula::le( t );
        case 1: return Formula::eq( t );
        default: return !Formula::eq( t );
        }
    }
    Formula a = random_formula( rng, depth - 1 ), b = random_formula( rng, depth - 1 );
    return pick( rng ) % 2 ? ( a && b ) : ( a || b );
}

/// Brute-force satisfiability over a box; only used on formulas whose
/// solutions, if any, must fall inside it.
bool sat_in_box( const Formula& f, int r )
{
    for ( int a = -r; a <= r; ++a )
        for ( int b = -r; b <= r; ++b )
            for ( int d = -r; d <= r; ++d )
                if ( model_satisfies( f, { { { 0, 0 }, a }, { { 1, 0 }, b }, { { 2, 0 }, d } } ) )
                    return true;
    return false;
}

bool z3_available() { return std::filesystem::exists( "/usr/local/bin/z3" ) || std::filesystem::exists( "/usr/bin/z3" ); }

} // namespace

TEST( BuiltinSolver, Basics )
{
    BuiltinSolver s;
    EXPECT_TRUE( s.is_sat( Formula::top() ) );
    EXPECT_FALSE( s.is_sat( Formula::bottom() ) );
    EXPECT_TRUE( s.is_sat( Formula::eq( v( 0 ) - c( 4 ) ) ) );
    EXPECT_FALSE( s.is_sat( Formula::eq( v( 0 ) - c( 4 ) ) && Formula::le( v( 0 ) - c( 3 ) ) ) );
    EXPECT_TRUE( s.implies( Formula::eq( v( 0 ) - c( 4 ) ), Formula::le( v( 0 ) - c( 5 ) ) ) );
    EXPECT_FALSE( s.implies( Formula::le( v( 0 ) - c( 5 ) ), Formula::eq( v( 0 ) - c( 4 ) ) ) );
    EXPECT_EQ( s.stats().calls, 6u );
}

TEST( BuiltinSolver, IntegerReasoning )
{
    BuiltinSolver s;
    // 2x = 1 has rational but no integer solutions.
    EXPECT_FALSE( s.is_sat( Formula::eq( v( 0 ) * 2 - c( 1 ) ) ) );
    // 1 <= 3x <= 2
    EXPECT_FALSE( s.is_sat( Formula::le( c( 1 ) - v( 0 ) * 3 ) && Formula::le( v( 0 ) * 3 - c( 2 ) ) ) );
    // x != y, x <= y, y <= x
    EXPECT_FALSE( s.is_sat( !Formula::eq( v( 0 ) - v( 1 ) ) && Formula::le( v( 0 ) - v( 1 ) ) && Formula::le( v( 1 ) - v( 0 ) ) ) );
}

TEST( BuiltinSolver, ModelsSatisfyQuery )
{
    BuiltinSolver s;
    std::mt19937 rng( 11 );
    for ( int i = 0; i < 300; ++i )
    {
        Formula f = random_formula( rng, 3 );
        auto r = s.check( f );
        if ( r.sat )
        {
            EXPECT_TRUE( model_satisfies( f, r.model ) ) << f.to_string( frame_namer( { "a", "b", "c" } ) );
        }
    }
}

TEST( BuiltinSolver, AgreesWithBruteForceOnBoundedQueries )
{
    BuiltinSolver s;
    std::mt19937 rng( 5 );
    const int r = 4;
    Formula box = Formula::top();
    for ( int i = 0; i < 3; ++i )
        box = box && Formula::le( v( i ) - c( r ) ) && Formula::le( -v( i ) - c( r ) );
    for ( int i = 0; i < 200; ++i )
    {
        Formula f = box && random_formula( rng, 3 );
        EXPECT_EQ( s.is_sat( f ), sat_in_box( f, r ) );
    }
}

TEST( BuiltinSolver, QueryLog )
{
    BuiltinSolver s;
    std::ostringstream log;
    s.set_query_log( &log );
    (void)s.is_sat( Formula::le( v( 0 ) ) );
    EXPECT_NE( log.str().find( "(assert" ), std::string::npos );
}

TEST( SmtLib, Printing )
{
    EXPECT_EQ( to_smtlib( Formula::top() ), "true" );
    EXPECT_NE( to_smtlib( Formula::le( v( 0 ) - c( 2 ) ) ).find( "<=" ), std::string::npos );
    EXPECT_NE( smtlib_var( { 1, 2 } ), smtlib_var( { 1, 3 } ) );
}

TEST( SmtLib, MakeSolverSpecs )
{
    EXPECT_EQ( make_solver( "builtin" )->name(), "builtin" );
    EXPECT_THROW( make_solver( "nonsense" ), std::exception );
}

TEST( SmtLib, AgreesWithBuiltin )
{
    if ( !z3_available() )
        GTEST_SKIP() << "z3 not installed";
    auto z3 = make_solver( "external:z3 -in" );
    BuiltinSolver b;
    std::mt19937 rng( 3 );
    for ( int i = 0; i < 100; ++i )
    {
        Formula f = random_formula( rng, 3 );
        auto r = z3->check( f );
        EXPECT_EQ( r.sat, b.is_sat( f ) );
        if ( r.sat )
        {
            EXPECT_TRUE( model_satisfies( f, r.model ) );
        }
    }
}

TEST( SmtLib, MissingBinaryFails )
{
    auto s = make_solver( "external:/nonexistent/solver-binary" );
    EXPECT_THROW( (void)s->is_sat( Formula::le( v( 0 ) ) ), SolverFailure );
}
