#include "abpress/solver.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

namespace abpress {

SatResult Solver::check( const Formula& f )
{
    ++_stats.calls;
    if ( _log )
        *_log << "(assert " << to_smtlib( f ) << ")\n";
    auto start = std::chrono::steady_clock::now();
    try
    {
        auto r = do_check( f );
        _stats.time += std::chrono::steady_clock::now() - start;
        return r;
    }
    catch ( const ArithmeticOverflow& e )
    {
        throw SolverFailure( e.what() );
    }
}

bool Solver::implies( const Formula& a, const Formula& b )
{
    if ( a.is_false() || b.is_true() || a == b )
        return true;
    return !is_sat( a && !b );
}

namespace {

constexpr int max_branch_depth = 64;
constexpr size_t max_constraints = 20000;

// ---------------------------------------------------------- inequalities

// Rewrites `t <= 0` into its integer-tightened form; nullopt means trivially
// true, a constant positive term means trivially false.
std::optional< LinTerm > tighten( const LinTerm& t )
{
    if ( t.is_constant() )
    {
        if ( t.constant_part() <= 0 )
            return std::nullopt;
        return LinTerm::constant( 1 );
    }
    int64_t g = 0;
    for ( auto [ v, c ] : t.coeffs() )
        g = std::gcd( g, c < 0 ? -c : c );
    if ( g == 1 )
        return t;
    LinTerm r = LinTerm::constant( ceil_div( t.constant_part(), g ) );
    for ( auto [ v, c ] : t.coeffs() )
        r = r + LinTerm::variable( v, c / g );
    return r;
}

LinTerm linear_part( const LinTerm& t ) { return t - LinTerm::constant( t.constant_part() ); }

// Normalises a constraint set; returns false if some constraint is
// trivially violated. Keeps only the tightest constraint per linear part.
bool normalise( std::vector< LinTerm >& cons )
{
    std::map< LinTerm, int64_t > best;
    for ( const auto& raw : cons )
    {
        auto t = tighten( raw );
        if ( !t )
            continue;
        if ( t->is_constant() )
            return false;
        auto lin = linear_part( *t );
        auto [ it, fresh ] = best.emplace( lin, t->constant_part() );
        if ( !fresh )
            it->second = std::max( it->second, t->constant_part() );
    }
    cons.clear();
    for ( const auto& [ lin, c ] : best )
        cons.push_back( lin + LinTerm::constant( c ) );
    return true;
}

struct elimination_level
{
    VarRef var;
    std::vector< LinTerm > constraints; // those mentioning var
};

std::optional< Model > solve_inequalities( std::vector< LinTerm > cons, int depth );

std::optional< Model > branch_on( const std::vector< LinTerm >& cons, VarRef v, int64_t split, int depth )
{
    if ( depth >= max_branch_depth )
        throw SolverFailure( "branch-and-bound depth exceeded" );
    auto low = cons;
    low.push_back( LinTerm::variable( v ) - LinTerm::constant( split ) ); // v <= split
    if ( auto m = solve_inequalities( std::move( low ), depth + 1 ) )
        return m;
    auto high = cons;
    high.push_back( LinTerm::constant( split + 1 ) - LinTerm::variable( v ) ); // v >= split + 1
    return solve_inequalities( std::move( high ), depth + 1 );
}

std::optional< Model > solve_inequalities( std::vector< LinTerm > cons, int depth )
{
    const auto original = cons;
    if ( !normalise( cons ) )
        return std::nullopt;

    std::vector< elimination_level > levels;
    for ( ;; )
    {
        std::set< VarRef > vars;
        for ( const auto& c : cons )
            for ( auto [ v, k ] : c.coeffs() )
                vars.insert( v );
        if ( vars.empty() )
            break;

        // Pick the variable producing the fewest new constraints.
        VarRef pick{};
        long best = std::numeric_limits< long >::max();
        for ( auto v : vars )
        {
            long pos = 0, neg = 0;
            for ( const auto& c : cons )
            {
                auto k = c.coeff( v );
                pos += k > 0;
                neg += k < 0;
            }
            long cost = pos * neg - pos - neg;
            if ( cost < best )
            {
                best = cost;
                pick = v;
            }
        }

        std::vector< LinTerm > upper, lower, rest;
        for ( auto& c : cons )
        {
            auto k = c.coeff( pick );
            ( k > 0 ? upper : k < 0 ? lower : rest ).push_back( c );
        }
        for ( const auto& u : upper )
            for ( const auto& l : lower )
            {
                int64_t a = u.coeff( pick ), b = -l.coeff( pick );
                rest.push_back( u * b + l * a );
            }
        if ( rest.size() > max_constraints )
            throw SolverFailure( "Fourier-Motzkin elimination blew up" );

        elimination_level lvl{ pick, std::move( upper ) };
        lvl.constraints.insert( lvl.constraints.end(), lower.begin(), lower.end() );
        levels.push_back( std::move( lvl ) );

        cons = std::move( rest );
        if ( !normalise( cons ) )
            return std::nullopt;
    }

    Model model;
    auto lookup = [ & ]( VarRef v ) -> std::optional< int64_t > {
        auto it = model.find( v );
        return it == model.end() ? std::nullopt : std::optional< int64_t >( it->second );
    };

    for ( auto it = levels.rbegin(); it != levels.rend(); ++it )
    {
        const VarRef v = it->var;
        int64_t lo = std::numeric_limits< int64_t >::min();
        int64_t hi = std::numeric_limits< int64_t >::max();
        // A variable that cancelled out of every projection is free.
        for ( const auto& c : it->constraints )
            for ( auto [ w, k ] : c.coeffs() )
                if ( !( w == v ) && !model.count( w ) )
                    model[ w ] = 0;
        for ( const auto& c : it->constraints )
        {
            int64_t a = c.coeff( v );
            auto rest = ( c - LinTerm::variable( v, a ) ).evaluate( lookup );
            if ( !rest )
                throw SolverFailure( "internal: unassigned variable during back-substitution" );
            if ( a > 0 )
                hi = std::min( hi, floor_div( -*rest, a ) );
            else
                lo = std::max( lo, ceil_div( *rest, -a ) );
        }
        if ( lo > hi )
            return branch_on( original, v, hi, depth );
        model[ v ] = std::clamp< int64_t >( 0, lo, hi );
    }
    return model;
}

// ---------------------------------------------------------- conjunctions

struct literal_set
{
    std::vector< LinTerm > eqs; // t == 0
    std::vector< LinTerm > les; // t <= 0
    std::vector< LinTerm > nes; // t != 0
};

std::optional< Model > solve_conjunction( literal_set lits, int depth )
{
    // Eliminate equalities that have a unit coefficient.
    std::vector< std::pair< VarRef, LinTerm > > solved;
    for ( ;; )
    {
        std::vector< LinTerm > remaining;
        bool progress = false;
        for ( auto& e : lits.eqs )
        {
            if ( e.is_constant() )
            {
                if ( e.constant_part() != 0 )
                    return std::nullopt;
                continue;
            }
            if ( progress )
            {
                remaining.push_back( e );
                continue;
            }
            auto unit = std::find_if( e.coeffs().begin(), e.coeffs().end(),
                                      []( const auto& p ) { return p.second == 1 || p.second == -1; } );
            if ( unit == e.coeffs().end() )
            {
                int64_t g = 0;
                for ( auto [ v, c ] : e.coeffs() )
                    g = std::gcd( g, c < 0 ? -c : c );
                if ( e.constant_part() % g != 0 )
                    return std::nullopt;
                remaining.push_back( e );
                continue;
            }
            // v*k + rest == 0  =>  v == -k*rest  (k = +-1)
            VarRef v = unit->first;
            int64_t k = unit->second;
            LinTerm value = ( e - LinTerm::variable( v, k ) ) * -k;
            solved.emplace_back( v, value );
            progress = true;
        }
        lits.eqs = std::move( remaining );
        if ( !progress )
            break;
        auto [ v, value ] = solved.back();
        auto sub = [ &, v = v, value = value ]( VarRef x ) -> std::optional< LinTerm > {
            return x == v ? std::optional< LinTerm >( value ) : std::nullopt;
        };
        for ( auto* group : { &lits.eqs, &lits.les, &lits.nes } )
            for ( auto& t : *group )
                t = t.substitute( sub );
        for ( auto& [ w, t ] : solved )
            t = t.substitute( sub );
    }

    std::vector< LinTerm > ineqs = lits.les;
    for ( const auto& e : lits.eqs )
    {
        ineqs.push_back( e );
        ineqs.push_back( -e );
    }
    for ( const auto& n : lits.nes )
        if ( n.is_constant() && n.constant_part() == 0 )
            return std::nullopt;

    auto model = solve_inequalities( ineqs, depth );
    if ( !model )
        return std::nullopt;

    auto value_of = [ & ]( VarRef v ) -> std::optional< int64_t > {
        auto it = model->find( v );
        return it == model->end() ? 0 : it->second;
    };
    for ( auto& n : lits.nes )
    {
        auto x = n.evaluate( value_of );
        if ( *x == 0 )
        {
            if ( depth >= max_branch_depth )
                throw SolverFailure( "disequality splitting depth exceeded" );
            literal_set below = lits, above = lits;
            std::erase( below.nes, n );
            std::erase( above.nes, n );
            below.les.push_back( n + LinTerm::constant( 1 ) );  // n <= -1
            above.les.push_back( LinTerm::constant( 1 ) - n ); // n >= 1
            auto r = solve_conjunction( std::move( below ), depth + 1 );
            if ( !r )
                r = solve_conjunction( std::move( above ), depth + 1 );
            if ( !r )
                return std::nullopt;
            for ( auto it = solved.rbegin(); it != solved.rend(); ++it )
            {
                auto fill = [ & ]( VarRef v ) -> std::optional< int64_t > {
                    auto f = r->find( v );
                    return f == r->end() ? 0 : f->second;
                };
                ( *r )[ it->first ] = *it->second.evaluate( fill );
            }
            return r;
        }
    }

    // Solved variables were recorded in elimination order; later entries
    // never mention earlier ones after substitution, so evaluate backwards.
    for ( auto it = solved.rbegin(); it != solved.rend(); ++it )
        ( *model )[ it->first ] = *it->second.evaluate( value_of );
    return model;
}

// ---------------------------------------------------------- boolean search

bool is_literal( const Formula& f )
{
    return f.is_atom() || f.kind() == FormulaKind::Not;
}

// Replaces `atom` (an Le or Eq node) by `value` throughout `f`.
Formula assign( const Formula& f, const Formula& atom, bool value, const Formula& atom_negation )
{
    switch ( f.kind() )
    {
    case FormulaKind::True:
    case FormulaKind::False: return f;
    case FormulaKind::Le:
    case FormulaKind::Eq:
        if ( f == atom )
            return value ? Formula::top() : Formula::bottom();
        if ( f == atom_negation )
            return value ? Formula::bottom() : Formula::top();
        return f;
    case FormulaKind::Not:
        if ( atom.kind() == FormulaKind::Eq && f.term() == atom.term() )
            return value ? Formula::bottom() : Formula::top();
        return f;
    case FormulaKind::And:
    case FormulaKind::Or:
    {
        std::vector< Formula > kids;
        kids.reserve( f.children().size() );
        for ( const auto& k : f.children() )
            kids.push_back( assign( k, atom, value, atom_negation ) );
        return f.kind() == FormulaKind::And ? Formula::conj( std::move( kids ) ) : Formula::disj( std::move( kids ) );
    }
    }
    return f;
}

struct assignment
{
    Formula atom; // Le or Eq
    bool value;
};

Formula positive_atom( const Formula& lit, bool& value )
{
    if ( lit.kind() == FormulaKind::Not )
    {
        value = !value;
        return Formula::eq( lit.term() );
    }
    return lit;
}

void add_to_theory( literal_set& th, const assignment& a )
{
    const auto& t = a.atom.term();
    if ( a.atom.kind() == FormulaKind::Le )
        th.les.push_back( a.value ? t : LinTerm::constant( 1 ) - t );
    else
        ( a.value ? th.eqs : th.nes ).push_back( t );
}

std::optional< Formula > first_atom( const Formula& f )
{
    if ( f.is_atom() )
        return f;
    if ( f.kind() == FormulaKind::Not )
        return Formula::eq( f.term() );
    for ( const auto& k : f.children() )
        if ( auto a = first_atom( k ) )
            return a;
    return std::nullopt;
}

std::optional< Model > search( Formula f, literal_set theory )
{
    // Unit propagation over top-level conjuncts.
    for ( ;; )
    {
        if ( f.is_false() )
            return std::nullopt;
        std::vector< assignment > units;
        if ( is_literal( f ) )
        {
            bool v = true;
            units.push_back( { positive_atom( f, v ), v } );
        }
        else if ( f.kind() == FormulaKind::And )
            for ( const auto& k : f.children() )
                if ( is_literal( k ) )
                {
                    bool v = true;
                    units.push_back( { positive_atom( k, v ), v } );
                }
        if ( units.empty() )
            break;
        for ( const auto& u : units )
        {
            add_to_theory( theory, u );
            f = assign( f, u.atom, u.value, Formula::negate( u.atom ) );
        }
    }

    auto model = solve_conjunction( theory, 0 );
    if ( !model )
        return std::nullopt;
    if ( f.is_true() )
        return model;

    Formula atom = *first_atom( f );
    Formula neg = Formula::negate( atom );
    for ( bool value : { true, false } )
    {
        literal_set th = theory;
        add_to_theory( th, { atom, value } );
        if ( auto m = search( assign( f, atom, value, neg ), std::move( th ) ) )
            return m;
    }
    return std::nullopt;
}

} // namespace

SatResult BuiltinSolver::do_check( const Formula& f )
{
    auto model = search( f, {} );
    if ( !model )
        return { false, {} };
    SatResult r{ true, {} };
    for ( auto v : f.vars() )
    {
        auto it = model->find( v );
        r.model[ v ] = it == model->end() ? 0 : it->second;
    }
    return r;
}

// ---------------------------------------------------------- SMT-LIB text

std::string smtlib_var( VarRef v )
{
    return "v" + std::to_string( v.var ) + "_" + std::to_string( v.frame );
}

namespace {

std::string smt_int( int64_t c )
{
    return c < 0 ? "(- " + std::to_string( -c ) + ")" : std::to_string( c );
}

} // namespace

std::string to_smtlib( const LinTerm& t )
{
    std::vector< std::string > parts;
    for ( auto [ v, c ] : t.coeffs() )
        parts.push_back( c == 1 ? smtlib_var( v ) : "(* " + smt_int( c ) + " " + smtlib_var( v ) + ")" );
    if ( t.constant_part() != 0 || parts.empty() )
        parts.push_back( smt_int( t.constant_part() ) );
    if ( parts.size() == 1 )
        return parts.front();
    std::string out = "(+";
    for ( auto& p : parts )
        out += " " + p;
    return out + ")";
}

std::string to_smtlib( const Formula& f )
{
    switch ( f.kind() )
    {
    case FormulaKind::True: return "true";
    case FormulaKind::False: return "false";
    case FormulaKind::Le: return "(<= " + to_smtlib( f.term() ) + " 0)";
    case FormulaKind::Eq: return "(= " + to_smtlib( f.term() ) + " 0)";
    case FormulaKind::Not: return "(not (= " + to_smtlib( f.term() ) + " 0))";
    case FormulaKind::And:
    case FormulaKind::Or:
    {
        std::string out = f.kind() == FormulaKind::And ? "(and" : "(or";
        for ( const auto& k : f.children() )
            out += " " + to_smtlib( k );
        return out + ")";
    }
    }
    return "true";
}

std::unique_ptr< Solver > make_solver( const std::string& spec )
{
    if ( spec.empty() || spec == "builtin" )
        return std::make_unique< BuiltinSolver >();
    const std::string prefix = "external:";
    if ( spec.rfind( prefix, 0 ) == 0 && spec.size() > prefix.size() )
        return std::make_unique< SmtLibSolver >( spec.substr( prefix.size() ) );
    throw std::invalid_argument( "unknown solver '" + spec + "' (expected builtin or external:<command>)" );
}

} // namespace abpress
