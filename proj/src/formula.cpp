#include "abpress/formula.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace abpress {

int64_t checked_add( int64_t a, int64_t b )
{
    int64_t r;
    if ( __builtin_add_overflow( a, b, &r ) )
        throw ArithmeticOverflow( "integer overflow in addition" );
    return r;
}

int64_t checked_mul( int64_t a, int64_t b )
{
    int64_t r;
    if ( __builtin_mul_overflow( a, b, &r ) )
        throw ArithmeticOverflow( "integer overflow in multiplication" );
    return r;
}

int64_t floor_div( int64_t a, int64_t b )
{
    int64_t q = a / b;
    if ( ( a % b != 0 ) && ( ( a < 0 ) != ( b < 0 ) ) )
        --q;
    return q;
}

int64_t ceil_div( int64_t a, int64_t b )
{
    int64_t q = a / b;
    if ( ( a % b != 0 ) && ( ( a < 0 ) == ( b < 0 ) ) )
        ++q;
    return q;
}

// ---------------------------------------------------------------- LinTerm

LinTerm LinTerm::constant( int64_t c )
{
    LinTerm t;
    t._const = c;
    return t;
}

LinTerm LinTerm::variable( VarRef v, int64_t coeff )
{
    LinTerm t;
    t.add_term( v, coeff );
    return t;
}

int64_t LinTerm::coeff( VarRef v ) const
{
    auto it = std::lower_bound( _terms.begin(), _terms.end(), v,
                                []( const auto& p, VarRef x ) { return p.first < x; } );
    return ( it != _terms.end() && it->first == v ) ? it->second : 0;
}

void LinTerm::add_term( VarRef v, int64_t c )
{
    if ( c == 0 )
        return;
    auto it = std::lower_bound( _terms.begin(), _terms.end(), v,
                                []( const auto& p, VarRef x ) { return p.first < x; } );
    if ( it != _terms.end() && it->first == v )
    {
        it->second = checked_add( it->second, c );
        if ( it->second == 0 )
            _terms.erase( it );
    }
    else
        _terms.insert( it, { v, c } );
}

LinTerm LinTerm::operator+( const LinTerm& o ) const
{
    LinTerm r = *this;
    for ( auto [ v, c ] : o._terms )
        r.add_term( v, c );
    r._const = checked_add( r._const, o._const );
    return r;
}

LinTerm LinTerm::operator-() const { return *this * -1; }

LinTerm LinTerm::operator-( const LinTerm& o ) const { return *this + ( -o ); }

LinTerm LinTerm::operator*( int64_t k ) const
{
    LinTerm r;
    if ( k == 0 )
        return r;
    r._terms.reserve( _terms.size() );
    for ( auto [ v, c ] : _terms )
        r._terms.emplace_back( v, checked_mul( c, k ) );
    r._const = checked_mul( _const, k );
    return r;
}

LinTerm LinTerm::substitute( const std::function< std::optional< LinTerm >( VarRef ) >& sub ) const
{
    LinTerm r = LinTerm::constant( _const );
    for ( auto [ v, c ] : _terms )
    {
        if ( auto repl = sub( v ) )
            r = r + *repl * c;
        else
            r.add_term( v, c );
    }
    return r;
}

LinTerm LinTerm::shifted( int by ) const
{
    LinTerm r = *this;
    for ( auto& [ v, c ] : r._terms )
        v.frame += by;
    return r;
}

std::optional< int64_t > LinTerm::evaluate( const std::function< std::optional< int64_t >( VarRef ) >& val ) const
{
    int64_t sum = _const;
    for ( auto [ v, c ] : _terms )
    {
        auto x = val( v );
        if ( !x )
            return std::nullopt;
        sum = checked_add( sum, checked_mul( c, *x ) );
    }
    return sum;
}

std::string LinTerm::to_string( const VarNamer& name ) const
{
    std::ostringstream os;
    bool first = true;
    for ( auto [ v, c ] : _terms )
    {
        if ( first )
        {
            if ( c == -1 )
                os << "-";
            else if ( c != 1 )
                os << c << "*";
        }
        else
        {
            os << ( c < 0 ? " - " : " + " );
            int64_t a = c < 0 ? -c : c;
            if ( a != 1 )
                os << a << "*";
        }
        os << name( v );
        first = false;
    }
    if ( first )
        os << _const;
    else if ( _const != 0 )
        os << ( _const < 0 ? " - " : " + " ) << ( _const < 0 ? -_const : _const );
    return os.str();
}

std::strong_ordering LinTerm::operator<=>( const LinTerm& o ) const
{
    if ( auto c = _terms <=> o._terms; c != 0 )
        return c;
    return _const <=> o._const;
}

// ---------------------------------------------------------------- Formula

struct Formula::node
{
    FormulaKind kind;
    LinTerm term;
    std::vector< Formula > kids;
    size_t hash = 0;
    size_t size = 1;
};

namespace {

size_t mix( size_t h, size_t v )
{
    return h ^ ( v + 0x9e3779b97f4a7c15ULL + ( h << 6 ) + ( h >> 2 ) );
}

size_t term_hash( const LinTerm& t )
{
    size_t h = 0x12345;
    for ( auto [ v, c ] : t.coeffs() )
    {
        h = mix( h, static_cast< size_t >( v.var ) );
        h = mix( h, static_cast< size_t >( v.frame ) );
        h = mix( h, static_cast< size_t >( c ) );
    }
    return mix( h, static_cast< size_t >( t.constant_part() ) );
}

int64_t term_gcd( const LinTerm& t )
{
    int64_t g = 0;
    for ( auto [ v, c ] : t.coeffs() )
        g = std::gcd( g, c < 0 ? -c : c );
    return g;
}

LinTerm divide_coeffs( const LinTerm& t, int64_t g, int64_t new_const )
{
    LinTerm r = LinTerm::constant( new_const );
    for ( auto [ v, c ] : t.coeffs() )
        r = r + LinTerm::variable( v, c / g );
    return r;
}

} // namespace

namespace {

struct builder
{
    template < typename Node >
    static std::shared_ptr< const Node > finish( std::shared_ptr< Node > n )
    {
        size_t h = mix( 0xabcdef, static_cast< size_t >( n->kind ) );
        if ( n->kind == FormulaKind::Le || n->kind == FormulaKind::Eq || n->kind == FormulaKind::Not )
            h = mix( h, term_hash( n->term ) );
        size_t sz = 1;
        for ( const auto& k : n->kids )
        {
            h = mix( h, k.hash() );
            sz += k.size();
        }
        n->hash = h;
        n->size = sz;
        return n;
    }
};

} // namespace

Formula::Formula() : Formula( top() ) {}

Formula Formula::top()
{
    static const Formula t( builder::finish( std::make_shared< node >( node{ FormulaKind::True, {}, {}, 0, 1 } ) ) );
    return t;
}

Formula Formula::bottom()
{
    static const Formula f( builder::finish( std::make_shared< node >( node{ FormulaKind::False, {}, {}, 0, 1 } ) ) );
    return f;
}

Formula Formula::le( const LinTerm& t )
{
    if ( t.is_constant() )
        return t.constant_part() <= 0 ? top() : bottom();
    int64_t g = term_gcd( t );
    LinTerm n = g == 1 ? t : divide_coeffs( t, g, ceil_div( t.constant_part(), g ) );
    return Formula( builder::finish( std::make_shared< node >( node{ FormulaKind::Le, std::move( n ), {}, 0, 1 } ) ) );
}

Formula Formula::eq( const LinTerm& t )
{
    if ( t.is_constant() )
        return t.constant_part() == 0 ? top() : bottom();
    int64_t g = term_gcd( t );
    if ( t.constant_part() % g != 0 )
        return bottom();
    LinTerm n = g == 1 ? t : divide_coeffs( t, g, t.constant_part() / g );
    if ( n.coeffs().front().second < 0 )
        n = -n;
    return Formula( builder::finish( std::make_shared< node >( node{ FormulaKind::Eq, std::move( n ), {}, 0, 1 } ) ) );
}

namespace {

void sort_unique( std::vector< Formula >& v )
{
    std::sort( v.begin(), v.end(), []( const Formula& a, const Formula& b ) { return ( a <=> b ) < 0; } );
    v.erase( std::unique( v.begin(), v.end() ), v.end() );
}

} // namespace

Formula Formula::conj( std::vector< Formula > parts )
{
    std::vector< Formula > flat;
    flat.reserve( parts.size() );
    for ( auto& p : parts )
    {
        switch ( p.kind() )
        {
        case FormulaKind::True: break;
        case FormulaKind::False: return bottom();
        case FormulaKind::And:
            for ( const auto& k : p.children() )
                flat.push_back( k );
            break;
        default: flat.push_back( std::move( p ) );
        }
    }
    sort_unique( flat );
    if ( flat.empty() )
        return top();
    if ( flat.size() == 1 )
        return flat.front();
    return Formula( builder::finish( std::make_shared< node >( node{ FormulaKind::And, {}, std::move( flat ), 0, 1 } ) ) );
}

Formula Formula::disj( std::vector< Formula > parts )
{
    std::vector< Formula > flat;
    flat.reserve( parts.size() );
    for ( auto& p : parts )
    {
        switch ( p.kind() )
        {
        case FormulaKind::False: break;
        case FormulaKind::True: return top();
        case FormulaKind::Or:
            for ( const auto& k : p.children() )
                flat.push_back( k );
            break;
        default: flat.push_back( std::move( p ) );
        }
    }
    sort_unique( flat );
    if ( flat.empty() )
        return bottom();
    if ( flat.size() == 1 )
        return flat.front();
    return Formula( builder::finish( std::make_shared< node >( node{ FormulaKind::Or, {}, std::move( flat ), 0, 1 } ) ) );
}

Formula Formula::negate( const Formula& f )
{
    switch ( f.kind() )
    {
    case FormulaKind::True: return bottom();
    case FormulaKind::False: return top();
    case FormulaKind::Le: return le( -f.term() + LinTerm::constant( 1 ) );
    case FormulaKind::Eq:
        return Formula( builder::finish( std::make_shared< node >( node{ FormulaKind::Not, f.term(), {}, 0, 1 } ) ) );
    case FormulaKind::Not: return eq( f.term() );
    case FormulaKind::And:
    case FormulaKind::Or:
    {
        std::vector< Formula > kids;
        kids.reserve( f.children().size() );
        for ( const auto& k : f.children() )
            kids.push_back( negate( k ) );
        return f.kind() == FormulaKind::And ? disj( std::move( kids ) ) : conj( std::move( kids ) );
    }
    }
    return f;
}

FormulaKind Formula::kind() const { return _node->kind; }
const LinTerm& Formula::term() const { return _node->term; }
const std::vector< Formula >& Formula::children() const { return _node->kids; }
size_t Formula::hash() const { return _node->hash; }
size_t Formula::size() const { return _node->size; }

Formula Formula::substitute( const std::function< std::optional< LinTerm >( VarRef ) >& sub ) const
{
    switch ( kind() )
    {
    case FormulaKind::True:
    case FormulaKind::False: return *this;
    case FormulaKind::Le: return le( term().substitute( sub ) );
    case FormulaKind::Eq: return eq( term().substitute( sub ) );
    case FormulaKind::Not: return negate( eq( term().substitute( sub ) ) );
    case FormulaKind::And:
    case FormulaKind::Or:
    {
        std::vector< Formula > kids;
        kids.reserve( children().size() );
        for ( const auto& k : children() )
            kids.push_back( k.substitute( sub ) );
        return kind() == FormulaKind::And ? conj( std::move( kids ) ) : disj( std::move( kids ) );
    }
    }
    return *this;
}

Formula Formula::shifted( int by ) const
{
    if ( by == 0 )
        return *this;
    return substitute( [ by ]( VarRef v ) -> std::optional< LinTerm > {
        return LinTerm::variable( { v.var, v.frame + by } );
    } );
}

std::optional< bool > Formula::evaluate( const std::function< std::optional< int64_t >( VarRef ) >& val ) const
{
    switch ( kind() )
    {
    case FormulaKind::True: return true;
    case FormulaKind::False: return false;
    case FormulaKind::Le:
    case FormulaKind::Eq:
    case FormulaKind::Not:
    {
        auto x = term().evaluate( val );
        if ( !x )
            return std::nullopt;
        if ( kind() == FormulaKind::Le )
            return *x <= 0;
        return kind() == FormulaKind::Eq ? *x == 0 : *x != 0;
    }
    case FormulaKind::And:
    case FormulaKind::Or:
    {
        bool is_and = kind() == FormulaKind::And;
        for ( const auto& k : children() )
        {
            auto r = k.evaluate( val );
            if ( !r )
                return std::nullopt;
            if ( *r != is_and )
                return !is_and;
        }
        return is_and;
    }
    }
    return std::nullopt;
}

void Formula::collect_vars( std::vector< VarRef >& out ) const
{
    if ( is_atom() || kind() == FormulaKind::Not )
        for ( auto [ v, c ] : term().coeffs() )
            out.push_back( v );
    for ( const auto& k : children() )
        k.collect_vars( out );
}

std::vector< VarRef > Formula::vars() const
{
    std::vector< VarRef > out;
    collect_vars( out );
    std::sort( out.begin(), out.end() );
    out.erase( std::unique( out.begin(), out.end() ), out.end() );
    return out;
}

namespace {

// Prints `t op 0` as `lhs op rhs`, moving the constant to the right.
std::string atom_string( const LinTerm& t, const char* op, const VarNamer& name )
{
    LinTerm lhs = t - LinTerm::constant( t.constant_part() );
    return lhs.to_string( name ) + " " + op + " " + std::to_string( -t.constant_part() );
}

} // namespace

std::string Formula::to_string( const VarNamer& name ) const
{
    switch ( kind() )
    {
    case FormulaKind::True: return "true";
    case FormulaKind::False: return "false";
    case FormulaKind::Le: return atom_string( term(), "<=", name );
    case FormulaKind::Eq: return atom_string( term(), "==", name );
    case FormulaKind::Not: return atom_string( term(), "!=", name );
    case FormulaKind::And:
    case FormulaKind::Or:
    {
        std::string out;
        const char* sep = kind() == FormulaKind::And ? " && " : " || ";
        for ( size_t i = 0; i < children().size(); ++i )
        {
            if ( i )
                out += sep;
            const auto& k = children()[ i ];
            bool paren = k.kind() == FormulaKind::And || k.kind() == FormulaKind::Or;
            out += paren ? "(" + k.to_string( name ) + ")" : k.to_string( name );
        }
        return out;
    }
    }
    return "?";
}

bool operator==( const Formula& a, const Formula& b )
{
    if ( a._node == b._node )
        return true;
    return ( a <=> b ) == 0;
}

std::strong_ordering operator<=>( const Formula& a, const Formula& b )
{
    if ( a._node == b._node )
        return std::strong_ordering::equal;
    if ( auto c = a.hash() <=> b.hash(); c != 0 )
        return c;
    if ( auto c = a.kind() <=> b.kind(); c != 0 )
        return c;
    if ( auto c = a.term() <=> b.term(); c != 0 )
        return c;
    const auto& ka = a.children();
    const auto& kb = b.children();
    if ( auto c = ka.size() <=> kb.size(); c != 0 )
        return c;
    for ( size_t i = 0; i < ka.size(); ++i )
        if ( auto c = ka[ i ] <=> kb[ i ]; c != 0 )
            return c;
    return std::strong_ordering::equal;
}

Formula compare( CmpOp op, const LinTerm& lhs, const LinTerm& rhs )
{
    const LinTerm one = LinTerm::constant( 1 );
    switch ( op )
    {
    case CmpOp::Eq: return Formula::eq( lhs - rhs );
    case CmpOp::Ne: return Formula::negate( Formula::eq( lhs - rhs ) );
    case CmpOp::Lt: return Formula::le( lhs - rhs + one );
    case CmpOp::Le: return Formula::le( lhs - rhs );
    case CmpOp::Gt: return Formula::le( rhs - lhs + one );
    case CmpOp::Ge: return Formula::le( rhs - lhs );
    }
    return Formula::top();
}

VarNamer frame_namer( const std::vector< std::string >& names )
{
    return [ names ]( VarRef v ) {
        std::string base = v.var >= 0 && static_cast< size_t >( v.var ) < names.size()
                               ? names[ v.var ]
                               : "v" + std::to_string( v.var );
        if ( v.frame == 0 )
            return base;
        if ( v.frame == 1 )
            return base + "'";
        return base + "@" + std::to_string( v.frame );
    };
}

} // namespace abpress
