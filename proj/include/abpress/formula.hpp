#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace abpress {

/// Raised when a coefficient or constant leaves the int64 range.
struct ArithmeticOverflow : std::overflow_error
{
    using std::overflow_error::overflow_error;
};

int64_t checked_add( int64_t a, int64_t b );
int64_t checked_mul( int64_t a, int64_t b );
int64_t floor_div( int64_t a, int64_t b );
int64_t ceil_div( int64_t a, int64_t b );

/// A program variable in a given time frame. Frame 0 is the current state,
/// frame 1 the primed state of a transition formula; path formulas shift
/// both forward.
struct VarRef
{
    int var = 0;
    int frame = 0;

    auto operator<=>( const VarRef& ) const = default;
};

using VarNamer = std::function< std::string( VarRef ) >;

/// Linear integer term: sum of coeff * var plus a constant.
class LinTerm
{
public:
    LinTerm() = default;

    static LinTerm constant( int64_t c );
    static LinTerm variable( VarRef v, int64_t coeff = 1 );

    [[nodiscard]] const std::vector< std::pair< VarRef, int64_t > >& coeffs() const { return _terms; }
    [[nodiscard]] int64_t constant_part() const { return _const; }
    [[nodiscard]] bool is_constant() const { return _terms.empty(); }
    [[nodiscard]] int64_t coeff( VarRef v ) const;

    LinTerm operator+( const LinTerm& o ) const;
    LinTerm operator-( const LinTerm& o ) const;
    LinTerm operator-() const;
    LinTerm operator*( int64_t k ) const;

    /// Replaces every variable for which `sub` returns a term.
    [[nodiscard]] LinTerm substitute( const std::function< std::optional< LinTerm >( VarRef ) >& sub ) const;
    [[nodiscard]] LinTerm shifted( int by ) const;
    [[nodiscard]] std::optional< int64_t > evaluate( const std::function< std::optional< int64_t >( VarRef ) >& val ) const;

    [[nodiscard]] std::string to_string( const VarNamer& name ) const;

    bool operator==( const LinTerm& ) const = default;
    std::strong_ordering operator<=>( const LinTerm& o ) const;

private:
    void add_term( VarRef v, int64_t c );

    std::vector< std::pair< VarRef, int64_t > > _terms; // sorted by VarRef, no zero coefficients
    int64_t _const = 0;
};

enum class FormulaKind { True, False, Le, Eq, Not, And, Or };

/// Quantifier-free formula over linear integer atoms, kept in negation
/// normal form. Atoms are `t <= 0` and `t = 0`; the only negated node is
/// `!(t = 0)`. Construction goes through the smart constructors, which fold
/// constants, flatten connectives and order children by structural hash.
class Formula
{
public:
    Formula();

    static Formula top();
    static Formula bottom();
    static Formula le( const LinTerm& t ); // t <= 0
    static Formula eq( const LinTerm& t ); // t == 0
    static Formula conj( std::vector< Formula > parts );
    static Formula disj( std::vector< Formula > parts );
    static Formula negate( const Formula& f );
    static Formula implies( const Formula& a, const Formula& b ) { return disj( { negate( a ), b } ); }

    [[nodiscard]] FormulaKind kind() const;
    [[nodiscard]] bool is_true() const { return kind() == FormulaKind::True; }
    [[nodiscard]] bool is_false() const { return kind() == FormulaKind::False; }
    [[nodiscard]] bool is_atom() const { return kind() == FormulaKind::Le || kind() == FormulaKind::Eq; }

    /// Term of an atom, or of the negated equality for a Not node.
    [[nodiscard]] const LinTerm& term() const;
    [[nodiscard]] const std::vector< Formula >& children() const;
    [[nodiscard]] size_t hash() const;
    [[nodiscard]] size_t size() const;

    [[nodiscard]] Formula substitute( const std::function< std::optional< LinTerm >( VarRef ) >& sub ) const;
    [[nodiscard]] Formula shifted( int by ) const;
    [[nodiscard]] std::optional< bool > evaluate( const std::function< std::optional< int64_t >( VarRef ) >& val ) const;
    void collect_vars( std::vector< VarRef >& out ) const;
    [[nodiscard]] std::vector< VarRef > vars() const;

    [[nodiscard]] std::string to_string( const VarNamer& name ) const;

    friend bool operator==( const Formula& a, const Formula& b );
    friend std::strong_ordering operator<=>( const Formula& a, const Formula& b );

    friend Formula operator&&( const Formula& a, const Formula& b ) { return conj( { a, b } ); }
    friend Formula operator||( const Formula& a, const Formula& b ) { return disj( { a, b } ); }
    friend Formula operator!( const Formula& a ) { return negate( a ); }

private:
    struct node;
    explicit Formula( std::shared_ptr< const node > n ) : _node( std::move( n ) ) {}

    std::shared_ptr< const node > _node;
};

enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };

Formula compare( CmpOp op, const LinTerm& lhs, const LinTerm& rhs );

/// Names variables as `x` (frame 0), `x'` (frame 1) and `x@k` otherwise.
VarNamer frame_namer( const std::vector< std::string >& names );

} // namespace abpress
