#include "abpress/logic.hpp"

namespace abpress {

PathFormula path_formula( const Program& prog, const std::vector< int >& actions )
{
    PathFormula pf;
    pf.conjuncts.push_back( prog.init_formula() );
    for ( size_t i = 0; i < actions.size(); ++i )
        pf.conjuncts.push_back( prog.actions[ actions[ i ] ].instr.shifted( static_cast< int >( i ) ) );
    return pf;
}

Formula wp( const Program& prog, int action, const Formula& post )
{
    const Action& a = prog.actions[ action ];
    Formula q = post;
    if ( a.target >= 0 )
    {
        int x = a.target;
        const LinTerm& rhs = a.rhs;
        q = q.substitute( [ x, &rhs ]( VarRef v ) -> std::optional< LinTerm > {
            if ( v.var == x && v.frame == 0 )
                return rhs;
            return std::nullopt;
        } );
    }
    return Formula::implies( a.guard, q );
}

bool valid_chain( const Program& prog, const std::vector< int >& actions, const std::vector< Formula >& itps, Solver& solver )
{
    if ( itps.size() != actions.size() + 1 || !itps.back().is_false() )
        return false;
    if ( !solver.implies( prog.init_formula(), itps.front() ) )
        return false;
    for ( size_t i = 0; i < actions.size(); ++i )
    {
        Formula pre = itps[ i ] && prog.actions[ actions[ i ] ].instr;
        if ( !solver.implies( pre, itps[ i + 1 ].shifted( 1 ) ) )
            return false;
    }
    return true;
}

Interpolation interpolate( const Program& prog, const std::vector< int >& actions, Solver& solver, bool check,
                           InterpolationStats* stats )
{
    Interpolation out;
    auto pf = path_formula( prog, actions );
    auto res = solver.check( pf.conjunction() );
    if ( res.sat )
    {
        out.feasible = true;
        out.model = std::move( res.model );
        return out;
    }

    out.itps.assign( actions.size() + 1, Formula::bottom() );
    for ( size_t i = actions.size(); i > 0; --i )
        out.itps[ i - 1 ] = wp( prog, actions[ i - 1 ], out.itps[ i ] );

    if ( stats )
        ++stats->chains;
    if ( check )
    {
        if ( !valid_chain( prog, actions, out.itps, solver ) )
            throw InternalError( "interpolant chain failed its validity check" );
        if ( stats )
            stats->checked_steps += actions.size();
    }
    return out;
}

} // namespace abpress
