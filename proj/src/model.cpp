#include "abpress/model.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>

namespace abpress {

const char* to_string( ActionKind k )
{
    switch ( k )
    {
    case ActionKind::Assign: return "assign";
    case ActionKind::Assume: return "assume";
    case ActionKind::Lock: return "lock";
    case ActionKind::Unlock: return "unlock";
    }
    return "?";
}

GlobalLoc Program::initial() const
{
    GlobalLoc l;
    for ( const auto& t : threads )
        l.push_back( t.l0 );
    return l;
}

bool Program::all_terminated( const GlobalLoc& l ) const
{
    for ( const auto& t : threads )
        if ( !t.checker && !t.out[ l[ t.id ] ].empty() )
            return false;
    return true;
}

bool Program::is_error( const GlobalLoc& l ) const
{
    for ( const auto& t : threads )
        if ( l[ t.id ] == t.l_err )
            return true;
    return false;
}

std::vector< int > Program::next( const GlobalLoc& l, int thread ) const
{
    const Thread& t = threads[ thread ];
    if ( t.checker && ( !all_terminated( l ) || is_error( l ) ) )
        return {};
    return t.out[ l[ thread ] ];
}

std::vector< int > Program::enabled( const GlobalLoc& l ) const
{
    std::vector< int > out;
    for ( const auto& t : threads )
        for ( int a : next( l, t.id ) )
            out.push_back( a );
    return out;
}

std::vector< int > Program::enabled_threads( const GlobalLoc& l ) const
{
    std::vector< int > out;
    for ( const auto& t : threads )
        if ( !next( l, t.id ).empty() )
            out.push_back( t.id );
    return out;
}

Footprint Program::footprint( int action ) const
{
    const Action& a = actions[ action ];
    return { a.reads, a.writes };
}

namespace {

bool intersects( const std::vector< int >& a, const std::vector< int >& b )
{
    for ( int x : a )
        if ( std::binary_search( b.begin(), b.end(), x ) )
            return true;
    return false;
}

} // namespace

bool Program::dependent( int a, int b ) const
{
    const Action& x = actions[ a ];
    const Action& y = actions[ b ];
    if ( x.thread == y.thread )
        return true;
    // The checker only runs once every other thread is done, so no action
    // commutes with it.
    if ( threads[ x.thread ].checker || threads[ y.thread ].checker )
        return true;
    return intersects( x.writes, y.reads ) || intersects( x.writes, y.writes ) || intersects( y.writes, x.reads );
}

GlobalLoc Program::step( const GlobalLoc& l, int action ) const
{
    GlobalLoc out = l;
    out[ actions[ action ].thread ] = actions[ action ].exit;
    return out;
}

Formula Program::init_formula() const
{
    std::vector< Formula > parts;
    for ( size_t v = 0; v < vars.size(); ++v )
        parts.push_back( compare( CmpOp::Eq, LinTerm::variable( VarRef{ static_cast< int >( v ), 0 } ), LinTerm::constant( init[ v ] ) ) );
    return Formula::conj( std::move( parts ) );
}

VarNamer Program::namer() const { return frame_namer( vars ); }

std::string Program::loc_string( const GlobalLoc& l ) const
{
    std::string s = "<";
    for ( size_t i = 0; i < l.size(); ++i )
    {
        if ( i )
            s += ",";
        s += l[ i ] == threads[ i ].l_err ? "E" : std::to_string( l[ i ] );
    }
    return s + ">";
}

std::string Program::action_label( int action ) const
{
    const Action& a = actions[ action ];
    return threads[ a.thread ].name + ":" + a.text;
}

std::string Program::dump_cfg() const
{
    auto set_string = [&]( const std::vector< int >& s ) {
        std::string out = "{";
        for ( size_t i = 0; i < s.size(); ++i )
            out += ( i ? "," : "" ) + vars[ s[ i ] ];
        return out + "}";
    };
    std::vector< int > order( actions.size() );
    for ( size_t i = 0; i < order.size(); ++i )
        order[ i ] = static_cast< int >( i );
    std::sort( order.begin(), order.end(), [&]( int a, int b ) {
        return std::tie( actions[ a ].thread, actions[ a ].entry, a ) < std::tie( actions[ b ].thread, actions[ b ].entry, b );
    } );

    std::ostringstream os;
    auto name = namer();
    for ( int id : order )
    {
        const Action& a = actions[ id ];
        const Thread& t = threads[ a.thread ];
        auto loc = [&]( int l ) { return l == t.l_err ? std::string( "err" ) : std::to_string( l ); };
        os << t.name << ":" << loc( a.entry ) << " -> " << loc( a.exit ) << " : " << a.instr.to_string( name )
           << " ; R=" << set_string( a.reads ) << " W=" << set_string( a.writes ) << "\n";
    }
    return os.str();
}

std::optional< std::vector< int64_t > > Program::execute( int action, const std::vector< int64_t >& state ) const
{
    const Action& a = actions[ action ];
    auto val = [&]( VarRef v ) -> std::optional< int64_t > { return state[ v.var ]; };
    if ( a.guard.evaluate( val ) != std::optional< bool >( true ) )
        return std::nullopt;
    std::vector< int64_t > out = state;
    if ( a.target >= 0 )
        out[ a.target ] = *a.rhs.evaluate( val );
    return out;
}

} // namespace abpress
