#include "abpress/summary.hpp"
#include "abpress/model.hpp"

#include <algorithm>
#include <iterator>

namespace abpress {

namespace {

std::vector< int > set_union( const std::vector< int >& a, const std::vector< int >& b )
{
    std::vector< int > out;
    std::set_union( a.begin(), a.end(), b.begin(), b.end(), std::back_inserter( out ) );
    return out;
}

std::vector< int > set_minus( const std::vector< int >& a, const std::vector< int >& b )
{
    std::vector< int > out;
    std::set_difference( a.begin(), a.end(), b.begin(), b.end(), std::back_inserter( out ) );
    return out;
}

bool meets( const std::vector< int >& a, const std::vector< int >& b )
{
    auto i = a.begin();
    auto j = b.begin();
    while ( i != a.end() && j != b.end() )
    {
        if ( *i == *j )
            return true;
        *i < *j ? ++i : ++j;
    }
    return false;
}

} // namespace

Signature sig( const Program& prog, int action )
{
    const Action& a = prog.actions[ action ];
    return { a.thread, a.reads, a.writes };
}

PathSum combine( const Signature& s, const PathSum& suffix )
{
    PathSum out;
    bool merged = false;
    for ( const auto& e : suffix )
    {
        if ( e.thread == s.thread )
        {
            out.push_back( { s.thread, set_union( s.reads, e.reads ), set_union( s.writes, e.writes ) } );
            merged = true;
            continue;
        }
        Signature kept{ e.thread, set_minus( e.reads, s.writes ), set_minus( e.writes, s.writes ) };
        if ( !kept.reads.empty() || !kept.writes.empty() )
            out.push_back( std::move( kept ) );
    }
    if ( !merged )
    {
        auto at = std::find_if( out.begin(), out.end(), [ & ]( const Signature& e ) { return e.thread > s.thread; } );
        out.insert( at, s );
    }
    return out;
}

NodeSummary leaf_summary() { return { PathSum{} }; }

NodeSummary combine( const Signature& s, const NodeSummary& suffix )
{
    NodeSummary out;
    for ( const auto& p : suffix )
        out.insert( combine( s, p ) );
    return out;
}

std::set< Signature > entries( const NodeSummary& s )
{
    std::set< Signature > out;
    for ( const auto& p : s )
        out.insert( p.begin(), p.end() );
    return out;
}

bool summary_races( const Signature& a, const Signature& b )
{
    if ( a.thread == b.thread )
        return false;
    return meets( a.writes, b.reads ) || meets( a.writes, b.writes ) || meets( b.writes, a.reads );
}

NodeSummary SigTree::node_summary( int n ) const
{
    if ( out[ n ].empty() )
        return leaf_summary();
    NodeSummary s;
    for ( const auto& e : out[ n ] )
    {
        auto part = combine( e.sig, node_summary( e.child ) );
        s.insert( part.begin(), part.end() );
    }
    return s;
}

std::vector< std::vector< Signature > > SigTree::paths( int n ) const
{
    if ( out[ n ].empty() )
        return { {} };
    std::vector< std::vector< Signature > > all;
    for ( const auto& e : out[ n ] )
        for ( auto& p : paths( e.child ) )
        {
            p.insert( p.begin(), e.sig );
            all.push_back( std::move( p ) );
        }
    return all;
}

PathSum path_sum( const std::vector< Signature >& path )
{
    PathSum s;
    for ( auto it = path.rbegin(); it != path.rend(); ++it )
        s = combine( *it, s );
    return s;
}

std::string to_string( const Signature& s, const std::vector< std::string >& vars, const std::vector< std::string >& threads )
{
    auto set = [ & ]( const std::vector< int >& xs ) {
        std::string out = "{";
        for ( size_t i = 0; i < xs.size(); ++i )
            out += ( i ? "," : "" ) + vars[ xs[ i ] ];
        return out + "}";
    };
    return "(" + threads[ s.thread ] + "," + set( s.reads ) + "," + set( s.writes ) + ")";
}

} // namespace abpress
