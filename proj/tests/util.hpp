#pragma once

#include "abpress/model.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace abpress::test {

inline std::string read_file( const std::filesystem::path& p )
{
    std::ifstream in( p );
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct CorpusEntry
{
    std::string name;
    std::string path;
    std::string expect; // SAFE or UNSAFE
};

inline std::vector< CorpusEntry > corpus()
{
    std::vector< CorpusEntry > out;
    for ( const auto& e : std::filesystem::directory_iterator( ABPRESS_CORPUS_DIR ) )
    {
        if ( e.path().extension() != ".abp" )
            continue;
        std::string first;
        std::ifstream in( e.path() );
        std::getline( in, first );
        auto at = first.find( "expect:" );
        std::string expect = at == std::string::npos ? "" : first.substr( at + 8 );
        out.push_back( { e.path().stem().string(), e.path().string(), expect } );
    }
    std::sort( out.begin(), out.end(), []( const auto& a, const auto& b ) { return a.name < b.name; } );
    return out;
}

inline std::string corpus_file( const std::string& name ) { return std::string( ABPRESS_CORPUS_DIR ) + "/" + name + ".abp"; }

inline int var_index( const Program& p, const std::string& name )
{
    return static_cast< int >( std::find( p.vars.begin(), p.vars.end(), name ) - p.vars.begin() );
}

} // namespace abpress::test
