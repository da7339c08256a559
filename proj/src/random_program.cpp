#include "abpress/random_program.hpp"

#include <random>
#include <sstream>
#include <vector>

namespace abpress {

namespace {

class Gen
{
public:
    Gen( uint64_t seed, const RandomProgramConfig& cfg ) : _rng( seed ), _cfg( cfg )
    {
        for ( int i = 0; i < cfg.num_vars; ++i )
            _vars.push_back( std::string( 1, static_cast< char >( 'x' + i % 3 ) ) + ( i >= 3 ? std::to_string( i / 3 ) : "" ) );
    }

    int pick( int lo, int hi ) { return std::uniform_int_distribution< int >( lo, hi )( _rng ); }
    const std::string& var() { return _vars[ pick( 0, static_cast< int >( _vars.size() ) - 1 ) ]; }

    std::string expr()
    {
        switch ( pick( 0, 3 ) )
        {
        case 0: return std::to_string( pick( -1, 2 ) );
        case 1: return var();
        case 2: return var() + " + " + std::to_string( pick( 1, 2 ) );
        default: return var() + " - " + var();
        }
    }

    std::string cond()
    {
        static const char* ops[] = { "==", "!=", "<", "<=", ">", ">=" };
        return var() + " " + ops[ pick( 0, 5 ) ] + " " + std::to_string( pick( -1, 2 ) );
    }

    std::string stmt()
    {
        int k = pick( 0, 9 );
        if ( k == 8 && _cfg.allow_assume )
            return "assume(" + cond() + ");";
        if ( k == 9 && _cfg.allow_assert )
            return "assert(" + cond() + ");";
        return var() + " = " + expr() + ";";
    }

    std::string program()
    {
        std::ostringstream os;
        for ( const auto& v : _vars )
            os << "shared int " << v << " = " << pick( 0, 1 ) << ";\n";
        int threads = pick( 2, _cfg.max_threads );
        for ( int t = 1; t <= threads; ++t )
        {
            os << "thread T" << t << " {";
            int n = pick( 1, _cfg.max_actions );
            for ( int i = 0; i < n; ++i )
                os << " " << stmt();
            os << " }\n";
        }
        if ( pick( 0, 2 ) )
            os << "final assert(" << cond() << ");\n";
        return os.str();
    }

private:
    std::mt19937_64 _rng;
    RandomProgramConfig _cfg;
    std::vector< std::string > _vars;
};

} // namespace

std::string random_program( uint64_t seed, const RandomProgramConfig& cfg ) { return Gen( seed, cfg ).program(); }

} // namespace abpress
