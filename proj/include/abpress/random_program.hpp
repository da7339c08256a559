#pragma once

#include <cstdint>
#include <string>

namespace abpress {

struct RandomProgramConfig
{
    int max_threads = 3;
    int max_actions = 4; // statements per thread
    int num_vars = 2;
    bool allow_assume = true;
    bool allow_assert = true;
};

/// Loop-free program text drawn deterministically from `seed`.
std::string random_program( uint64_t seed, const RandomProgramConfig& cfg = {} );

} // namespace abpress
