#pragma once

#include <cstdint>
#include <random>

namespace looplab {

/// Derives statistically independent, reproducible RNG streams from a master
/// seed and a task index. Task results are then invariant under scheduling.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::mt19937_64 make_stream(std::uint64_t master_seed, std::uint64_t task_id) {
    return std::mt19937_64(splitmix64(splitmix64(master_seed) ^ splitmix64(task_id * 0x9e3779b97f4a7c15ULL + 1)));
}

inline double uniform01(std::mt19937_64& g) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(g);
}

} // namespace looplab
