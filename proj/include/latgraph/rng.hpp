#pragma once

#include <cstdint>
#include <random>

namespace latgraph {

// Stateless 64-bit mixer (splitmix64 finalizer). Used to derive independent
// stream seeds from (master seed, cell index, trial index) tuples so that
// parallel Monte Carlo runs are reproducible regardless of scheduling.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a = 0, std::uint64_t b = 0) {
    std::uint64_t s = mix64(master);
    s = mix64(s ^ (a + 0x165667b19e3779f9ULL));
    s = mix64(s ^ (b + 0x27d4eb2f165667c5ULL));
    return s;
}

using Rng = std::mt19937_64;

// Every sampler takes an explicit Rng; no global RNG state anywhere.
inline Rng make_rng(std::uint64_t master, std::uint64_t a = 0, std::uint64_t b = 0) {
    return Rng(derive_seed(master, a, b));
}

} // namespace latgraph
