#pragma once

#include <cstdint>
#include <random>

namespace eoslab {

// Default seed for every stochastic routine.
inline constexpr std::uint64_t kDefaultSeed = 0x5EEDE05ull;

// splitmix64: used for counter-based seed splitting so Monte-Carlo trials are
// independent of scheduling order.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t counter) {
    return splitmix64(base ^ splitmix64(counter + 1));
}

inline std::mt19937_64 make_rng(std::uint64_t base, std::uint64_t counter) {
    return std::mt19937_64(derive_seed(base, counter));
}

}  // namespace eoslab
