#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace praline {

struct parse_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct model_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace hashing {

// Seedable FNV-1a over bytes. Used wherever hashes must be stable across
// platforms and process restarts (std::hash gives no such guarantee).
inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t seed = 0) {
    std::uint64_t h = 1469598103934665603ull ^ (seed * 0x9e3779b97f4a7c15ull);
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

} // namespace hashing

// All stochastic behaviour in the library goes through explicitly seeded
// engines so that (seed, config, data) fully determine every run.
using rng_t = std::mt19937_64;

inline rng_t make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
    return rng_t(hashing::splitmix64(seed ^ hashing::splitmix64(stream + 1)));
}

} // namespace praline
