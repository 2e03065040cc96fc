#pragma once

#include <cstdint>
#include <random>

namespace cbw {

using Engine = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Independent substream for (master seed, domain, index). Domains keep the
/// photon-counting and CW-noise streams apart for the same master seed.
inline Engine substream(std::uint64_t master, std::uint64_t domain, std::uint64_t index)
{
    return Engine{splitmix64(splitmix64(master ^ splitmix64(domain)) + index)};
}

} // namespace cbw
