#pragma once

#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace rmot {

/// SplitMix64 (Steele, Lea, Flood 2014). Fully specified, so sequences are
/// identical on every platform and compiler.
class SplitMix64 {
public:
    explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

    constexpr std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1) from the top 53 bits.
    constexpr double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [lo, hi] (inclusive). Requires lo <= hi.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

private:
    std::uint64_t state_;
};

/// FNV-1a 64-bit, used to turn names into stream keys.
constexpr std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

/// Independent generator for an entity: the seed and the key parts are
/// folded through the SplitMix64 finalizer, so the stream depends only on
/// (seed, keys) and never on the order in which entities are visited.
SplitMix64 stream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys);

}  // namespace rmot
