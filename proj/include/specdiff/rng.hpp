// Copyright 2026 The specdiff Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace specdiff {

// Seeded random source with platform-independent output. std::mt19937_64 is
// bit-exact by the standard; the distributions below are written out because
// the standard library ones are implementation-defined.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform in [lo, hi], inclusive on both ends.
    std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi) {
        if (hi <= lo) return lo;
        const std::uint64_t span = hi - lo;
        if (span == UINT64_MAX) return next();
        const std::uint64_t range = span + 1;
        const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % range);
        std::uint64_t draw = next();
        while (draw >= limit) draw = next();
        return lo + draw % range;
    }

    std::int64_t uniform_signed(std::int64_t lo, std::int64_t hi) {
        const auto offset = uniform(0, static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo));
        return static_cast<std::int64_t>(static_cast<std::uint64_t>(lo) + offset);
    }

    std::size_t index(std::size_t size) { return size == 0 ? 0 : static_cast<std::size_t>(uniform(0, size - 1)); }

    bool chance(std::uint32_t numerator, std::uint32_t denominator) { return uniform(1, denominator) <= numerator; }

    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    template <typename T>
    const T& pick(std::span<const T> items) {
        return items[index(items.size())];
    }

  private:
    std::mt19937_64 engine_;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// FNV-1a; stable across runs and platforms, unlike std::hash.
inline std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

}  // namespace specdiff
