#pragma once

#include <bit>
#include <cstdint>
#include <random>
#include <vector>

#include "dynagree/errors.hpp"

namespace dynagree {

/// splitmix64 finalizer; used to derive substream seeds.
inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Stream splitting rule: the substream for (seed, stream) is seeded with
/// splitmix64(seed ^ splitmix64(stream)). Generators take per-round streams
/// so rounds can be evaluated independently and still reproduce exactly.
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(seed ^ splitmix64(stream));
}

/// Deterministic 64-bit generator (mt19937_64, which the standard pins down
/// bit for bit). Bounded draws and unit doubles are derived here rather than
/// through std distributions, whose output is implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n); n must be positive. Rejection on masked
    /// bits keeps the draw unbiased and platform-independent.
    int next_below(int n) {
        if (n <= 0) throw DomainError("Rng::next_below: bound must be positive");
        const auto bound = static_cast<std::uint64_t>(n);
        const std::uint64_t mask = ~std::uint64_t{0} >> std::countl_zero(bound);
        while (true) {
            const std::uint64_t v = next_u64() & mask;
            if (v < bound) return static_cast<int>(v);
        }
    }

    bool next_bool(double p) { return next_unit() < p; }

    /// Fisher-Yates shuffle.
    template <class T>
    void shuffle(std::vector<T>& v) {
        for (int i = static_cast<int>(v.size()) - 1; i > 0; --i)
            std::swap(v[i], v[next_below(i + 1)]);
    }

    /// k distinct values from [0, n), in random order.
    std::vector<int> sample_distinct(int n, int k) {
        std::vector<int> pool(n);
        for (int i = 0; i < n; ++i) pool[i] = i;
        for (int i = 0; i < k; ++i) std::swap(pool[i], pool[i + next_below(n - i)]);
        pool.resize(k);
        return pool;
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace dynagree
