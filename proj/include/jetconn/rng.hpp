#pragma once

#include <cstdint>
#include <vector>

namespace jetconn {

/// Deterministic, platform-independent pseudo-random source (splitmix64).
/// All randomized sampling in the library flows through this type so that a
/// 64-bit seed reproduces byte-identical results everywhere; std::uniform_*
/// distributions are implementation-defined and deliberately avoided.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    std::vector<double> uniform_vector(std::size_t count, double lo, double hi) {
        std::vector<double> out(count);
        for (auto& x : out) x = uniform(lo, hi);
        return out;
    }

    /// Derive an independent stream (for parallel or per-check use).
    Rng fork() { return Rng(next_u64() ^ 0xd1b54a32d192ed03ULL); }

private:
    std::uint64_t state_;
};

} // namespace jetconn
