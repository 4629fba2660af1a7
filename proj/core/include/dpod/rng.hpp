// rng.hpp - Deterministic random streams for Monte-Carlo trials.
//
// Every trial owns one Rng seeded through derive_seed, a counter-based split
// of the master seed. Streams never depend on execution order, so sweeps are
// reproducible under any thread count. Gaussian and uniform draws are
// generated here rather than through std::*_distribution, whose output is
// implementation-defined.

#pragma once

#include "dpod/types.hpp"

#include <cmath>
#include <cstdint>
#include <random>

namespace dpod {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
}  // namespace detail

/// Stream tags keep the training stream and the per-trial streams disjoint.
enum class StreamKind : std::uint64_t { Training = 1, Trial = 2, Generic = 3 };

/// Collapse (master seed, stream kind, indices) into one 64-bit seed.
inline std::uint64_t derive_seed(std::uint64_t master, StreamKind kind, std::uint64_t a = 0,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t s = master;
    std::uint64_t h = detail::splitmix64(s);
    s ^= static_cast<std::uint64_t>(kind) + 0x1000000000000001ULL;
    h ^= detail::splitmix64(s);
    s ^= a + 0x2000000000000003ULL;
    h ^= detail::splitmix64(s);
    s ^= b + 0x3000000000000005ULL;
    h ^= detail::splitmix64(s);
    s ^= c + 0x4000000000000007ULL;
    h ^= detail::splitmix64(s);
    return h;
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in (0, 1].
    double uniform_pos() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool bit() { return (next_u64() >> 63) != 0; }

    std::vector<std::uint8_t> bits(std::size_t count) {
        std::vector<std::uint8_t> out(count);
        std::uint64_t word = 0;
        int left = 0;
        for (std::size_t i = 0; i < count; ++i) {
            if (left == 0) {
                word = next_u64();
                left = 64;
            }
            out[i] = static_cast<std::uint8_t>(word & 1u);
            word >>= 1;
            --left;
        }
        return out;
    }

    /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
    cplx cgaussian(double variance) {
        const double r = std::sqrt(-std::log(uniform_pos()) * variance);
        const double phi = 2.0 * M_PI * uniform();
        return cplx(r * std::cos(phi), r * std::sin(phi));
    }

    /// Real Gaussian, zero mean, given variance.
    double gaussian(double variance) {
        const double r = std::sqrt(-2.0 * std::log(uniform_pos()) * variance);
        return r * std::cos(2.0 * M_PI * uniform());
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace dpod
