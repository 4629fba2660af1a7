// pa.hpp - Behavioral power amplifier models.
//
// The core model is a generalized memory polynomial evaluated on the
// magnitude-clamped input x_c[n] = x[n] / max(|x[n]|, 1):
//
//   q(x)[n] = sum_{k in K_a} sum_{l in L_a} a_{kl} x_c[n-l] |x_c[n-l]|^(2k)
//           + sum_{k in K_b} sum_{l in L_b} sum_{m in M_b}
//                 b_{klm} x_c[n-l] |x_c[n-l-m]|^(2k)
//
// Time shifts wrap modulo the block length, matching the per-symbol cyclic
// signal model used by the rest of the chain (an approximation of streaming
// amplifier behavior). K_b empty gives a memory polynomial; additionally
// L_a = {0} gives a memoryless polynomial. Every term maps j*x to j*q(x).

#pragma once

#include "dpod/types.hpp"

#include <map>

namespace dpod {

struct GmpCoefficients {
    std::string name;
    std::vector<int> k_a, l_a;          // diagonal index sets
    std::vector<int> k_b, l_b, m_b;     // cross-term index sets
    std::map<std::pair<int, int>, cplx> a;            // (k, l) -> coefficient
    std::map<std::tuple<int, int, int>, cplx> b;      // (k, l, m) -> coefficient
    unsigned intended_oversampling = 1;

    /// Validate index-set membership of every coefficient key.
    void validate() const;

    bool is_memory_polynomial() const { return k_b.empty(); }
    bool is_memoryless() const { return k_b.empty() && l_a == std::vector<int>{0}; }

    static GmpCoefficients load(const std::string& path);
    void save(const std::string& path) const;
};

struct PaConfig {
    double backoff_db = 0.0;  // input RMS relative to the clamp level, in dB
    unsigned oversampling = 1;

    PaConfig() = default;
    PaConfig(double backoff, unsigned u);
};

/// Clamp each sample's magnitude to 1, preserving phase.
ComplexVec clamp_magnitude(const ComplexVec& x);

/// Evaluate the GMP on the clamped input, shifts cyclic over the block.
ComplexVec apply_gmp(const ComplexVec& x, const GmpCoefficients& c);

/// Scale so the RMS is 10^(-backoff_db/20) relative to the clamp level 1.
ComplexVec scale_to_backoff(const ComplexVec& x, double backoff_db);

/// Oversample by zero-padding the centered spectrum; the sqrt(U) factor
/// preserves per-sample amplitude so the clamp level means the same thing
/// at both rates. upsample(x, U)[U*n] reproduces x[n] for in-band signals.
ComplexVec upsample(const ComplexVec& x, unsigned factor);

/// Inverse of upsample: keep the centered core bins, scale by 1/sqrt(U).
ComplexVec downsample(const ComplexVec& y, unsigned factor);

/// Full transmit nonlinearity: backoff scaling, oversampled GMP, downsampling.
DomainSignal amplify(const DomainSignal& x, const GmpCoefficients& c, const PaConfig& cfg);

}  // namespace dpod
