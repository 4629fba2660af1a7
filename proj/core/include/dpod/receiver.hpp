// receiver.hpp - Frequency-domain equalization with known channel taps and
// the two compensation-placement pipelines.
//
// Both pipelines share the front end (N-point DFT, per-bin equalization on
// the data bins):
//   - DftS placement: demap the data bins and take the M-point inverse DFT,
//     producing the precoded-domain symbol estimate.
//   - TimeDomainEq placement: re-insert the equalized data bins between the
//     guards and take the N-point inverse DFT, producing the
//     channel-equalized time signal (equal to the guard-band lowpass taps
//     convolved with the amplified signal when the channel is identity).

#pragma once

#include "dpod/channel.hpp"
#include "dpod/waveform.hpp"

namespace dpod {

enum class Placement { TimeDomainEq, DftSDomain };

std::string to_string(Placement p);

/// Equalizer selection. LMMSE carries the per-sample noise variance.
struct EqualizerKind {
    enum class Type { ZeroForcing, Lmmse };
    Type type = Type::ZeroForcing;
    double noise_variance = 0.0;

    static EqualizerKind zf() { return {Type::ZeroForcing, 0.0}; }
    static EqualizerKind lmmse(double variance);
};

/// Per-bin equalization. Zero forcing divides and rejects bins with
/// |h| <= 1e-9; LMMSE applies conj(h)/(|h|^2 + variance).
ComplexVec equalize(const ComplexVec& received, const ComplexVec& response,
                    const EqualizerKind& kind);

/// Front end from received time signal to the compensation domain, using
/// the true channel taps. Equalization acts on the data bins after
/// demapping, which is identical to equalizing the full spectrum before
/// projection but never divides by a guard-bin response.
DomainSignal receive_to_domain(const DomainSignal& x, const ChannelRealization& h,
                               const EqualizerKind& kind, Placement placement,
                               const SubcarrierConfig& cfg);

/// Precoded-domain symbol estimate from a compensated signal: identity for
/// DftS placement, DFT-s demodulation for time placement.
ComplexVec estimate_dfts_symbol(const DomainSignal& compensated, Placement placement,
                                const SubcarrierConfig& cfg);

/// Hard-decision bits of the estimated precoded-domain symbol.
BitVec decide_bits(const DomainSignal& compensated, Placement placement,
                   const SubcarrierConfig& cfg, const Constellation& constellation);

}  // namespace dpod
