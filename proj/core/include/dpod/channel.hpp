// channel.hpp - Cyclic multipath channel, AWGN, block-fading tap generation.

#pragma once

#include "dpod/rng.hpp"
#include "dpod/types.hpp"

#include <optional>

namespace dpod {

/// One block-fading realization: taps held fixed for a trial.
struct ChannelRealization {
    ComplexVec taps;

    explicit ChannelRealization(ComplexVec t);
};

/// Power-delay profile for block fading. Powers are linear and normalized
/// to sum to 1; an optional Ricean factor splits the first tap into a
/// deterministic line-of-sight part and a diffuse part. los_factor is the
/// linear power ratio K (infinity selects a purely deterministic first tap).
struct PdpProfile {
    std::vector<std::size_t> delays;  // in samples, strictly increasing
    RealVec powers;                   // linear, same length as delays
    std::optional<double> los_factor;

    PdpProfile() = default;
    PdpProfile(std::vector<std::size_t> d, RealVec p, std::optional<double> los = std::nullopt);
};

/// Noise level as Es/N0 per complex sample at the receiver input.
struct NoiseSpec {
    double snr_db = 0.0;
};

/// Cyclic convolution with the zero-padded taps.
DomainSignal apply_channel(const DomainSignal& x, const ChannelRealization& h);

/// Add circularly-symmetric Gaussian noise with per-sample variance
/// mean_power(x) / 10^(snr_db/10).
DomainSignal add_awgn(const DomainSignal& x, const NoiseSpec& noise, Rng& rng);

/// Draw an independent block-fading realization from the profile.
ChannelRealization sample_taps(const PdpProfile& p, Rng& rng);

/// Eigenvalues of the cyclic channel on the centered N-point frequency grid:
/// the per-bin response the equalizer divides by.
ComplexVec channel_freq_response(const ChannelRealization& h, std::size_t fft_size);

}  // namespace dpod
