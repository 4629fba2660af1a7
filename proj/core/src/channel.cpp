#include "dpod/channel.hpp"

#include "dpod/signal.hpp"

#include <cmath>

namespace dpod {

ChannelRealization::ChannelRealization(ComplexVec t) : taps(std::move(t)) {
    if (taps.empty()) throw std::invalid_argument("ChannelRealization: needs at least one tap");
    bool nonzero = false;
    for (const cplx& z : taps) {
        if (z != cplx(0.0, 0.0)) nonzero = true;
    }
    if (!nonzero) throw std::invalid_argument("ChannelRealization: all taps zero");
    if (!all_finite(taps)) throw std::invalid_argument("ChannelRealization: non-finite tap");
}

PdpProfile::PdpProfile(std::vector<std::size_t> d, RealVec p, std::optional<double> los)
    : delays(std::move(d)), powers(std::move(p)), los_factor(los) {
    if (delays.empty() || delays.size() != powers.size()) {
        throw std::invalid_argument("PdpProfile: delays and powers must be non-empty, same length");
    }
    for (std::size_t i = 1; i < delays.size(); ++i) {
        if (delays[i] <= delays[i - 1]) {
            throw std::invalid_argument("PdpProfile: delays must be strictly increasing");
        }
    }
    double total = 0.0;
    for (double w : powers) {
        if (!(w > 0.0)) throw std::invalid_argument("PdpProfile: powers must be positive");
        total += w;
    }
    for (double& w : powers) w /= total;
    if (los_factor && !(*los_factor >= 0.0)) {
        throw std::invalid_argument("PdpProfile: los_factor must be >= 0");
    }
}

DomainSignal apply_channel(const DomainSignal& x, const ChannelRealization& h) {
    if (x.domain.kind != Domain::Kind::Time) {
        throw std::invalid_argument("apply_channel: expects a time-domain signal");
    }
    if (h.taps.size() > x.size()) {
        throw std::invalid_argument("apply_channel: more taps than samples");
    }
    ComplexVec padded(x.size(), cplx(0.0, 0.0));
    for (std::size_t i = 0; i < h.taps.size(); ++i) padded[i] = h.taps[i];
    return DomainSignal::time(cyclic_convolve(padded, x.samples));
}

DomainSignal add_awgn(const DomainSignal& x, const NoiseSpec& noise, Rng& rng) {
    const double p = mean_power(x.samples);
    if (p <= 0.0) throw std::invalid_argument("add_awgn: zero-power input");
    const double variance = p / std::pow(10.0, noise.snr_db / 10.0);
    ComplexVec out = x.samples;
    for (cplx& z : out) z += rng.cgaussian(variance);
    return DomainSignal(std::move(out), x.domain);
}

ChannelRealization sample_taps(const PdpProfile& p, Rng& rng) {
    ComplexVec taps(p.delays.back() + 1, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < p.delays.size(); ++i) {
        const double power = p.powers[i];
        cplx tap;
        if (i == 0 && p.los_factor) {
            const double k = *p.los_factor;
            if (std::isinf(k)) {
                tap = cplx(std::sqrt(power), 0.0);
            } else {
                tap = cplx(std::sqrt(power * k / (k + 1.0)), 0.0) +
                      rng.cgaussian(power / (k + 1.0));
            }
        } else {
            tap = rng.cgaussian(power);
        }
        taps[p.delays[i]] = tap;
    }
    return ChannelRealization(std::move(taps));
}

ComplexVec channel_freq_response(const ChannelRealization& h, std::size_t fft_size) {
    if (h.taps.size() > fft_size) {
        throw std::invalid_argument("channel_freq_response: more taps than bins");
    }
    ComplexVec padded(fft_size, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < h.taps.size(); ++i) padded[i] = h.taps[i];
    ComplexVec resp = dft(padded);
    const double root_n = std::sqrt(static_cast<double>(fft_size));
    for (cplx& z : resp) z *= root_n;
    return resp;
}

}  // namespace dpod
