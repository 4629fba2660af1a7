#include "dpod/receiver.hpp"

#include "dpod/signal.hpp"

#include <cmath>

namespace dpod {

namespace {
constexpr double kZfGuard = 1e-9;
}

std::string to_string(Placement p) {
    return p == Placement::TimeDomainEq ? "time" : "dfts";
}

EqualizerKind EqualizerKind::lmmse(double variance) {
    if (!(variance >= 0.0)) throw std::invalid_argument("EqualizerKind: variance must be >= 0");
    return {Type::Lmmse, variance};
}

ComplexVec equalize(const ComplexVec& received, const ComplexVec& response,
                    const EqualizerKind& kind) {
    if (received.size() != response.size()) {
        throw std::invalid_argument("equalize: length mismatch");
    }
    ComplexVec out(received.size());
    if (kind.type == EqualizerKind::Type::ZeroForcing) {
        for (std::size_t k = 0; k < out.size(); ++k) {
            if (std::abs(response[k]) <= kZfGuard) {
                throw std::runtime_error("equalize: zero-forcing on a vanishing bin (|h| <= 1e-9)");
            }
            out[k] = received[k] / response[k];
        }
    } else {
        for (std::size_t k = 0; k < out.size(); ++k) {
            out[k] = received[k] * std::conj(response[k]) /
                     (std::norm(response[k]) + kind.noise_variance);
        }
    }
    return out;
}

DomainSignal receive_to_domain(const DomainSignal& x, const ChannelRealization& h,
                               const EqualizerKind& kind, Placement placement,
                               const SubcarrierConfig& cfg) {
    if (x.domain.kind != Domain::Kind::Time || x.size() != cfg.fft_size) {
        throw std::invalid_argument("receive_to_domain: expected time signal of length N");
    }
    const ComplexVec spectrum = dft(x.samples);
    const ComplexVec response = channel_freq_response(h, cfg.fft_size);
    const ComplexVec equalized =
        equalize(subcarrier_demap(spectrum, cfg), subcarrier_demap(response, cfg), kind);
    if (placement == Placement::DftSDomain) {
        return DomainSignal::dfts(idft(equalized));
    }
    return DomainSignal::time(idft(subcarrier_map(equalized, cfg)));
}

ComplexVec estimate_dfts_symbol(const DomainSignal& compensated, Placement placement,
                                const SubcarrierConfig& cfg) {
    if (placement == Placement::DftSDomain) {
        if (compensated.domain.kind != Domain::Kind::DftS ||
            compensated.size() != cfg.data_size) {
            throw std::invalid_argument("estimate_dfts_symbol: expected DftS signal of length M");
        }
        return compensated.samples;
    }
    return dfts_demodulate(compensated, cfg);
}

BitVec decide_bits(const DomainSignal& compensated, Placement placement,
                   const SubcarrierConfig& cfg, const Constellation& constellation) {
    return qam_demap_hard(estimate_dfts_symbol(compensated, placement, cfg), constellation);
}

}  // namespace dpod
