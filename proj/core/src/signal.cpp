#include "dpod/signal.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>

namespace dpod {

std::string to_string(Domain::Kind kind) {
    switch (kind) {
        case Domain::Kind::Time: return "time";
        case Domain::Kind::Freq: return "freq";
        case Domain::Kind::DftS: return "dfts";
    }
    return "?";
}

DomainSignal::DomainSignal(ComplexVec s, Domain d) : samples(std::move(s)), domain(d) {
    if (samples.size() != domain.size) {
        throw std::invalid_argument("DomainSignal: " + to_string(domain.kind) + " domain expects " +
                                    std::to_string(domain.size) + " samples, got " +
                                    std::to_string(samples.size()));
    }
    if (!all_finite(samples)) {
        throw std::invalid_argument("DomainSignal: non-finite sample");
    }
}

DomainSignal DomainSignal::time(ComplexVec s) {
    const std::size_t n = s.size();
    return DomainSignal(std::move(s), Domain::time(n));
}
DomainSignal DomainSignal::freq(ComplexVec s) {
    const std::size_t n = s.size();
    return DomainSignal(std::move(s), Domain::freq(n));
}
DomainSignal DomainSignal::dfts(ComplexVec s) {
    const std::size_t m = s.size();
    return DomainSignal(std::move(s), Domain::dfts(m));
}

SubcarrierConfig::SubcarrierConfig(std::size_t n, std::size_t m, std::size_t gl, std::size_t gu)
    : fft_size(n), data_size(m), lower_guard(gl), upper_guard(gu) {
    if (m < 1) throw std::invalid_argument("SubcarrierConfig: data_size must be >= 1");
    if (gl + m + gu != n) {
        throw std::invalid_argument("SubcarrierConfig: guards + data must equal fft_size");
    }
}

bool all_finite(const ComplexVec& v) {
    for (const cplx& z : v) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
    return true;
}

bool all_finite(const RealVec& v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

double norm2(const ComplexVec& v) {
    double s = 0.0;
    for (const cplx& z : v) s += std::norm(z);
    return std::sqrt(s);
}

double norm2(const RealVec& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double mean_power(const ComplexVec& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (const cplx& z : v) s += std::norm(z);
    return s / static_cast<double>(v.size());
}

namespace {

// Process-wide FFTW plan cache. Plans are created once per (size, direction)
// with FFTW_ESTIMATE | FFTW_UNALIGNED, so execution works on any buffer and
// the chosen kernel never depends on runtime timing or allocation addresses.
// fftw_execute_dft on a shared plan with private buffers is thread-safe;
// plan creation is serialized.
class FftPlans {
public:
    static FftPlans& instance() {
        static FftPlans cache;
        return cache;
    }

    void execute(int sign, ComplexVec& buf) {
        fftw_plan plan = nullptr;
        {
            std::lock_guard<std::mutex> lock(mutex_);
            auto key = std::make_pair(buf.size(), sign);
            auto it = plans_.find(key);
            if (it == plans_.end()) {
                ComplexVec dummy(buf.size());
                plan = fftw_plan_dft_1d(static_cast<int>(buf.size()),
                                        reinterpret_cast<fftw_complex*>(dummy.data()),
                                        reinterpret_cast<fftw_complex*>(dummy.data()), sign,
                                        FFTW_ESTIMATE | FFTW_UNALIGNED);
                plans_.emplace(key, plan);
            } else {
                plan = it->second;
            }
        }
        fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(buf.data()),
                         reinterpret_cast<fftw_complex*>(buf.data()));
    }

private:
    FftPlans() = default;
    std::mutex mutex_;
    std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

// Rotate natural-order spectrum into centered order: out[k] = in[(k - c) mod N].
ComplexVec center_bins(const ComplexVec& natural) {
    const std::size_t n = natural.size();
    const std::size_t c = n / 2;
    ComplexVec out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = natural[(k + n - c) % n];
    return out;
}

ComplexVec uncenter_bins(const ComplexVec& centered) {
    const std::size_t n = centered.size();
    const std::size_t c = n / 2;
    ComplexVec out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = centered[(k + c) % n];
    return out;
}

}  // namespace

ComplexVec dft(const ComplexVec& x) {
    if (x.empty()) throw std::invalid_argument("dft: empty input");
    ComplexVec buf = x;
    FftPlans::instance().execute(FFTW_FORWARD, buf);
    const double scale = 1.0 / std::sqrt(static_cast<double>(x.size()));
    for (cplx& z : buf) z *= scale;
    return center_bins(buf);
}

ComplexVec dft(const DomainSignal& x) { return dft(x.samples); }

ComplexVec idft(const ComplexVec& x) {
    if (x.empty()) throw std::invalid_argument("idft: empty input");
    ComplexVec buf = uncenter_bins(x);
    FftPlans::instance().execute(FFTW_BACKWARD, buf);
    const double scale = 1.0 / std::sqrt(static_cast<double>(x.size()));
    for (cplx& z : buf) z *= scale;
    return buf;
}

RealVec real_stack(const ComplexVec& x) {
    const std::size_t n = x.size();
    RealVec out(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = x[i].real();
        out[n + i] = x[i].imag();
    }
    return out;
}

RealVec real_stack_rotated(const ComplexVec& x) {
    const std::size_t n = x.size();
    RealVec out(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = x[i].imag();
        out[n + i] = -x[i].real();
    }
    return out;
}

ComplexVec subcarrier_map(const ComplexVec& data, const SubcarrierConfig& cfg) {
    if (data.size() != cfg.data_size) {
        throw std::invalid_argument("subcarrier_map: expected " + std::to_string(cfg.data_size) +
                                    " data bins, got " + std::to_string(data.size()));
    }
    ComplexVec out(cfg.fft_size, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < cfg.data_size; ++i) out[cfg.lower_guard + i] = data[i];
    return out;
}

ComplexVec subcarrier_demap(const ComplexVec& spectrum, const SubcarrierConfig& cfg) {
    if (spectrum.size() != cfg.fft_size) {
        throw std::invalid_argument("subcarrier_demap: expected " + std::to_string(cfg.fft_size) +
                                    " bins, got " + std::to_string(spectrum.size()));
    }
    ComplexVec out(cfg.data_size);
    for (std::size_t i = 0; i < cfg.data_size; ++i) out[i] = spectrum[cfg.lower_guard + i];
    return out;
}

ComplexVec cyclic_convolve(const ComplexVec& a, const ComplexVec& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("cyclic_convolve: length mismatch (" + std::to_string(a.size()) +
                                    " vs " + std::to_string(b.size()) + ")");
    }
    ComplexVec fa = dft(a);
    ComplexVec fb = dft(b);
    const double root_n = std::sqrt(static_cast<double>(a.size()));
    for (std::size_t k = 0; k < fa.size(); ++k) fa[k] *= root_n * fb[k];
    return idft(fa);
}

ComplexVec lowpass_taps(const SubcarrierConfig& cfg) {
    ComplexVec impulse(cfg.fft_size, cplx(0.0, 0.0));
    impulse[0] = cplx(1.0, 0.0);
    return idft(subcarrier_map(subcarrier_demap(dft(impulse), cfg), cfg));
}

ComplexVec cyclic_window(const ComplexVec& y, std::size_t n, const std::vector<int>& shifts) {
    const std::int64_t len = static_cast<std::int64_t>(y.size());
    if (static_cast<std::int64_t>(n) >= len) {
        throw std::invalid_argument("cyclic_window: index out of range");
    }
    ComplexVec out(shifts.size());
    for (std::size_t i = 0; i < shifts.size(); ++i) {
        std::int64_t idx = (static_cast<std::int64_t>(n) - shifts[i]) % len;
        if (idx < 0) idx += len;
        out[i] = y[static_cast<std::size_t>(idx)];
    }
    return out;
}

}  // namespace dpod
