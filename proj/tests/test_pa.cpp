#include "dpod/pa.hpp"

#include "dpod/rng.hpp"
#include "dpod/signal.hpp"
#include "dpod/waveform.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>

using namespace dpod;

namespace {

ComplexVec random_vec(Rng& rng, std::size_t n, double scale = 1.0) {
    ComplexVec v(n);
    for (cplx& z : v) z = rng.cgaussian(scale);
    return v;
}

double max_abs_diff(const ComplexVec& a, const ComplexVec& b) {
    REQUIRE(a.size() == b.size());
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// Independent evaluation of the generalized memory polynomial, written as a
// bare triple loop straight from the definition.
ComplexVec gmp_reference(const ComplexVec& x, const GmpCoefficients& c) {
    const long n_len = static_cast<long>(x.size());
    ComplexVec xc(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double m = std::abs(x[i]);
        xc[i] = x[i] / std::max(m, 1.0);
    }
    auto at = [&](long i) {
        i %= n_len;
        if (i < 0) i += n_len;
        return xc[static_cast<std::size_t>(i)];
    };
    ComplexVec out(x.size(), cplx(0, 0));
    for (long n = 0; n < n_len; ++n) {
        for (int k : c.k_a) {
            for (int l : c.l_a) {
                auto it = c.a.find({k, l});
                if (it == c.a.end()) continue;
                out[n] += it->second * at(n - l) * std::pow(std::abs(at(n - l)), 2 * k);
            }
        }
        for (int k : c.k_b) {
            for (int l : c.l_b) {
                for (int m : c.m_b) {
                    auto it = c.b.find({k, l, m});
                    if (it == c.b.end()) continue;
                    out[n] += it->second * at(n - l) * std::pow(std::abs(at(n - l - m)), 2 * k);
                }
            }
        }
    }
    return out;
}

GmpCoefficients small_gmp() {
    GmpCoefficients c;
    c.k_a = {0, 1};
    c.l_a = {0, 1};
    c.k_b = {1};
    c.l_b = {0, 1};
    c.m_b = {-1, 2};
    c.a[{0, 0}] = cplx(0.9, 0.05);
    c.a[{0, 1}] = cplx(0.1, -0.02);
    c.a[{1, 0}] = cplx(-0.2, 0.1);
    c.a[{1, 1}] = cplx(0.05, 0.03);
    c.b[{1, 0, -1}] = cplx(0.04, 0.01);
    c.b[{1, 0, 2}] = cplx(-0.03, 0.02);
    c.b[{1, 1, -1}] = cplx(0.02, -0.05);
    c.b[{1, 1, 2}] = cplx(0.01, 0.01);
    return c;
}

}  // namespace

TEST_SUITE_BEGIN("pa");

TEST_CASE("clamp keeps small samples and rescales large ones") {
    ComplexVec out = clamp_magnitude({cplx(0.5, 0.0), cplx(2.0, 0.0), cplx(3.0, 4.0)});
    CHECK(out[0] == cplx(0.5, 0.0));
    CHECK(std::abs(out[1] - cplx(1.0, 0.0)) < 1e-15);
    CHECK(std::abs(out[2] - cplx(0.6, 0.8)) < 1e-15);
}

TEST_CASE("clamp is exactly idempotent") {
    Rng rng(31);
    ComplexVec x = random_vec(rng, 500, 2.0);
    ComplexVec once = clamp_magnitude(x);
    ComplexVec twice = clamp_magnitude(once);
    for (std::size_t i = 0; i < x.size(); ++i) {
        CHECK(std::abs(once[i]) <= 1.0);
        CHECK(once[i] == twice[i]);
    }
}

TEST_CASE("unit linear term reduces the model to the clamp") {
    GmpCoefficients c;
    c.k_a = {0};
    c.l_a = {0};
    c.a[{0, 0}] = cplx(1.0, 0.0);
    Rng rng(32);
    ComplexVec x = random_vec(rng, 32, 1.5);
    CHECK(apply_gmp(x, c) == clamp_magnitude(x));
}

TEST_CASE("memoryless cubic matches direct substitution") {
    GmpCoefficients c;
    c.k_a = {0, 1};
    c.l_a = {0};
    c.a[{0, 0}] = cplx(1.0, 0.0);
    const cplx alpha(-0.2, 0.07);
    c.a[{1, 0}] = alpha;
    Rng rng(33);
    ComplexVec x = random_vec(rng, 16, 0.2);  // comfortably below the clamp level
    ComplexVec out = apply_gmp(x, c);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const cplx expected = x[i] + alpha * x[i] * std::norm(x[i]);
        CHECK(std::abs(out[i] - expected) < 1e-14);
    }
}

TEST_CASE("gmp evaluation matches the independent triple loop") {
    Rng rng(34);
    GmpCoefficients c = small_gmp();
    ComplexVec x = random_vec(rng, 16, 0.8);
    CHECK(max_abs_diff(apply_gmp(x, c), gmp_reference(x, c)) < 1e-12);
}

TEST_CASE("gmp commutes exactly with rotation by j") {
    Rng rng(35);
    GmpCoefficients c = small_gmp();
    for (int rep = 0; rep < 5; ++rep) {
        ComplexVec x = random_vec(rng, 24, 1.1);
        ComplexVec jx(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) jx[i] = cplx(0.0, 1.0) * x[i];
        ComplexVec lhs = apply_gmp(jx, c);
        ComplexVec rhs = apply_gmp(x, c);
        for (std::size_t i = 0; i < x.size(); ++i) {
            CHECK(lhs[i] == cplx(0.0, 1.0) * rhs[i]);
        }
    }
}

TEST_CASE("memory polynomial and memoryless special cases collapse") {
    Rng rng(36);
    // K_b empty: compare against an independently coded MP evaluator.
    GmpCoefficients mp;
    mp.k_a = {0, 1, 2};
    mp.l_a = {0, 1, 2};
    mp.a[{0, 0}] = cplx(1.0, 0.0);
    mp.a[{1, 1}] = cplx(-0.1, 0.04);
    mp.a[{2, 2}] = cplx(0.03, -0.02);
    mp.a[{1, 0}] = cplx(-0.05, 0.0);
    ComplexVec x = random_vec(rng, 20, 0.7);
    ComplexVec got = apply_gmp(x, mp);

    ComplexVec xc = clamp_magnitude(x);
    ComplexVec expect(x.size(), cplx(0, 0));
    const long n_len = static_cast<long>(x.size());
    for (long n = 0; n < n_len; ++n) {
        for (const auto& [key, coeff] : mp.a) {
            long i = (n - key.second) % n_len;
            if (i < 0) i += n_len;
            double env = 1.0;
            for (int e = 0; e < key.first; ++e) env *= std::norm(xc[static_cast<std::size_t>(i)]);
            expect[n] += coeff * xc[static_cast<std::size_t>(i)] * env;
        }
    }
    CHECK(max_abs_diff(got, expect) < 1e-13);

    // L_a = {0}: element-wise scalar polynomial.
    GmpCoefficients ml;
    ml.k_a = {0, 1, 2};
    ml.l_a = {0};
    ml.a[{0, 0}] = cplx(1.0, 0.0);
    ml.a[{1, 0}] = cplx(-0.15, 0.05);
    ml.a[{2, 0}] = cplx(0.02, 0.01);
    ComplexVec got2 = apply_gmp(x, ml);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const cplx u = xc[i];
        const cplx scalar = ml.a[{0, 0}] * u + ml.a[{1, 0}] * u * std::norm(u) +
                            ml.a[{2, 0}] * u * std::norm(u) * std::norm(u);
        CHECK(std::abs(got2[i] - scalar) < 1e-13);
    }
}

TEST_CASE("backoff scaling hits the requested rms") {
    Rng rng(37);
    ComplexVec x = random_vec(rng, 256, 3.0);
    ComplexVec scaled = scale_to_backoff(x, 6.0);
    CHECK(std::sqrt(mean_power(scaled)) == doctest::Approx(std::pow(10.0, -0.3)).epsilon(1e-12));
    ComplexVec unit = scale_to_backoff(x, 0.0);
    CHECK(std::sqrt(mean_power(unit)) == doctest::Approx(1.0).epsilon(1e-12));

    // A single real multiplier: the ratio is constant across entries.
    const cplx ratio = scaled[0] / x[0];
    for (std::size_t i = 1; i < x.size(); ++i) {
        CHECK(std::abs(scaled[i] / x[i] - ratio) < 1e-12);
    }
    CHECK(std::abs(ratio.imag()) < 1e-15);

    CHECK_THROWS_AS(scale_to_backoff(ComplexVec(4, cplx(0, 0)), 6.0), std::invalid_argument);
}

TEST_CASE("oversampling by 1 is the identity") {
    Rng rng(38);
    ComplexVec x = random_vec(rng, 12);
    CHECK(upsample(x, 1) == x);
    CHECK(downsample(x, 1) == x);
}

TEST_CASE("oversampling preserves in-band tones sample-exactly") {
    const std::size_t n = 16;
    const unsigned u = 3;
    // Tone on centered bin 10 (offset +2 from the zero-frequency bin).
    ComplexVec x(n);
    for (std::size_t t = 0; t < n; ++t) {
        const double angle = 2.0 * oracle::kPi * 2.0 * static_cast<double>(t) / n;
        x[t] = 0.7 * cplx(std::cos(angle), std::sin(angle));
    }
    ComplexVec up = upsample(x, u);
    REQUIRE(up.size() == n * u);
    for (std::size_t t = 0; t < n * u; ++t) {
        const double angle = 2.0 * oracle::kPi * 2.0 * static_cast<double>(t) / (n * u);
        CHECK(std::abs(up[t] - 0.7 * cplx(std::cos(angle), std::sin(angle))) < 1e-12);
    }
    // And the original samples sit at the stride-U positions.
    for (std::size_t t = 0; t < n; ++t) CHECK(std::abs(up[u * t] - x[t]) < 1e-12);
}

TEST_CASE("downsample undoes upsample") {
    Rng rng(39);
    ComplexVec x = random_vec(rng, 16);
    CHECK(max_abs_diff(downsample(upsample(x, 3), 3), x) < 1e-12);
}

TEST_CASE("identity amplifier only applies the backoff gain") {
    GmpCoefficients c;
    c.k_a = {0};
    c.l_a = {0};
    c.a[{0, 0}] = cplx(1.0, 0.0);
    // Constant-envelope in-band tone: the scaled magnitude stays below the
    // clamp level for any positive backoff.
    const std::size_t n = 32;
    ComplexVec x(n);
    for (std::size_t t = 0; t < n; ++t) {
        const double angle = 2.0 * oracle::kPi * 3.0 * static_cast<double>(t) / n;
        x[t] = cplx(std::cos(angle), std::sin(angle));
    }
    for (double backoff : {3.0, 6.0}) {
        for (unsigned u : {1u, 3u}) {
            DomainSignal out = amplify(DomainSignal::time(x), c, PaConfig(backoff, u));
            const double gain = std::pow(10.0, -backoff / 20.0);
            for (std::size_t t = 0; t < n; ++t) {
                CHECK(std::abs(out.samples[t] - gain * x[t]) < 1e-9);
            }
        }
    }
}

TEST_CASE("amplify at U=1 equals gmp applied to the scaled signal") {
    GmpCoefficients c;
    c.k_a = {0, 1};
    c.l_a = {0};
    c.a[{0, 0}] = cplx(1.0, 0.0);
    c.a[{1, 0}] = cplx(-0.1, 0.0);
    Rng rng(40);
    ComplexVec x = random_vec(rng, 64);
    DomainSignal out = amplify(DomainSignal::time(x), c, PaConfig(6.0, 1));
    ComplexVec expected = apply_gmp(scale_to_backoff(x, 6.0), c);
    CHECK(max_abs_diff(out.samples, expected) < 1e-12);
}

TEST_CASE("oversampled cubic chain matches a straight-line reimplementation") {
    // Full second implementation of the chain with the direct transform sums.
    GmpCoefficients c;
    c.k_a = {0, 1};
    c.l_a = {0};
    c.a[{0, 0}] = cplx(1.0, 0.0);
    c.a[{1, 0}] = cplx(-0.1, 0.0);
    const SubcarrierConfig cfg(32, 24, 4, 4);
    Constellation qam = Constellation::qam(64);
    Rng rng(41);
    BitVec bits = rng.bits(24 * qam.bits_per_symbol);
    ComplexVec s_d = qam_map(bits, qam);
    DomainSignal s_t = dfts_modulate(s_d, cfg);

    const unsigned u = 3;
    const double backoff = 6.0;
    DomainSignal lib = amplify(s_t, c, PaConfig(backoff, u));

    // Reference: scale, zero-pad the direct spectrum, clamp+cubic, cut back.
    ComplexVec scaled = s_t.samples;
    const double gain = std::pow(10.0, -backoff / 20.0) / std::sqrt(mean_power(scaled));
    for (cplx& z : scaled) z *= gain;
    ComplexVec spec = oracle::direct_dft(scaled);
    ComplexVec padded(32 * u, cplx(0, 0));
    const std::size_t off = (32 * u) / 2 - 32 / 2;
    for (std::size_t k = 0; k < 32; ++k) padded[off + k] = std::sqrt(double(u)) * spec[k];
    ComplexVec fast = oracle::direct_idft(padded);
    for (cplx& z : fast) {
        const double m = std::abs(z);
        const cplx zc = z / std::max(m, 1.0);
        z = zc + cplx(-0.1, 0.0) * zc * std::norm(zc);
    }
    ComplexVec fast_spec = oracle::direct_dft(fast);
    ComplexVec cut(32);
    for (std::size_t k = 0; k < 32; ++k) cut[k] = fast_spec[off + k] / std::sqrt(double(u));
    ComplexVec reference = oracle::direct_idft(cut);

    CHECK(max_abs_diff(lib.samples, reference) < 1e-9);

    // Same in-band EVM through both implementations.
    ComplexVec lib_sym = dfts_demodulate(lib, cfg);
    ComplexVec ref_sym = dfts_demodulate(DomainSignal::time(reference), cfg);
    double evm_lib = 0.0, evm_ref = 0.0, power = 0.0;
    for (std::size_t i = 0; i < s_d.size(); ++i) {
        evm_lib += std::norm(lib_sym[i] - gain * s_d[i]);
        evm_ref += std::norm(ref_sym[i] - gain * s_d[i]);
        power += std::norm(gain * s_d[i]);
    }
    CHECK(10.0 * std::log10(evm_lib / power) ==
          doctest::Approx(10.0 * std::log10(evm_ref / power)).epsilon(1e-9));
}

TEST_CASE("coefficient files load, validate, and round trip") {
    namespace fs = std::filesystem;
    const std::string fixture = std::string(DPOD_DATA_DIR) + "/pa/memoryless_deg5.json";
    REQUIRE(fs::exists(fixture));
    GmpCoefficients c = GmpCoefficients::load(fixture);
    CHECK(c.name == "memoryless_deg5");
    CHECK(c.is_memoryless());
    CHECK(c.intended_oversampling == 3);

    const std::string tmp = (fs::temp_directory_path() / "dpod_pa_roundtrip.json").string();
    c.save(tmp);
    GmpCoefficients back = GmpCoefficients::load(tmp);
    CHECK(back.a == c.a);
    CHECK(back.k_a == c.k_a);
    fs::remove(tmp);

    GmpCoefficients cross = GmpCoefficients::load(std::string(DPOD_DATA_DIR) + "/pa/gmp_cross.json");
    CHECK_FALSE(cross.is_memory_polynomial());

    // Keys outside the declared index sets are rejected.
    GmpCoefficients bad = c;
    bad.a[{5, 0}] = cplx(1.0, 0.0);
    CHECK_THROWS_AS(bad.validate(), std::runtime_error);
}

TEST_SUITE_END();
