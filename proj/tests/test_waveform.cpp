#include "dpod/waveform.hpp"

#include "dpod/rng.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

using namespace dpod;

namespace {

ComplexVec random_vec(Rng& rng, std::size_t n) {
    ComplexVec v(n);
    for (cplx& z : v) z = rng.cgaussian(1.0);
    return v;
}

double max_abs_diff(const ComplexVec& a, const ComplexVec& b) {
    REQUIRE(a.size() == b.size());
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// Standard per-bit error probability of square QAM on AWGN, integrated
// numerically from the Q function; used as a Monte-Carlo bound.
double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

}  // namespace

TEST_SUITE_BEGIN("waveform");

TEST_CASE("constellations have unit average energy and Gray labels") {
    for (unsigned order : {4u, 16u, 64u, 256u}) {
        Constellation c = Constellation::qam(order);
        REQUIRE(c.points.size() == order);
        double power = 0.0;
        for (const cplx& p : c.points) power += std::norm(p);
        CHECK(power / order == doctest::Approx(1.0).epsilon(1e-12));

        // Per axis: sort the distinct levels; the axis bits of adjacent
        // levels must differ in exactly one position.
        const unsigned m = c.bits_per_symbol;
        const unsigned p_axis = m / 2;
        std::vector<std::pair<double, unsigned>> levels;  // (I level, I-bit pattern)
        for (unsigned label = 0; label < order; ++label) {
            unsigned ibits = 0;
            for (unsigned j = 0; j < m; j += 2) ibits = (ibits << 1) | ((label >> (m - 1 - j)) & 1u);
            // only record each I level once (fix the Q bits to zero pattern)
            bool q_zero = true;
            for (unsigned j = 1; j < m; j += 2) {
                if ((label >> (m - 1 - j)) & 1u) q_zero = false;
            }
            if (q_zero) levels.emplace_back(c.points[label].real(), ibits);
        }
        REQUIRE(levels.size() == (1u << p_axis));
        std::sort(levels.begin(), levels.end());
        for (std::size_t i = 1; i < levels.size(); ++i) {
            const unsigned diff = levels[i].second ^ levels[i - 1].second;
            CHECK(diff != 0);
            CHECK((diff & (diff - 1)) == 0);  // exactly one bit flips
        }
    }
}

TEST_CASE("qpsk maps 00 onto the documented first-quadrant point") {
    Constellation c = Constellation::qam(4);
    ComplexVec s = qam_map({0, 0}, c);
    CHECK(s[0].real() == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(s[0].imag() == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("exact constellation points decode back to their bits") {
    Rng rng(21);
    for (unsigned order : {4u, 16u, 64u, 256u}) {
        Constellation c = Constellation::qam(order);
        BitVec bits = rng.bits(c.bits_per_symbol * 64);
        CHECK(qam_demap_hard(qam_map(bits, c), c) == bits);
    }
}

TEST_CASE("a perturbed qpsk symbol decodes to the nearest point") {
    Constellation c = Constellation::qam(4);
    BitVec bits = qam_demap_hard({cplx(0.9, 0.8)}, c);
    CHECK(bits == BitVec{0, 0});
}

TEST_CASE("hard decisions break ties toward the lower label") {
    Constellation c = Constellation::qam(4);
    // The origin is equidistant from all four points; label 00 must win.
    CHECK(qam_demap_hard({cplx(0.0, 0.0)}, c) == BitVec{0, 0});
}

TEST_CASE("qam_map validates the bit-block length") {
    Constellation c = Constellation::qam(16);
    CHECK_THROWS_AS(qam_map(BitVec(5), c), std::invalid_argument);
}

TEST_CASE("qpsk at 30 dB stays under the Q-function bound") {
    Constellation c = Constellation::qam(4);
    Rng rng(22);
    const double snr_db = 30.0;
    const double sigma2 = std::pow(10.0, -snr_db / 10.0);
    // Numeric bound: per-bit error probability Q(sqrt(2 Eb/N0)), Eb/N0 =
    // Es/N0 / 2 for QPSK.
    const double p_bit = q_function(std::sqrt(std::pow(10.0, snr_db / 10.0)));
    const std::size_t total_bits = 1000000;
    BitVec bits = rng.bits(total_bits);
    ComplexVec sent = qam_map(bits, c);
    for (cplx& z : sent) z += rng.cgaussian(sigma2);
    BitVec decided = qam_demap_hard(sent, c);
    std::size_t errors = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] != decided[i]) ++errors;
    }
    const double ber = static_cast<double>(errors) / static_cast<double>(total_bits);
    CHECK(ber < 1e-6);
    CHECK(ber <= 10.0 * p_bit + 1e-6);  // the analytic rate is astronomically small here
}

TEST_CASE("constellation fixtures match the generated tables") {
    namespace fs = std::filesystem;
    for (unsigned order : {4u, 16u, 64u, 256u}) {
        const std::string path =
            std::string(DPOD_DATA_DIR) + "/constellations/qam" + std::to_string(order) + ".txt";
        REQUIRE(fs::exists(path));
        Constellation fixture = Constellation::from_file(path);
        Constellation built = Constellation::qam(order);
        REQUIRE(fixture.order == built.order);
        for (unsigned label = 0; label < order; ++label) {
            CHECK(fixture.points[label] == built.points[label]);
        }
    }
}

TEST_CASE("dfts modulation matches the explicit matrix chain") {
    SubcarrierConfig cfg(8, 4, 2, 2);
    Rng rng(23);
    ComplexVec s = random_vec(rng, 4);
    DomainSignal t = dfts_modulate(s, cfg);
    REQUIRE(t.domain.kind == Domain::Kind::Time);

    Eigen::MatrixXcd f8 = oracle::dft_matrix(8);
    Eigen::MatrixXcd f4 = oracle::dft_matrix(4);
    Eigen::MatrixXcd sm = oracle::mapping_matrix(8, 4, 2);
    Eigen::VectorXcd sd(4);
    for (int i = 0; i < 4; ++i) sd(i) = s[i];
    Eigen::VectorXcd expected = f8.inverse() * sm * f4 * sd;
    for (std::size_t i = 0; i < 8; ++i) {
        CHECK(std::abs(t.samples[i] - expected(static_cast<Eigen::Index>(i))) < 1e-12);
    }
    CHECK(norm2(t.samples) == doctest::Approx(norm2(s)).epsilon(1e-12));
}

TEST_CASE("dfts chain is the identity on the data subspace") {
    SubcarrierConfig cfg(64, 48, 8, 8);
    Rng rng(24);
    ComplexVec s = random_vec(rng, 48);
    ComplexVec back = dfts_demodulate(dfts_modulate(s, cfg), cfg);
    CHECK(max_abs_diff(back, s) < 1e-12);
}

TEST_CASE("dfts demodulation never grows the norm") {
    SubcarrierConfig cfg(16, 9, 4, 3);
    Rng rng(25);
    ComplexVec x = random_vec(rng, 16);
    ComplexVec out = dfts_demodulate(DomainSignal::time(x), cfg);
    CHECK(norm2(out) <= norm2(x) + 1e-12);
    CHECK_THROWS_AS(dfts_modulate(ComplexVec(8), cfg), std::invalid_argument);
}

TEST_CASE("precoded time signals have lower peak power than plain ofdm") {
    SubcarrierConfig cfg(128, 96, 16, 16);
    Constellation c = Constellation::qam(16);
    Rng rng(26);
    RealVec papr_dfts, papr_ofdm;
    for (int sym = 0; sym < 1000; ++sym) {
        BitVec bits = rng.bits(96 * c.bits_per_symbol);
        ComplexVec s = qam_map(bits, c);
        ComplexVec t1 = dfts_modulate(s, cfg).samples;
        ComplexVec t2 = idft(subcarrier_map(s, cfg));  // plain OFDM, same payload
        auto papr = [](const ComplexVec& v) {
            double peak = 0.0;
            for (const cplx& z : v) peak = std::max(peak, std::norm(z));
            return peak / mean_power(v);
        };
        papr_dfts.push_back(papr(t1));
        papr_ofdm.push_back(papr(t2));
    }
    std::sort(papr_dfts.begin(), papr_dfts.end());
    std::sort(papr_ofdm.begin(), papr_ofdm.end());
    const std::size_t q99 = static_cast<std::size_t>(0.99 * papr_dfts.size());
    CHECK(papr_dfts[q99] < papr_ofdm[q99]);
}

TEST_SUITE_END();
