#include "dpod/channel.hpp"

#include "dpod/signal.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace dpod;

namespace {

ComplexVec random_vec(Rng& rng, std::size_t n) {
    ComplexVec v(n);
    for (cplx& z : v) z = rng.cgaussian(1.0);
    return v;
}

}  // namespace

TEST_SUITE_BEGIN("channel");

TEST_CASE("single unit tap is the identity, delayed tap a shift") {
    Rng rng(51);
    ComplexVec x = random_vec(rng, 16);
    DomainSignal in = DomainSignal::time(x);

    DomainSignal same = apply_channel(in, ChannelRealization({cplx(1, 0)}));
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(same.samples[i] - x[i]) < 1e-12);

    DomainSignal shifted = apply_channel(in, ChannelRealization({cplx(0, 0), cplx(1, 0)}));
    for (std::size_t i = 0; i < x.size(); ++i) {
        CHECK(std::abs(shifted.samples[(i + 1) % 16] - x[i]) < 1e-12);
    }
}

TEST_CASE("channel application matches the direct convolution sum") {
    Rng rng(52);
    ComplexVec x = random_vec(rng, 16);
    ComplexVec taps = random_vec(rng, 4);
    ComplexVec padded(16, cplx(0, 0));
    for (std::size_t i = 0; i < 4; ++i) padded[i] = taps[i];
    ComplexVec expected = oracle::direct_cyclic_convolve(padded, x);
    DomainSignal got = apply_channel(DomainSignal::time(x), ChannelRealization(taps));
    for (std::size_t i = 0; i < 16; ++i) CHECK(std::abs(got.samples[i] - expected[i]) < 1e-12);

    CHECK_THROWS_AS(apply_channel(DomainSignal::time(random_vec(rng, 3)),
                                  ChannelRealization(random_vec(rng, 5))),
                    std::invalid_argument);
}

TEST_CASE("noise variance follows the snr definition") {
    // 50 dB on a unit-power signal means sigma^2 = 1e-5 per sample.
    Rng rng(53);
    const std::size_t n = 1000000;
    ComplexVec x(n, cplx(1.0, 0.0));
    DomainSignal noisy = add_awgn(DomainSignal::time(x), {50.0}, rng);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) var += std::norm(noisy.samples[i] - x[i]);
    var /= static_cast<double>(n);
    CHECK(var == doctest::Approx(1e-5).epsilon(0.01));
}

TEST_CASE("infinite snr leaves the signal untouched") {
    Rng rng(54);
    ComplexVec x = random_vec(rng, 64);
    DomainSignal noisy = add_awgn(DomainSignal::time(x), {600.0}, rng);
    for (std::size_t i = 0; i < x.size(); ++i) {
        CHECK(std::abs(noisy.samples[i] - x[i]) < 1e-12);
    }
    CHECK_THROWS_AS(add_awgn(DomainSignal::time(ComplexVec(4, cplx(0, 0))), {10.0}, rng),
                    std::invalid_argument);
}

TEST_CASE("a pure line-of-sight tap always has unit magnitude") {
    PdpProfile p({0}, {1.0}, std::numeric_limits<double>::infinity());
    Rng rng(55);
    for (int i = 0; i < 10; ++i) {
        ChannelRealization h = sample_taps(p, rng);
        CHECK(std::abs(h.taps[0]) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("sampled channels have unit power on average") {
    PdpProfile p({0, 1, 3}, {0.7, 0.2, 0.1}, 10.0);
    Rng rng(56);
    double total = 0.0;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
        ChannelRealization h = sample_taps(p, rng);
        for (const cplx& t : h.taps) total += std::norm(t);
    }
    CHECK(total / draws == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("tap sampling is deterministic per seed") {
    PdpProfile p({0, 2}, {0.8, 0.2}, 5.0);
    Rng a(77), b(77);
    ChannelRealization ha = sample_taps(p, a);
    ChannelRealization hb = sample_taps(p, b);
    CHECK(ha.taps == hb.taps);
}

TEST_CASE("profiles normalize powers and validate shape") {
    PdpProfile p({0, 1}, {2.0, 2.0});
    CHECK(p.powers[0] == doctest::Approx(0.5));
    CHECK_THROWS_AS(PdpProfile({0, 0}, {0.5, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(PdpProfile({0}, {0.5, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(PdpProfile({0}, {-1.0}), std::invalid_argument);
    CHECK_THROWS_AS(ChannelRealization(ComplexVec{}), std::invalid_argument);
    CHECK_THROWS_AS(ChannelRealization(ComplexVec(3, cplx(0, 0))), std::invalid_argument);
}

TEST_CASE("channel energy is preserved in expectation") {
    PdpProfile p({0, 1, 2}, {0.6, 0.3, 0.1});
    Rng rng(57);
    ComplexVec x = random_vec(rng, 32);
    const double in_power = norm2(x) * norm2(x);
    double acc = 0.0;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) {
        DomainSignal y = apply_channel(DomainSignal::time(x), sample_taps(p, rng));
        acc += norm2(y.samples) * norm2(y.samples);
    }
    CHECK(acc / draws / in_power == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("frequency response matches the convolution eigenvalues") {
    Rng rng(58);
    ComplexVec taps = random_vec(rng, 3);
    ChannelRealization h(taps);
    ComplexVec x = random_vec(rng, 16);
    DomainSignal y = apply_channel(DomainSignal::time(x), h);
    ComplexVec lhs = dft(y.samples);
    ComplexVec response = channel_freq_response(h, 16);
    ComplexVec rhs = dft(x);
    for (std::size_t k = 0; k < 16; ++k) {
        CHECK(std::abs(lhs[k] - response[k] * rhs[k]) < 1e-12);
    }
}

TEST_SUITE_END();
