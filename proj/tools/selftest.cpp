// Built-in property suite behind `dpodsim selftest`: quick invariant checks
// over the core operations, one pass/fail line each.

#include "dpod/compensation.hpp"
#include "dpod/pa.hpp"
#include "dpod/rng.hpp"
#include "dpod/signal.hpp"
#include "dpod/waveform.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

namespace {

using namespace dpod;

int g_failures = 0;

void check(const std::string& name, const std::function<bool()>& body) {
    bool ok = false;
    std::string error;
    try {
        ok = body();
    } catch (const std::exception& e) {
        error = e.what();
    }
    if (ok) {
        std::printf("[PASS] %s\n", name.c_str());
    } else {
        ++g_failures;
        std::printf("[FAIL] %s%s%s\n", name.c_str(), error.empty() ? "" : ": ", error.c_str());
    }
}

ComplexVec random_vec(Rng& rng, std::size_t n, double scale = 1.0) {
    ComplexVec v(n);
    for (cplx& z : v) z = rng.cgaussian(scale);
    return v;
}

double max_abs_diff(const ComplexVec& a, const ComplexVec& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

namespace dpod_selftest {

int run() {
    Rng rng(20240521);

    check("dft/idft round trip and unitarity (N=64)", [&] {
        ComplexVec x = random_vec(rng, 64);
        ComplexVec y = idft(dft(x));
        return max_abs_diff(x, y) < 1e-12 && std::abs(norm2(dft(x)) - norm2(x)) < 1e-12;
    });

    check("dft handles odd lengths (N=257)", [&] {
        ComplexVec x = random_vec(rng, 257);
        return max_abs_diff(x, idft(dft(x))) < 1e-12;
    });

    check("real stacking is an isometry", [&] {
        ComplexVec x = random_vec(rng, 33);
        return std::abs(norm2(real_stack(x)) - norm2(x)) < 1e-12 &&
               std::abs(norm2(real_stack_rotated(x)) - norm2(x)) < 1e-12;
    });

    check("guard-band taps realize the projection as a convolution", [&] {
        SubcarrierConfig cfg(64, 48, 9, 7);
        ComplexVec x = random_vec(rng, 64);
        ComplexVec via_taps = cyclic_convolve(lowpass_taps(cfg), x);
        ComplexVec via_matrix = idft(subcarrier_map(subcarrier_demap(dft(x), cfg), cfg));
        return max_abs_diff(via_taps, via_matrix) < 1e-12;
    });

    check("dfts modulate/demodulate round trip", [&] {
        SubcarrierConfig cfg(64, 48, 8, 8);
        ComplexVec s = random_vec(rng, 48);
        return max_abs_diff(s, dfts_demodulate(dfts_modulate(s, cfg), cfg)) < 1e-12;
    });

    check("qam map/demap round trip for all orders", [&] {
        for (unsigned order : {4u, 16u, 64u, 256u}) {
            Constellation c = Constellation::qam(order);
            BitVec bits = rng.bits(c.bits_per_symbol * 50);
            if (qam_demap_hard(qam_map(bits, c), c) != bits) return false;
        }
        return true;
    });

    check("clamp is idempotent and magnitude-bounded", [&] {
        ComplexVec x = random_vec(rng, 200, 2.0);
        ComplexVec once = clamp_magnitude(x);
        ComplexVec twice = clamp_magnitude(once);
        for (std::size_t i = 0; i < once.size(); ++i) {
            if (std::abs(once[i]) > 1.0 || once[i] != twice[i]) return false;
        }
        return true;
    });

    check("amplifier commutes with rotation by j", [&] {
        GmpCoefficients c;
        c.k_a = {0, 1};
        c.l_a = {0, 1};
        c.a[{0, 0}] = cplx(1.0, 0.1);
        c.a[{1, 1}] = cplx(-0.2, 0.05);
        c.k_b = {1};
        c.l_b = {0};
        c.m_b = {1};
        c.b[{1, 0, 1}] = cplx(0.07, -0.02);
        ComplexVec x = random_vec(rng, 32);
        ComplexVec jx(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) jx[i] = cplx(0.0, 1.0) * x[i];
        ComplexVec lhs = apply_gmp(jx, c);
        ComplexVec rhs = apply_gmp(x, c);
        for (cplx& z : rhs) z = cplx(0.0, 1.0) * z;
        return max_abs_diff(lhs, rhs) == 0.0;
    });

    check("upsample/downsample round trip", [&] {
        ComplexVec x = random_vec(rng, 48);
        return max_abs_diff(x, downsample(upsample(x, 3), 3)) < 1e-12;
    });

    check("kernel solve agrees with the projection route", [&] {
        ComplexVec clean = random_vec(rng, 40);
        ComplexVec received = random_vec(rng, 40);
        TrainingSet ts = build_training_set(clean, received, MemorySpec::symmetric(1));
        DegreeSet d = DegreeSet::odd_up_to(3);
        const double lambda = kernel_ridge_lambda(ts, d, 0.01);
        KernelModel a = fit_kernel(ts, d, lambda);
        KernelModel b = fit_kernel_projection(ts, d, lambda);
        double m = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < a.weights.size(); ++i) {
            m = std::max(m, std::abs(a.weights[i] - b.weights[i]));
            scale = std::max(scale, std::abs(a.weights[i]));
        }
        return m <= 1e-10 * std::max(1.0, scale);
    });

    check("planted Volterra model is recovered exactly", [&] {
        MonomialBasis basis = enumerate_monomials(4, DegreeSet::odd_up_to(3));
        Rng local(7);
        RealVec truth(basis.size());
        for (double& v : truth) v = local.gaussian(1.0);
        TrainingSet ts;
        ts.cols = 4;
        ts.memory = MemorySpec({0, 1});
        for (std::size_t r = 0; r < 4 * basis.size(); ++r) {
            RealVec y(4);
            for (double& v : y) v = local.gaussian(1.0);
            RealVec f = monomial_features(y, basis);
            double t = 0.0;
            for (std::size_t i = 0; i < f.size(); ++i) t += truth[i] * f[i];
            ts.inputs.insert(ts.inputs.end(), y.begin(), y.end());
            ts.targets.push_back(t);
            ++ts.rows;
        }
        VolterraModel m = fit_volterra(ts, basis, 0.0);
        double err = 0.0;
        for (std::size_t i = 0; i < truth.size(); ++i) {
            err = std::max(err, std::abs(m.coeffs[i] - truth[i]));
        }
        return err < 1e-9;
    });

    check("trained predictors commute with rotation by j", [&] {
        ComplexVec clean = random_vec(rng, 30);
        ComplexVec received = random_vec(rng, 30);
        MemorySpec mem = MemorySpec::symmetric(1);
        TrainingSet ts = build_training_set(clean, received, mem);
        DegreeSet d = DegreeSet::odd_up_to(3);
        KernelModel km = fit_kernel(ts, d, kernel_ridge_lambda(ts, d, 0.01));
        VolterraModel vm = fit_volterra(ts, enumerate_monomials(2 * mem.depth(), d), 1e-8);
        for (int i = 0; i < 20; ++i) {
            ComplexVec w = random_vec(rng, mem.depth());
            ComplexVec jw(w.size());
            for (std::size_t j = 0; j < w.size(); ++j) jw[j] = cplx(0.0, 1.0) * w[j];
            const cplx j1 = predict_complex(km, jw) - cplx(0.0, 1.0) * predict_complex(km, w);
            const cplx j2 = predict_complex(vm, jw) - cplx(0.0, 1.0) * predict_complex(vm, w);
            if (std::abs(j1) > 1e-13 || std::abs(j2) > 1e-13) return false;
        }
        return true;
    });

    check("random streams are reproducible", [&] {
        Rng a(99), b(99);
        for (int i = 0; i < 1000; ++i) {
            if (a.next_u64() != b.next_u64()) return false;
        }
        return true;
    });

    if (g_failures == 0) {
        std::printf("selftest: all checks passed\n");
    } else {
        std::printf("selftest: %d check(s) FAILED\n", g_failures);
    }
    return g_failures == 0 ? 0 : 1;
}

}  // namespace dpod_selftest
