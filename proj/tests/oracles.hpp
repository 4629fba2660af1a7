// Test-only reference implementations. Everything here is written directly
// from the definitions (matrix products, double loops, explicit enumeration)
// and stays independent of the library's computation paths, so it can serve
// as an oracle for them.

#pragma once

#include "dpod/types.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <vector>

namespace oracle {

using dpod::cplx;
using dpod::ComplexVec;
using dpod::RealVec;

constexpr double kPi = 3.14159265358979323846;

/// Centered unitary DFT by direct O(N^2) summation.
inline ComplexVec direct_dft(const ComplexVec& x) {
    const std::size_t n = x.size();
    const std::size_t c = n / 2;
    ComplexVec out(n, cplx(0.0, 0.0));
    for (std::size_t k = 0; k < n; ++k) {
        cplx acc(0.0, 0.0);
        for (std::size_t t = 0; t < n; ++t) {
            const double angle = -2.0 * kPi *
                                 (static_cast<double>(k) - static_cast<double>(c)) *
                                 static_cast<double>(t) / static_cast<double>(n);
            acc += x[t] * cplx(std::cos(angle), std::sin(angle));
        }
        out[k] = acc / std::sqrt(static_cast<double>(n));
    }
    return out;
}

inline ComplexVec direct_idft(const ComplexVec& x) {
    const std::size_t n = x.size();
    const std::size_t c = n / 2;
    ComplexVec out(n, cplx(0.0, 0.0));
    for (std::size_t t = 0; t < n; ++t) {
        cplx acc(0.0, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            const double angle = 2.0 * kPi *
                                 (static_cast<double>(k) - static_cast<double>(c)) *
                                 static_cast<double>(t) / static_cast<double>(n);
            acc += x[k] * cplx(std::cos(angle), std::sin(angle));
        }
        out[t] = acc / std::sqrt(static_cast<double>(n));
    }
    return out;
}

/// Cyclic convolution by the double loop.
inline ComplexVec direct_cyclic_convolve(const ComplexVec& a, const ComplexVec& b) {
    const std::size_t n = a.size();
    ComplexVec out(n, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            out[i] += a[k] * b[(i + n - k) % n];
        }
    }
    return out;
}

/// The centered unitary DFT matrix F (rows indexed by centered bins).
inline Eigen::MatrixXcd dft_matrix(std::size_t n) {
    const std::size_t c = n / 2;
    Eigen::MatrixXcd f(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t t = 0; t < n; ++t) {
            const double angle = -2.0 * kPi *
                                 (static_cast<double>(k) - static_cast<double>(c)) *
                                 static_cast<double>(t) / static_cast<double>(n);
            f(k, t) = cplx(std::cos(angle), std::sin(angle)) / std::sqrt(static_cast<double>(n));
        }
    }
    return f;
}

/// The N x M subcarrier mapping matrix.
inline Eigen::MatrixXcd mapping_matrix(std::size_t n, std::size_t m, std::size_t lower_guard) {
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(n, m);
    for (std::size_t i = 0; i < m; ++i) s(lower_guard + i, i) = 1.0;
    return s;
}

/// All exponent tuples over num_vars variables summing to degree, generated
/// by a plain odometer.
inline std::vector<std::vector<int>> exponent_tuples(std::size_t num_vars, int degree) {
    std::vector<std::vector<int>> out;
    std::vector<int> current(num_vars, 0);
    const auto total = [&current] {
        int s = 0;
        for (int e : current) s += e;
        return s;
    };
    while (true) {
        if (total() == degree) out.push_back(current);
        std::size_t pos = 0;
        while (pos < num_vars) {
            if (++current[pos] > degree) {
                current[pos] = 0;
                ++pos;
            } else {
                break;
            }
        }
        if (pos == num_vars) break;
    }
    return out;
}

inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (std::uint64_t i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return r;
}

inline double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

/// Explicit feature map of the kernel sum_{k in D} (u'v)^k: for each degree
/// k and exponent tuple alpha with |alpha| = k, the feature
/// sqrt(k!/prod(alpha!)) * u^alpha. Inner products of these features
/// reproduce the kernel by the multinomial theorem.
inline RealVec weighted_features(const RealVec& u, const std::vector<int>& degrees) {
    RealVec out;
    for (int k : degrees) {
        for (const std::vector<int>& alpha : exponent_tuples(u.size(), k)) {
            double w = factorial(k);
            double mono = 1.0;
            for (std::size_t v = 0; v < u.size(); ++v) {
                w /= factorial(alpha[v]);
                for (int e = 0; e < alpha[v]; ++e) mono *= u[v];
            }
            out.push_back(std::sqrt(w) * mono);
        }
    }
    return out;
}

}  // namespace oracle
