#include "dpod/compensation.hpp"

#include "dpod/signal.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace dpod {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using RowMajorMap =
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

RowMajorMap input_matrix(const TrainingSet& ts) {
    return RowMajorMap(ts.inputs.data(), static_cast<Eigen::Index>(ts.rows),
                       static_cast<Eigen::Index>(ts.cols));
}

double poly_in(double t, const DegreeSet& degrees) {
    double acc = 0.0;
    for (int k : degrees.degrees) {
        double p = 1.0;
        for (int i = 0; i < k; ++i) p *= t;
        acc += p;
    }
    return acc;
}

// Gram matrix of the polynomial kernel over the training rows.
MatrixXd gram_matrix(const TrainingSet& ts, const DegreeSet& degrees) {
    RowMajorMap y = input_matrix(ts);
    MatrixXd g = y * y.transpose();
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
        for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = poly_in(g(i, j), degrees);
    }
    if (!g.allFinite()) throw std::runtime_error("fit_kernel: non-finite Gram entry");
    return g;
}

KernelModel make_kernel_model(const TrainingSet& ts, const DegreeSet& degrees, double lambda,
                              VectorXd beta) {
    KernelModel model;
    model.memory = ts.memory;
    model.degrees = degrees;
    model.support_cols = ts.cols;
    model.supports = ts.inputs;
    model.weights.assign(beta.data(), beta.data() + beta.size());
    model.lambda = lambda;
    return model;
}

void check_window(std::size_t have, std::size_t want, const char* who) {
    if (have != want) {
        throw std::invalid_argument(std::string(who) + ": window length " + std::to_string(have) +
                                    " does not match model memory depth " + std::to_string(want));
    }
}

// f(y) for the kernel model: sum_i beta_i kappa(support_i, y). Plain loops so
// that sign symmetry of the embeddings survives exactly.
double kernel_predict_real(const KernelModel& m, const double* y) {
    const std::size_t cols = m.support_cols;
    double acc = 0.0;
    for (std::size_t i = 0; i < m.weights.size(); ++i) {
        const double* s = m.supports.data() + i * cols;
        double dot = 0.0;
        for (std::size_t j = 0; j < cols; ++j) dot += s[j] * y[j];
        acc += m.weights[i] * poly_in(dot, m.degrees);
    }
    return acc;
}

double volterra_predict_real(const VolterraModel& m, const RealVec& y) {
    RealVec features = monomial_features(y, m.basis);
    double acc = 0.0;
    for (std::size_t i = 0; i < features.size(); ++i) acc += m.coeffs[i] * features[i];
    return acc;
}

}  // namespace

MemorySpec::MemorySpec(std::vector<int> s) : shifts(std::move(s)) {
    if (shifts.empty()) throw std::invalid_argument("MemorySpec: needs at least one shift");
    std::set<int> unique(shifts.begin(), shifts.end());
    if (unique.size() != shifts.size()) {
        throw std::invalid_argument("MemorySpec: shifts must be distinct");
    }
}

MemorySpec MemorySpec::symmetric(int half_width) {
    if (half_width < 0) throw std::invalid_argument("MemorySpec: half_width must be >= 0");
    std::vector<int> s;
    for (int i = -half_width; i <= half_width; ++i) s.push_back(i);
    return MemorySpec(std::move(s));
}

MemorySpec MemorySpec::asymmetric(int depth) {
    if (depth < 1) throw std::invalid_argument("MemorySpec: depth must be >= 1");
    std::vector<int> s;
    for (int i = -depth + 1; i <= 0; ++i) s.push_back(i);
    return MemorySpec(std::move(s));
}

DegreeSet::DegreeSet(std::vector<int> d) : degrees(std::move(d)) {
    if (degrees.empty()) throw std::invalid_argument("DegreeSet: empty");
    if (!std::is_sorted(degrees.begin(), degrees.end())) {
        throw std::invalid_argument("DegreeSet: degrees must be sorted ascending");
    }
    for (std::size_t i = 0; i < degrees.size(); ++i) {
        if (degrees[i] < 1 || degrees[i] % 2 == 0) {
            throw std::invalid_argument("DegreeSet: degrees must be odd positive integers");
        }
        if (i > 0 && degrees[i] == degrees[i - 1]) {
            throw std::invalid_argument("DegreeSet: duplicate degree");
        }
    }
}

DegreeSet DegreeSet::odd_up_to(int max_degree) {
    if (max_degree < 1) throw std::invalid_argument("DegreeSet: max degree must be >= 1");
    std::vector<int> d;
    for (int k = 1; k <= max_degree; k += 2) d.push_back(k);
    return DegreeSet(std::move(d));
}

namespace {

void emit_monomials(std::size_t var, std::size_t num_vars, int remaining,
                    std::vector<std::uint16_t>& exponents, std::vector<Monomial>& out) {
    if (var + 1 == num_vars) {
        exponents[var] = static_cast<std::uint16_t>(remaining);
        Monomial m;
        for (std::size_t v = 0; v < num_vars; ++v) {
            if (exponents[v] > 0) {
                m.factors.emplace_back(static_cast<std::uint16_t>(v), exponents[v]);
                m.degree += exponents[v];
            }
        }
        out.push_back(std::move(m));
        return;
    }
    // Highest exponent on the leading variable first: lexicographically
    // descending exponent vectors within one total degree.
    for (int e = remaining; e >= 0; --e) {
        exponents[var] = static_cast<std::uint16_t>(e);
        emit_monomials(var + 1, num_vars, remaining - e, exponents, out);
    }
}

}  // namespace

MonomialBasis enumerate_monomials(std::size_t num_vars, const DegreeSet& degrees) {
    if (num_vars == 0) throw std::invalid_argument("enumerate_monomials: num_vars must be >= 1");
    MonomialBasis basis;
    basis.num_vars = num_vars;
    basis.degrees = degrees;
    std::vector<std::uint16_t> exponents(num_vars, 0);
    for (int d : degrees.degrees) {
        emit_monomials(0, num_vars, d, exponents, basis.monomials);
    }
    return basis;
}

RealVec monomial_features(const RealVec& y, const MonomialBasis& basis) {
    if (y.size() != basis.num_vars) {
        throw std::invalid_argument("monomial_features: expected " +
                                    std::to_string(basis.num_vars) + " variables, got " +
                                    std::to_string(y.size()));
    }
    RealVec out(basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i) {
        double p = 1.0;
        for (const auto& [var, exp] : basis.monomials[i].factors) {
            for (std::uint16_t e = 0; e < exp; ++e) p *= y[var];
        }
        out[i] = p;
    }
    return out;
}

TrainingSet build_training_set(const ComplexVec& clean, const ComplexVec& received,
                               const MemorySpec& memory) {
    if (clean.size() != received.size()) {
        throw std::invalid_argument("build_training_set: clean/received length mismatch");
    }
    if (clean.empty()) throw std::invalid_argument("build_training_set: empty input");

    const std::size_t n = clean.size();
    const std::size_t len = memory.depth();
    TrainingSet ts;
    ts.memory = memory;
    ts.rows = 2 * n;
    ts.cols = 2 * len;
    ts.inputs.resize(ts.rows * ts.cols);
    ts.targets.resize(ts.rows);
    for (std::size_t i = 0; i < n; ++i) {
        const ComplexVec w = cyclic_window(received, i, memory.shifts);
        double* straight = ts.inputs.data() + (2 * i) * ts.cols;
        double* rotated = ts.inputs.data() + (2 * i + 1) * ts.cols;
        for (std::size_t j = 0; j < len; ++j) {
            straight[j] = w[j].real();
            straight[len + j] = w[j].imag();
            rotated[j] = w[j].imag();
            rotated[len + j] = -w[j].real();
        }
        ts.targets[2 * i] = clean[i].real();
        ts.targets[2 * i + 1] = clean[i].imag();
    }
    if (!all_finite(ts.inputs) || !all_finite(ts.targets)) {
        throw std::invalid_argument("build_training_set: non-finite data");
    }
    return ts;
}

void append_training_set(TrainingSet& a, const TrainingSet& b) {
    if (a.rows == 0) {
        a = b;
        return;
    }
    if (a.cols != b.cols || a.memory.shifts != b.memory.shifts) {
        throw std::invalid_argument("append_training_set: incompatible training sets");
    }
    a.inputs.insert(a.inputs.end(), b.inputs.begin(), b.inputs.end());
    a.targets.insert(a.targets.end(), b.targets.begin(), b.targets.end());
    a.rows += b.rows;
}

TrainingSet subsample_training_pairs(const TrainingSet& ts, std::size_t max_rows) {
    if (max_rows < 2) throw std::invalid_argument("subsample_training_pairs: max_rows must be >= 2");
    if (ts.rows <= max_rows) return ts;
    if (ts.rows % 2 != 0) {
        throw std::invalid_argument("subsample_training_pairs: expected paired rows");
    }
    const std::size_t pairs = ts.rows / 2;
    const std::size_t max_pairs = max_rows / 2;
    const std::size_t stride = (pairs + max_pairs - 1) / max_pairs;

    TrainingSet out;
    out.cols = ts.cols;
    out.memory = ts.memory;
    for (std::size_t p = 0; p < pairs; p += stride) {
        out.inputs.insert(out.inputs.end(), ts.inputs.begin() + (2 * p) * ts.cols,
                          ts.inputs.begin() + (2 * p + 2) * ts.cols);
        out.targets.push_back(ts.targets[2 * p]);
        out.targets.push_back(ts.targets[2 * p + 1]);
        out.rows += 2;
    }
    return out;
}

VolterraModel fit_volterra(const TrainingSet& ts, const MonomialBasis& basis, double ridge) {
    if (ts.rows == 0) throw std::invalid_argument("fit_volterra: empty training set");
    if (ts.cols != basis.num_vars) {
        throw std::invalid_argument("fit_volterra: training columns do not match basis variables");
    }
    if (ridge < 0.0) throw std::invalid_argument("fit_volterra: ridge must be >= 0");

    const std::size_t p = basis.size();
    MatrixXd a(ts.rows, p);
    RealVec row(ts.cols);
    for (std::size_t i = 0; i < ts.rows; ++i) {
        std::copy(ts.row(i), ts.row(i) + ts.cols, row.begin());
        RealVec features = monomial_features(row, basis);
        for (std::size_t j = 0; j < p; ++j) a(static_cast<Eigen::Index>(i),
                                              static_cast<Eigen::Index>(j)) = features[j];
    }
    Eigen::Map<const VectorXd> targets(ts.targets.data(), static_cast<Eigen::Index>(ts.rows));

    VectorXd h;
    if (ridge == 0.0) {
        if (ts.rows < p) {
            throw std::runtime_error(
                "fit_volterra: fewer rows than basis monomials; the system is rank deficient, "
                "use a positive ridge");
        }
        Eigen::HouseholderQR<MatrixXd> qr(a);
        const VectorXd diag = qr.matrixQR().diagonal().cwiseAbs();
        if (diag.minCoeff() <= 1e-12 * diag.maxCoeff()) {
            throw std::runtime_error(
                "fit_volterra: rank-deficient feature matrix, use a positive ridge");
        }
        h = qr.solve(targets);
    } else {
        MatrixXd normal = a.transpose() * a;
        normal.diagonal().array() += ridge;
        h = Eigen::LDLT<MatrixXd>(normal).solve(a.transpose() * targets);
    }

    VolterraModel model;
    model.memory = ts.memory;
    model.basis = basis;
    model.coeffs.assign(h.data(), h.data() + h.size());
    return model;
}

double kernel_eval(const RealVec& u, const RealVec& v, const DegreeSet& degrees) {
    if (u.size() != v.size()) throw std::invalid_argument("kernel_eval: length mismatch");
    double dot = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) dot += u[i] * v[i];
    return poly_in(dot, degrees);
}

double kernel_ridge_lambda(const TrainingSet& ts, const DegreeSet& degrees, double rho) {
    if (ts.rows == 0) throw std::invalid_argument("kernel_ridge_lambda: empty training set");
    double trace = 0.0;
    for (std::size_t i = 0; i < ts.rows; ++i) {
        const double* r = ts.row(i);
        double dot = 0.0;
        for (std::size_t j = 0; j < ts.cols; ++j) dot += r[j] * r[j];
        trace += poly_in(dot, degrees);
    }
    return rho * trace / static_cast<double>(ts.rows);
}

KernelModel fit_kernel(const TrainingSet& ts, const DegreeSet& degrees, double lambda) {
    if (ts.rows == 0) throw std::invalid_argument("fit_kernel: empty training set");
    if (!(lambda > 0.0)) throw std::invalid_argument("fit_kernel: lambda must be > 0");

    MatrixXd k = gram_matrix(ts, degrees);
    k.diagonal().array() += lambda;
    Eigen::Map<const VectorXd> targets(ts.targets.data(), static_cast<Eigen::Index>(ts.rows));
    Eigen::LLT<MatrixXd> llt(k);
    if (llt.info() != Eigen::Success) {
        throw std::runtime_error("fit_kernel: Cholesky factorization failed");
    }
    return make_kernel_model(ts, degrees, lambda, llt.solve(targets));
}

KernelModel fit_kernel_projection(const TrainingSet& ts, const DegreeSet& degrees, double lambda) {
    if (ts.rows == 0) throw std::invalid_argument("fit_kernel_projection: empty training set");
    if (!(lambda > 0.0)) throw std::invalid_argument("fit_kernel_projection: lambda must be > 0");

    MatrixXd normal = lambda * gram_matrix(ts, degrees);
    normal.diagonal().array() += lambda * lambda;
    Eigen::Map<const VectorXd> targets(ts.targets.data(), static_cast<Eigen::Index>(ts.rows));
    Eigen::LLT<MatrixXd> llt(normal);
    if (llt.info() != Eigen::Success) {
        throw std::runtime_error("fit_kernel_projection: Cholesky factorization failed");
    }
    VectorXd alpha = llt.solve(-lambda * targets);
    return make_kernel_model(ts, degrees, lambda, -alpha);
}

MpModel fit_memory_polynomial(const std::vector<ComplexVec>& clean_blocks,
                              const std::vector<ComplexVec>& received_blocks,
                              const MemorySpec& memory, const DegreeSet& degrees) {
    if (clean_blocks.empty() || clean_blocks.size() != received_blocks.size()) {
        throw std::invalid_argument("fit_memory_polynomial: block count mismatch");
    }
    std::size_t total = 0;
    for (std::size_t s = 0; s < clean_blocks.size(); ++s) {
        if (clean_blocks[s].size() != received_blocks[s].size() || clean_blocks[s].empty()) {
            throw std::invalid_argument("fit_memory_polynomial: clean/received length mismatch");
        }
        total += clean_blocks[s].size();
    }

    const std::size_t len = memory.depth();
    const std::size_t cols = degrees.degrees.size() * len;
    Eigen::MatrixXcd a(total, cols);
    Eigen::VectorXcd targets(total);
    std::size_t r = 0;
    for (std::size_t s = 0; s < clean_blocks.size(); ++s) {
        const ComplexVec& received = received_blocks[s];
        for (std::size_t n = 0; n < received.size(); ++n, ++r) {
            const ComplexVec w = cyclic_window(received, n, memory.shifts);
            for (std::size_t ki = 0; ki < degrees.degrees.size(); ++ki) {
                const int k = degrees.degrees[ki];
                for (std::size_t li = 0; li < len; ++li) {
                    double env = 1.0;
                    for (int e = 0; e < (k - 1) / 2; ++e) env *= std::norm(w[li]);
                    a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(ki * len + li)) =
                        w[li] * env;
                }
            }
            targets(static_cast<Eigen::Index>(r)) = clean_blocks[s][n];
        }
    }

    Eigen::MatrixXcd normal = a.adjoint() * a;
    Eigen::LDLT<Eigen::MatrixXcd> ldlt(normal);
    const Eigen::VectorXd d = ldlt.vectorD().real().cwiseAbs();
    if (ldlt.info() != Eigen::Success || d.minCoeff() <= 1e-13 * d.maxCoeff()) {
        throw std::runtime_error("fit_memory_polynomial: rank-deficient system");
    }
    Eigen::VectorXcd h = ldlt.solve(a.adjoint() * targets);

    MpModel model;
    model.memory = memory;
    model.degrees = degrees;
    model.coeffs.assign(h.data(), h.data() + h.size());
    return model;
}

MpModel fit_memory_polynomial(const ComplexVec& clean, const ComplexVec& received,
                              const MemorySpec& memory, const DegreeSet& degrees) {
    return fit_memory_polynomial(std::vector<ComplexVec>{clean}, std::vector<ComplexVec>{received},
                                 memory, degrees);
}

cplx predict_complex(const VolterraModel& model, const ComplexVec& window) {
    check_window(2 * window.size(), model.basis.num_vars, "predict_complex");
    return cplx(volterra_predict_real(model, real_stack(window)),
                volterra_predict_real(model, real_stack_rotated(window)));
}

cplx predict_complex(const KernelModel& model, const ComplexVec& window) {
    check_window(2 * window.size(), model.support_cols, "predict_complex");
    const RealVec straight = real_stack(window);
    const RealVec rotated = real_stack_rotated(window);
    return cplx(kernel_predict_real(model, straight.data()),
                kernel_predict_real(model, rotated.data()));
}

cplx predict_complex(const MpModel& model, const ComplexVec& window) {
    check_window(window.size(), model.memory.depth(), "predict_complex");
    const std::size_t len = model.memory.depth();
    cplx acc(0.0, 0.0);
    for (std::size_t ki = 0; ki < model.degrees.degrees.size(); ++ki) {
        const int k = model.degrees.degrees[ki];
        for (std::size_t li = 0; li < len; ++li) {
            double env = 1.0;
            for (int e = 0; e < (k - 1) / 2; ++e) env *= std::norm(window[li]);
            acc += model.coeffs[ki * len + li] * window[li] * env;
        }
    }
    return acc;
}

const MemorySpec& memory_of(const Compensator& model) {
    return std::visit([](const auto& m) -> const MemorySpec& { return m.memory; }, model);
}

namespace {

// Batched evaluation of the real models over a block of samples; processes
// windows in chunks to bound scratch memory.
constexpr std::size_t kChunk = 256;

template <typename Block>
void fill_embeddings(const ComplexVec& received, const std::vector<int>& shifts,
                     std::size_t first, std::size_t count, Block&& rows) {
    const std::int64_t n_len = static_cast<std::int64_t>(received.size());
    const std::size_t len = shifts.size();
    for (std::size_t t = 0; t < count; ++t) {
        const std::int64_t n = static_cast<std::int64_t>(first + t);
        for (std::size_t j = 0; j < len; ++j) {
            std::int64_t idx = (n - shifts[j]) % n_len;
            if (idx < 0) idx += n_len;
            const cplx v = received[static_cast<std::size_t>(idx)];
            rows(2 * t, static_cast<Eigen::Index>(j)) = v.real();
            rows(2 * t, static_cast<Eigen::Index>(len + j)) = v.imag();
            rows(2 * t + 1, static_cast<Eigen::Index>(j)) = v.imag();
            rows(2 * t + 1, static_cast<Eigen::Index>(len + j)) = -v.real();
        }
    }
}

ComplexVec compensate_kernel(const KernelModel& m, const ComplexVec& received,
                             const MemorySpec& memory) {
    const std::size_t n = received.size();
    const std::size_t supports = m.weights.size();
    RowMajorMap s(m.supports.data(), static_cast<Eigen::Index>(supports),
                  static_cast<Eigen::Index>(m.support_cols));
    Eigen::Map<const VectorXd> beta(m.weights.data(), static_cast<Eigen::Index>(supports));

    ComplexVec out(n);
    MatrixXd rows(2 * kChunk, static_cast<Eigen::Index>(m.support_cols));
    for (std::size_t first = 0; first < n; first += kChunk) {
        const std::size_t count = std::min(kChunk, n - first);
        auto block = rows.topRows(static_cast<Eigen::Index>(2 * count));
        fill_embeddings(received, memory.shifts, first, count, block);
        MatrixXd g = block * s.transpose();
        for (Eigen::Index i = 0; i < g.rows(); ++i) {
            for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = poly_in(g(i, j), m.degrees);
        }
        VectorXd vals = g * beta;
        for (std::size_t t = 0; t < count; ++t) {
            out[first + t] = cplx(vals(static_cast<Eigen::Index>(2 * t)),
                                  vals(static_cast<Eigen::Index>(2 * t + 1)));
        }
    }
    return out;
}

ComplexVec compensate_volterra(const VolterraModel& m, const ComplexVec& received,
                               const MemorySpec& memory) {
    const std::size_t n = received.size();
    const std::size_t cols = m.basis.num_vars;
    Eigen::Map<const VectorXd> h(m.coeffs.data(), static_cast<Eigen::Index>(m.coeffs.size()));

    ComplexVec out(n);
    MatrixXd rows(2 * kChunk, static_cast<Eigen::Index>(cols));
    MatrixXd features(2 * kChunk, static_cast<Eigen::Index>(m.basis.size()));
    RealVec y(cols);
    for (std::size_t first = 0; first < n; first += kChunk) {
        const std::size_t count = std::min(kChunk, n - first);
        auto block = rows.topRows(static_cast<Eigen::Index>(2 * count));
        fill_embeddings(received, memory.shifts, first, count, block);
        for (std::size_t r = 0; r < 2 * count; ++r) {
            for (std::size_t j = 0; j < cols; ++j) y[j] = block(static_cast<Eigen::Index>(r),
                                                                static_cast<Eigen::Index>(j));
            RealVec f = monomial_features(y, m.basis);
            for (std::size_t j = 0; j < f.size(); ++j) {
                features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = f[j];
            }
        }
        VectorXd vals = features.topRows(static_cast<Eigen::Index>(2 * count)) * h;
        for (std::size_t t = 0; t < count; ++t) {
            out[first + t] = cplx(vals(static_cast<Eigen::Index>(2 * t)),
                                  vals(static_cast<Eigen::Index>(2 * t + 1)));
        }
    }
    return out;
}

ComplexVec compensate_mp(const MpModel& m, const ComplexVec& received, const MemorySpec& memory) {
    ComplexVec out(received.size());
    for (std::size_t n = 0; n < received.size(); ++n) {
        out[n] = predict_complex(m, cyclic_window(received, n, memory.shifts));
    }
    return out;
}

}  // namespace

ComplexVec compensate(const Compensator& model, const ComplexVec& received,
                      const MemorySpec& memory) {
    if (memory_of(model).shifts != memory.shifts) {
        throw std::invalid_argument("compensate: memory spec does not match the trained model");
    }
    if (received.empty()) return {};
    return std::visit(
        [&](const auto& m) -> ComplexVec {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, KernelModel>) {
                return compensate_kernel(m, received, memory);
            } else if constexpr (std::is_same_v<T, VolterraModel>) {
                return compensate_volterra(m, received, memory);
            } else {
                return compensate_mp(m, received, memory);
            }
        },
        model);
}

}  // namespace dpod
