// compensation.hpp - Receiver-side nonlinearity compensation.
//
// A compensator is a real-valued function f on R^(2L) applied through the
// odd-function construction
//
//     g(w) = f([Re(w); Im(w)]) + j * f([Im(w); -Re(w)]),
//
// which makes g satisfy g(j*w) = j*g(w) by design - exactly the symmetry of
// the amplifier model. Training pairs a cyclic window of the received signal
// with the clean sample at the window center, one real row per real and
// imaginary part. Two interchangeable estimators are provided:
//
//   - Volterra least squares over the odd-degree monomial basis of the
//     window entries (explicit feature space),
//   - kernel ridge regression with kappa(u, v) = sum_{k in D} (u'v)^k,
//     whose reproducing space spans the same functions.
//
// A complex-valued memory polynomial baseline (diagonal terms only) is
// included for comparison.

#pragma once

#include "dpod/types.hpp"

#include <cstdint>
#include <variant>

namespace dpod {

/// Cyclic time shifts that form the input window of each predicted sample.
/// Positive shifts look back in time, negative shifts reach forward.
struct MemorySpec {
    std::vector<int> shifts;

    MemorySpec() = default;
    explicit MemorySpec(std::vector<int> s);

    std::size_t depth() const { return shifts.size(); }
    bool operator==(const MemorySpec&) const = default;

    /// {0}: memoryless compensation.
    static MemorySpec none() { return MemorySpec({0}); }
    /// {-h..h}: window reaching both directions.
    static MemorySpec symmetric(int half_width);
    /// {-depth+1..0}: window reaching only backward in time.
    static MemorySpec asymmetric(int depth);
};

/// Odd polynomial degrees {1, 3, ..., max_degree}.
struct DegreeSet {
    std::vector<int> degrees;

    DegreeSet() = default;
    explicit DegreeSet(std::vector<int> d);
    static DegreeSet odd_up_to(int max_degree);

    int max_degree() const { return degrees.empty() ? 0 : degrees.back(); }
    bool operator==(const DegreeSet&) const = default;
};

/// One monomial as a sparse exponent list over the 2L window variables.
struct Monomial {
    std::vector<std::pair<std::uint16_t, std::uint16_t>> factors;  // (variable, exponent)
    int degree = 0;
};

/// All monomials in num_vars variables with total degree in the degree set,
/// in graded order (degree ascending, exponent vectors lexicographically
/// descending within a degree). The order is the canonical coefficient
/// layout for serialized models.
struct MonomialBasis {
    std::size_t num_vars = 0;
    DegreeSet degrees;
    std::vector<Monomial> monomials;

    std::size_t size() const { return monomials.size(); }
};

MonomialBasis enumerate_monomials(std::size_t num_vars, const DegreeSet& degrees);

/// Evaluate every basis monomial at y (length num_vars).
RealVec monomial_features(const RealVec& y, const MonomialBasis& basis);

/// Real training rows. Row 2i holds [Re(w_i); Im(w_i)] with target
/// Re(clean_i); row 2i+1 holds [Im(w_i); -Re(w_i)] with target Im(clean_i).
/// Carries the memory spec the windows were built with; fitted models
/// inherit it.
struct TrainingSet {
    std::size_t rows = 0;
    std::size_t cols = 0;        // 2L
    RealVec inputs;              // row-major, rows x cols
    RealVec targets;             // length rows
    MemorySpec memory;

    const double* row(std::size_t i) const { return inputs.data() + i * cols; }
};

/// Pair each received sample's cyclic window with the clean sample.
TrainingSet build_training_set(const ComplexVec& clean, const ComplexVec& received,
                               const MemorySpec& memory);

/// Concatenate rows of b onto a (same column count).
void append_training_set(TrainingSet& a, const TrainingSet& b);

/// Keep at most max_rows rows by striding over (real, imaginary) row pairs,
/// so both halves of each complex sample survive together.
TrainingSet subsample_training_pairs(const TrainingSet& ts, std::size_t max_rows);

struct VolterraModel {
    MemorySpec memory;
    MonomialBasis basis;
    RealVec coeffs;  // length basis.size()
};

struct KernelModel {
    MemorySpec memory;
    DegreeSet degrees;
    std::size_t support_cols = 0;   // 2L
    RealVec supports;               // row-major, weights.size() x support_cols
    RealVec weights;                // beta
    double lambda = 0.0;
};

/// Complex memory polynomial (diagonal terms y[n-l] |y[n-l]|^(k-1)).
struct MpModel {
    MemorySpec memory;
    DegreeSet degrees;
    ComplexVec coeffs;  // degrees.size() * memory.depth(), degree-major
};

/// Least squares over the monomial basis. ridge = 0 solves by Householder QR
/// and rejects rank-deficient systems; ridge > 0 solves the regularized
/// normal equations.
VolterraModel fit_volterra(const TrainingSet& ts, const MonomialBasis& basis, double ridge);

/// kappa(u, v) = sum_{k in D} (u'v)^k.
double kernel_eval(const RealVec& u, const RealVec& v, const DegreeSet& degrees);

/// The regularizer rule lambda = rho * tr(K) / rows.
double kernel_ridge_lambda(const TrainingSet& ts, const DegreeSet& degrees, double rho);

/// Kernel ridge regression: weights solve (K + lambda I) beta = targets via
/// Cholesky on the Gram matrix.
KernelModel fit_kernel(const TrainingSet& ts, const DegreeSet& degrees, double lambda);

/// Same estimator derived through the normal equations of the projection
/// formulation: (lambda K + lambda^2 I) alpha = -lambda targets, beta =
/// -alpha. Agrees with fit_kernel to solver precision.
KernelModel fit_kernel_projection(const TrainingSet& ts, const DegreeSet& degrees, double lambda);

/// Complex least squares for the memory polynomial baseline, solved by the
/// complex normal equations. Windows are cyclic within each block, so
/// independent training symbols never leak into each other.
MpModel fit_memory_polynomial(const std::vector<ComplexVec>& clean_blocks,
                              const std::vector<ComplexVec>& received_blocks,
                              const MemorySpec& memory, const DegreeSet& degrees);
MpModel fit_memory_polynomial(const ComplexVec& clean, const ComplexVec& received,
                              const MemorySpec& memory, const DegreeSet& degrees);

/// g(w) = f(real embedding) + j f(rotated embedding) for the real models.
cplx predict_complex(const VolterraModel& model, const ComplexVec& window);
cplx predict_complex(const KernelModel& model, const ComplexVec& window);
/// Direct complex evaluation of the memory polynomial.
cplx predict_complex(const MpModel& model, const ComplexVec& window);

using Compensator = std::variant<VolterraModel, KernelModel, MpModel>;

const MemorySpec& memory_of(const Compensator& model);

/// Apply the model to every cyclic window of the received block.
ComplexVec compensate(const Compensator& model, const ComplexVec& received,
                      const MemorySpec& memory);

}  // namespace dpod
