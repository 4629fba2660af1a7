// signal.hpp - Unitary centered DFT, the complex-to-real stacking maps,
// subcarrier mapping, cyclic convolution and cyclic windows, and the
// guard-band lowpass taps.
//
// DFT convention (fixed for the whole library):
//   dft(x)[k]  = (1/sqrt(N)) * sum_n x[n] * exp(-2*pi*i*(k - c)*n/N)
//   idft(X)[n] = (1/sqrt(N)) * sum_k X[k] * exp(+2*pi*i*(k - c)*n/N)
// with c = floor(N/2), i.e. the zero-frequency bin sits at index floor(N/2)
// and the transform is unitary. Time indices stay natural (0-based).
// Nothing in the library ever exposes a natural-order spectrum.
//
// Under this convention the cyclic convolution theorem picks up a sqrt(N):
//   cyclic_convolve(a, b) = idft(sqrt(N) * dft(a) .* dft(b))

#pragma once

#include "dpod/types.hpp"

namespace dpod {

/// Unitary centered DFT. Accepts any length >= 1.
ComplexVec dft(const ComplexVec& x);
ComplexVec dft(const DomainSignal& x);

/// Inverse of dft (same convention, unitary).
ComplexVec idft(const ComplexVec& x);

/// [Re(x); Im(x)] - the isometric embedding of C^N into R^(2N).
RealVec real_stack(const ComplexVec& x);

/// [Im(x); -Re(x)] - the embedding of -i*x, used to recover imaginary
/// parts through the same real-valued predictor (odd-function construction).
RealVec real_stack_rotated(const ComplexVec& x);

/// Place M data bins into the centered N-point spectrum between the guards.
ComplexVec subcarrier_map(const ComplexVec& data, const SubcarrierConfig& cfg);

/// Extract the M data bins from a centered N-point spectrum.
ComplexVec subcarrier_demap(const ComplexVec& spectrum, const SubcarrierConfig& cfg);

/// Cyclic convolution of equal-length vectors. Channel taps shorter than N
/// must be zero-padded by the caller; mismatched lengths are rejected.
ComplexVec cyclic_convolve(const ComplexVec& a, const ComplexVec& b);

/// Impulse response of the guard-band projection: convolving a time signal
/// with these taps equals dft -> demap -> map -> idft. First tap is M/N.
ComplexVec lowpass_taps(const SubcarrierConfig& cfg);

/// Window [y[(n - shifts[0]) mod N], ..., y[(n - shifts[L-1]) mod N]].
/// Negative shifts reach forward in time.
ComplexVec cyclic_window(const ComplexVec& y, std::size_t n, const std::vector<int>& shifts);

}  // namespace dpod
