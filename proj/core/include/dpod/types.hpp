// types.hpp - Domain-tagged signal vectors and subcarrier layout.
//
// Every signal in the library is a complex sample vector tagged with the
// domain it lives in (time, frequency, or the DFT-spread domain of the
// transform precoder). The tag carries the expected length, so feeding an
// N-point time signal where an M-point precoded symbol is expected fails
// loudly instead of producing garbage.

#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace dpod {

using cplx = std::complex<double>;
using ComplexVec = std::vector<cplx>;
using RealVec = std::vector<double>;

/// Signal domain tag. Carries the vector length it implies.
struct Domain {
    enum class Kind { Time, Freq, DftS };

    Kind kind;
    std::size_t size;

    static Domain time(std::size_t n) { return {Kind::Time, n}; }
    static Domain freq(std::size_t n) { return {Kind::Freq, n}; }
    static Domain dfts(std::size_t m) { return {Kind::DftS, m}; }

    bool operator==(const Domain&) const = default;
};

std::string to_string(Domain::Kind kind);

/// Complex sample vector tagged with its domain. Immutable by convention:
/// operations return new signals instead of mutating. Construction checks
/// the length against the tag and rejects non-finite samples.
struct DomainSignal {
    ComplexVec samples;
    Domain domain;

    DomainSignal(ComplexVec s, Domain d);

    static DomainSignal time(ComplexVec s);
    static DomainSignal freq(ComplexVec s);
    static DomainSignal dfts(ComplexVec s);

    std::size_t size() const { return samples.size(); }
};

/// Subcarrier layout: an N-point spectrum whose centered bins
/// [g_l, g_l + M) carry data and whose remaining bins are guards.
struct SubcarrierConfig {
    std::size_t fft_size = 0;     // N
    std::size_t data_size = 0;    // M
    std::size_t lower_guard = 0;  // g_l
    std::size_t upper_guard = 0;  // g_u

    SubcarrierConfig() = default;
    SubcarrierConfig(std::size_t n, std::size_t m, std::size_t gl, std::size_t gu);
};

bool all_finite(const ComplexVec& v);
bool all_finite(const RealVec& v);

double norm2(const ComplexVec& v);  // Euclidean norm
double norm2(const RealVec& v);
double mean_power(const ComplexVec& v);

}  // namespace dpod
