// waveform.hpp - QAM mapping and the DFT-spread OFDM modulation chain.

#pragma once

#include "dpod/signal.hpp"

#include <cstdint>

namespace dpod {

using BitVec = std::vector<std::uint8_t>;

/// Square QAM constellation with per-axis Gray labeling (the 38.211-style
/// mapping: even bit positions drive I, odd positions drive Q) and unit
/// average symbol energy. points[label] is the symbol whose bit pattern,
/// MSB first, equals label.
struct Constellation {
    unsigned order = 0;   // 4, 16, 64 or 256
    unsigned bits_per_symbol = 0;
    ComplexVec points;    // indexed by bit label

    /// Build the standard Gray-mapped constellation for the given order.
    static Constellation qam(unsigned order);

    /// Load a constellation from a fixture file of "bits I Q" rows.
    static Constellation from_file(const std::string& path);

    /// Write the fixture representation (one "bits I Q" row per point).
    void save(const std::string& path) const;
};

/// Map bits (length divisible by bits-per-symbol) to symbols.
ComplexVec qam_map(const BitVec& bits, const Constellation& c);

/// Nearest-point hard decision; ties break toward the lower label.
BitVec qam_demap_hard(const ComplexVec& symbols, const Constellation& c);

/// DFT-spread modulation: M-point DFT, subcarrier mapping, N-point inverse
/// DFT. Unitary, so symbol energy is preserved.
DomainSignal dfts_modulate(const ComplexVec& data_symbols, const SubcarrierConfig& cfg);

/// Left inverse of dfts_modulate: N-point DFT, demapping, M-point inverse DFT.
ComplexVec dfts_demodulate(const DomainSignal& time_signal, const SubcarrierConfig& cfg);

}  // namespace dpod
