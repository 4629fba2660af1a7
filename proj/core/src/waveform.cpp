#include "dpod/waveform.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace dpod {

namespace {

// Per-axis Gray amplitude: bits c[0..p-1] select one of 2^p odd levels
// {±1, ±3, ..., ±(2^p - 1)} such that adjacent levels differ in one bit.
double gray_level(const std::uint8_t* c, unsigned p) {
    if (p == 1) return 1.0 - 2.0 * c[0];
    return (1.0 - 2.0 * c[0]) * (static_cast<double>(1u << (p - 1)) - gray_level(c + 1, p - 1));
}

unsigned log2_order(unsigned order) {
    switch (order) {
        case 4: return 2;
        case 16: return 4;
        case 64: return 6;
        case 256: return 8;
        default:
            throw std::invalid_argument("Constellation: order must be one of 4, 16, 64, 256");
    }
}

}  // namespace

Constellation Constellation::qam(unsigned order) {
    Constellation c;
    c.order = order;
    c.bits_per_symbol = log2_order(order);
    const unsigned m = c.bits_per_symbol;
    const unsigned p = m / 2;

    // Average per-axis power of the odd levels 1,3,...,2^p-1 is (4^p - 1)/3;
    // two axes give Es = 2*(4^p - 1)/3, normalized away below.
    const double es = 2.0 * (std::pow(4.0, p) - 1.0) / 3.0;
    const double scale = 1.0 / std::sqrt(es);

    c.points.resize(order);
    std::vector<std::uint8_t> ibits(p), qbits(p);
    for (unsigned label = 0; label < order; ++label) {
        for (unsigned j = 0; j < m; ++j) {
            const std::uint8_t b = (label >> (m - 1 - j)) & 1u;
            if (j % 2 == 0) {
                ibits[j / 2] = b;
            } else {
                qbits[j / 2] = b;
            }
        }
        c.points[label] = scale * cplx(gray_level(ibits.data(), p), gray_level(qbits.data(), p));
    }
    return c;
}

Constellation Constellation::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("Constellation: cannot open " + path);

    std::vector<std::pair<unsigned, cplx>> rows;
    unsigned bits_per_symbol = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string bits;
        double re = 0.0, im = 0.0;
        if (!(ls >> bits >> re >> im)) {
            throw std::runtime_error("Constellation: malformed row in " + path + ": " + line);
        }
        if (bits_per_symbol == 0) bits_per_symbol = static_cast<unsigned>(bits.size());
        if (bits.size() != bits_per_symbol) {
            throw std::runtime_error("Constellation: inconsistent label width in " + path);
        }
        unsigned label = 0;
        for (char ch : bits) {
            if (ch != '0' && ch != '1') {
                throw std::runtime_error("Constellation: bad bit label in " + path);
            }
            label = (label << 1) | static_cast<unsigned>(ch - '0');
        }
        rows.emplace_back(label, cplx(re, im));
    }

    Constellation c;
    c.bits_per_symbol = bits_per_symbol;
    c.order = 1u << bits_per_symbol;
    if (rows.size() != c.order) {
        throw std::runtime_error("Constellation: expected " + std::to_string(c.order) +
                                 " rows in " + path + ", got " + std::to_string(rows.size()));
    }
    c.points.assign(c.order, cplx(0.0, 0.0));
    std::vector<bool> seen(c.order, false);
    for (const auto& [label, point] : rows) {
        if (seen[label]) throw std::runtime_error("Constellation: duplicate label in " + path);
        seen[label] = true;
        c.points[label] = point;
    }
    return c;
}

void Constellation::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("Constellation: cannot write " + path);
    out << "# " << order << "-QAM, per-axis Gray labeling, unit average energy\n";
    out << "# columns: bit-label I Q\n";
    char buf[80];
    for (unsigned label = 0; label < order; ++label) {
        std::string bits;
        for (unsigned j = 0; j < bits_per_symbol; ++j) {
            bits += ((label >> (bits_per_symbol - 1 - j)) & 1u) ? '1' : '0';
        }
        std::snprintf(buf, sizeof(buf), "%s %.17g %.17g\n", bits.c_str(), points[label].real(),
                      points[label].imag());
        out << buf;
    }
}

ComplexVec qam_map(const BitVec& bits, const Constellation& c) {
    const unsigned m = c.bits_per_symbol;
    if (m == 0 || bits.size() % m != 0) {
        throw std::invalid_argument("qam_map: bit count not divisible by bits per symbol");
    }
    ComplexVec out(bits.size() / m);
    for (std::size_t s = 0; s < out.size(); ++s) {
        unsigned label = 0;
        for (unsigned j = 0; j < m; ++j) label = (label << 1) | (bits[s * m + j] & 1u);
        out[s] = c.points[label];
    }
    return out;
}

BitVec qam_demap_hard(const ComplexVec& symbols, const Constellation& c) {
    const unsigned m = c.bits_per_symbol;
    BitVec out(symbols.size() * m);
    for (std::size_t s = 0; s < symbols.size(); ++s) {
        unsigned best = 0;
        double best_d = std::norm(symbols[s] - c.points[0]);
        for (unsigned label = 1; label < c.order; ++label) {
            const double d = std::norm(symbols[s] - c.points[label]);
            if (d < best_d) {  // strict: ties keep the lower label
                best_d = d;
                best = label;
            }
        }
        for (unsigned j = 0; j < m; ++j) out[s * m + j] = (best >> (m - 1 - j)) & 1u;
    }
    return out;
}

DomainSignal dfts_modulate(const ComplexVec& data_symbols, const SubcarrierConfig& cfg) {
    if (data_symbols.size() != cfg.data_size) {
        throw std::invalid_argument("dfts_modulate: expected " + std::to_string(cfg.data_size) +
                                    " symbols, got " + std::to_string(data_symbols.size()));
    }
    return DomainSignal::time(idft(subcarrier_map(dft(data_symbols), cfg)));
}

ComplexVec dfts_demodulate(const DomainSignal& time_signal, const SubcarrierConfig& cfg) {
    if (time_signal.domain.kind != Domain::Kind::Time || time_signal.size() != cfg.fft_size) {
        throw std::invalid_argument("dfts_demodulate: expected a time signal of length " +
                                    std::to_string(cfg.fft_size));
    }
    return idft(subcarrier_demap(dft(time_signal.samples), cfg));
}

}  // namespace dpod
