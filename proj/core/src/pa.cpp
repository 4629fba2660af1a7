#include "dpod/pa.hpp"

#include "dpod/signal.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace dpod {

namespace {

using nlohmann::json;

bool contains(const std::vector<int>& set, int v) {
    return std::find(set.begin(), set.end(), v) != set.end();
}

cplx read_cplx(const json& j, const char* what) {
    if (!j.is_array() || j.size() != 2) {
        throw std::runtime_error(std::string("PA file: ") + what + " must be [re, im]");
    }
    return cplx(j[0].get<double>(), j[1].get<double>());
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* where) {
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (std::find_if(allowed.begin(), allowed.end(),
                         [&](const char* k) { return key == k; }) == allowed.end()) {
            throw std::runtime_error(std::string("PA file: unknown key '") + key + "' in " + where);
        }
    }
}

}  // namespace

void GmpCoefficients::validate() const {
    for (const auto& [key, coeff] : a) {
        (void)coeff;
        if (!contains(k_a, key.first) || !contains(l_a, key.second)) {
            throw std::runtime_error("GmpCoefficients: a(" + std::to_string(key.first) + "," +
                                     std::to_string(key.second) + ") outside K_a x L_a");
        }
    }
    for (const auto& [key, coeff] : b) {
        (void)coeff;
        const auto& [k, l, m] = key;
        if (!contains(k_b, k) || !contains(l_b, l) || !contains(m_b, m)) {
            throw std::runtime_error("GmpCoefficients: b(" + std::to_string(k) + "," +
                                     std::to_string(l) + "," + std::to_string(m) +
                                     ") outside K_b x L_b x M_b");
        }
    }
    for (int k : k_a) {
        if (k < 0) throw std::runtime_error("GmpCoefficients: K_a entries must be >= 0");
    }
    for (int k : k_b) {
        if (k < 0) throw std::runtime_error("GmpCoefficients: K_b entries must be >= 0");
    }
    if (k_b.empty() && !b.empty()) {
        throw std::runtime_error("GmpCoefficients: cross coefficients with empty K_b");
    }
}

GmpCoefficients GmpCoefficients::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("GmpCoefficients: cannot open " + path);
    json j = json::parse(in);
    check_keys(j, {"name", "oversampling", "K_a", "L_a", "a", "K_b", "L_b", "M_b", "b"}, "root");

    GmpCoefficients c;
    c.name = j.value("name", std::string());
    c.intended_oversampling = j.value("oversampling", 1u);
    c.k_a = j.at("K_a").get<std::vector<int>>();
    c.l_a = j.at("L_a").get<std::vector<int>>();
    c.k_b = j.value("K_b", std::vector<int>{});
    c.l_b = j.value("L_b", std::vector<int>{});
    c.m_b = j.value("M_b", std::vector<int>{});

    for (const json& entry : j.at("a")) {
        check_keys(entry, {"k", "l", "c"}, "a entry");
        c.a[{entry.at("k").get<int>(), entry.at("l").get<int>()}] = read_cplx(entry.at("c"), "a.c");
    }
    if (j.contains("b")) {
        for (const json& entry : j.at("b")) {
            check_keys(entry, {"k", "l", "m", "c"}, "b entry");
            c.b[{entry.at("k").get<int>(), entry.at("l").get<int>(), entry.at("m").get<int>()}] =
                read_cplx(entry.at("c"), "b.c");
        }
    }
    c.validate();
    return c;
}

void GmpCoefficients::save(const std::string& path) const {
    validate();
    json j;
    j["name"] = name;
    j["oversampling"] = intended_oversampling;
    j["K_a"] = k_a;
    j["L_a"] = l_a;
    j["K_b"] = k_b;
    j["L_b"] = l_b;
    j["M_b"] = m_b;
    j["a"] = json::array();
    for (const auto& [key, coeff] : a) {
        j["a"].push_back({{"k", key.first}, {"l", key.second}, {"c", {coeff.real(), coeff.imag()}}});
    }
    j["b"] = json::array();
    for (const auto& [key, coeff] : b) {
        const auto& [k, l, m] = key;
        j["b"].push_back({{"k", k}, {"l", l}, {"m", m}, {"c", {coeff.real(), coeff.imag()}}});
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("GmpCoefficients: cannot write " + path);
    out << j.dump(2) << "\n";
}

PaConfig::PaConfig(double backoff, unsigned u) : backoff_db(backoff), oversampling(u) {
    if (backoff_db < 0.0) throw std::invalid_argument("PaConfig: backoff_db must be >= 0");
    if (oversampling < 1) throw std::invalid_argument("PaConfig: oversampling must be >= 1");
}

ComplexVec clamp_magnitude(const ComplexVec& x) {
    ComplexVec out(x.size());
    for (std::size_t n = 0; n < x.size(); ++n) {
        cplx z = x[n];
        // The loop guards against |z/|z|| landing one ulp above 1, keeping
        // the operation exactly idempotent.
        for (double m = std::abs(z); m > 1.0; m = std::abs(z)) z /= m;
        out[n] = z;
    }
    return out;
}

ComplexVec apply_gmp(const ComplexVec& x, const GmpCoefficients& c) {
    const std::int64_t n_len = static_cast<std::int64_t>(x.size());
    ComplexVec xc = clamp_magnitude(x);
    RealVec env2(x.size());  // |x_c|^2
    for (std::size_t n = 0; n < xc.size(); ++n) env2[n] = std::norm(xc[n]);

    auto wrap = [n_len](std::int64_t i) {
        i %= n_len;
        return static_cast<std::size_t>(i < 0 ? i + n_len : i);
    };
    auto env_pow = [&env2](std::size_t idx, int k) {
        double p = 1.0;
        for (int i = 0; i < k; ++i) p *= env2[idx];
        return p;
    };

    ComplexVec out(x.size(), cplx(0.0, 0.0));
    for (std::int64_t n = 0; n < n_len; ++n) {
        cplx acc(0.0, 0.0);
        for (const auto& [key, coeff] : c.a) {
            const auto& [k, l] = key;
            const std::size_t i = wrap(n - l);
            acc += coeff * xc[i] * env_pow(i, k);
        }
        for (const auto& [key, coeff] : c.b) {
            const auto& [k, l, m] = key;
            const std::size_t i = wrap(n - l);
            const std::size_t ie = wrap(n - l - m);
            acc += coeff * xc[i] * env_pow(ie, k);
        }
        out[static_cast<std::size_t>(n)] = acc;
    }
    return out;
}

ComplexVec scale_to_backoff(const ComplexVec& x, double backoff_db) {
    const double p = mean_power(x);
    if (p <= 0.0) throw std::invalid_argument("scale_to_backoff: all-zero input");
    const double gain = std::pow(10.0, -backoff_db / 20.0) / std::sqrt(p);
    ComplexVec out(x.size());
    for (std::size_t n = 0; n < x.size(); ++n) out[n] = gain * x[n];
    return out;
}

ComplexVec upsample(const ComplexVec& x, unsigned factor) {
    if (factor == 1) return x;
    const std::size_t n = x.size();
    const std::size_t big = n * factor;
    ComplexVec spec = dft(x);
    ComplexVec padded(big, cplx(0.0, 0.0));
    const std::size_t c_small = n / 2;
    const std::size_t c_big = big / 2;
    const double gain = std::sqrt(static_cast<double>(factor));
    for (std::size_t k = 0; k < n; ++k) padded[c_big - c_small + k] = gain * spec[k];
    return idft(padded);
}

ComplexVec downsample(const ComplexVec& y, unsigned factor) {
    if (factor == 1) return y;
    if (y.size() % factor != 0) {
        throw std::invalid_argument("downsample: length not divisible by factor");
    }
    const std::size_t big = y.size();
    const std::size_t n = big / factor;
    ComplexVec spec = dft(y);
    ComplexVec core(n);
    const std::size_t c_small = n / 2;
    const std::size_t c_big = big / 2;
    const double gain = 1.0 / std::sqrt(static_cast<double>(factor));
    for (std::size_t k = 0; k < n; ++k) core[k] = gain * spec[c_big - c_small + k];
    return idft(core);
}

DomainSignal amplify(const DomainSignal& x, const GmpCoefficients& c, const PaConfig& cfg) {
    if (x.domain.kind != Domain::Kind::Time) {
        throw std::invalid_argument("amplify: expects a time-domain signal");
    }
    ComplexVec scaled = scale_to_backoff(x.samples, cfg.backoff_db);
    ComplexVec fast = upsample(scaled, cfg.oversampling);
    ComplexVec amplified = apply_gmp(fast, c);
    return DomainSignal::time(downsample(amplified, cfg.oversampling));
}

}  // namespace dpod
