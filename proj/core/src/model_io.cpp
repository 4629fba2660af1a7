#include "dpod/model_io.hpp"

#include <nlohmann/json.hpp>

#include <fstream>

namespace dpod {

namespace {

using nlohmann::json;

constexpr int kVersion = 1;
constexpr const char* kBasisOrder = "graded-lex";

json memory_json(const MemorySpec& m) { return json(m.shifts); }
json degrees_json(const DegreeSet& d) { return json(d.degrees); }

json real_array(const RealVec& v) { return json(v); }

json complex_array(const ComplexVec& v) {
    json out = json::array();
    for (const cplx& z : v) {
        out.push_back(z.real());
        out.push_back(z.imag());
    }
    return out;
}

ComplexVec read_complex_array(const json& j) {
    if (!j.is_array() || j.size() % 2 != 0) {
        throw std::runtime_error("model file: complex array must have even length");
    }
    ComplexVec out(j.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = cplx(j[2 * i].get<double>(), j[2 * i + 1].get<double>());
    }
    return out;
}

json to_json(const Compensator& model) {
    json j;
    if (const auto* v = std::get_if<VolterraModel>(&model)) {
        j["method"] = "volterra";
        j["memory"] = memory_json(v->memory);
        j["degrees"] = degrees_json(v->basis.degrees);
        j["basis_order"] = kBasisOrder;
        j["num_vars"] = v->basis.num_vars;
        j["coeffs"] = real_array(v->coeffs);
    } else if (const auto* k = std::get_if<KernelModel>(&model)) {
        j["method"] = "kernel";
        j["memory"] = memory_json(k->memory);
        j["degrees"] = degrees_json(k->degrees);
        j["lambda"] = k->lambda;
        j["support_cols"] = k->support_cols;
        j["supports"] = real_array(k->supports);
        j["weights"] = real_array(k->weights);
    } else {
        const auto& m = std::get<MpModel>(model);
        j["method"] = "mp";
        j["memory"] = memory_json(m.memory);
        j["degrees"] = degrees_json(m.degrees);
        j["coeffs"] = complex_array(m.coeffs);
    }
    return j;
}

Compensator from_json(const json& j) {
    const std::string method = j.at("method").get<std::string>();
    MemorySpec memory(j.at("memory").get<std::vector<int>>());
    DegreeSet degrees(j.at("degrees").get<std::vector<int>>());

    if (method == "volterra") {
        if (j.at("basis_order").get<std::string>() != kBasisOrder) {
            throw std::runtime_error("model file: unsupported basis order");
        }
        VolterraModel m;
        m.memory = memory;
        m.basis = enumerate_monomials(j.at("num_vars").get<std::size_t>(), degrees);
        m.coeffs = j.at("coeffs").get<RealVec>();
        if (m.coeffs.size() != m.basis.size()) {
            throw std::runtime_error("model file: coefficient count does not match basis");
        }
        return m;
    }
    if (method == "kernel") {
        KernelModel m;
        m.memory = memory;
        m.degrees = degrees;
        m.lambda = j.at("lambda").get<double>();
        m.support_cols = j.at("support_cols").get<std::size_t>();
        m.supports = j.at("supports").get<RealVec>();
        m.weights = j.at("weights").get<RealVec>();
        if (m.support_cols == 0 || m.supports.size() != m.weights.size() * m.support_cols) {
            throw std::runtime_error("model file: inconsistent kernel support shape");
        }
        if (!(m.lambda > 0.0)) throw std::runtime_error("model file: lambda must be > 0");
        return m;
    }
    if (method == "mp") {
        MpModel m;
        m.memory = memory;
        m.degrees = degrees;
        m.coeffs = read_complex_array(j.at("coeffs"));
        if (m.coeffs.size() != degrees.degrees.size() * memory.depth()) {
            throw std::runtime_error("model file: coefficient count does not match mp layout");
        }
        return m;
    }
    throw std::runtime_error("model file: unknown method '" + method + "'");
}

}  // namespace

void save_models(const std::map<std::string, Compensator>& models, const std::string& path) {
    json j;
    j["version"] = kVersion;
    j["models"] = json::object();
    for (const auto& [id, model] : models) j["models"][id] = to_json(model);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_models: cannot write " + path);
    out << j.dump(2) << "\n";
}

std::map<std::string, Compensator> load_models(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_models: cannot open " + path);
    json j = json::parse(in);
    if (j.at("version").get<int>() != kVersion) {
        throw std::runtime_error("load_models: unsupported version");
    }
    std::map<std::string, Compensator> models;
    for (const auto& [id, mj] : j.at("models").items()) models.emplace(id, from_json(mj));
    return models;
}

}  // namespace dpod
