#include "dpod/simulator.hpp"

#include "dpod/signal.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <thread>

namespace dpod {

namespace {

using nlohmann::json;

void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* where) {
    for (const auto& [key, value] : j.items()) {
        (void)value;
        bool ok = false;
        for (const char* k : allowed) {
            if (key == k) ok = true;
        }
        if (!ok) {
            throw std::runtime_error(std::string("config: unknown key '") + key + "' in " + where);
        }
    }
}

Method parse_method(const std::string& s) {
    if (s == "none") return Method::None;
    if (s == "volterra") return Method::Volterra;
    if (s == "kernel") return Method::Kernel;
    if (s == "mp") return Method::Mp;
    throw std::runtime_error("config: unknown method '" + s + "'");
}

Placement parse_placement(const std::string& s) {
    if (s == "time") return Placement::TimeDomainEq;
    if (s == "dfts") return Placement::DftSDomain;
    throw std::runtime_error("config: unknown placement '" + s + "'");
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), f, v);
    return buf;
}

}  // namespace

std::string to_string(Method m) {
    switch (m) {
        case Method::None: return "none";
        case Method::Volterra: return "volterra";
        case Method::Kernel: return "kernel";
        case Method::Mp: return "mp";
    }
    return "?";
}

SubcarrierConfig SimConfig::subcarriers() const {
    return SubcarrierConfig(fft_size, dft_size, lower_guard, upper_guard);
}

namespace {

std::vector<AlgorithmSpec> standard_algorithms() {
    std::vector<AlgorithmSpec> algs;
    AlgorithmSpec nopa;
    nopa.id = "nopa";
    nopa.method = Method::None;
    nopa.bypass_pa = true;
    algs.push_back(nopa);

    AlgorithmSpec none;
    none.id = "none";
    algs.push_back(none);

    AlgorithmSpec a;
    a.degrees = DegreeSet::odd_up_to(5);

    a.id = "kernel_time_sym";
    a.method = Method::Kernel;
    a.placement = Placement::TimeDomainEq;
    a.memory = MemorySpec::symmetric(2);
    algs.push_back(a);

    a.id = "kernel_time_nomem";
    a.memory = MemorySpec::none();
    algs.push_back(a);

    a.id = "kernel_dfts_sym";
    a.placement = Placement::DftSDomain;
    a.memory = MemorySpec::symmetric(2);
    algs.push_back(a);

    a.id = "volterra_time_sym";
    a.method = Method::Volterra;
    a.placement = Placement::TimeDomainEq;
    a.memory = MemorySpec::symmetric(2);
    algs.push_back(a);

    a.id = "mp_time_sym";
    a.method = Method::Mp;
    algs.push_back(a);

    a.id = "mp_time_asym";
    a.memory = MemorySpec::asymmetric(6);
    algs.push_back(a);
    return algs;
}

PdpProfile tdld_approx_profile() {
    // TDL-D-shaped short profile at the Table-1 sample rate: a Ricean first
    // tap (K = 13.3 dB) and a handful of weak trailing taps. Coarse
    // approximation of the 3GPP tabulated profile at 30 ns delay spread.
    RealVec powers_db = {0.0, -13.5, -18.8, -21.0};
    RealVec powers;
    for (double p : powers_db) powers.push_back(std::pow(10.0, p / 10.0));
    return PdpProfile({0, 1, 2, 3}, powers, std::pow(10.0, 13.3 / 10.0));
}

}  // namespace

SimConfig desk_preset() {
    SimConfig cfg;
    cfg.fft_size = 1024;
    cfg.dft_size = 768;
    cfg.lower_guard = 128;
    cfg.upper_guard = 128;
    cfg.constellation_order = 64;
    cfg.pa_coeff_file = "pa/memoryless_deg5.json";
    cfg.backoff_db = 6.0;
    cfg.oversampling = 3;
    cfg.channel.type = ChannelConfig::Type::Awgn;
    cfg.training = {50.0, 4};
    cfg.sweep.snr_db = {20.0, 22.0, 24.0, 26.0, 28.0};
    cfg.sweep.trials = 10;
    cfg.algorithms = standard_algorithms();
    cfg.seed = 1;
    cfg.output = "ber_desk.csv";
    return cfg;
}

SimConfig table1_preset() {
    SimConfig cfg;
    cfg.fft_size = 4096;
    cfg.dft_size = 3240;
    cfg.lower_guard = 428;
    cfg.upper_guard = 428;
    cfg.constellation_order = 256;
    cfg.pa_coeff_file = "pa/gmp_cross.json";
    cfg.backoff_db = 6.0;
    cfg.oversampling = 3;
    cfg.channel.type = ChannelConfig::Type::BlockFading;
    cfg.channel.profile = tdld_approx_profile();
    cfg.training = {50.0, 4};
    cfg.sweep.snr_db = {24.0, 26.0, 28.0, 30.0, 32.0, 34.0};
    cfg.sweep.trials = 50;
    cfg.algorithms = standard_algorithms();
    cfg.seed = 1;
    cfg.output = "ber_table1.csv";
    return cfg;
}

namespace {

json channel_to_json(const ChannelConfig& ch) {
    json j;
    if (ch.type == ChannelConfig::Type::Awgn) {
        j["type"] = "awgn";
    } else {
        j["type"] = "block_fading";
        j["delays"] = ch.profile.delays;
        RealVec powers_db;
        for (double p : ch.profile.powers) powers_db.push_back(10.0 * std::log10(p));
        j["powers_db"] = powers_db;
        if (ch.profile.los_factor) {
            if (std::isinf(*ch.profile.los_factor)) {
                j["los_factor_db"] = "inf";
            } else {
                j["los_factor_db"] = 10.0 * std::log10(*ch.profile.los_factor);
            }
        }
    }
    return j;
}

ChannelConfig channel_from_json(const json& j) {
    ChannelConfig ch;
    const std::string type = j.at("type").get<std::string>();
    if (type == "awgn") {
        check_keys(j, {"type"}, "channel");
        ch.type = ChannelConfig::Type::Awgn;
        return ch;
    }
    if (type != "block_fading") throw std::runtime_error("config: unknown channel type " + type);
    check_keys(j, {"type", "delays", "powers_db", "los_factor_db"}, "channel");
    ch.type = ChannelConfig::Type::BlockFading;
    auto delays = j.at("delays").get<std::vector<std::size_t>>();
    auto powers_db = j.at("powers_db").get<RealVec>();
    RealVec powers;
    for (double p : powers_db) powers.push_back(std::pow(10.0, p / 10.0));
    std::optional<double> los;
    if (j.contains("los_factor_db")) {
        if (j["los_factor_db"].is_string()) {
            if (j["los_factor_db"].get<std::string>() != "inf") {
                throw std::runtime_error("config: los_factor_db must be a number or \"inf\"");
            }
            los = std::numeric_limits<double>::infinity();
        } else {
            los = std::pow(10.0, j["los_factor_db"].get<double>() / 10.0);
        }
    }
    ch.profile = PdpProfile(std::move(delays), std::move(powers), los);
    return ch;
}

json algorithm_to_json(const AlgorithmSpec& a) {
    json j;
    j["id"] = a.id;
    j["method"] = to_string(a.method);
    j["placement"] = to_string(a.placement);
    j["memory"] = a.memory.shifts;
    j["max_degree"] = a.degrees.max_degree();
    j["rho"] = a.rho;
    j["ridge"] = a.ridge;
    j["support_cap"] = a.support_cap;
    j["bypass_pa"] = a.bypass_pa;
    return j;
}

AlgorithmSpec algorithm_from_json(const json& j) {
    check_keys(j,
               {"id", "method", "placement", "memory", "max_degree", "rho", "ridge", "support_cap",
                "bypass_pa"},
               "algorithm");
    AlgorithmSpec a;
    a.id = j.at("id").get<std::string>();
    a.method = parse_method(j.value("method", "none"));
    a.placement = parse_placement(j.value("placement", "dfts"));
    if (j.contains("memory")) a.memory = MemorySpec(j["memory"].get<std::vector<int>>());
    a.degrees = DegreeSet::odd_up_to(j.value("max_degree", 5));
    a.rho = j.value("rho", 0.005);
    a.ridge = j.value("ridge", 0.0);
    a.support_cap = j.value("support_cap", std::size_t{4000});
    a.bypass_pa = j.value("bypass_pa", false);
    return a;
}

json config_to_json(const SimConfig& cfg) {
    json j;
    j["fft_size"] = cfg.fft_size;
    j["dft_size"] = cfg.dft_size;
    j["lower_guard"] = cfg.lower_guard;
    j["upper_guard"] = cfg.upper_guard;
    j["constellation_order"] = cfg.constellation_order;
    j["pa"] = {{"coeff_file", cfg.pa_coeff_file},
               {"backoff_db", cfg.backoff_db},
               {"oversampling", cfg.oversampling}};
    j["channel"] = channel_to_json(cfg.channel);
    j["equalizer"] = cfg.equalizer == EqualizerKind::Type::ZeroForcing ? "zf" : "lmmse";
    j["training"] = {{"snr_db", cfg.training.snr_db}, {"num_symbols", cfg.training.num_symbols}};
    j["sweep"] = {{"snr_db", cfg.sweep.snr_db}, {"trials", cfg.sweep.trials}};
    j["algorithms"] = json::array();
    for (const AlgorithmSpec& a : cfg.algorithms) j["algorithms"].push_back(algorithm_to_json(a));
    j["seed"] = cfg.seed;
    j["output"] = cfg.output;
    if (cfg.trial_output) j["trial_output"] = *cfg.trial_output;
    j["append"] = cfg.append;
    j["threads"] = cfg.threads;
    return j;
}

SimConfig config_from_json(const json& j) {
    check_keys(j,
               {"fft_size", "dft_size", "lower_guard", "upper_guard", "constellation_order", "pa",
                "channel", "equalizer", "training", "sweep", "algorithms", "seed", "output",
                "trial_output", "append", "threads"},
               "root");
    SimConfig cfg;
    cfg.fft_size = j.at("fft_size").get<std::size_t>();
    cfg.dft_size = j.at("dft_size").get<std::size_t>();
    cfg.lower_guard = j.at("lower_guard").get<std::size_t>();
    cfg.upper_guard = j.at("upper_guard").get<std::size_t>();
    cfg.constellation_order = j.at("constellation_order").get<unsigned>();

    const json& pa = j.at("pa");
    check_keys(pa, {"coeff_file", "backoff_db", "oversampling"}, "pa");
    cfg.pa_coeff_file = pa.at("coeff_file").get<std::string>();
    cfg.backoff_db = pa.value("backoff_db", 6.0);
    cfg.oversampling = pa.value("oversampling", 1u);

    cfg.channel = channel_from_json(j.at("channel"));

    const std::string eq = j.value("equalizer", "zf");
    if (eq == "zf") {
        cfg.equalizer = EqualizerKind::Type::ZeroForcing;
    } else if (eq == "lmmse") {
        cfg.equalizer = EqualizerKind::Type::Lmmse;
    } else {
        throw std::runtime_error("config: unknown equalizer '" + eq + "'");
    }

    const json& tr = j.at("training");
    check_keys(tr, {"snr_db", "num_symbols"}, "training");
    cfg.training.snr_db = tr.value("snr_db", 50.0);
    cfg.training.num_symbols = tr.value("num_symbols", std::size_t{4});

    const json& sw = j.at("sweep");
    check_keys(sw, {"snr_db", "trials"}, "sweep");
    cfg.sweep.snr_db = sw.at("snr_db").get<RealVec>();
    cfg.sweep.trials = sw.at("trials").get<std::size_t>();

    for (const json& a : j.at("algorithms")) cfg.algorithms.push_back(algorithm_from_json(a));

    cfg.seed = j.value("seed", std::uint64_t{1});
    cfg.output = j.value("output", std::string("ber.csv"));
    if (j.contains("trial_output")) cfg.trial_output = j["trial_output"].get<std::string>();
    cfg.append = j.value("append", false);
    cfg.threads = j.value("threads", 0u);
    return cfg;
}

}  // namespace

SimConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_config: cannot open " + path);
    return config_from_json(json::parse(in));
}

void save_config(const SimConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_config: cannot write " + path);
    out << config_to_json(cfg).dump(2) << "\n";
}

std::string config_to_json_string(const SimConfig& cfg) { return config_to_json(cfg).dump(2); }

std::string resolve_data_path(const std::string& path) {
    namespace fs = std::filesystem;
    if (fs::path(path).is_absolute() || fs::exists(path)) return path;
    if (const char* env = std::getenv("DPOD_DATA_DIR")) {
        fs::path candidate = fs::path(env) / path;
        if (fs::exists(candidate)) return candidate.string();
    }
#ifdef DPOD_DEFAULT_DATA_DIR
    {
        fs::path candidate = fs::path(DPOD_DEFAULT_DATA_DIR) / path;
        if (fs::exists(candidate)) return candidate.string();
    }
#endif
    return path;  // let the caller fail with a clear message
}

std::size_t TrainingData::complex_pairs(Placement p) const {
    const auto& list = p == Placement::TimeDomainEq ? clean_time : clean_dfts;
    std::size_t total = 0;
    for (const ComplexVec& v : list) total += v.size();
    return total;
}

SimContext::SimContext(SimConfig config)
    : cfg(std::move(config)),
      sc(cfg.subcarriers()),
      constellation(Constellation::qam(cfg.constellation_order)),
      pa(GmpCoefficients::load(resolve_data_path(cfg.pa_coeff_file))),
      pa_cfg(cfg.backoff_db, cfg.oversampling) {
    if (cfg.sweep.snr_db.empty()) throw std::invalid_argument("SimContext: empty SNR grid");
    if (cfg.sweep.trials == 0) throw std::invalid_argument("SimContext: trials must be >= 1");
    if (cfg.algorithms.empty()) throw std::invalid_argument("SimContext: no algorithms");
}

namespace {

EqualizerKind make_equalizer(EqualizerKind::Type type, double signal_power, double snr_db) {
    if (type == EqualizerKind::Type::ZeroForcing) return EqualizerKind::zf();
    return EqualizerKind::lmmse(signal_power / std::pow(10.0, snr_db / 10.0));
}

}  // namespace

TrainingData generate_training_data(const SimContext& ctx) {
    Rng rng(derive_seed(ctx.cfg.seed, StreamKind::Training));
    const ChannelRealization identity({cplx(1.0, 0.0)});
    TrainingData td;
    for (std::size_t s = 0; s < ctx.cfg.training.num_symbols; ++s) {
        const BitVec bits = rng.bits(ctx.sc.data_size * ctx.constellation.bits_per_symbol);
        const ComplexVec s_d = qam_map(bits, ctx.constellation);
        const DomainSignal s_t = dfts_modulate(s_d, ctx.sc);
        const DomainSignal amplified = amplify(s_t, ctx.pa, ctx.pa_cfg);
        const EqualizerKind kind = make_equalizer(ctx.cfg.equalizer, mean_power(amplified.samples),
                                                  ctx.cfg.training.snr_db);
        const DomainSignal noisy = add_awgn(amplified, {ctx.cfg.training.snr_db}, rng);
        td.clean_time.push_back(s_t.samples);
        td.received_time.push_back(
            receive_to_domain(noisy, identity, kind, Placement::TimeDomainEq, ctx.sc).samples);
        td.clean_dfts.push_back(s_d);
        td.received_dfts.push_back(
            receive_to_domain(noisy, identity, kind, Placement::DftSDomain, ctx.sc).samples);
    }
    return td;
}

TrainingSet training_set_for(const TrainingData& td, const AlgorithmSpec& alg) {
    const auto& clean = alg.placement == Placement::TimeDomainEq ? td.clean_time : td.clean_dfts;
    const auto& received =
        alg.placement == Placement::TimeDomainEq ? td.received_time : td.received_dfts;
    TrainingSet ts;
    for (std::size_t s = 0; s < clean.size(); ++s) {
        append_training_set(ts, build_training_set(clean[s], received[s], alg.memory));
    }
    return ts;
}

std::optional<Compensator> train_algorithm(const SimContext& ctx, const TrainingData& td,
                                           const AlgorithmSpec& alg) {
    (void)ctx;
    switch (alg.method) {
        case Method::None:
            return std::nullopt;
        case Method::Volterra: {
            TrainingSet ts = training_set_for(td, alg);
            MonomialBasis basis = enumerate_monomials(2 * alg.memory.depth(), alg.degrees);
            return Compensator(fit_volterra(ts, basis, alg.ridge));
        }
        case Method::Kernel: {
            TrainingSet ts = subsample_training_pairs(training_set_for(td, alg), alg.support_cap);
            const double lambda = kernel_ridge_lambda(ts, alg.degrees, alg.rho);
            return Compensator(fit_kernel(ts, alg.degrees, lambda));
        }
        case Method::Mp: {
            const auto& clean =
                alg.placement == Placement::TimeDomainEq ? td.clean_time : td.clean_dfts;
            const auto& received =
                alg.placement == Placement::TimeDomainEq ? td.received_time : td.received_dfts;
            return Compensator(fit_memory_polynomial(clean, received, alg.memory, alg.degrees));
        }
    }
    return std::nullopt;
}

TrialRecord run_trial(const SimContext& ctx, const AlgorithmSpec& alg,
                      const std::optional<Compensator>& model, double snr_db,
                      std::size_t snr_index, std::size_t alg_index, std::size_t trial_index) {
    const std::uint64_t seed =
        derive_seed(ctx.cfg.seed, StreamKind::Trial, snr_index, alg_index, trial_index);
    Rng rng(seed);

    const BitVec bits = rng.bits(ctx.sc.data_size * ctx.constellation.bits_per_symbol);
    const ComplexVec s_d = qam_map(bits, ctx.constellation);
    const DomainSignal s_t = dfts_modulate(s_d, ctx.sc);
    const DomainSignal transmitted = alg.bypass_pa ? s_t : amplify(s_t, ctx.pa, ctx.pa_cfg);

    const ChannelRealization h = ctx.cfg.channel.type == ChannelConfig::Type::Awgn
                                     ? ChannelRealization({cplx(1.0, 0.0)})
                                     : sample_taps(ctx.cfg.channel.profile, rng);
    const DomainSignal faded = apply_channel(transmitted, h);
    const EqualizerKind kind =
        make_equalizer(ctx.cfg.equalizer, mean_power(faded.samples), snr_db);
    const DomainSignal noisy = add_awgn(faded, {snr_db}, rng);

    DomainSignal compensated = receive_to_domain(noisy, h, kind, alg.placement, ctx.sc);
    if (model) {
        compensated = DomainSignal(compensate(*model, compensated.samples, alg.memory),
                                   compensated.domain);
    }
    ComplexVec estimate = estimate_dfts_symbol(compensated, alg.placement, ctx.sc);
    if (alg.method == Method::None) {
        // Blind power normalization: without a trained model nothing removes
        // the amplifier's linear gain, and hard decisions against the unit
        // constellation would be dominated by the scale mismatch.
        const double p = mean_power(estimate);
        if (p > 0.0) {
            const double g = 1.0 / std::sqrt(p);
            for (cplx& z : estimate) z *= g;
        }
    }

    TrialRecord rec;
    rec.snr_db = snr_db;
    rec.algorithm = alg.id;
    rec.placement = alg.placement;
    rec.trial_index = trial_index;
    rec.evm_db = compute_evm(s_d, estimate);
    rec.seed = seed;
    const BitVec decided = qam_demap_hard(estimate, ctx.constellation);
    rec.bits_sent = bits.size();
    rec.bit_errors = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] != decided[i]) ++rec.bit_errors;
    }
    return rec;
}

namespace {

void write_file(const std::string& path, const std::string& content, bool append) {
    std::ofstream out(path, append ? std::ios::app : std::ios::trunc);
    if (!out) throw std::runtime_error("run_sweep: cannot write " + path);
    out << content;
}

}  // namespace

std::string points_to_csv(const std::vector<BerPoint>& points, bool header) {
    std::string out;
    if (header) out += "snr_db,algorithm,placement,bits,errors,ber,evm_db,trials,seed\n";
    char buf[256];
    for (const BerPoint& p : points) {
        std::snprintf(buf, sizeof(buf), "%g,%s,%s,%zu,%zu,%.10g,%.4f,%zu,%llu\n", p.snr_db,
                      p.algorithm.c_str(), to_string(p.placement).c_str(), p.total_bits,
                      p.total_errors, p.ber, p.mean_evm_db, p.trials,
                      static_cast<unsigned long long>(p.seed));
        out += buf;
    }
    return out;
}

std::string trials_to_csv(const std::vector<TrialRecord>& trials, bool header) {
    std::string out;
    if (header) out += "snr_db,algorithm,placement,trial,bits,errors,evm_db,seed\n";
    char buf[256];
    for (const TrialRecord& t : trials) {
        std::snprintf(buf, sizeof(buf), "%g,%s,%s,%zu,%zu,%zu,%.4f,%llu\n", t.snr_db,
                      t.algorithm.c_str(), to_string(t.placement).c_str(), t.trial_index,
                      t.bits_sent, t.bit_errors, t.evm_db,
                      static_cast<unsigned long long>(t.seed));
        out += buf;
    }
    return out;
}

SweepResult run_sweep(const SimConfig& cfg) {
    SimContext ctx(cfg);

    std::fprintf(stderr, "[dpod] generating training data (%zu symbols at %g dB)\n",
                 cfg.training.num_symbols, cfg.training.snr_db);
    const TrainingData td = generate_training_data(ctx);
    std::fprintf(stderr,
                 "[dpod] training pool: time placement %zu complex pairs (%zu real rows), "
                 "dfts placement %zu complex pairs (%zu real rows)\n",
                 td.complex_pairs(Placement::TimeDomainEq),
                 2 * td.complex_pairs(Placement::TimeDomainEq),
                 td.complex_pairs(Placement::DftSDomain),
                 2 * td.complex_pairs(Placement::DftSDomain));

    std::vector<std::optional<Compensator>> models;
    for (const AlgorithmSpec& alg : ctx.cfg.algorithms) {
        models.push_back(train_algorithm(ctx, td, alg));
        if (models.back()) {
            if (const auto* k = std::get_if<KernelModel>(&*models.back())) {
                std::fprintf(stderr, "[dpod] trained %s: %zu support rows, lambda=%.6g\n",
                             alg.id.c_str(), k->weights.size(), k->lambda);
            } else if (const auto* v = std::get_if<VolterraModel>(&*models.back())) {
                std::fprintf(stderr, "[dpod] trained %s: %zu monomials\n", alg.id.c_str(),
                             v->basis.size());
            } else {
                std::fprintf(stderr, "[dpod] trained %s: memory polynomial\n", alg.id.c_str());
            }
        }
    }

    const std::size_t num_snr = cfg.sweep.snr_db.size();
    const std::size_t num_alg = cfg.algorithms.size();
    const std::size_t num_trials = cfg.sweep.trials;
    const std::size_t total = num_snr * num_alg * num_trials;

    SweepResult result;
    result.trials.resize(total);

    unsigned threads = cfg.threads != 0 ? cfg.threads : std::thread::hardware_concurrency();
    if (threads == 0) threads = 1;
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, total));

    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> failures(threads);
    auto worker = [&](unsigned wid) {
        try {
            while (true) {
                const std::size_t t = next.fetch_add(1);
                if (t >= total) break;
                const std::size_t si = t / (num_alg * num_trials);
                const std::size_t ai = (t / num_trials) % num_alg;
                const std::size_t ti = t % num_trials;
                result.trials[t] = run_trial(ctx, cfg.algorithms[ai], models[ai],
                                             cfg.sweep.snr_db[si], si, ai, ti);
            }
        } catch (...) {
            failures[wid] = std::current_exception();
        }
    };

    if (threads <= 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker, w);
        for (std::thread& th : pool) th.join();
    }
    for (const std::exception_ptr& e : failures) {
        if (e) std::rethrow_exception(e);
    }

    for (std::size_t si = 0; si < num_snr; ++si) {
        for (std::size_t ai = 0; ai < num_alg; ++ai) {
            BerPoint point;
            point.snr_db = cfg.sweep.snr_db[si];
            point.algorithm = cfg.algorithms[ai].id;
            point.placement = cfg.algorithms[ai].placement;
            point.trials = num_trials;
            point.seed = cfg.seed;
            double evm_sum = 0.0;
            for (std::size_t ti = 0; ti < num_trials; ++ti) {
                const TrialRecord& rec = result.trials[(si * num_alg + ai) * num_trials + ti];
                point.total_bits += rec.bits_sent;
                point.total_errors += rec.bit_errors;
                evm_sum += rec.evm_db;
            }
            point.ber = static_cast<double>(point.total_errors) /
                        static_cast<double>(point.total_bits);
            point.mean_evm_db = evm_sum / static_cast<double>(num_trials);
            std::fprintf(stderr, "[dpod] snr=%g %s: ber=%s (%zu/%zu) evm=%s dB\n", point.snr_db,
                         point.algorithm.c_str(), fmt("%.3e", point.ber).c_str(),
                         point.total_errors, point.total_bits,
                         fmt("%.2f", point.mean_evm_db).c_str());
            result.points.push_back(std::move(point));
        }
    }

    namespace fs = std::filesystem;
    const bool skip_header = cfg.append && fs::exists(cfg.output) && fs::file_size(cfg.output) > 0;
    write_file(cfg.output, points_to_csv(result.points, !skip_header), cfg.append);
    if (cfg.trial_output) {
        const bool skip_trial_header =
            cfg.append && fs::exists(*cfg.trial_output) && fs::file_size(*cfg.trial_output) > 0;
        write_file(*cfg.trial_output, trials_to_csv(result.trials, !skip_trial_header),
                   cfg.append);
    }
    return result;
}

double compute_evm(const ComplexVec& reference, const ComplexVec& estimate) {
    if (reference.size() != estimate.size()) {
        throw std::invalid_argument("compute_evm: length mismatch");
    }
    double ref_power = 0.0, err_power = 0.0;
    for (std::size_t i = 0; i < reference.size(); ++i) {
        ref_power += std::norm(reference[i]);
        err_power += std::norm(estimate[i] - reference[i]);
    }
    if (ref_power <= 0.0) throw std::invalid_argument("compute_evm: zero reference");
    const double ratio = err_power / ref_power;
    if (ratio < 1e-20) return -200.0;
    return 10.0 * std::log10(ratio);
}

std::pair<double, double> wilson_interval(std::size_t errors, std::size_t total) {
    if (total == 0) throw std::invalid_argument("wilson_interval: empty sample");
    const double z = 1.959963984540054;  // 97.5th normal percentile
    const double n = static_cast<double>(total);
    const double p = static_cast<double>(errors) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    const double lo = errors == 0 ? 0.0 : std::max(0.0, center - half);
    const double hi = errors == total ? 1.0 : std::min(1.0, center + half);
    return {lo, hi};
}

RealVec parse_snr_range(const std::string& spec) {
    double lo = 0.0, step = 0.0, hi = 0.0;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%lf", &lo, &step, &hi) != 3 || step <= 0.0) {
        throw std::runtime_error("parse_snr_range: expected lo:step:hi with step > 0");
    }
    RealVec grid;
    for (double v = lo; v <= hi + 1e-9; v += step) grid.push_back(v);
    if (grid.empty()) throw std::runtime_error("parse_snr_range: empty grid");
    return grid;
}

}  // namespace dpod
