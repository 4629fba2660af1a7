// dpodsim - link-level simulator for DFT-s-OFDM uplink transmission through
// a nonlinear amplifier with receiver-side post-distortion.
//
//   dpodsim simulate --preset desk --seed 7 --output ber.csv
//   dpodsim train --preset desk --model-out models.json
//   dpodsim selftest

#include "dpod/simulator.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <sstream>

namespace dpod_selftest {
int run();
}

namespace {

struct CommonOptions {
    std::string config;
    std::string preset;
    std::string snr_range;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string algorithms;
    std::string output;
    std::string trial_output;
    bool append = false;
    int threads = -1;
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--config", opt.config, "JSON config file");
    cmd->add_option("--preset", opt.preset, "Named preset: desk or table1")
        ->check(CLI::IsMember({"desk", "table1"}));
    cmd->add_option("--snr", opt.snr_range, "Override SNR grid as lo:step:hi (dB)");
    cmd->add_option("--trials", opt.trials, "Override trials per SNR point");
    cmd->add_option("--seed", opt.seed, "Master seed")->each([&](const std::string&) {
        opt.seed_set = true;
    });
    cmd->add_option("--algorithms", opt.algorithms,
                    "Comma-separated subset of configured algorithm ids");
    cmd->add_option("--threads", opt.threads, "Worker threads (0 = hardware concurrency)");
}

dpod::SimConfig build_config(const CommonOptions& opt) {
    dpod::SimConfig cfg;
    if (!opt.config.empty() && !opt.preset.empty()) {
        throw CLI::ValidationError("--config and --preset are mutually exclusive");
    }
    if (!opt.config.empty()) {
        cfg = dpod::load_config(opt.config);
    } else if (opt.preset == "table1") {
        cfg = dpod::table1_preset();
    } else if (opt.preset == "desk" || opt.preset.empty()) {
        cfg = dpod::desk_preset();
    }
    if (!opt.snr_range.empty()) cfg.sweep.snr_db = dpod::parse_snr_range(opt.snr_range);
    if (opt.trials > 0) cfg.sweep.trials = opt.trials;
    if (opt.seed_set) cfg.seed = opt.seed;
    if (!opt.output.empty()) cfg.output = opt.output;
    if (!opt.trial_output.empty()) cfg.trial_output = opt.trial_output;
    if (opt.append) cfg.append = true;
    if (opt.threads >= 0) cfg.threads = static_cast<unsigned>(opt.threads);
    if (!opt.algorithms.empty()) {
        std::vector<dpod::AlgorithmSpec> selected;
        std::stringstream ss(opt.algorithms);
        std::string id;
        while (std::getline(ss, id, ',')) {
            bool found = false;
            for (const dpod::AlgorithmSpec& a : cfg.algorithms) {
                if (a.id == id) {
                    selected.push_back(a);
                    found = true;
                }
            }
            if (!found) throw CLI::ValidationError("unknown algorithm id: " + id);
        }
        cfg.algorithms = std::move(selected);
    }
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DFT-s-OFDM link simulator with receiver-side post-distortion"};
    app.require_subcommand(1);

    CommonOptions sim_opt;
    CLI::App* simulate = app.add_subcommand("simulate", "Run a Monte-Carlo BER sweep");
    add_common(simulate, sim_opt);
    simulate->add_option("--output", sim_opt.output, "Aggregate CSV path");
    simulate->add_option("--trial-output", sim_opt.trial_output, "Per-trial CSV path");
    simulate->add_flag("--append", sim_opt.append, "Append to existing CSV files");

    CommonOptions train_opt;
    std::string model_out;
    CLI::App* train = app.add_subcommand("train", "Train the configured compensators");
    add_common(train, train_opt);
    train->add_option("--model-out", model_out, "Output model file (JSON)")->required();

    CLI::App* selftest = app.add_subcommand("selftest", "Run the built-in property suite");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(simulate)) {
            dpod::SimConfig cfg = build_config(sim_opt);
            dpod::run_sweep(cfg);
            std::fprintf(stderr, "[dpod] wrote %s\n", cfg.output.c_str());
            return 0;
        }
        if (app.got_subcommand(train)) {
            dpod::SimConfig cfg = build_config(train_opt);
            dpod::SimContext ctx(cfg);
            const dpod::TrainingData td = dpod::generate_training_data(ctx);
            std::fprintf(stderr,
                         "[dpod] training pool: time %zu complex pairs (%zu real rows), "
                         "dfts %zu complex pairs (%zu real rows)\n",
                         td.complex_pairs(dpod::Placement::TimeDomainEq),
                         2 * td.complex_pairs(dpod::Placement::TimeDomainEq),
                         td.complex_pairs(dpod::Placement::DftSDomain),
                         2 * td.complex_pairs(dpod::Placement::DftSDomain));
            std::map<std::string, dpod::Compensator> models;
            for (const dpod::AlgorithmSpec& alg : cfg.algorithms) {
                auto model = dpod::train_algorithm(ctx, td, alg);
                if (model) {
                    models.emplace(alg.id, std::move(*model));
                    std::fprintf(stderr, "[dpod] trained %s\n", alg.id.c_str());
                }
            }
            dpod::save_models(models, model_out);
            std::fprintf(stderr, "[dpod] wrote %zu model(s) to %s\n", models.size(),
                         model_out.c_str());
            return 0;
        }
        if (app.got_subcommand(selftest)) {
            return dpod_selftest::run();
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
