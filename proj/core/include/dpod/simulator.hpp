// simulator.hpp - Experiment orchestration: config ingestion, training-set
// generation, Monte-Carlo BER sweeps, CSV persistence.
//
// Reproducibility contract: a (config, master seed) pair produces
// byte-identical CSV output across runs and across thread counts. Every
// trial owns an independent random stream derived from
// (seed, snr index, algorithm index, trial index); training data uses a
// separate stream derived from the seed alone, so the trained models do not
// depend on the algorithm list order or the sweep grid.

#pragma once

#include "dpod/channel.hpp"
#include "dpod/compensation.hpp"
#include "dpod/model_io.hpp"
#include "dpod/pa.hpp"
#include "dpod/receiver.hpp"

#include <optional>

namespace dpod {

enum class Method { None, Volterra, Kernel, Mp };

std::string to_string(Method m);

/// One receiver variant under test.
struct AlgorithmSpec {
    std::string id;
    Method method = Method::None;
    Placement placement = Placement::DftSDomain;
    MemorySpec memory = MemorySpec::none();
    DegreeSet degrees = DegreeSet::odd_up_to(5);
    double rho = 0.005;            // kernel regularizer rule: lambda = rho tr(K)/rows
    double ridge = 0.0;            // Volterra ridge (0 = plain least squares)
    std::size_t support_cap = 4000;  // kernel support row cap (uniform pair stride)
    bool bypass_pa = false;        // reference curve without the amplifier
};

struct ChannelConfig {
    enum class Type { Awgn, BlockFading };
    Type type = Type::Awgn;
    PdpProfile profile;  // used for BlockFading
};

struct TrainingConfig {
    double snr_db = 50.0;
    std::size_t num_symbols = 4;
};

struct SweepConfig {
    RealVec snr_db;
    std::size_t trials = 10;
};

struct SimConfig {
    std::size_t fft_size = 0;
    std::size_t dft_size = 0;
    std::size_t lower_guard = 0;
    std::size_t upper_guard = 0;
    unsigned constellation_order = 64;
    std::string pa_coeff_file;
    double backoff_db = 6.0;
    unsigned oversampling = 3;
    ChannelConfig channel;
    EqualizerKind::Type equalizer = EqualizerKind::Type::ZeroForcing;
    TrainingConfig training;
    SweepConfig sweep;
    std::vector<AlgorithmSpec> algorithms;
    std::uint64_t seed = 1;
    std::string output = "ber.csv";
    std::optional<std::string> trial_output;
    bool append = false;
    unsigned threads = 0;  // 0 = hardware concurrency

    SubcarrierConfig subcarriers() const;
};

/// Named presets. "desk" finishes in minutes on a laptop; "table1" is the
/// full-scale configuration (N=4096, M=3240, 256-QAM, 6 dB backoff, U=3,
/// degree 5).
SimConfig desk_preset();
SimConfig table1_preset();

/// Strict JSON config I/O; unknown keys are rejected.
SimConfig load_config(const std::string& path);
void save_config(const SimConfig& cfg, const std::string& path);
std::string config_to_json_string(const SimConfig& cfg);

/// Resolve a fixture path: absolute paths and paths that exist as given are
/// used directly, otherwise the file is looked up under $DPOD_DATA_DIR or
/// the build-time data directory.
std::string resolve_data_path(const std::string& path);

struct TrialRecord {
    double snr_db = 0.0;
    std::string algorithm;
    Placement placement = Placement::DftSDomain;
    std::size_t trial_index = 0;
    std::size_t bits_sent = 0;
    std::size_t bit_errors = 0;
    double evm_db = 0.0;
    std::uint64_t seed = 0;
};

struct BerPoint {
    double snr_db = 0.0;
    std::string algorithm;
    Placement placement = Placement::DftSDomain;
    std::size_t total_bits = 0;
    std::size_t total_errors = 0;
    double ber = 0.0;
    double mean_evm_db = 0.0;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
};

/// Clean/received pairs per training symbol, one list per placement.
struct TrainingData {
    std::vector<ComplexVec> clean_time, received_time;
    std::vector<ComplexVec> clean_dfts, received_dfts;

    std::size_t complex_pairs(Placement p) const;
};

/// Loaded, validated experiment context shared across trials.
struct SimContext {
    SimConfig cfg;
    SubcarrierConfig sc;
    Constellation constellation;
    GmpCoefficients pa;
    PaConfig pa_cfg;

    explicit SimContext(SimConfig config);
};

/// Transmit random payloads through the amplifier into a 50 dB (configurable)
/// AWGN channel and collect clean/received pairs for both placements.
TrainingData generate_training_data(const SimContext& ctx);

/// Build the real training rows for one algorithm's placement and memory.
TrainingSet training_set_for(const TrainingData& td, const AlgorithmSpec& alg);

/// Train one algorithm; std::nullopt for Method::None.
std::optional<Compensator> train_algorithm(const SimContext& ctx, const TrainingData& td,
                                           const AlgorithmSpec& alg);

/// One end-to-end trial: fresh payload, channel realization and noise,
/// receive, compensate, decide, count errors. Deterministic per seed.
TrialRecord run_trial(const SimContext& ctx, const AlgorithmSpec& alg,
                      const std::optional<Compensator>& model, double snr_db,
                      std::size_t snr_index, std::size_t alg_index, std::size_t trial_index);

struct SweepResult {
    std::vector<BerPoint> points;
    std::vector<TrialRecord> trials;
};

/// Full sweep: train every algorithm once, run all trials (in parallel if
/// configured), aggregate, and write the CSV. Progress goes to stderr.
SweepResult run_sweep(const SimConfig& cfg);

/// Error vector magnitude in dB, floored at -200.
double compute_evm(const ComplexVec& reference, const ComplexVec& estimate);

/// 95% Wilson score interval for an error proportion.
std::pair<double, double> wilson_interval(std::size_t errors, std::size_t total);

/// Parse "lo:step:hi" into a grid (inclusive bounds).
RealVec parse_snr_range(const std::string& spec);

std::string points_to_csv(const std::vector<BerPoint>& points, bool header);
std::string trials_to_csv(const std::vector<TrialRecord>& trials, bool header);

}  // namespace dpod
