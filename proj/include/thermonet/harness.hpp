#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "thermonet/config.hpp"
#include "thermonet/dataset.hpp"
#include "thermonet/integrators.hpp"
#include "thermonet/network.hpp"

namespace thermonet {

struct DataConfig {
    enum class Kind { spiral, trig, mnist };
    Kind kind = Kind::spiral;
    double a = 2.0, b = 2.0, c = 0.02, p = 0.5;
    int n_train = 500, n_test = 500;
    double batch_fraction = 1.0;
    std::string images, labels, test_images, test_labels; // mnist (IDX files)
};

struct NetConfig {
    int hidden = 20;
    InitScheme init = InitScheme::gaussian(0.01);
    double l2 = 0.0;
};

struct ExperimentConfig {
    DataConfig data;
    NetConfig net;
    IntegratorConfig integrator;
    long long n_steps = 10000;
    long long eval_interval = 100;
    std::uint64_t seed = 0;
    int n_replicates = 10;
    long long checkpoint_interval = 0; // 0 = off
    int posterior_window = 1;          // trailing parameter snapshots to keep
    std::string out_dir;               // empty = no files written
    bool timing = true;                // false zeroes wall_ms for bitwise-reproducible CSVs
    int threads = 1;                   // replicate/sweep worker pool size

    /// Reads every recognized key; call kv.check_unused() afterwards to
    /// reject typos. Throws std::invalid_argument on bad values.
    static ExperimentConfig from_config(const KeyValueConfig& kv);
    void validate() const;
};

struct MetricsRow {
    long long step = 0;
    double train_loss = 0.0, test_loss = 0.0;
    double train_acc = 0.0, test_acc = 0.0;
    double ktemp1 = 0.0, ktemp2 = 0.0;
    long long wall_ms = 0;
};

struct RunMetrics {
    std::vector<MetricsRow> rows; // step 0 first, then every eval_interval steps
    std::vector<double> initial_params;
    std::vector<double> final_params;
    std::vector<std::vector<double>> tail_checkpoints; // last posterior_window steps
    NetworkSpec net;
    bool diverged = false;
    long long diverged_step = -1;
    long long grad_evals = 0; // gradient evaluations inside the stepping loop
    long long prime_evals = 0;

    double final_test_accuracy() const;
    std::string metrics_csv() const;
};

/// Run-local data: train/test sets and the resolved network, all derived
/// deterministically from the seed. Sub-stream assignment: 0 train data,
/// 1 test data, 2 parameter init, 3 training loop (minibatches and
/// integrator noise, interleaved per step).
struct ExperimentData {
    Dataset train, test;
    NetworkSpec net;
};
ExperimentData build_experiment_data(const ExperimentConfig& config);

/// One seeded training run. Writes metrics.csv, snapshot files and run.txt
/// under out_dir when it is set. A run whose parameters leave [-1e8, 1e8] or
/// whose evaluated loss turns non-finite is aborted and flagged diverged.
RunMetrics run_experiment(const ExperimentConfig& config);

struct ReplicateSummary {
    struct Entry {
        int run = 0;
        std::uint64_t seed = 0;
        double final_test_acc = 0.0;
        bool diverged = false;
    };
    std::vector<Entry> entries;
    double mean_acc = 0.0;
    double var_acc = 0.0; // unbiased sample variance over non-diverged runs
    int n_ok = 0;
    int n_diverged = 0;

    std::string summary_csv() const;
};

/// n_runs independent runs with seeds config.seed + 0 .. + n_runs-1.
/// Individual runs do not write files; the summary CSV goes to
/// config.out_dir when set. Runs are dispatched to config.threads workers;
/// results are ordered by run index regardless of completion order.
ReplicateSummary replicate(const ExperimentConfig& config, int n_runs);

struct SweepRow {
    std::string axis_value;
    double mean_acc = 0.0;
    double var_acc = 0.0;
    int n_ok = 0;
    int n_diverged = 0;
};

/// One replicate() summary per axis value, axis being any recognized config
/// key. Throws std::invalid_argument for an unknown axis.
std::vector<SweepRow> sweep(const KeyValueConfig& base, const std::string& axis,
                            const std::vector<std::string>& values);

std::string sweep_csv(const std::vector<SweepRow>& rows);

/// Lossless double formatting used by every CSV writer (%.17g).
std::string format_double(double v);

} // namespace thermonet
