#include "thermonet/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "thermonet/analysis.hpp"

namespace thermonet {

namespace {

constexpr double kDivergenceBound = 1e8;

DataConfig::Kind parse_data_kind(const std::string& kind) {
    if (kind == "spiral") return DataConfig::Kind::spiral;
    if (kind == "trig") return DataConfig::Kind::trig;
    if (kind == "mnist") return DataConfig::Kind::mnist;
    throw std::invalid_argument("unknown data.kind: " + kind);
}

InitScheme parse_init(const KeyValueConfig& kv) {
    const std::string kind = kv.get_string("net.init", "gaussian");
    const double sigma = kv.get_double("net.init_sigma", 0.01);
    if (kind == "zeros") return InitScheme::zeros();
    if (kind == "gaussian") return InitScheme::gaussian(sigma);
    if (kind == "fan_in" || kind == "fan_in_uniform") return InitScheme::fan_in_uniform();
    throw std::invalid_argument("unknown net.init: " + kind);
}

FrictionParam parse_friction(const KeyValueConfig& kv, const std::string& key, FrictionParam fallback) {
    if (!kv.has(key)) return fallback;
    const double value = kv.get_double(key, 0.0);
    if (std::isinf(value)) return FrictionParam::inf();
    return FrictionParam::finite(value);
}

Dataset subset_rows(const Dataset& data, int n) {
    if (n <= 0 || static_cast<std::size_t>(n) >= data.size()) return data;
    Dataset out;
    out.n_features = data.n_features;
    out.n_classes = data.n_classes;
    out.name = data.name;
    out.inputs.assign(data.inputs.begin(),
                      data.inputs.begin() + static_cast<std::size_t>(n) * data.n_features);
    out.labels.assign(data.labels.begin(), data.labels.begin() + n);
    return out;
}

Dataset generate_planar(const DataConfig& dc, int n_total, RngStream& stream) {
    if (n_total < 2 || n_total % 2 != 0)
        throw std::invalid_argument("planar dataset size must be even and >= 2, got " +
                                    std::to_string(n_total));
    if (dc.kind == DataConfig::Kind::spiral) {
        SpiralSpec spec{n_total / 2, dc.a, dc.b, dc.c, dc.p};
        return generate_spiral(spec, stream);
    }
    TrigSpec spec{n_total / 2, dc.a, dc.b, dc.c};
    return generate_trig(spec, stream);
}

} // namespace

ExperimentConfig ExperimentConfig::from_config(const KeyValueConfig& kv) {
    ExperimentConfig config;

    config.data.kind = parse_data_kind(kv.get_string("data.kind", "spiral"));
    const bool trig = config.data.kind == DataConfig::Kind::trig;
    config.data.a = kv.get_double("data.a", trig ? 6.0 : 2.0);
    config.data.b = kv.get_double("data.b", trig ? 1.0 : 2.0);
    config.data.c = kv.get_double("data.c", 0.02);
    config.data.p = kv.get_double("data.p", 0.5);
    config.data.n_train = static_cast<int>(kv.get_int("data.n_train", 500));
    config.data.n_test = static_cast<int>(kv.get_int("data.n_test", 500));
    config.data.batch_fraction = kv.get_double("data.batch_fraction", 1.0);
    config.data.images = kv.get_string("data.images", "");
    config.data.labels = kv.get_string("data.labels", "");
    config.data.test_images = kv.get_string("data.test_images", "");
    config.data.test_labels = kv.get_string("data.test_labels", "");

    config.net.hidden = static_cast<int>(kv.get_int("net.hidden", 20));
    config.net.init = parse_init(kv);
    config.net.l2 = kv.get_double("model.l2", 0.0);

    std::string method = kv.get_string("method", "sgd");
    if (method == "sgd_mom" || method == "sgd_momentum") {
        const long long variant = kv.get_int("momentum.variant", 1);
        if (variant != 1 && variant != 2)
            throw std::invalid_argument("momentum.variant must be 1 or 2");
        method = variant == 1 ? "sgd_mom1" : "sgd_mom2";
    } else {
        (void)kv.get_int("momentum.variant", 1);
    }
    config.integrator.method = parse_method(method);
    config.integrator.h = kv.get_double("h", 0.1);
    config.integrator.gamma1 = parse_friction(kv, "gamma1", FrictionParam::finite(0.0));
    config.integrator.tau1 = kv.get_double("tau1", 0.0);
    // Plain BAOAB is a single (gamma, tau) pair applied to both blocks.
    const FrictionParam gamma2_fallback =
        config.integrator.method == Method::baoab ? config.integrator.gamma1 : FrictionParam::finite(0.0);
    const double tau2_fallback = config.integrator.method == Method::baoab ? config.integrator.tau1 : 0.0;
    config.integrator.gamma2 = parse_friction(kv, "gamma2", gamma2_fallback);
    config.integrator.tau2 = kv.get_double("tau2", tau2_fallback);
    if (config.integrator.method == Method::langevin_layers &&
        (!kv.has("gamma1") || !kv.has("tau1") || !kv.has("gamma2") || !kv.has("tau2")))
        throw std::invalid_argument("langevin_layers requires gamma1, tau1, gamma2 and tau2");
    config.integrator.sigma_a = kv.get_double("sigma_a", 0.0);
    config.integrator.eps = kv.get_double("eps", 0.1);
    config.integrator.adam_beta1 = kv.get_double("adam.beta1", 0.9);
    config.integrator.adam_beta2 = kv.get_double("adam.beta2", 0.999);
    config.integrator.adam_eps = kv.get_double("adam.eps", 1e-8);
    config.integrator.momentum_mu = kv.get_double("momentum.mu", 0.0);
    config.integrator.sgld_sigma = kv.get_double("sgld.sigma", 0.0);

    config.n_steps = kv.get_int("n_steps", 10000);
    config.eval_interval = kv.get_int("eval_interval", 100);
    config.seed = kv.get_u64("seed", 0);
    config.n_replicates = static_cast<int>(kv.get_int("n_replicates", 10));
    config.checkpoint_interval = kv.get_int("checkpoint_interval", 0);
    config.posterior_window = static_cast<int>(kv.get_int("posterior_window", 1));
    config.out_dir = kv.get_string("out", "");
    config.timing = kv.get_bool("timing", true);
    config.threads = static_cast<int>(kv.get_int("threads", 1));

    config.validate();
    return config;
}

void ExperimentConfig::validate() const {
    integrator.validate();
    if (n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
    if (eval_interval < 1) throw std::invalid_argument("eval_interval must be >= 1");
    if (n_replicates < 1) throw std::invalid_argument("n_replicates must be >= 1");
    if (checkpoint_interval < 0) throw std::invalid_argument("checkpoint_interval must be >= 0");
    if (posterior_window < 0) throw std::invalid_argument("posterior_window must be >= 0");
    if (threads < 1) throw std::invalid_argument("threads must be >= 1");
    if (net.hidden < 1) throw std::invalid_argument("net.hidden must be >= 1");
    if (!(data.batch_fraction > 0.0) || data.batch_fraction > 1.0)
        throw std::invalid_argument("data.batch_fraction must be in (0,1]");
    if (data.kind == DataConfig::Kind::mnist &&
        (data.images.empty() || data.labels.empty() || data.test_images.empty() ||
         data.test_labels.empty()))
        throw std::invalid_argument(
            "mnist data requires data.images, data.labels, data.test_images, data.test_labels");
}

ExperimentData build_experiment_data(const ExperimentConfig& config) {
    ExperimentData ed;
    if (config.data.kind == DataConfig::Kind::mnist) {
        ed.train = subset_rows(load_idx(config.data.images, config.data.labels), config.data.n_train);
        ed.test =
            subset_rows(load_idx(config.data.test_images, config.data.test_labels), config.data.n_test);
    } else {
        RngStream train_stream(derive_seed(config.seed, 0));
        RngStream test_stream(derive_seed(config.seed, 1));
        ed.train = generate_planar(config.data, config.data.n_train, train_stream);
        ed.test = generate_planar(config.data, config.data.n_test, test_stream);
    }
    ed.net.input_dim = ed.train.n_features;
    ed.net.hidden_dim = config.net.hidden;
    ed.net.output_dim = ed.train.n_classes == 2 ? 1 : ed.train.n_classes;
    ed.net.l2 = config.net.l2;
    ed.net.validate();
    return ed;
}

double RunMetrics::final_test_accuracy() const {
    return rows.empty() ? 0.0 : rows.back().test_acc;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string RunMetrics::metrics_csv() const {
    std::string out = "step,train_loss,test_loss,train_acc,test_acc,ktemp1,ktemp2,wall_ms\n";
    for (const MetricsRow& r : rows) {
        out += std::to_string(r.step);
        for (const double v : {r.train_loss, r.test_loss, r.train_acc, r.test_acc, r.ktemp1, r.ktemp2}) {
            out += ',';
            out += format_double(v);
        }
        out += ',';
        out += std::to_string(r.wall_ms);
        out += '\n';
    }
    return out;
}

RunMetrics run_experiment(const ExperimentConfig& config) {
    config.validate();
    const ExperimentData ed = build_experiment_data(config);
    const NetworkSpec& net = ed.net;
    const Partition partition = net.partition();

    RngStream init_stream(derive_seed(config.seed, 2));
    RngStream loop_stream(derive_seed(config.seed, 3));

    RunMetrics rm;
    rm.net = net;
    std::vector<double> params = init_params(net, config.net.init, init_stream);
    rm.initial_params = params;
    DynamicsState state = DynamicsState::zeros(net.param_count());
    Stepper stepper(config.integrator, partition);

    std::vector<std::size_t> batch;
    long long eval_count = 0;
    const Stepper::GradFn grad_fn = [&](const std::vector<double>& theta, std::vector<double>& out) {
        grad(net, theta, ed.train, batch, out);
        ++eval_count;
    };

    const auto start = std::chrono::steady_clock::now();
    const auto wall_ms = [&]() -> long long {
        if (!config.timing) return 0;
        return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                                     start)
            .count();
    };

    bool loss_finite = true;
    const auto eval_row = [&](long long step) {
        MetricsRow row;
        row.step = step;
        row.train_loss = loss(net, params, ed.train);
        row.test_loss = loss(net, params, ed.test);
        row.train_acc = accuracy(net, params, ed.train);
        row.test_acc = accuracy(net, params, ed.test);
        const auto ktemp = kinetic_temperature(state, partition);
        row.ktemp1 = ktemp[0];
        row.ktemp2 = ktemp[1];
        row.wall_ms = wall_ms();
        loss_finite = std::isfinite(row.train_loss) && std::isfinite(row.test_loss);
        return row;
    };

    rm.rows.push_back(eval_row(0));

    if (stepper.needs_priming()) {
        batch = sample_minibatch(ed.train, config.data.batch_fraction, loop_stream).indices;
        stepper.prime(params, grad_fn);
        rm.prime_evals = eval_count;
        eval_count = 0;
    }

    for (long long step = 1; step <= config.n_steps; ++step) {
        batch = sample_minibatch(ed.train, config.data.batch_fraction, loop_stream).indices;
        stepper.step(params, state, grad_fn, loop_stream);

        bool params_ok = true;
        for (const double v : params) {
            if (!std::isfinite(v) || std::abs(v) > kDivergenceBound) {
                params_ok = false;
                break;
            }
        }
        if (!params_ok) {
            rm.diverged = true;
            rm.diverged_step = step;
            break;
        }

        if (step % config.eval_interval == 0 || step == config.n_steps) {
            rm.rows.push_back(eval_row(step));
            if (!loss_finite) {
                rm.diverged = true;
                rm.diverged_step = step;
                break;
            }
        }
        if (config.posterior_window > 0 && step > config.n_steps - config.posterior_window)
            rm.tail_checkpoints.push_back(params);
        if (!config.out_dir.empty() && config.checkpoint_interval > 0 &&
            step % config.checkpoint_interval == 0) {
            std::filesystem::create_directories(config.out_dir);
            char name[64];
            std::snprintf(name, sizeof(name), "snapshot_step_%09lld.bin", step);
            save_params((std::filesystem::path(config.out_dir) / name).string(), net, params);
        }
    }
    rm.grad_evals = eval_count;
    rm.final_params = params;

    if (!config.out_dir.empty()) {
        const std::filesystem::path out(config.out_dir);
        std::filesystem::create_directories(out);
        {
            std::ofstream f(out / "metrics.csv", std::ios::binary);
            f << rm.metrics_csv();
        }
        save_params((out / "snapshot_final.bin").string(), net, rm.final_params);
        for (std::size_t i = 0; i < rm.tail_checkpoints.size(); ++i) {
            char name[64];
            std::snprintf(name, sizeof(name), "snapshot_tail_%03zu.bin", i);
            save_params((out / name).string(), net, rm.tail_checkpoints[i]);
        }
        std::ofstream info(out / "run.txt");
        info << "status=" << (rm.diverged ? "diverged" : "ok") << "\n";
        if (rm.diverged) info << "diverged_step=" << rm.diverged_step << "\n";
        info << "grad_evals=" << rm.grad_evals << "\n";
        info << "prime_evals=" << rm.prime_evals << "\n";
        info << "wall_ms=" << wall_ms() << "\n";
    }
    return rm;
}

std::string ReplicateSummary::summary_csv() const {
    std::string out = "run,seed,final_test_acc,diverged\n";
    for (const Entry& e : entries) {
        out += std::to_string(e.run);
        out += ',';
        out += std::to_string(e.seed);
        out += ',';
        out += format_double(e.final_test_acc);
        out += ',';
        out += e.diverged ? '1' : '0';
        out += '\n';
    }
    return out;
}

ReplicateSummary replicate(const ExperimentConfig& config, int n_runs) {
    if (n_runs < 2) throw std::invalid_argument("replicate requires n_runs >= 2");
    config.validate();

    ReplicateSummary summary;
    summary.entries.resize(n_runs);

    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const auto worker = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n_runs) return;
            try {
                ExperimentConfig run_config = config;
                run_config.seed = config.seed + static_cast<std::uint64_t>(i);
                run_config.out_dir.clear();
                const RunMetrics rm = run_experiment(run_config);
                summary.entries[i] = {i, run_config.seed, rm.final_test_accuracy(), rm.diverged};
            } catch (...) {
                const std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };

    const int n_workers = std::max(1, std::min(config.threads, n_runs));
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    double sum = 0.0;
    for (const auto& e : summary.entries) {
        if (e.diverged) {
            ++summary.n_diverged;
            continue;
        }
        ++summary.n_ok;
        sum += e.final_test_acc;
    }
    summary.mean_acc = summary.n_ok > 0 ? sum / summary.n_ok : std::nan("");
    if (summary.n_ok > 1) {
        double ss = 0.0;
        for (const auto& e : summary.entries)
            if (!e.diverged) ss += (e.final_test_acc - summary.mean_acc) * (e.final_test_acc - summary.mean_acc);
        summary.var_acc = ss / (summary.n_ok - 1);
    } else {
        summary.var_acc = std::nan("");
    }

    if (!config.out_dir.empty()) {
        std::filesystem::create_directories(config.out_dir);
        std::ofstream f(std::filesystem::path(config.out_dir) / "replicate_summary.csv",
                        std::ios::binary);
        f << summary.summary_csv();
    }
    return summary;
}

std::vector<SweepRow> sweep(const KeyValueConfig& base, const std::string& axis,
                            const std::vector<std::string>& values) {
    if (values.empty()) throw std::invalid_argument("sweep requires at least one value");
    {
        // Reject axes no config reader would ever look at.
        KeyValueConfig probe = base;
        probe.set(axis, values.front());
        (void)ExperimentConfig::from_config(probe);
        if (!probe.was_consumed(axis))
            throw std::invalid_argument("invalid sweep axis: " + axis);
    }

    std::vector<SweepRow> rows;
    rows.reserve(values.size());
    for (const std::string& value : values) {
        KeyValueConfig kv = base;
        kv.set(axis, value);
        ExperimentConfig config = ExperimentConfig::from_config(kv);
        config.out_dir.clear(); // per-value replicate summaries stay in memory
        const ReplicateSummary summary = replicate(config, config.n_replicates);
        rows.push_back({value, summary.mean_acc, summary.var_acc, summary.n_ok, summary.n_diverged});
    }
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "axis_value,mean_acc,var_acc,n_ok,n_diverged\n";
    for (const SweepRow& r : rows) {
        out += r.axis_value;
        out += ',';
        out += format_double(r.mean_acc);
        out += ',';
        out += format_double(r.var_acc);
        out += ',';
        out += std::to_string(r.n_ok);
        out += ',';
        out += std::to_string(r.n_diverged);
        out += '\n';
    }
    return out;
}

} // namespace thermonet
