// Command-line front end: seeded training runs, replicate studies, sweeps,
// loss-landscape probes, classifier grids and dataset generation.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "thermonet/analysis.hpp"
#include "thermonet/harness.hpp"

using namespace thermonet;

namespace {

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir;
    long long seed = -1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "configuration file (key = value lines)");
    cmd->add_option("--set", args.overrides, "override a config key, e.g. --set h=0.25")
        ->take_all();
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--seed", args.seed, "experiment seed");
}

KeyValueConfig load_kv(const CommonArgs& args) {
    KeyValueConfig kv;
    if (!args.config_path.empty()) kv = KeyValueConfig::from_file(args.config_path);
    for (const std::string& pair : args.overrides) kv.set_pair(pair);
    if (args.seed >= 0) kv.set("seed", std::to_string(args.seed));
    if (!args.out_dir.empty()) kv.set("out", args.out_dir);
    return kv;
}

ExperimentConfig build_config(KeyValueConfig& kv) {
    ExperimentConfig config = ExperimentConfig::from_config(kv);
    kv.check_unused();
    return config;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

LossFn dataset_loss_fn(const NetworkSpec& net, const Dataset& data) {
    return [&net, &data](const std::vector<double>& theta) { return loss(net, theta, data); };
}

std::vector<double> load_matching_params(const std::string& path, const NetworkSpec& net) {
    auto [spec, params] = load_params(path);
    if (spec.input_dim != net.input_dim || spec.hidden_dim != net.hidden_dim ||
        spec.output_dim != net.output_dim)
        throw std::runtime_error("snapshot " + path + " does not match the configured network");
    return params;
}

void write_pgm(const std::filesystem::path& path, const std::vector<double>& grid, int resolution) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "P5\n" << resolution << " " << resolution << "\n255\n";
    // image rows run top to bottom: flip the y axis
    for (int iy = resolution - 1; iy >= 0; --iy) {
        for (int ix = 0; ix < resolution; ++ix) {
            const double p = grid[static_cast<std::size_t>(iy) * resolution + ix];
            const int value = std::max(0, std::min(255, static_cast<int>(p * 255.0 + 0.5)));
            out.put(static_cast<char>(value));
        }
    }
}

std::string dataset_csv(const Dataset& data) {
    std::string out = "x1,x2,label\n";
    for (std::size_t i = 0; i < data.size(); ++i) {
        out += format_double(data.row(i)[0]);
        out += ',';
        out += format_double(data.row(i)[1]);
        out += ',';
        out += std::to_string(data.labels[i]);
        out += '\n';
    }
    return out;
}

int cmd_train(const CommonArgs& args) {
    KeyValueConfig kv = load_kv(args);
    const ExperimentConfig config = build_config(kv);
    const RunMetrics rm = run_experiment(config);
    std::printf("method=%s steps=%lld %s final_test_acc=%.4f final_test_loss=%.6f grad_evals=%lld\n",
                method_name(config.integrator.method).c_str(), config.n_steps,
                rm.diverged ? "DIVERGED" : "ok", rm.final_test_accuracy(),
                rm.rows.empty() ? 0.0 : rm.rows.back().test_loss, rm.grad_evals);
    return 0;
}

int cmd_replicate(const CommonArgs& args, int runs) {
    KeyValueConfig kv = load_kv(args);
    const ExperimentConfig config = build_config(kv);
    const int n_runs = runs > 0 ? runs : config.n_replicates;
    const ReplicateSummary summary = replicate(config, n_runs);
    std::printf("runs=%d ok=%d diverged=%d mean_acc=%.4f var_acc=%.6g\n", n_runs, summary.n_ok,
                summary.n_diverged, summary.mean_acc, summary.var_acc);
    return 0;
}

int cmd_sweep(const CommonArgs& args, const std::string& axis, const std::vector<std::string>& values) {
    KeyValueConfig kv = load_kv(args);
    {
        KeyValueConfig check = kv;
        (void)build_config(check); // validate base config before the long part
    }
    const auto rows = sweep(kv, axis, values);
    const std::string csv = sweep_csv(rows);
    std::fputs(csv.c_str(), stdout);
    const std::string out_dir = kv.get_string("out", args.out_dir);
    if (!out_dir.empty())
        write_text(std::filesystem::path(out_dir) / "sweep.csv", csv);
    return 0;
}

int cmd_probe_1d(const CommonArgs& args, const std::string& theta0_path, const std::string& thetaf_path,
                 int points, const std::string& use) {
    KeyValueConfig kv = load_kv(args);
    const ExperimentConfig config = build_config(kv);
    const ExperimentData ed = build_experiment_data(config);
    const Dataset& data = use == "train" ? ed.train : ed.test;

    const auto theta0 = load_matching_params(theta0_path, ed.net);
    const auto thetaf = load_matching_params(thetaf_path, ed.net);
    const LossCurve curve = interpolate_1d(theta0, thetaf, dataset_loss_fn(ed.net, data), points);

    std::string csv = "alpha,loss\n";
    for (std::size_t i = 0; i < curve.alphas.size(); ++i)
        csv += format_double(curve.alphas[i]) + "," + format_double(curve.losses[i]) + "\n";
    if (!config.out_dir.empty())
        write_text(std::filesystem::path(config.out_dir) / "probe1d.csv", csv);
    else
        std::fputs(csv.c_str(), stdout);
    std::fprintf(stderr, "barrier=%.6g endpoints=(%.6g, %.6g) on %s loss\n", barrier(curve),
                 curve.losses.front(), curve.losses.back(), use.c_str());
    return 0;
}

int cmd_probe_2d(const CommonArgs& args, const std::string& theta0_path, const std::string& f1_path,
                 const std::string& f2_path, int alpha_points, int beta_points, const std::string& use) {
    KeyValueConfig kv = load_kv(args);
    const ExperimentConfig config = build_config(kv);
    const ExperimentData ed = build_experiment_data(config);
    const Dataset& data = use == "train" ? ed.train : ed.test;

    const auto theta0 = load_matching_params(theta0_path, ed.net);
    const auto f1 = load_matching_params(f1_path, ed.net);
    const auto f2 = load_matching_params(f2_path, ed.net);
    const LossSurface surf =
        surface_2d(theta0, f1, f2, dataset_loss_fn(ed.net, data), alpha_points, beta_points);

    std::string csv = "alpha,beta,loss\n";
    for (std::size_t ia = 0; ia < surf.alphas.size(); ++ia)
        for (std::size_t ib = 0; ib < surf.betas.size(); ++ib)
            csv += format_double(surf.alphas[ia]) + "," + format_double(surf.betas[ib]) + "," +
                   format_double(surf.at(ia, ib)) + "\n";
    if (!config.out_dir.empty())
        write_text(std::filesystem::path(config.out_dir) / "probe2d.csv", csv);
    else
        std::fputs(csv.c_str(), stdout);
    return 0;
}

int cmd_classifier_grid(const CommonArgs& args, const std::vector<std::string>& snapshots,
                        const GridBounds& bounds, int resolution, const std::string& pgm_path) {
    if (snapshots.empty()) throw std::runtime_error("classifier-grid needs at least one --snapshot");
    auto [net, first] = load_params(snapshots.front());
    std::vector<std::vector<double>> checkpoints = {std::move(first)};
    for (std::size_t i = 1; i < snapshots.size(); ++i)
        checkpoints.push_back(load_matching_params(snapshots[i], net));

    // probabilities averaged over the provided snapshots, cellwise
    const int res = resolution;
    std::vector<double> grid(static_cast<std::size_t>(res) * res, 0.0);
    for (const auto& params : checkpoints) {
        const auto g = classifier_grid(net, params, bounds, res);
        for (std::size_t i = 0; i < grid.size(); ++i) grid[i] += g[i];
    }
    for (double& v : grid) v /= static_cast<double>(checkpoints.size());

    const double dx = (bounds.x_max - bounds.x_min) / res;
    const double dy = (bounds.y_max - bounds.y_min) / res;
    std::string csv = "x,y,prob\n";
    for (int iy = 0; iy < res; ++iy)
        for (int ix = 0; ix < res; ++ix)
            csv += format_double(bounds.x_min + (ix + 0.5) * dx) + "," +
                   format_double(bounds.y_min + (iy + 0.5) * dy) + "," +
                   format_double(grid[static_cast<std::size_t>(iy) * res + ix]) + "\n";

    if (!args.out_dir.empty())
        write_text(std::filesystem::path(args.out_dir) / "classifier_grid.csv", csv);
    else if (pgm_path.empty())
        std::fputs(csv.c_str(), stdout);
    if (!pgm_path.empty()) write_pgm(pgm_path, grid, res);
    return 0;
}

int cmd_weight_hist(const CommonArgs& args, const std::string& snapshot_path, const std::string& group,
                    double lo, double hi, int bins) {
    if (!(hi > lo) || bins < 1) throw std::runtime_error("need max > min and bins >= 1");
    auto [net, params] = load_params(snapshot_path);
    ParamGroup pg;
    if (group == "w1") pg = ParamGroup::w1;
    else if (group == "b1") pg = ParamGroup::b1;
    else if (group == "w2") pg = ParamGroup::w2;
    else if (group == "b2") pg = ParamGroup::b2;
    else throw std::runtime_error("group must be one of w1, b1, w2, b2");

    std::vector<double> edges(bins + 1);
    for (int i = 0; i <= bins; ++i) edges[i] = lo + (hi - lo) * i / bins;
    const auto counts = weight_histogram(net, params, pg, edges);

    std::string csv = "bin_lo,bin_hi,count\n";
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const std::string bin_lo = i == 0 ? "-inf" : format_double(edges[i - 1]);
        const std::string bin_hi = i == counts.size() - 1 ? "inf" : format_double(edges[i]);
        csv += bin_lo + "," + bin_hi + "," + std::to_string(counts[i]) + "\n";
    }
    if (!args.out_dir.empty())
        write_text(std::filesystem::path(args.out_dir) / ("hist_" + group + ".csv"), csv);
    else
        std::fputs(csv.c_str(), stdout);
    return 0;
}

int cmd_datagen(const CommonArgs& args) {
    KeyValueConfig kv = load_kv(args);
    const ExperimentConfig config = build_config(kv);
    if (config.data.kind == DataConfig::Kind::mnist)
        throw std::runtime_error("datagen supports the planar generators only");
    const ExperimentData ed = build_experiment_data(config);
    if (config.out_dir.empty()) {
        std::fputs(dataset_csv(ed.train).c_str(), stdout);
        return 0;
    }
    write_text(std::filesystem::path(config.out_dir) / "train.csv", dataset_csv(ed.train));
    write_text(std::filesystem::path(config.out_dir) / "test.csv", dataset_csv(ed.test));
    std::printf("wrote %zu train and %zu test points to %s\n", ed.train.size(), ed.test.size(),
                config.out_dir.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"single-hidden-layer network training with sampling-based integrators"};
    app.require_subcommand(1);

    CommonArgs train_args, rep_args, sweep_args, p1_args, p2_args, grid_args, datagen_args;

    CLI::App* train = app.add_subcommand("train", "run one seeded training experiment");
    add_common(train, train_args);

    CLI::App* rep = app.add_subcommand("replicate", "repeat a run over sequential seeds");
    add_common(rep, rep_args);
    int rep_runs = 0;
    rep->add_option("--runs", rep_runs, "number of replicates (default: n_replicates key)");

    CLI::App* sw = app.add_subcommand("sweep", "replicate over a grid of one config key");
    add_common(sw, sweep_args);
    std::string sweep_axis;
    std::vector<std::string> sweep_values;
    sw->add_option("--axis", sweep_axis, "config key to vary")->required();
    sw->add_option("--values", sweep_values, "axis values")->required()->delimiter(',');

    CLI::App* p1 = app.add_subcommand("probe-1d", "loss along the segment between two snapshots");
    add_common(p1, p1_args);
    std::string p1_theta0, p1_thetaf, p1_use = "test";
    int p1_points = 101;
    p1->add_option("--theta0", p1_theta0, "start snapshot")->required();
    p1->add_option("--thetaf", p1_thetaf, "end snapshot")->required();
    p1->add_option("--points", p1_points, "grid points (default 101)");
    p1->add_option("--use", p1_use, "train|test (default test)")
        ->check(CLI::IsMember({"train", "test"}));

    CLI::App* p2 = app.add_subcommand("probe-2d", "loss surface spanned by three snapshots");
    add_common(p2, p2_args);
    std::string p2_theta0, p2_f1, p2_f2, p2_use = "test";
    int p2_alpha = 41, p2_beta = 41;
    p2->add_option("--theta0", p2_theta0, "shared start snapshot")->required();
    p2->add_option("--thetaf1", p2_f1, "first end snapshot")->required();
    p2->add_option("--thetaf2", p2_f2, "second end snapshot")->required();
    p2->add_option("--alpha-points", p2_alpha, "grid points in alpha (default 41)");
    p2->add_option("--beta-points", p2_beta, "grid points in beta (default 41)");
    p2->add_option("--use", p2_use, "train|test (default test)")
        ->check(CLI::IsMember({"train", "test"}));

    CLI::App* grid = app.add_subcommand("classifier-grid",
                                        "class-1 probability grid from snapshots (averaged)");
    add_common(grid, grid_args);
    std::vector<std::string> grid_snapshots;
    GridBounds bounds;
    int grid_res = 256;
    std::string grid_pgm;
    grid->add_option("--snapshot", grid_snapshots, "parameter snapshot (repeatable)")
        ->required()
        ->take_all();
    grid->add_option("--xmin", bounds.x_min, "grid x minimum (default -3)");
    grid->add_option("--xmax", bounds.x_max, "grid x maximum (default 3)");
    grid->add_option("--ymin", bounds.y_min, "grid y minimum (default -3)");
    grid->add_option("--ymax", bounds.y_max, "grid y maximum (default 3)");
    grid->add_option("--resolution", grid_res, "cells per side (default 256)");
    grid->add_option("--pgm", grid_pgm, "also write an 8-bit PGM image here");

    CLI::App* dg = app.add_subcommand("datagen", "emit the configured dataset as CSV");
    add_common(dg, datagen_args);

    CLI::App* wh = app.add_subcommand("weight-hist", "histogram one parameter group of a snapshot");
    CommonArgs wh_args;
    add_common(wh, wh_args);
    std::string wh_snapshot, wh_group = "w1";
    double wh_min = -2.0, wh_max = 2.0;
    int wh_bins = 80;
    wh->add_option("--snapshot", wh_snapshot, "parameter snapshot")->required();
    wh->add_option("--group", wh_group, "w1|b1|w2|b2 (default w1)")
        ->check(CLI::IsMember({"w1", "b1", "w2", "b2"}));
    wh->add_option("--min", wh_min, "lowest bin edge (default -2)");
    wh->add_option("--max", wh_max, "highest bin edge (default 2)");
    wh->add_option("--bins", wh_bins, "interior bin count (default 80)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed()) return cmd_train(train_args);
        if (rep->parsed()) return cmd_replicate(rep_args, rep_runs);
        if (sw->parsed()) return cmd_sweep(sweep_args, sweep_axis, sweep_values);
        if (p1->parsed()) return cmd_probe_1d(p1_args, p1_theta0, p1_thetaf, p1_points, p1_use);
        if (p2->parsed()) return cmd_probe_2d(p2_args, p2_theta0, p2_f1, p2_f2, p2_alpha, p2_beta, p2_use);
        if (grid->parsed())
            return cmd_classifier_grid(grid_args, grid_snapshots, bounds, grid_res, grid_pgm);
        if (dg->parsed()) return cmd_datagen(datagen_args);
        if (wh->parsed()) return cmd_weight_hist(wh_args, wh_snapshot, wh_group, wh_min, wh_max, wh_bins);
    } catch (const std::exception& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 1;
    }
    return 0;
}
