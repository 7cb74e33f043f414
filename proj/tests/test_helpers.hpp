#pragma once

// Shared oracles for the unit and acceptance suites. Everything here is kept
// independent of the library's gradient/integrator code paths it checks.

#include <cmath>
#include <cstddef>
#include <vector>

#include "thermonet/dataset.hpp"
#include "thermonet/network.hpp"
#include "thermonet/rng.hpp"

namespace testutil {

/// Central finite differences of the batch loss, step eps per coordinate.
inline std::vector<double> fd_loss_gradient(const thermonet::NetworkSpec& spec,
                                            const std::vector<double>& params,
                                            const thermonet::Dataset& data,
                                            const std::vector<std::size_t>& indices, double eps) {
    std::vector<double> g(params.size());
    std::vector<double> probe = params;
    for (std::size_t i = 0; i < params.size(); ++i) {
        probe[i] = params[i] + eps;
        const double up = thermonet::loss(spec, probe, data, indices);
        probe[i] = params[i] - eps;
        const double down = thermonet::loss(spec, probe, data, indices);
        probe[i] = params[i];
        g[i] = (up - down) / (2.0 * eps);
    }
    return g;
}

/// Smallest |pre-activation| over the hidden layer and all rows; configs are
/// "smooth" when this stays away from the ReLU kink.
inline double min_abs_preactivation(const thermonet::NetworkSpec& spec,
                                    const std::vector<double>& params,
                                    const thermonet::Dataset& data) {
    double lo = 1e300;
    for (std::size_t r = 0; r < data.size(); ++r) {
        const double* x = data.row(r);
        for (int j = 0; j < spec.hidden_dim; ++j) {
            double u = params[spec.b1_offset() + j];
            for (int i = 0; i < spec.input_dim; ++i)
                u += params[spec.w1_offset() + j * spec.input_dim + i] * x[i];
            lo = std::min(lo, std::abs(u));
        }
    }
    return lo;
}

struct SmoothConfig {
    thermonet::NetworkSpec spec;
    std::vector<double> params;
    thermonet::Dataset data;
    std::vector<std::size_t> indices;
};

/// Random network, parameters, and miniature dataset resampled until every
/// hidden pre-activation is at least `margin` from zero.
inline SmoothConfig make_smooth_config(thermonet::RngStream& stream, bool softmax, double margin = 1e-3) {
    for (;;) {
        SmoothConfig sc;
        sc.spec.input_dim = 2 + static_cast<int>(stream.next_below(3));
        sc.spec.hidden_dim = 2 + static_cast<int>(stream.next_below(5));
        sc.spec.output_dim = softmax ? 3 : 1;
        sc.data.n_features = sc.spec.input_dim;
        sc.data.n_classes = softmax ? 3 : 2;
        const int rows = 3;
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < sc.spec.input_dim; ++c) sc.data.inputs.push_back(stream.next_normal());
            sc.data.labels.push_back(static_cast<int>(stream.next_below(sc.data.n_classes)));
        }
        sc.params.resize(sc.spec.param_count());
        for (double& p : sc.params) p = stream.next_normal();
        for (int r = 0; r < rows; ++r) sc.indices.push_back(r);
        if (min_abs_preactivation(sc.spec, sc.params, sc.data) >= margin) return sc;
    }
}

/// Max relative error between analytic (negative) gradient and the finite
/// difference oracle.
inline double gradient_relative_error(const SmoothConfig& sc, double fd_eps = 1e-5) {
    const std::vector<double> neg = thermonet::grad(sc.spec, sc.params, sc.data, sc.indices);
    const std::vector<double> fd = fd_loss_gradient(sc.spec, sc.params, sc.data, sc.indices, fd_eps);
    double worst = 0.0;
    for (std::size_t i = 0; i < neg.size(); ++i) {
        const double analytic = -neg[i];
        const double denom = std::max(1.0, std::abs(fd[i]));
        worst = std::max(worst, std::abs(analytic - fd[i]) / denom);
    }
    return worst;
}

} // namespace testutil
