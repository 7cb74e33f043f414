#include "thermonet/analysis.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace thermonet {

namespace {

std::vector<double> uniform_grid(int n_points) {
    std::vector<double> grid(n_points);
    for (int i = 0; i < n_points; ++i)
        grid[i] = static_cast<double>(i) / static_cast<double>(n_points - 1);
    grid.front() = 0.0;
    grid.back() = 1.0;
    return grid;
}

} // namespace

std::uint64_t hash_params(const std::vector<double>& params) {
    // FNV-1a over the raw bytes.
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (const double value : params) {
        unsigned char bytes[sizeof(double)];
        std::memcpy(bytes, &value, sizeof(double));
        for (const unsigned char b : bytes) {
            h ^= b;
            h *= 0x100000001B3ULL;
        }
    }
    return h;
}

LossCurve interpolate_1d(const std::vector<double>& theta0, const std::vector<double>& thetaf,
                         const LossFn& loss_fn, int n_points) {
    if (theta0.size() != thetaf.size())
        throw std::invalid_argument("interpolate_1d: endpoint shape mismatch");
    if (n_points < 2) throw std::invalid_argument("interpolate_1d: need at least 2 points");

    LossCurve curve;
    curve.alphas = uniform_grid(n_points);
    curve.losses.resize(n_points);
    curve.theta0_hash = hash_params(theta0);
    curve.thetaf_hash = hash_params(thetaf);

    std::vector<double> theta(theta0.size());
    for (int k = 0; k < n_points; ++k) {
        const double alpha = curve.alphas[k];
        for (std::size_t i = 0; i < theta.size(); ++i)
            theta[i] = (1.0 - alpha) * theta0[i] + alpha * thetaf[i];
        curve.losses[k] = loss_fn(theta);
    }
    return curve;
}

double barrier(const LossCurve& curve) {
    double peak = curve.losses.front();
    for (const double l : curve.losses) peak = std::max(peak, l);
    return peak - std::max(curve.losses.front(), curve.losses.back());
}

LossSurface surface_2d(const std::vector<double>& theta0, const std::vector<double>& thetaf1,
                       const std::vector<double>& thetaf2, const LossFn& loss_fn, int n_alpha,
                       int n_beta) {
    if (theta0.size() != thetaf1.size() || theta0.size() != thetaf2.size())
        throw std::invalid_argument("surface_2d: endpoint shape mismatch");
    if (n_alpha < 2 || n_beta < 2) throw std::invalid_argument("surface_2d: need >= 2 grid points");

    LossSurface surface;
    surface.alphas = uniform_grid(n_alpha);
    surface.betas = uniform_grid(n_beta);
    surface.losses.resize(static_cast<std::size_t>(n_alpha) * n_beta);

    std::vector<double> theta(theta0.size());
    for (int ia = 0; ia < n_alpha; ++ia) {
        const double alpha = surface.alphas[ia];
        for (int ib = 0; ib < n_beta; ++ib) {
            const double beta = surface.betas[ib];
            // grouped so alpha = 0 gives exactly theta0 and the alpha = 1
            // corners give exactly thetaf1 / thetaf2
            for (std::size_t i = 0; i < theta.size(); ++i)
                theta[i] =
                    (1.0 - alpha) * theta0[i] + alpha * (beta * thetaf1[i] + (1.0 - beta) * thetaf2[i]);
            surface.losses[static_cast<std::size_t>(ia) * n_beta + ib] = loss_fn(theta);
        }
    }
    return surface;
}

std::vector<double> classifier_grid(const NetworkSpec& spec, const std::vector<double>& params,
                                    const GridBounds& bounds, int resolution) {
    if (spec.input_dim != 2)
        throw std::invalid_argument("classifier_grid: planar models only");
    if (resolution < 1) throw std::invalid_argument("classifier_grid: resolution must be >= 1");
    if (!(bounds.x_max > bounds.x_min) || !(bounds.y_max > bounds.y_min))
        throw std::invalid_argument("classifier_grid: degenerate bounds");

    const double dx = (bounds.x_max - bounds.x_min) / resolution;
    const double dy = (bounds.y_max - bounds.y_min) / resolution;
    std::vector<double> grid(static_cast<std::size_t>(resolution) * resolution);
    for (int iy = 0; iy < resolution; ++iy) {
        const double y = bounds.y_min + (iy + 0.5) * dy;
        for (int ix = 0; ix < resolution; ++ix) {
            const double x[2] = {bounds.x_min + (ix + 0.5) * dx, y};
            const Prediction pred = forward(spec, params, x);
            const double p1 = spec.softmax_output() ? pred.probs[1] : pred.probs[0];
            grid[static_cast<std::size_t>(iy) * resolution + ix] = p1;
        }
    }
    return grid;
}

std::array<double, 2> kinetic_temperature(const DynamicsState& state, Partition partition) {
    if (state.momentum.size() != static_cast<std::size_t>(partition.total))
        throw std::invalid_argument("kinetic_temperature: partition sizes must sum to q");
    std::array<double, 2> ktemp{0.0, 0.0};
    const std::size_t n1 = static_cast<std::size_t>(partition.first);
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < n1; ++i) s1 += state.momentum[i] * state.momentum[i];
    for (std::size_t i = n1; i < state.momentum.size(); ++i) s2 += state.momentum[i] * state.momentum[i];
    if (partition.first > 0) ktemp[0] = s1 / partition.first;
    if (partition.second() > 0) ktemp[1] = s2 / partition.second();
    return ktemp;
}

double mean_component_variance(const std::function<void(std::vector<double>&)>& sampler, int dim,
                               int n_samples) {
    if (n_samples < 2) throw std::invalid_argument("need at least 2 samples");
    std::vector<double> mean(dim, 0.0), m2(dim, 0.0), sample;
    for (int s = 0; s < n_samples; ++s) {
        sampler(sample);
        if (sample.size() != static_cast<std::size_t>(dim))
            throw std::invalid_argument("sampler dimension mismatch");
        // Welford update per component.
        for (int i = 0; i < dim; ++i) {
            const double delta = sample[i] - mean[i];
            mean[i] += delta / static_cast<double>(s + 1);
            m2[i] += delta * (sample[i] - mean[i]);
        }
    }
    double total = 0.0;
    for (int i = 0; i < dim; ++i) total += m2[i] / static_cast<double>(n_samples - 1);
    return total / static_cast<double>(dim);
}

NoiseEstimate estimate_gradient_noise(const NetworkSpec& spec, const std::vector<double>& params,
                                      const Dataset& data, double fraction, int n_samples,
                                      RngStream& stream) {
    if (fraction == 1.0) return {0.0, true};
    auto sampler = [&](std::vector<double>& out) {
        const Minibatch batch = sample_minibatch(data, fraction, stream);
        grad(spec, params, data, batch.indices, out);
    };
    return {mean_component_variance(sampler, spec.param_count(), n_samples), false};
}

double effective_temperature(double h, double sigma_g2, double gamma, double tau) {
    if (!(gamma > 0.0))
        throw std::invalid_argument("effective_temperature: gamma must be > 0");
    return h * sigma_g2 / (2.0 * gamma) + tau;
}

std::vector<std::int64_t> weight_histogram(const NetworkSpec& spec, const std::vector<double>& params,
                                           ParamGroup group, std::span<const double> bin_edges) {
    if (bin_edges.size() < 2) throw std::invalid_argument("weight_histogram: need >= 2 bin edges");
    for (std::size_t i = 1; i < bin_edges.size(); ++i)
        if (!(bin_edges[i] > bin_edges[i - 1]))
            throw std::invalid_argument("weight_histogram: edges must be strictly increasing");

    int offset = 0, count = 0;
    switch (group) {
    case ParamGroup::w1: offset = spec.w1_offset(); count = spec.hidden_dim * spec.input_dim; break;
    case ParamGroup::b1: offset = spec.b1_offset(); count = spec.hidden_dim; break;
    case ParamGroup::w2: offset = spec.w2_offset(); count = spec.output_dim * spec.hidden_dim; break;
    case ParamGroup::b2: offset = spec.b2_offset(); count = spec.output_dim; break;
    }
    if (params.size() != static_cast<std::size_t>(spec.param_count()))
        throw std::invalid_argument("weight_histogram: wrong parameter count");

    std::vector<std::int64_t> counts(bin_edges.size() + 1, 0);
    for (int i = 0; i < count; ++i) {
        const double v = params[offset + i];
        if (v < bin_edges.front()) {
            ++counts.front();
            continue;
        }
        if (v >= bin_edges.back()) {
            ++counts.back();
            continue;
        }
        std::size_t lo = 0, hi = bin_edges.size() - 1;
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            if (v >= bin_edges[mid]) lo = mid;
            else hi = mid;
        }
        ++counts[lo + 1];
    }
    return counts;
}

} // namespace thermonet
