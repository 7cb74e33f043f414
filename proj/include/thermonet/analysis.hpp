#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "thermonet/dataset.hpp"
#include "thermonet/integrators.hpp"
#include "thermonet/network.hpp"

namespace thermonet {

using LossFn = std::function<double(const std::vector<double>&)>;

/// Loss along the segment theta(alpha) = (1-alpha) theta0 + alpha thetaf on
/// a uniform grid including both endpoints. Endpoint snapshots are recorded
/// by content hash.
struct LossCurve {
    std::vector<double> alphas;
    std::vector<double> losses;
    std::uint64_t theta0_hash = 0;
    std::uint64_t thetaf_hash = 0;
};

LossCurve interpolate_1d(const std::vector<double>& theta0, const std::vector<double>& thetaf,
                         const LossFn& loss_fn, int n_points);

/// Excess of the curve maximum over the larger endpoint loss.
double barrier(const LossCurve& curve);

/// Loss over the bilinear family theta(alpha, beta) = beta F1(alpha) +
/// (1-beta) F2(alpha) with F_i(alpha) = alpha (theta_fi - theta0) + theta0.
/// losses is row-major over (alpha, beta).
struct LossSurface {
    std::vector<double> alphas;
    std::vector<double> betas;
    std::vector<double> losses;

    double at(std::size_t ia, std::size_t ib) const { return losses[ia * betas.size() + ib]; }
};

LossSurface surface_2d(const std::vector<double>& theta0, const std::vector<double>& thetaf1,
                       const std::vector<double>& thetaf2, const LossFn& loss_fn, int n_alpha,
                       int n_beta);

struct GridBounds {
    double x_min = -3.0, x_max = 3.0, y_min = -3.0, y_max = 3.0;
};

/// Class-1 probability evaluated at the centers of a resolution x resolution
/// grid of cells over the bounds. Row-major with x fastest; row iy
/// corresponds to y = y_min + (iy + 0.5) dy. Planar models only (m == 2).
std::vector<double> classifier_grid(const NetworkSpec& spec, const std::vector<double>& params,
                                    const GridBounds& bounds, int resolution);

/// Per-partition kinetic temperature ||p_i||^2 / N_i (0 for an empty block).
std::array<double, 2> kinetic_temperature(const DynamicsState& state, Partition partition);

struct NoiseEstimate {
    double sigma2 = 0.0;
    bool full_batch = false; // fraction == 1: the estimate is identically zero
};

/// Mean over components of the per-component variance of n_samples
/// minibatch gradients drawn at fixed parameters.
NoiseEstimate estimate_gradient_noise(const NetworkSpec& spec, const std::vector<double>& params,
                                      const Dataset& data, double fraction, int n_samples,
                                      RngStream& stream);

/// Estimation core shared with the above: sampler fills a dim-length vector.
double mean_component_variance(const std::function<void(std::vector<double>&)>& sampler, int dim,
                               int n_samples);

/// tau_eff = h sigma_G^2 / (2 gamma) + tau. Throws for gamma <= 0.
double effective_temperature(double h, double sigma_g2, double gamma, double tau);

enum class ParamGroup { w1, b1, w2, b2 };

/// Histogram of one parameter group. counts has bin_edges.size() + 1
/// entries: [0] is the open bin below the first edge, [last] the open bin at
/// or above the last edge, and interior bin i counts values in
/// [edge_i, edge_{i+1}).
std::vector<std::int64_t> weight_histogram(const NetworkSpec& spec, const std::vector<double>& params,
                                           ParamGroup group, std::span<const double> bin_edges);

std::uint64_t hash_params(const std::vector<double>& params);

} // namespace thermonet
