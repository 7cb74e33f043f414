#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "thermonet/dataset.hpp"
#include "thermonet/partition.hpp"
#include "thermonet/rng.hpp"

namespace thermonet {

/// Single-hidden-layer perceptron: ReLU hidden layer, sigmoid output when
/// output_dim == 1 (binary) and softmax otherwise.
///
/// Parameters live in one flat vector of length param_count(), laid out as
///   W1 (hidden_dim x input_dim, row-major) | b1 | W2 (output_dim x
///   hidden_dim, row-major) | b2
/// so that the layer partition is a contiguous two-block split.
struct NetworkSpec {
    int input_dim = 2;   // m
    int hidden_dim = 20; // d
    int output_dim = 1;  // n
    double l2 = 0.0;     // optional (l2/2)*||weights||^2 penalty, weights only

    bool softmax_output() const { return output_dim > 1; }
    int layer1_size() const { return hidden_dim * input_dim + hidden_dim; }
    int layer2_size() const { return output_dim * hidden_dim + output_dim; }
    int param_count() const { return layer1_size() + layer2_size(); }
    Partition partition() const { return {layer1_size(), param_count()}; }

    int w1_offset() const { return 0; }
    int b1_offset() const { return hidden_dim * input_dim; }
    int w2_offset() const { return layer1_size(); }
    int b2_offset() const { return layer1_size() + output_dim * hidden_dim; }

    void validate() const; // throws std::invalid_argument
};

struct InitScheme {
    enum class Kind { zeros, gaussian, fan_in_uniform };
    Kind kind = Kind::gaussian;
    double sigma = 0.01; // gaussian only

    static InitScheme zeros() { return {Kind::zeros, 0.0}; }
    static InitScheme gaussian(double sigma) { return {Kind::gaussian, sigma}; }
    static InitScheme fan_in_uniform() { return {Kind::fan_in_uniform, 0.0}; }
};

/// Draw all parameters per the scheme, in flat layout order. fan_in_uniform
/// uses U(-1/sqrt(N_in), 1/sqrt(N_in)) per layer, applied to weights and
/// biases alike.
std::vector<double> init_params(const NetworkSpec& spec, const InitScheme& scheme, RngStream& stream);

struct Prediction {
    std::vector<double> probs; // length output_dim; sigmoid output has length 1
};

Prediction forward(const NetworkSpec& spec, const std::vector<double>& params, const double* x);

/// Mean cross entropy over the given rows. Predictions are clamped to
/// [1e-12, 1-1e-12] before the logarithms.
double loss(const NetworkSpec& spec, const std::vector<double>& params, const Dataset& data,
            std::span<const std::size_t> indices);
double loss(const NetworkSpec& spec, const std::vector<double>& params, const Dataset& data);

/// NEGATIVE gradient of the mean loss over the batch (steppers add h * G).
/// ReLU subgradient at 0 is taken as 0. `out` is resized to param_count().
void grad(const NetworkSpec& spec, const std::vector<double>& params, const Dataset& data,
          std::span<const std::size_t> indices, std::vector<double>& out);
std::vector<double> grad(const NetworkSpec& spec, const std::vector<double>& params, const Dataset& data,
                         std::span<const std::size_t> indices);

/// Fraction of correctly classified rows. Binary threshold is 0.5 with ties
/// assigned to class 0 (the all-zero network sits exactly on the tie).
double accuracy(const NetworkSpec& spec, const std::vector<double>& params, const Dataset& data);

/// Arithmetic mean of forward() outputs over parameter snapshots.
Prediction posterior_mean_predict(const NetworkSpec& spec,
                                  const std::vector<std::vector<double>>& checkpoints, const double* x);

/// Structured view used for round-trip checks and external tooling.
struct StructuredParams {
    std::vector<double> w1, b1, w2, b2;
};
StructuredParams unflatten(const NetworkSpec& spec, const std::vector<double>& params);
std::vector<double> flatten(const NetworkSpec& spec, const StructuredParams& sp);

/// Snapshot format: uint32 little-endian m, d, n followed by param_count()
/// float64 little-endian values in flat layout order.
void save_params(const std::string& path, const NetworkSpec& spec, const std::vector<double>& params);
std::pair<NetworkSpec, std::vector<double>> load_params(const std::string& path);

} // namespace thermonet
