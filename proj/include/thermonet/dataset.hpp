#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "thermonet/rng.hpp"

namespace thermonet {

/// Labeled classification data. Inputs are stored row-major; the dataset is
/// immutable after construction and safe to share across threads.
struct Dataset {
    std::vector<double> inputs; // n_rows * n_features
    std::vector<int> labels;    // values in [0, n_classes)
    int n_features = 0;
    int n_classes = 0;
    std::string name;

    std::size_t size() const { return labels.size(); }
    const double* row(std::size_t i) const { return inputs.data() + i * static_cast<std::size_t>(n_features); }
};

/// Two-arm spiral: class 0 follows
///   x1 = a t^p cos(2 b t^p pi) + c N(0,1)
///   x2 = a t^p sin(2 b t^p pi) + c N(0,1)
/// with t ~ U(0,1); class 1 shifts the trig argument by pi. b sets the
/// number of turns.
struct SpiralSpec {
    int n_per_class = 250;
    double a = 2.0;
    double b = 2.0;
    double c = 0.02;
    double p = 0.5;
};

/// Planar trigonometric curves: class 0 is (a t, cos(b t pi) + c N(0,1)),
/// class 1 uses sine instead of cosine. t ~ U(0,1).
struct TrigSpec {
    int n_per_class = 500;
    double a = 6.0;
    double b = 1.0;
    double c = 0.02;
};

/// Noiseless point of the given class at curve parameter t.
std::array<double, 2> spiral_point(const SpiralSpec& spec, double t, int label);
std::array<double, 2> trig_point(const TrigSpec& spec, double t, int label);

/// Generate 2*n_per_class labeled points (rows shuffled). Per point the
/// stream is consumed as t, then the coordinate noise variates, so datasets
/// generated with equal seeds and different c share their t values and
/// shuffle order. Throws std::invalid_argument on non-positive n_per_class.
Dataset generate_spiral(const SpiralSpec& spec, RngStream& stream);
Dataset generate_trig(const TrigSpec& spec, RngStream& stream);

/// Load an IDX image/label file pair (big-endian, magics 0x00000803 and
/// 0x00000801). Pixels are scaled to [0,1]; n_classes is fixed at 10.
/// Throws std::runtime_error on magic mismatch, count mismatch, or
/// truncation.
Dataset load_idx(const std::string& images_path, const std::string& labels_path);

struct Minibatch {
    std::vector<std::size_t> indices;
    double fraction = 1.0;
};

/// max(1, round(fraction*N)) distinct indices, uniform without replacement,
/// drawn fresh on every call. fraction == 1 returns 0..N-1 in order without
/// consuming the stream. Throws std::invalid_argument outside (0,1].
Minibatch sample_minibatch(const Dataset& data, double fraction, RngStream& stream);

} // namespace thermonet
