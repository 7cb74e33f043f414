#include "thermonet/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace thermonet {

namespace {

void shuffle_rows(Dataset& data, RngStream& stream) {
    const std::size_t n = data.size();
    const std::size_t m = static_cast<std::size_t>(data.n_features);
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = stream.next_below(i);
        const std::size_t k = i - 1;
        if (j == k) continue;
        std::swap(data.labels[j], data.labels[k]);
        for (std::size_t c = 0; c < m; ++c)
            std::swap(data.inputs[j * m + c], data.inputs[k * m + c]);
    }
}

Dataset make_planar(int n_per_class, std::string name) {
    if (n_per_class <= 0)
        throw std::invalid_argument("n_per_class must be positive");
    Dataset data;
    data.n_features = 2;
    data.n_classes = 2;
    data.name = std::move(name);
    data.inputs.reserve(static_cast<std::size_t>(n_per_class) * 4);
    data.labels.reserve(static_cast<std::size_t>(n_per_class) * 2);
    return data;
}

std::uint32_t read_be32(std::istream& in, const std::string& path) {
    unsigned char buf[4];
    if (!in.read(reinterpret_cast<char*>(buf), 4))
        throw std::runtime_error("truncated IDX file: " + path);
    return (std::uint32_t(buf[0]) << 24) | (std::uint32_t(buf[1]) << 16) |
           (std::uint32_t(buf[2]) << 8) | std::uint32_t(buf[3]);
}

} // namespace

std::array<double, 2> spiral_point(const SpiralSpec& spec, double t, int label) {
    const double r = spec.a * std::pow(t, spec.p);
    const double arg = 2.0 * spec.b * std::pow(t, spec.p) * std::numbers::pi +
                       (label == 0 ? 0.0 : std::numbers::pi);
    return {r * std::cos(arg), r * std::sin(arg)};
}

std::array<double, 2> trig_point(const TrigSpec& spec, double t, int label) {
    const double arg = spec.b * t * std::numbers::pi;
    return {spec.a * t, label == 0 ? std::cos(arg) : std::sin(arg)};
}

Dataset generate_spiral(const SpiralSpec& spec, RngStream& stream) {
    Dataset data = make_planar(spec.n_per_class, "spiral");
    for (int label = 0; label < 2; ++label) {
        for (int i = 0; i < spec.n_per_class; ++i) {
            const double t = stream.next_uniform();
            const auto pt = spiral_point(spec, t, label);
            const double r1 = stream.next_normal();
            const double r2 = stream.next_normal();
            data.inputs.push_back(pt[0] + spec.c * r1);
            data.inputs.push_back(pt[1] + spec.c * r2);
            data.labels.push_back(label);
        }
    }
    shuffle_rows(data, stream);
    return data;
}

Dataset generate_trig(const TrigSpec& spec, RngStream& stream) {
    Dataset data = make_planar(spec.n_per_class, "trig");
    for (int label = 0; label < 2; ++label) {
        for (int i = 0; i < spec.n_per_class; ++i) {
            const double t = stream.next_uniform();
            const auto pt = trig_point(spec, t, label);
            const double r = stream.next_normal();
            data.inputs.push_back(pt[0]);
            data.inputs.push_back(pt[1] + spec.c * r);
            data.labels.push_back(label);
        }
    }
    shuffle_rows(data, stream);
    return data;
}

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
    std::ifstream images(images_path, std::ios::binary);
    if (!images) throw std::runtime_error("cannot open IDX image file: " + images_path);
    std::ifstream labels(labels_path, std::ios::binary);
    if (!labels) throw std::runtime_error("cannot open IDX label file: " + labels_path);

    if (read_be32(images, images_path) != 0x00000803u)
        throw std::runtime_error("bad IDX image magic in " + images_path);
    const std::uint32_t n_images = read_be32(images, images_path);
    const std::uint32_t rows = read_be32(images, images_path);
    const std::uint32_t cols = read_be32(images, images_path);

    if (read_be32(labels, labels_path) != 0x00000801u)
        throw std::runtime_error("bad IDX label magic in " + labels_path);
    const std::uint32_t n_labels = read_be32(labels, labels_path);
    if (n_images != n_labels)
        throw std::runtime_error("IDX image/label count mismatch: " + std::to_string(n_images) +
                                 " images vs " + std::to_string(n_labels) + " labels");

    const std::size_t pixels = static_cast<std::size_t>(rows) * cols;
    Dataset data;
    data.n_features = static_cast<int>(pixels);
    data.n_classes = 10;
    data.name = "idx";
    data.inputs.resize(static_cast<std::size_t>(n_images) * pixels);
    data.labels.resize(n_images);

    std::vector<unsigned char> buf(pixels);
    for (std::uint32_t i = 0; i < n_images; ++i) {
        if (!images.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(pixels)))
            throw std::runtime_error("truncated IDX file: " + images_path);
        for (std::size_t j = 0; j < pixels; ++j)
            data.inputs[i * pixels + j] = buf[j] / 255.0;
        char label = 0;
        if (!labels.read(&label, 1))
            throw std::runtime_error("truncated IDX file: " + labels_path);
        data.labels[i] = static_cast<unsigned char>(label);
        if (data.labels[i] >= data.n_classes)
            throw std::runtime_error("IDX label out of range in " + labels_path);
    }
    return data;
}

Minibatch sample_minibatch(const Dataset& data, double fraction, RngStream& stream) {
    if (!(fraction > 0.0) || fraction > 1.0)
        throw std::invalid_argument("minibatch fraction must be in (0,1]");
    const std::size_t n = data.size();
    if (n == 0) throw std::invalid_argument("cannot sample from an empty dataset");

    Minibatch batch;
    batch.fraction = fraction;
    if (fraction == 1.0) {
        batch.indices.resize(n);
        std::iota(batch.indices.begin(), batch.indices.end(), std::size_t{0});
        return batch;
    }

    const auto k = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n))));
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    // Partial Fisher-Yates: the first k slots end up uniform without replacement.
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + stream.next_below(n - i);
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    batch.indices = std::move(pool);
    return batch;
}

} // namespace thermonet
