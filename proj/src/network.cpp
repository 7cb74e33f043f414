#include "thermonet/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace thermonet {

namespace {

constexpr double kProbClamp = 1e-12;

double sigmoid(double u) {
    if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
    const double e = std::exp(u);
    return e / (1.0 + e);
}

double clamp_prob(double p) {
    return std::min(1.0 - kProbClamp, std::max(kProbClamp, p));
}

// Hidden activations into z; z[j] > 0 doubles as the ReLU derivative mask.
void hidden_layer(const NetworkSpec& spec, const std::vector<double>& params, const double* x,
                  std::vector<double>& z) {
    const int m = spec.input_dim, d = spec.hidden_dim;
    const double* w1 = params.data() + spec.w1_offset();
    const double* b1 = params.data() + spec.b1_offset();
    z.resize(d);
    for (int j = 0; j < d; ++j) {
        double u = b1[j];
        const double* row = w1 + static_cast<std::size_t>(j) * m;
        for (int i = 0; i < m; ++i) u += row[i] * x[i];
        z[j] = u > 0.0 ? u : 0.0;
    }
}

void output_layer(const NetworkSpec& spec, const std::vector<double>& params,
                  const std::vector<double>& z, std::vector<double>& probs) {
    const int d = spec.hidden_dim, n = spec.output_dim;
    const double* w2 = params.data() + spec.w2_offset();
    const double* b2 = params.data() + spec.b2_offset();
    probs.resize(n);
    for (int k = 0; k < n; ++k) {
        double u = b2[k];
        const double* row = w2 + static_cast<std::size_t>(k) * d;
        for (int j = 0; j < d; ++j) u += row[j] * z[j];
        probs[k] = u;
    }
    if (!spec.softmax_output()) {
        probs[0] = sigmoid(probs[0]);
        return;
    }
    const double umax = *std::max_element(probs.begin(), probs.end());
    double sum = 0.0;
    for (double& p : probs) {
        p = std::exp(p - umax);
        sum += p;
    }
    for (double& p : probs) p /= sum;
}

double sample_loss(const NetworkSpec& spec, const std::vector<double>& probs, int label) {
    if (spec.softmax_output()) return -std::log(clamp_prob(probs[label]));
    const double yhat = clamp_prob(probs[0]);
    return label == 1 ? -std::log(yhat) : -std::log(1.0 - yhat);
}

double weight_penalty(const NetworkSpec& spec, const std::vector<double>& params) {
    if (spec.l2 == 0.0) return 0.0;
    double s = 0.0;
    const double* w1 = params.data() + spec.w1_offset();
    for (int i = 0; i < spec.hidden_dim * spec.input_dim; ++i) s += w1[i] * w1[i];
    const double* w2 = params.data() + spec.w2_offset();
    for (int i = 0; i < spec.output_dim * spec.hidden_dim; ++i) s += w2[i] * w2[i];
    return 0.5 * spec.l2 * s;
}

} // namespace

void NetworkSpec::validate() const {
    if (input_dim < 1 || hidden_dim < 1 || output_dim < 1)
        throw std::invalid_argument("network dimensions must be >= 1");
    if (l2 < 0.0) throw std::invalid_argument("l2 penalty must be >= 0");
}

std::vector<double> init_params(const NetworkSpec& spec, const InitScheme& scheme, RngStream& stream) {
    spec.validate();
    std::vector<double> params(spec.param_count(), 0.0);
    switch (scheme.kind) {
    case InitScheme::Kind::zeros:
        break;
    case InitScheme::Kind::gaussian: {
        if (scheme.sigma < 0.0) throw std::invalid_argument("init sigma must be >= 0");
        for (double& p : params) p = scheme.sigma * stream.next_normal();
        break;
    }
    case InitScheme::Kind::fan_in_uniform: {
        const double a1 = 1.0 / std::sqrt(static_cast<double>(spec.input_dim));
        const double a2 = 1.0 / std::sqrt(static_cast<double>(spec.hidden_dim));
        for (int i = 0; i < spec.layer1_size(); ++i)
            params[i] = a1 * (2.0 * stream.next_uniform() - 1.0);
        for (int i = spec.layer1_size(); i < spec.param_count(); ++i)
            params[i] = a2 * (2.0 * stream.next_uniform() - 1.0);
        break;
    }
    }
    return params;
}

Prediction forward(const NetworkSpec& spec, const std::vector<double>& params, const double* x) {
    Prediction pred;
    std::vector<double> z;
    hidden_layer(spec, params, x, z);
    output_layer(spec, params, z, pred.probs);
    return pred;
}

double loss(const NetworkSpec& spec, const std::vector<double>& params, const Dataset& data,
            std::span<const std::size_t> indices) {
    if (indices.empty()) throw std::invalid_argument("loss: empty index set");
    std::vector<double> z, probs;
    double total = 0.0;
    for (const std::size_t i : indices) {
        hidden_layer(spec, params, data.row(i), z);
        output_layer(spec, params, z, probs);
        total += sample_loss(spec, probs, data.labels[i]);
    }
    return total / static_cast<double>(indices.size()) + weight_penalty(spec, params);
}

double loss(const NetworkSpec& spec, const std::vector<double>& params, const Dataset& data) {
    std::vector<std::size_t> all(data.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return loss(spec, params, data, all);
}

void grad(const NetworkSpec& spec, const std::vector<double>& params, const Dataset& data,
          std::span<const std::size_t> indices, std::vector<double>& out) {
    if (indices.empty()) throw std::invalid_argument("grad: empty index set");
    const int m = spec.input_dim, d = spec.hidden_dim, n = spec.output_dim;
    out.assign(spec.param_count(), 0.0);

    double* gw1 = out.data() + spec.w1_offset();
    double* gb1 = out.data() + spec.b1_offset();
    double* gw2 = out.data() + spec.w2_offset();
    double* gb2 = out.data() + spec.b2_offset();
    const double* w2 = params.data() + spec.w2_offset();

    std::vector<double> z, probs, delta(n), e(d);
    for (const std::size_t idx : indices) {
        const double* x = data.row(idx);
        const int y = data.labels[idx];
        hidden_layer(spec, params, x, z);
        output_layer(spec, params, z, probs);

        // Output-layer error uses the unclamped yhat - y form, which is finite.
        if (spec.softmax_output()) {
            for (int k = 0; k < n; ++k) delta[k] = probs[k] - (k == y ? 1.0 : 0.0);
        } else {
            delta[0] = probs[0] - static_cast<double>(y);
        }

        for (int k = 0; k < n; ++k) {
            const double dk = delta[k];
            double* row = gw2 + static_cast<std::size_t>(k) * d;
            for (int j = 0; j < d; ++j) row[j] += dk * z[j];
            gb2[k] += dk;
        }
        for (int j = 0; j < d; ++j) {
            if (z[j] <= 0.0) { // ReLU derivative is 0 at and below the kink
                e[j] = 0.0;
                continue;
            }
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += delta[k] * w2[static_cast<std::size_t>(k) * d + j];
            e[j] = s;
        }
        for (int j = 0; j < d; ++j) {
            const double ej = e[j];
            if (ej == 0.0) continue;
            double* row = gw1 + static_cast<std::size_t>(j) * m;
            for (int i = 0; i < m; ++i) row[i] += ej * x[i];
            gb1[j] += ej;
        }
    }

    const double inv = 1.0 / static_cast<double>(indices.size());
    for (double& g : out) g *= inv;
    if (spec.l2 != 0.0) {
        const double* w1 = params.data() + spec.w1_offset();
        for (int i = 0; i < d * m; ++i) gw1[i] += spec.l2 * w1[i];
        for (int i = 0; i < n * d; ++i) gw2[i] += spec.l2 * w2[i];
    }
    for (double& g : out) g = -g;
}

std::vector<double> grad(const NetworkSpec& spec, const std::vector<double>& params, const Dataset& data,
                         std::span<const std::size_t> indices) {
    std::vector<double> out;
    grad(spec, params, data, indices, out);
    return out;
}

double accuracy(const NetworkSpec& spec, const std::vector<double>& params, const Dataset& data) {
    if (data.size() == 0) throw std::invalid_argument("accuracy: empty dataset");
    std::vector<double> z, probs;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        hidden_layer(spec, params, data.row(i), z);
        output_layer(spec, params, z, probs);
        int predicted = 0;
        if (spec.softmax_output()) {
            predicted = static_cast<int>(std::max_element(probs.begin(), probs.end()) - probs.begin());
        } else {
            predicted = probs[0] > 0.5 ? 1 : 0;
        }
        if (predicted == data.labels[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(data.size());
}

Prediction posterior_mean_predict(const NetworkSpec& spec,
                                  const std::vector<std::vector<double>>& checkpoints, const double* x) {
    if (checkpoints.empty())
        throw std::invalid_argument("posterior_mean_predict: no checkpoints");
    Prediction mean;
    mean.probs.assign(spec.output_dim, 0.0);
    std::vector<double> z, probs;
    for (const auto& params : checkpoints) {
        hidden_layer(spec, params, x, z);
        output_layer(spec, params, z, probs);
        for (int k = 0; k < spec.output_dim; ++k) mean.probs[k] += probs[k];
    }
    const double inv = 1.0 / static_cast<double>(checkpoints.size());
    for (double& p : mean.probs) p *= inv;
    return mean;
}

StructuredParams unflatten(const NetworkSpec& spec, const std::vector<double>& params) {
    if (params.size() != static_cast<std::size_t>(spec.param_count()))
        throw std::invalid_argument("unflatten: wrong parameter count");
    StructuredParams sp;
    auto copy = [&](int off, int count) {
        return std::vector<double>(params.begin() + off, params.begin() + off + count);
    };
    sp.w1 = copy(spec.w1_offset(), spec.hidden_dim * spec.input_dim);
    sp.b1 = copy(spec.b1_offset(), spec.hidden_dim);
    sp.w2 = copy(spec.w2_offset(), spec.output_dim * spec.hidden_dim);
    sp.b2 = copy(spec.b2_offset(), spec.output_dim);
    return sp;
}

std::vector<double> flatten(const NetworkSpec& spec, const StructuredParams& sp) {
    std::vector<double> params;
    params.reserve(spec.param_count());
    params.insert(params.end(), sp.w1.begin(), sp.w1.end());
    params.insert(params.end(), sp.b1.begin(), sp.b1.end());
    params.insert(params.end(), sp.w2.begin(), sp.w2.end());
    params.insert(params.end(), sp.b2.begin(), sp.b2.end());
    if (params.size() != static_cast<std::size_t>(spec.param_count()))
        throw std::invalid_argument("flatten: wrong parameter count");
    return params;
}

void save_params(const std::string& path, const NetworkSpec& spec, const std::vector<double>& params) {
    if (params.size() != static_cast<std::size_t>(spec.param_count()))
        throw std::invalid_argument("save_params: wrong parameter count");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open snapshot for writing: " + path);
    auto put_u32 = [&](std::uint32_t v) {
        unsigned char buf[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                                static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
        out.write(reinterpret_cast<const char*>(buf), 4);
    };
    put_u32(static_cast<std::uint32_t>(spec.input_dim));
    put_u32(static_cast<std::uint32_t>(spec.hidden_dim));
    put_u32(static_cast<std::uint32_t>(spec.output_dim));
    static_assert(sizeof(double) == 8);
    out.write(reinterpret_cast<const char*>(params.data()),
              static_cast<std::streamsize>(params.size() * sizeof(double)));
    if (!out) throw std::runtime_error("failed writing snapshot: " + path);
}

std::pair<NetworkSpec, std::vector<double>> load_params(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open snapshot: " + path);
    auto get_u32 = [&]() {
        unsigned char buf[4];
        if (!in.read(reinterpret_cast<char*>(buf), 4))
            throw std::runtime_error("truncated snapshot: " + path);
        return std::uint32_t(buf[0]) | (std::uint32_t(buf[1]) << 8) | (std::uint32_t(buf[2]) << 16) |
               (std::uint32_t(buf[3]) << 24);
    };
    NetworkSpec spec;
    spec.input_dim = static_cast<int>(get_u32());
    spec.hidden_dim = static_cast<int>(get_u32());
    spec.output_dim = static_cast<int>(get_u32());
    spec.validate();
    std::vector<double> params(spec.param_count());
    if (!in.read(reinterpret_cast<char*>(params.data()),
                 static_cast<std::streamsize>(params.size() * sizeof(double))))
        throw std::runtime_error("truncated snapshot: " + path);
    return {spec, std::move(params)};
}

} // namespace thermonet
