#include "thermonet/integrators.hpp"

#include <cmath>
#include <stdexcept>

namespace thermonet {

Method parse_method(const std::string& name) {
    if (name == "sgd") return Method::sgd;
    if (name == "sgd_mom1" || name == "sgd_momentum_1") return Method::sgd_mom1;
    if (name == "sgd_mom2" || name == "sgd_momentum_2") return Method::sgd_mom2;
    if (name == "adam") return Method::adam;
    if (name == "sgld") return Method::sgld;
    if (name == "baoab") return Method::baoab;
    if (name == "oba") return Method::oba;
    if (name == "adl") return Method::adl;
    if (name == "langevin_layers") return Method::langevin_layers;
    if (name == "lol") return Method::lol;
    if (name == "adlala") return Method::adlala;
    throw std::invalid_argument("unknown method: " + name);
}

std::string method_name(Method method) {
    switch (method) {
    case Method::sgd: return "sgd";
    case Method::sgd_mom1: return "sgd_mom1";
    case Method::sgd_mom2: return "sgd_mom2";
    case Method::adam: return "adam";
    case Method::sgld: return "sgld";
    case Method::baoab: return "baoab";
    case Method::oba: return "oba";
    case Method::adl: return "adl";
    case Method::langevin_layers: return "langevin_layers";
    case Method::lol: return "lol";
    case Method::adlala: return "adlala";
    }
    return "?";
}

void IntegratorConfig::validate() const {
    if (!(h > 0.0)) throw std::invalid_argument("stepsize h must be > 0");
    if (tau1 < 0.0 || tau2 < 0.0) throw std::invalid_argument("temperatures must be >= 0");
    if (!gamma1.infinite && gamma1.value < 0.0)
        throw std::invalid_argument("gamma1 must be >= 0");
    if (!gamma2.infinite && gamma2.value < 0.0)
        throw std::invalid_argument("gamma2 must be >= 0");
    if (sigma_a < 0.0) throw std::invalid_argument("sigma_a must be >= 0");
    if (sgld_sigma < 0.0) throw std::invalid_argument("sgld.sigma must be >= 0");
    if ((method == Method::adl || method == Method::adlala) && !(eps > 0.0))
        throw std::invalid_argument("thermostat coupling eps must be > 0");
    if (method == Method::adam) {
        if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0))
            throw std::invalid_argument("adam betas must lie in [0,1)");
        if (!(adam_eps > 0.0)) throw std::invalid_argument("adam.eps must be > 0");
    }
}

void ou_update(std::span<double> p, FrictionParam gamma, double tau, double h, RngStream& stream) {
    double decay = 0.0, noise = 0.0;
    if (gamma.infinite) {
        decay = 0.0;
        noise = std::sqrt(tau);
    } else {
        decay = std::exp(-gamma.value * h);
        noise = std::sqrt(tau * (1.0 - std::exp(-2.0 * gamma.value * h)));
    }
    if (noise == 0.0) {
        if (decay == 1.0) return;
        for (double& v : p) v *= decay;
        return;
    }
    for (double& v : p) v = decay * v + noise * stream.next_normal();
}

Stepper::Stepper(const IntegratorConfig& config, Partition partition)
    : config_(config), partition_(partition) {
    config_.validate();
    if (partition.first < 0 || partition.first > partition.total || partition.total <= 0)
        throw std::invalid_argument("bad partition");
}

bool Stepper::needs_priming() const {
    switch (config_.method) {
    case Method::baoab:
    case Method::langevin_layers:
    case Method::lol:
    case Method::adl:
    case Method::adlala:
        return true;
    default:
        return false;
    }
}

void Stepper::prime(const std::vector<double>& params, const GradFn& grad_fn) {
    if (!needs_priming()) return;
    grad_fn(params, force_);
    primed_ = true;
}

void Stepper::step(std::vector<double>& params, DynamicsState& state, const GradFn& grad_fn,
                   RngStream& stream) {
    if (params.size() != static_cast<std::size_t>(partition_.total) ||
        state.momentum.size() != params.size())
        throw std::invalid_argument("parameter/momentum size does not match partition");
    switch (config_.method) {
    case Method::sgd:
    case Method::sgd_mom1:
    case Method::sgd_mom2:
    case Method::adam:
    case Method::sgld:
        step_first_order(params, state, grad_fn, stream);
        break;
    case Method::oba:
        step_oba(params, state, grad_fn, stream);
        break;
    case Method::baoab:
    case Method::langevin_layers:
    case Method::lol:
        step_partitioned_baoab(params, state, grad_fn, stream);
        break;
    case Method::adl:
        step_adl(params, state, grad_fn, stream);
        break;
    case Method::adlala:
        step_adlala(params, state, grad_fn, stream);
        break;
    }
    ++state.step;
}

void Stepper::step_first_order(std::vector<double>& params, DynamicsState& state,
                               const GradFn& grad_fn, RngStream& stream) {
    const std::size_t q = params.size();
    const double h = config_.h;
    switch (config_.method) {
    case Method::sgd:
        grad_fn(params, scratch_);
        for (std::size_t i = 0; i < q; ++i) params[i] += h * scratch_[i];
        break;
    case Method::sgld: {
        if (config_.sgld_sigma == 0.0) { // reduces to plain SGD, stream untouched
            grad_fn(params, scratch_);
            for (std::size_t i = 0; i < q; ++i) params[i] += h * scratch_[i];
            break;
        }
        const double c = config_.sgld_sigma * std::sqrt(h);
        force_.resize(q);
        for (std::size_t i = 0; i < q; ++i) force_[i] = c * stream.next_normal();
        grad_fn(params, scratch_);
        for (std::size_t i = 0; i < q; ++i) params[i] += force_[i] + h * scratch_[i];
        break;
    }
    case Method::sgd_mom1:
        grad_fn(params, scratch_);
        for (std::size_t i = 0; i < q; ++i) {
            state.momentum[i] = config_.momentum_mu * state.momentum[i] + h * scratch_[i];
            params[i] += state.momentum[i];
        }
        break;
    case Method::sgd_mom2:
        grad_fn(params, scratch_);
        for (std::size_t i = 0; i < q; ++i) {
            state.momentum[i] =
                config_.momentum_mu * state.momentum[i] + (1.0 - config_.momentum_mu) * scratch_[i];
            params[i] += h * state.momentum[i];
        }
        break;
    case Method::adam: {
        grad_fn(params, scratch_);
        if (state.adam_m.size() != q) {
            state.adam_m.assign(q, 0.0);
            state.adam_v.assign(q, 0.0);
        }
        const double b1 = config_.adam_beta1, b2 = config_.adam_beta2;
        const double t = static_cast<double>(state.step + 1);
        const double corr1 = 1.0 - std::pow(b1, t);
        const double corr2 = 1.0 - std::pow(b2, t);
        for (std::size_t i = 0; i < q; ++i) {
            const double g = -scratch_[i]; // adam descends the loss gradient
            state.adam_m[i] = b1 * state.adam_m[i] + (1.0 - b1) * g;
            state.adam_v[i] = b2 * state.adam_v[i] + (1.0 - b2) * g * g;
            const double mhat = state.adam_m[i] / corr1;
            const double vhat = state.adam_v[i] / corr2;
            params[i] -= h * mhat / (std::sqrt(vhat) + config_.adam_eps);
        }
        break;
    }
    default:
        throw std::logic_error("not a first-order method");
    }
}

void Stepper::step_oba(std::vector<double>& params, DynamicsState& state, const GradFn& grad_fn,
                       RngStream& stream) {
    const std::size_t q = params.size();
    auto& p = state.momentum;
    ou_update(std::span<double>(p), config_.gamma1, config_.tau1, config_.h, stream);
    grad_fn(params, scratch_);
    for (std::size_t i = 0; i < q; ++i) p[i] += config_.h * scratch_[i];
    for (std::size_t i = 0; i < q; ++i) params[i] += config_.h * p[i];
}

void Stepper::step_partitioned_baoab(std::vector<double>& params, DynamicsState& state,
                                     const GradFn& grad_fn, RngStream& stream) {
    if (!primed_) prime(params, grad_fn);
    const std::size_t q = params.size();
    const std::size_t n1 = static_cast<std::size_t>(partition_.first);
    const double half = 0.5 * config_.h;
    auto& p = state.momentum;

    for (std::size_t i = 0; i < q; ++i) p[i] += half * force_[i];
    for (std::size_t i = 0; i < q; ++i) params[i] += half * p[i];

    ou_update(std::span<double>(p).subspan(0, n1), config_.gamma1, config_.tau1, config_.h, stream);
    const FrictionParam g2 = config_.method == Method::lol ? FrictionParam::inf() : config_.gamma2;
    ou_update(std::span<double>(p).subspan(n1), g2, config_.tau2, config_.h, stream);

    for (std::size_t i = 0; i < q; ++i) params[i] += half * p[i];
    grad_fn(params, force_);
    for (std::size_t i = 0; i < q; ++i) p[i] += half * force_[i];
}

void Stepper::step_adl(std::vector<double>& params, DynamicsState& state, const GradFn& grad_fn,
                       RngStream& stream) {
    if (!primed_) prime(params, grad_fn);
    const std::size_t q = params.size();
    const double half = 0.5 * config_.h;
    auto& p = state.momentum;
    double& xi = state.xi[0];

    for (std::size_t i = 0; i < q; ++i) p[i] += half * force_[i];
    for (std::size_t i = 0; i < q; ++i) params[i] += half * p[i];

    double cfac = std::exp(-half * xi);
    for (double& v : p) v *= cfac;
    if (config_.sigma_a != 0.0) {
        const double c = config_.sigma_a * std::sqrt(half);
        for (double& v : p) v += c * stream.next_normal();
    }
    double ss = 0.0;
    for (const double v : p) ss += v * v;
    xi += config_.h * config_.eps * (ss - static_cast<double>(q) * config_.tau1);
    if (config_.sigma_a != 0.0) {
        const double c = config_.sigma_a * std::sqrt(half);
        for (double& v : p) v += c * stream.next_normal();
    }
    cfac = std::exp(-half * xi);
    for (double& v : p) v *= cfac;

    for (std::size_t i = 0; i < q; ++i) params[i] += half * p[i];
    grad_fn(params, force_);
    for (std::size_t i = 0; i < q; ++i) p[i] += half * force_[i];
}

void Stepper::step_adlala(std::vector<double>& params, DynamicsState& state, const GradFn& grad_fn,
                          RngStream& stream) {
    if (!primed_) prime(params, grad_fn);
    const std::size_t q = params.size();
    const std::size_t n1 = static_cast<std::size_t>(partition_.first);
    const double half = 0.5 * config_.h;
    auto& p = state.momentum;
    double& xi = state.xi[0];

    for (std::size_t i = 0; i < q; ++i) p[i] += half * force_[i];
    for (std::size_t i = 0; i < q; ++i) params[i] += half * p[i];

    double cfac = std::exp(-half * xi);
    for (std::size_t i = 0; i < n1; ++i) p[i] *= cfac;
    if (config_.sigma_a != 0.0) {
        const double c = config_.sigma_a * std::sqrt(half);
        for (std::size_t i = 0; i < n1; ++i) p[i] += c * stream.next_normal();
    }
    double ss = 0.0;
    for (std::size_t i = 0; i < n1; ++i) ss += p[i] * p[i];
    xi += config_.h * config_.eps * (ss - static_cast<double>(n1) * config_.tau1);
    if (config_.sigma_a != 0.0) {
        const double c = config_.sigma_a * std::sqrt(half);
        for (std::size_t i = 0; i < n1; ++i) p[i] += c * stream.next_normal();
    }
    cfac = std::exp(-half * xi);
    for (std::size_t i = 0; i < n1; ++i) p[i] *= cfac;

    ou_update(std::span<double>(p).subspan(n1), config_.gamma2, config_.tau2, config_.h, stream);

    for (std::size_t i = 0; i < q; ++i) params[i] += half * p[i];
    grad_fn(params, force_);
    for (std::size_t i = 0; i < q; ++i) p[i] += half * force_[i];
}

std::vector<MapToken> Stepper::composition(Method method) {
    switch (method) {
    case Method::oba:
        return {{'O', 0}, {'B', 0}, {'A', 0}};
    case Method::baoab:
    case Method::langevin_layers:
    case Method::lol:
        return {{'B', 0}, {'A', 0}, {'O', 1}, {'O', 2}, {'A', 0}, {'B', 0}};
    case Method::adl:
        return {{'B', 0}, {'A', 0}, {'C', 0}, {'D', 0}, {'E', 0},
                {'D', 0}, {'C', 0}, {'A', 0}, {'B', 0}};
    case Method::adlala:
        return {{'B', 0}, {'A', 0}, {'C', 1}, {'D', 1}, {'E', 1},
                {'D', 1}, {'C', 1}, {'O', 2}, {'A', 0}, {'B', 0}};
    default:
        return {};
    }
}

} // namespace thermonet
