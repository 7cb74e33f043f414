#pragma once

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "thermonet/partition.hpp"
#include "thermonet/rng.hpp"

namespace thermonet {

enum class Method {
    sgd,
    sgd_mom1, // v <- mu v + h G;       theta <- theta + v
    sgd_mom2, // v <- mu v + (1-mu) G;  theta <- theta + h v
    adam,
    sgld, // v <- sigma sqrt(h) R + h G; theta <- theta + v
    baoab,
    oba,
    adl, // single thermostat over all parameters, B A C D E D C A B
    langevin_layers,
    lol,   // partitioned BAOAB, output layer momentum fully refreshed
    adlala // thermostatted layer 1, Ornstein-Uhlenbeck layer 2
};

Method parse_method(const std::string& name); // throws on unknown name
std::string method_name(Method method);

/// Friction with an explicit infinite limit (full momentum refresh) instead
/// of a large float, so exp(-gamma h) never overflows.
struct FrictionParam {
    double value = 0.0;
    bool infinite = false;

    static FrictionParam finite(double g) { return {g, false}; }
    static FrictionParam inf() { return {0.0, true}; }
};

struct IntegratorConfig {
    Method method = Method::sgd;
    double h = 0.1;
    FrictionParam gamma1, gamma2; // partition frictions; unpartitioned methods use gamma1
    double tau1 = 0.0, tau2 = 0.0;
    double sigma_a = 0.0; // additive noise amplitude of the thermostatted maps
    double eps = 0.1;     // thermostat coupling
    double adam_beta1 = 0.9, adam_beta2 = 0.999, adam_eps = 1e-8;
    double momentum_mu = 0.0;
    double sgld_sigma = 0.0;

    void validate() const; // throws std::invalid_argument
};

struct DynamicsState {
    std::vector<double> momentum;  // length q, partitioned like the parameters
    std::array<double, 2> xi{0.0, 0.0}; // per-partition thermostat variables
    std::vector<double> adam_m, adam_v; // first/second moment estimates (adam)
    long long step = 0;

    static DynamicsState zeros(int q) {
        DynamicsState st;
        st.momentum.assign(q, 0.0);
        return st;
    }
};

/// Exact Ornstein-Uhlenbeck map p <- exp(-gamma h) p + sqrt(tau (1 -
/// exp(-2 gamma h))) R, componentwise in index order. The infinite-friction
/// flag gives the full refresh p = sqrt(tau) R.
///
/// Stream discipline (shared by every stochastic map in this module): one
/// normal per component in index order when the noise coefficient is
/// nonzero, and no draws at all when it is exactly zero. Zero-temperature
/// and zero-amplitude runs therefore consume the stream exactly like their
/// deterministic counterparts.
void ou_update(std::span<double> p, FrictionParam gamma, double tau, double h, RngStream& stream);

/// One token of an integrator's splitting composition: A drift, B force
/// kick, O Ornstein-Uhlenbeck, C/D/E thermostat scaling/noise/control.
/// scope 0 acts on all parameters, 1 or 2 on that partition only.
struct MapToken {
    char map;
    int scope;
    bool operator==(const MapToken&) const = default;
};

/// Stateful stepper over (theta, p, xi). The palindromic compositions (baoab,
/// langevin_layers, lol, adl, adlala) keep the force evaluated by the
/// trailing B kick and reuse it for the next step's leading B, so every step
/// costs one fresh gradient. prime() performs the initial evaluation; if it
/// is skipped the first step() call primes itself (costing that step a
/// second evaluation).
class Stepper {
public:
    /// grad_fn writes the negative gradient of the current loss at params.
    using GradFn = std::function<void(const std::vector<double>& params, std::vector<double>& neg_grad)>;

    Stepper(const IntegratorConfig& config, Partition partition);

    bool needs_priming() const;
    void prime(const std::vector<double>& params, const GradFn& grad_fn);
    void step(std::vector<double>& params, DynamicsState& state, const GradFn& grad_fn, RngStream& stream);

    const IntegratorConfig& config() const { return config_; }

    /// The splitting composition as applied by step(), for structural checks
    /// (the thermostatted schemes are palindromic within each partition).
    /// First-order methods return an empty sequence.
    static std::vector<MapToken> composition(Method method);

private:
    void step_first_order(std::vector<double>& params, DynamicsState& state, const GradFn& grad_fn,
                          RngStream& stream);
    void step_oba(std::vector<double>& params, DynamicsState& state, const GradFn& grad_fn,
                  RngStream& stream);
    void step_partitioned_baoab(std::vector<double>& params, DynamicsState& state, const GradFn& grad_fn,
                                RngStream& stream);
    void step_adl(std::vector<double>& params, DynamicsState& state, const GradFn& grad_fn,
                  RngStream& stream);
    void step_adlala(std::vector<double>& params, DynamicsState& state, const GradFn& grad_fn,
                     RngStream& stream);

    IntegratorConfig config_;
    Partition partition_;
    std::vector<double> force_; // cached negative gradient (palindromic schemes)
    std::vector<double> scratch_;
    bool primed_ = false;
};

} // namespace thermonet
