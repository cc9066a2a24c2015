#pragma once

// Closed-form physics of the qubit probe ensemble: excitation probability of a
// ground-state qubit after coupling to a bosonic bath for a dimensionless time
// gamma*tau, its temperature derivative, the Bernoulli-chain likelihood for n
// excitations out of N probes, and the Fisher information.
//
// All temperatures are reduced: t = k_B T / E with E the qubit gap. Physical
// units enter only through ProbeConfig::energy_scale at I/O boundaries.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace qtherm {

using Temperature = double;  // reduced units k_B T / E

struct ProbeConfig {
    int n_probes = 200;
    // Coupling time gamma*tau. +inf is the distinguished equilibrium value:
    // the probes reach the Gibbs state and the exact closed forms are used.
    double gamma_tau = std::numeric_limits<double>::infinity();
    double energy_scale = 1.0;  // E/k_B, only for unit conversion

    bool equilibrium() const { return std::isinf(gamma_tau); }

    void validate() const {
        if (n_probes < 1) throw std::invalid_argument("n_probes: must be >= 1");
        if (std::isnan(gamma_tau) || gamma_tau < 0.0)
            throw std::invalid_argument("gamma_tau: must be >= 0 (or inf for equilibrium)");
        if (!(energy_scale > 0.0)) throw std::invalid_argument("energy_scale: must be > 0");
    }
};

inline ProbeConfig equilibrium_probes(int n_probes) {
    ProbeConfig cfg{n_probes, std::numeric_limits<double>::infinity(), 1.0};
    cfg.validate();
    return cfg;
}

inline ProbeConfig partial_probes(int n_probes, double gamma_tau) {
    ProbeConfig cfg{n_probes, gamma_tau, 1.0};
    cfg.validate();
    return cfg;
}

namespace detail {

// coth(z) and 1/sinh(z) for z > 0 without evaluating e^{+z}.
inline double coth_pos(double z) {
    const double em2z = std::exp(-2.0 * z);
    return (1.0 + em2z) / (-std::expm1(-2.0 * z));
}

inline double csch_pos(double z) {
    return 2.0 * std::exp(-z) / (-std::expm1(-2.0 * z));
}

}  // namespace detail

// Excitation probability q(t) in [0, 1/2). Strictly increasing in t for
// gamma_tau > 0; q(0) = 0, q(inf) = 1/2 (the t = inf limit is admitted for
// sensitivity computations).
inline double excitation_probability(Temperature t, const ProbeConfig& cfg) {
    if (std::isnan(t) || t < 0.0) throw std::domain_error("temperature must be >= 0");
    if (t == 0.0 || cfg.gamma_tau == 0.0) return 0.0;
    const double x = std::exp(-1.0 / t);  // e^{-1/t}; underflows harmlessly near t = 0
    const double q_gibbs = x / (1.0 + x);
    if (cfg.equilibrium()) return q_gibbs;
    if (std::isinf(t)) return 0.5;
    const double g = cfg.gamma_tau * detail::coth_pos(0.5 / t);
    return -std::expm1(-g) * q_gibbs;
}

// Analytic dq/dt, obtained by the product/chain rule on both factors of q(t).
// At equilibrium this is exactly q(1-q)/t^2. Positive for gamma_tau > 0.
inline double excitation_probability_derivative(Temperature t, const ProbeConfig& cfg) {
    if (std::isnan(t) || t <= 0.0) throw std::domain_error("temperature must be > 0");
    if (cfg.gamma_tau == 0.0) return 0.0;
    if (std::isinf(t)) return 0.0;  // saturation limit
    const double x = std::exp(-1.0 / t);
    const double q_gibbs = x / (1.0 + x);
    const double dq_gibbs = q_gibbs * (1.0 - q_gibbs) / (t * t);
    if (cfg.equilibrium()) return dq_gibbs;
    const double z = 0.5 / t;
    const double g = cfg.gamma_tau * detail::coth_pos(z);
    const double csch = detail::csch_pos(z);
    const double dg = cfg.gamma_tau * csch * csch / (2.0 * t * t);
    return std::exp(-g) * dg * q_gibbs - std::expm1(-g) * dq_gibbs;
}

inline double log_binomial_coefficient(int n_trials, int k) {
    return std::lgamma(n_trials + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n_trials - k + 1.0);
}

// P(n | t): Bernoulli chain over N independent probes, evaluated in the log
// domain so that q^n does not underflow for large N.
inline double likelihood(int n, Temperature t, const ProbeConfig& cfg) {
    const int N = cfg.n_probes;
    if (n < 0 || n > N) throw std::out_of_range("outcome n out of [0, n_probes]");
    const double q = excitation_probability(t, cfg);
    if (q <= 0.0) return n == 0 ? 1.0 : 0.0;
    double logp = log_binomial_coefficient(N, n);
    if (n > 0) logp += n * std::log(q);
    if (n < N) logp += (N - n) * std::log1p(-q);
    return std::exp(logp);
}

// All N+1 outcome probabilities at a fixed temperature. Sums to 1 to ~1e-12.
inline std::vector<double> likelihood_row(Temperature t, const ProbeConfig& cfg) {
    const int N = cfg.n_probes;
    std::vector<double> row(static_cast<std::size_t>(N) + 1);
    const double q = excitation_probability(t, cfg);
    if (q <= 0.0) {
        row[0] = 1.0;
        return row;
    }
    const double lq = std::log(q);
    const double l1q = std::log1p(-q);
    for (int n = 0; n <= N; ++n) {
        double logp = log_binomial_coefficient(N, n);
        if (n > 0) logp += n * lq;
        if (n < N) logp += (N - n) * l1q;
        row[static_cast<std::size_t>(n)] = std::exp(logp);
    }
    return row;
}

// Fisher information of the Bernoulli chain, I(t) = N (dq/dt)^2 / q(1-q).
// Returns the limit 0 where the excitation probability underflows (t -> 0).
inline double fisher_information(Temperature t, const ProbeConfig& cfg) {
    if (std::isnan(t) || t < 0.0) throw std::domain_error("temperature must be >= 0");
    if (t == 0.0 || cfg.gamma_tau == 0.0) return 0.0;
    const double q = excitation_probability(t, cfg);
    if (q <= 0.0) return 0.0;
    const double dq = excitation_probability_derivative(t, cfg);
    return cfg.n_probes * dq * dq / (q * (1.0 - q));
}

}  // namespace qtherm
