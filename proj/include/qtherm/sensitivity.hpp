#pragma once

// Where can the thermometer actually see? Two temperatures are taken as barely
// distinguishable when the relative entropy between their outcome
// distributions reaches a threshold (1 bit by default). The detectable window
// [t0, t_inf] is bounded by indistinguishability from t = 0 below and from
// t = inf above.

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "qtherm/grid.hpp"
#include "qtherm/thermal_model.hpp"

namespace qtherm {

struct UndetectableError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DetectableRange {
    double t0 = 0.0;     // below this, indistinguishable from t = 0
    double t_inf = 0.0;  // above this, indistinguishable from t = inf
    double ratio() const { return t_inf / t0; }
};

// Relative base-2 entropy D(t1 || t2) between the two Bernoulli-chain outcome
// distributions, in bits; 0 iff q(t1) = q(t2), at most N. Returns +inf when
// t2's distribution assigns zero probability to t1's support.
inline double relative_entropy(Temperature t1, Temperature t2, const ProbeConfig& cfg) {
    const double q1 = excitation_probability(t1, cfg);
    const double q2 = excitation_probability(t2, cfg);
    double d = 0.0;
    if (q1 > 0.0) {
        if (q2 <= 0.0) return std::numeric_limits<double>::infinity();
        d += q1 * std::log2(q1 / q2);
    }
    d += (1.0 - q1) * std::log2((1.0 - q1) / (1.0 - q2));
    return cfg.n_probes * d;
}

// Solve q(t) = target on the strictly increasing excitation probability.
// Brackets start at the default grid bounds and expand geometrically;
// bisection to 1e-8 relative. The supremum of q is 1/2, approached only as
// t -> inf, so targets at or above 1/2 are unreachable.
inline double solve_excitation(double target, const ProbeConfig& cfg) {
    if (!(cfg.gamma_tau > 0.0)) throw std::invalid_argument("gamma_tau: must be > 0");
    if (!(target > 0.0)) throw std::invalid_argument("solve_excitation: target must be > 0");
    if (target >= 0.5) throw UndetectableError("target excitation probability is unreachable");
    double lo = 0.01, hi = 200.0;
    while (excitation_probability(lo, cfg) > target && lo > 1e-12) lo *= 0.25;
    int guard = 0;
    while (excitation_probability(hi, cfg) < target) {
        hi *= 4.0;
        if (++guard > 600 || std::isinf(hi))
            throw UndetectableError("target excitation probability is unreachable");
    }
    while (hi - lo > 1e-8 * 0.5 * (hi + lo)) {
        const double mid = 0.5 * (lo + hi);
        (excitation_probability(mid, cfg) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// [t0, t_inf] such that D(0 || t0) = bits and D(inf || t_inf) = bits. The two
// conditions invert in closed form to excitation-probability targets.
inline DetectableRange detectable_range(const ProbeConfig& cfg, double bits = 1.0) {
    cfg.validate();
    if (!(cfg.gamma_tau > 0.0)) throw std::invalid_argument("gamma_tau: must be > 0");
    if (!(bits > 0.0)) throw std::invalid_argument("bits: threshold must be > 0");
    const double n = cfg.n_probes;
    // D(0 || t) = -N log2(1-q)  =>  q(t0) = 1 - 2^{-bits/N}
    const double q_low = -std::expm1(-bits * std::numbers::ln2 / n);
    // D(inf || t) = (N/2) log2( (1/4) / (q(1-q)) )  =>  q(1-q) = 4^{-bits/N} / 4
    const double a = std::exp2(-2.0 * bits / n);
    const double q_high = 0.5 * (1.0 - std::sqrt(1.0 - a));
    return {solve_excitation(q_low, cfg), solve_excitation(q_high, cfg)};
}

// max_t I(t) at the given coupling time over the same maximum at equilibrium.
// In (0, 1]; the probe count cancels.
inline double peak_fisher_ratio(double gamma_tau, const ProbeConfig& cfg,
                                const TemperatureGrid& grid) {
    if (!(gamma_tau > 0.0)) throw std::invalid_argument("gamma_tau: must be > 0");
    ProbeConfig at_tau = cfg;
    at_tau.gamma_tau = gamma_tau;
    ProbeConfig at_eq = cfg;
    at_eq.gamma_tau = std::numeric_limits<double>::infinity();
    double peak_tau = 0.0, peak_eq = 0.0;
    for (double t : grid.points) {
        peak_tau = std::max(peak_tau, fisher_information(t, at_tau));
        peak_eq = std::max(peak_eq, fisher_information(t, at_eq));
    }
    return peak_tau / peak_eq;
}

inline double peak_fisher_ratio(double gamma_tau, const ProbeConfig& cfg) {
    static const GridPtr grid = build_log_grid(1e-3, 1e4, 4000);
    return peak_fisher_ratio(gamma_tau, cfg, *grid);
}

}  // namespace qtherm
