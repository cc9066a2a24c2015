#pragma once

// Prior densities over reduced temperature: Jeffreys (the uninformed default,
// proportional to the square root of the Fisher information and independent of
// the probe number), plus flat and reciprocal references. Flat and reciprocal
// are improper on an unbounded range and must be restricted to a finite
// interval; Jeffreys normalizes to 1 on [0, inf) by itself.

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "qtherm/grid.hpp"
#include "qtherm/thermal_model.hpp"

namespace qtherm {

enum class PriorKind { Jeffreys, Flat, Reciprocal };

inline const char* prior_name(PriorKind k) {
    switch (k) {
        case PriorKind::Jeffreys: return "jeffreys";
        case PriorKind::Flat: return "flat";
        case PriorKind::Reciprocal: return "reciprocal";
    }
    return "?";
}

inline PriorKind prior_from_name(const std::string& s) {
    if (s == "jeffreys") return PriorKind::Jeffreys;
    if (s == "flat") return PriorKind::Flat;
    if (s == "reciprocal") return PriorKind::Reciprocal;
    throw std::invalid_argument("prior: unknown kind '" + s + "'");
}

struct PriorSpec {
    PriorKind kind = PriorKind::Jeffreys;
    double t_min = 0.0;  // support; Jeffreys admits [0, inf)
    double t_max = std::numeric_limits<double>::infinity();

    void validate() const {
        if (std::isnan(t_min) || t_min < 0.0 || !(t_max > t_min))
            throw std::invalid_argument("prior range: need 0 <= t_min < t_max");
        if (kind != PriorKind::Jeffreys && std::isinf(t_max))
            throw std::invalid_argument("prior range: flat/reciprocal priors are improper on an infinite range");
        if (kind == PriorKind::Reciprocal && t_min <= 0.0)
            throw std::invalid_argument("prior range: reciprocal prior needs t_min > 0");
    }
};

// Tabulated normalized prior. Immutable after construction.
struct PriorDensity {
    PriorKind kind = PriorKind::Jeffreys;
    GridPtr grid;
    std::vector<double> density;     // unit quadrature mass on the support, 0 outside
    std::vector<double> cumulative;  // trapezoid running mass, ends at 1
    double raw_mass = 0.0;           // quadrature mass before renormalization
    double support_min = 0.0, support_max = 0.0;
};

// Jeffreys density 2 q' / (pi sqrt(q(1-q))). Independent of n_probes.
// Vanishes (with the excitation probability) as t -> 0.
inline double jeffreys_density(Temperature t, const ProbeConfig& cfg) {
    if (std::isnan(t) || t < 0.0) throw std::domain_error("temperature must be >= 0");
    if (t == 0.0) return 0.0;
    const double q = excitation_probability(t, cfg);
    if (q <= 0.0) return 0.0;
    const double dq = excitation_probability_derivative(t, cfg);
    return 2.0 * dq / (std::numbers::pi * std::sqrt(q * (1.0 - q)));
}

// Jeffreys mass on [t1, t2] in closed form: the density integrates by the
// substitution u = sqrt(q) to (4/pi) arcsin sqrt(q).
inline double truncated_mass(Temperature t1, Temperature t2, const ProbeConfig& cfg) {
    if (std::isnan(t1) || t1 < 0.0 || std::isnan(t2) || t2 < t1)
        throw std::invalid_argument("truncated_mass: need 0 <= t1 <= t2");
    const double s1 = std::asin(std::sqrt(excitation_probability(t1, cfg)));
    const double s2 = std::asin(std::sqrt(excitation_probability(t2, cfg)));
    return (4.0 / std::numbers::pi) * (s2 - s1);
}

// d/dt ln P0 for the Jeffreys prior: q''/q' - (1-2q) q' / (2 q(1-q)).
// q'' is exact at equilibrium; otherwise it is a central difference of the
// analytic first derivative (step 1e-6 t).
inline double jeffreys_log_density_derivative(Temperature t, const ProbeConfig& cfg) {
    const double q = excitation_probability(t, cfg);
    if (q <= 0.0) return 0.0;  // density vanishes here; value unused under the integral
    const double dq = excitation_probability_derivative(t, cfg);
    if (dq <= 0.0) return 0.0;
    double d2q;
    if (cfg.equilibrium()) {
        d2q = dq * ((1.0 - 2.0 * q) / (t * t) - 2.0 / t);
    } else {
        const double h = 1e-6 * t;
        d2q = (excitation_probability_derivative(t + h, cfg) -
               excitation_probability_derivative(t - h, cfg)) / (2.0 * h);
    }
    return d2q / dq - 0.5 * (1.0 - 2.0 * q) * dq / (q * (1.0 - q));
}

// Tabulate the requested prior on the grid, restricted to the spec support and
// renormalized to unit quadrature mass there.
inline PriorDensity build_prior(const PriorSpec& spec, const ProbeConfig& cfg, GridPtr grid) {
    spec.validate();
    cfg.validate();
    const double lo = std::max(spec.t_min, grid->t_min());
    const double hi = std::min(spec.t_max, grid->t_max());
    if (!(lo < hi)) throw std::invalid_argument("prior range: support does not intersect the grid");

    PriorDensity prior;
    prior.kind = spec.kind;
    prior.grid = grid;
    prior.support_min = lo;
    prior.support_max = hi;
    prior.density.assign(grid->size(), 0.0);

    for (std::size_t i = 0; i < grid->size(); ++i) {
        const double t = grid->points[i];
        if (t < lo || t > hi) continue;
        switch (spec.kind) {
            case PriorKind::Jeffreys: prior.density[i] = jeffreys_density(t, cfg); break;
            case PriorKind::Flat: prior.density[i] = 1.0 / (hi - lo); break;
            case PriorKind::Reciprocal: prior.density[i] = 1.0 / (t * std::log(hi / lo)); break;
        }
    }
    prior.raw_mass = integrate(*grid, prior.density);
    if (!(prior.raw_mass > 0.0)) throw std::invalid_argument("prior range: zero mass on the grid");
    for (auto& d : prior.density) d /= prior.raw_mass;
    detail::cumulative_trapezoid(grid->points, prior.density, prior.cumulative);
    return prior;
}

}  // namespace qtherm
