#pragma once

// Outcome- and temperature-averaged figures of merit. An EstimationRun caches,
// per outcome, everything the averaged metrics need (estimates, own-cost
// averages, matched errors, quantiles, inverse moments), so sweeps over the
// true temperature or the probe number reduce to dot products over outcomes.
//
// Cost averages carry a dimension tag (t^2 for the mean's cost, t for the
// median's, dimensionless for the relative and logarithmic ones); comparing
// costs across dimensions is refused.

#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qtherm/estimators.hpp"
#include "qtherm/parallel.hpp"
#include "qtherm/posterior.hpp"
#include "qtherm/priors.hpp"
#include "qtherm/sensitivity.hpp"
#include "qtherm/thermal_model.hpp"

namespace qtherm {

enum class CostDimension { TemperatureSquared, Temperature, Dimensionless };

inline CostDimension cost_dimension(EstimatorKind k) {
    switch (k) {
        case EstimatorKind::Mode:
            throw std::invalid_argument("estimators: mode has no cost function");
        case EstimatorKind::Median: return CostDimension::Temperature;
        case EstimatorKind::Mean: return CostDimension::TemperatureSquared;
        default: return CostDimension::Dimensionless;
    }
}

inline const char* cost_dimension_tag(CostDimension d) {
    switch (d) {
        case CostDimension::TemperatureSquared: return "t2";
        case CostDimension::Temperature: return "t";
        case CostDimension::Dimensionless: return "dimless";
    }
    return "?";
}

struct CostValue {
    double value = 0.0;
    CostDimension dimension = CostDimension::Dimensionless;
};

// Ordering is only defined within one parametrization.
inline bool cost_less(const CostValue& a, const CostValue& b) {
    if (a.dimension != b.dimension)
        throw std::invalid_argument("cost comparison across different dimensions is invalid");
    return a.value < b.value;
}

struct OutcomeRecord {
    bool possible = false;  // evidence above the representable floor
    double evidence = 0.0;  // P(n) under this prior
    double q05 = 0.0, q50 = 0.0, q95 = 0.0;
    double inv_mean = 0.0;     // <1/t>
    double inv_sq_mean = 0.0;  // <1/t^2>
    std::array<double, 6> estimate{};
    std::array<double, 6> cost{};   // own-cost averages; NaN at the mode slot
    std::array<double, 6> error{};  // matched errors; NaN at the mode slot
};

// Immutable per-(prior, config) cache: one record per outcome n = 0..N.
// Outcomes whose evidence underflows stay flagged impossible and are dropped
// from averaged sums together with their negligible weight.
struct EstimationRun {
    ProbeConfig cfg;
    GridPtr grid;
    PriorKind prior_kind = PriorKind::Jeffreys;
    std::vector<OutcomeRecord> outcomes;
};

inline EstimationRun make_estimation_run(const PriorDensity& prior, const ProbeConfig& cfg,
                                         int threads = 0) {
    cfg.validate();
    EstimationRun run;
    run.cfg = cfg;
    run.grid = prior.grid;
    run.prior_kind = prior.kind;
    run.outcomes.resize(static_cast<std::size_t>(cfg.n_probes) + 1);
    const auto lik = make_likelihood_table(prior.grid, cfg);

    detail::parallel_for(run.outcomes.size(), threads, [&](std::size_t n) {
        auto post = try_make_posterior(static_cast<int>(n), prior, lik);
        if (!post) return;
        OutcomeRecord& rec = run.outcomes[n];
        rec.possible = true;
        rec.evidence = post->evidence;
        rec.q05 = quantile(0.05, *post);
        rec.q50 = quantile(0.5, *post);
        rec.q95 = quantile(0.95, *post);
        rec.inv_mean = posterior_expectation([](double t) { return 1.0 / t; }, *post);
        rec.inv_sq_mean = posterior_expectation([](double t) { return 1.0 / (t * t); }, *post);
        for (auto kind : all_estimators) {
            const std::size_t k = kind_index(kind);
            rec.estimate[k] = estimate(kind, *post);
            if (kind == EstimatorKind::Mode) {
                rec.cost[k] = std::numeric_limits<double>::quiet_NaN();
                rec.error[k] = std::numeric_limits<double>::quiet_NaN();
            } else {
                rec.cost[k] = posterior_cost(kind, *post, rec.estimate[k]);
                rec.error[k] = error_from_cost(kind, rec.estimate[k], rec.cost[k]);
            }
        }
    });
    return run;
}

// Uniform-grid run restricted to [t1, t2], with the prior renormalized on that
// support; the consistent setup for the finite-range metrics.
inline EstimationRun make_truncated_run(PriorKind kind, const ProbeConfig& cfg, double t1,
                                        double t2, double step = 1e-3, int threads = 0) {
    auto grid = build_uniform_grid(t1, t2, step);
    const auto prior = build_prior(PriorSpec{kind, t1, t2}, cfg, grid);
    return make_estimation_run(prior, cfg, threads);
}

namespace detail {

inline void require_error_kind(EstimatorKind kind) {
    if (kind == EstimatorKind::Mode)
        throw std::invalid_argument("estimators: mode has no error measure");
}

}  // namespace detail

// Outcome-weighted averages at a given true temperature: sum_n P(n|t) x_n.
inline double averaged_estimate(double true_t, EstimatorKind kind, const EstimationRun& run) {
    const auto w = likelihood_row(true_t, run.cfg);
    const std::size_t k = kind_index(kind);
    double acc = 0.0;
    for (std::size_t n = 0; n < run.outcomes.size(); ++n)
        if (run.outcomes[n].possible) acc += w[n] * run.outcomes[n].estimate[k];
    return acc;
}

inline double averaged_error(double true_t, EstimatorKind kind, const EstimationRun& run) {
    detail::require_error_kind(kind);
    const auto w = likelihood_row(true_t, run.cfg);
    const std::size_t k = kind_index(kind);
    double acc = 0.0;
    for (std::size_t n = 0; n < run.outcomes.size(); ++n)
        if (run.outcomes[n].possible) acc += w[n] * run.outcomes[n].error[k];
    return acc;
}

inline std::pair<double, double> averaged_estimate_and_error(double true_t, EstimatorKind kind,
                                                             const EstimationRun& run) {
    return {averaged_estimate(true_t, kind, run), averaged_error(true_t, kind, run)};
}

// Outcome-averaged width of the 90% credible interval (estimator-independent).
inline double averaged_credible_width(double true_t, const EstimationRun& run) {
    const auto w = likelihood_row(true_t, run.cfg);
    double acc = 0.0;
    for (std::size_t n = 0; n < run.outcomes.size(); ++n)
        if (run.outcomes[n].possible)
            acc += w[n] * (run.outcomes[n].q95 - run.outcomes[n].q05);
    return acc;
}

// 3.29 sqrt( sum_n P(n|t) (theta_n - t)^2 ), the 90%-scaled RMS deviation of
// the estimate from the true temperature.
inline double rms_deviation(double true_t, EstimatorKind kind, const EstimationRun& run) {
    const auto w = likelihood_row(true_t, run.cfg);
    const std::size_t k = kind_index(kind);
    double acc = 0.0;
    for (std::size_t n = 0; n < run.outcomes.size(); ++n)
        if (run.outcomes[n].possible) {
            const double d = run.outcomes[n].estimate[k] - true_t;
            acc += w[n] * d * d;
        }
    return 3.29 * std::sqrt(acc);
}

// Two-sided confidence interval of estimates at a true temperature: outcome
// indices a (greatest with cumulative likelihood <= (1-level)/2) and b
// (smallest with cumulative >= (1+level)/2), mapped through the estimator and
// min/max-ordered so non-monotone estimators stay correct.
inline std::pair<double, double> confidence_interval(double true_t, EstimatorKind kind,
                                                     double level, const EstimationRun& run) {
    if (!(level > 0.0) || level > 1.0)
        throw std::invalid_argument("confidence level must be in (0, 1]");
    const auto w = likelihood_row(true_t, run.cfg);
    const double alpha = 0.5 * (1.0 - level);
    const std::size_t count = run.outcomes.size();

    std::ptrdiff_t a = -1;
    double cum = 0.0;
    std::ptrdiff_t b = static_cast<std::ptrdiff_t>(count) - 1;
    for (std::size_t n = 0; n < count; ++n) {
        cum += w[n];
        if (cum <= alpha) a = static_cast<std::ptrdiff_t>(n);
        if (cum >= 1.0 - alpha) {
            b = static_cast<std::ptrdiff_t>(n);
            break;
        }
    }
    // clamp to outcomes that actually have estimates
    while (a >= 0 && !run.outcomes[static_cast<std::size_t>(a)].possible) --a;
    if (a < 0) {
        a = 0;
        while (static_cast<std::size_t>(a) + 1 < count &&
               !run.outcomes[static_cast<std::size_t>(a)].possible)
            ++a;
    }
    while (static_cast<std::size_t>(b) + 1 < count &&
           !run.outcomes[static_cast<std::size_t>(b)].possible)
        ++b;
    while (b > 0 && !run.outcomes[static_cast<std::size_t>(b)].possible) --b;

    const std::size_t k = kind_index(kind);
    const double va = run.outcomes[static_cast<std::size_t>(a)].estimate[k];
    const double vb = run.outcomes[static_cast<std::size_t>(b)].estimate[k];
    return std::minmax(va, vb);
}

// Finite-range average cost: the run must already live on the [t1, t2] setup
// (truncated grid, prior renormalized there), so this is just the
// evidence-weighted sum of own-cost averages.
inline CostValue finite_cost(EstimatorKind kind, const EstimationRun& run) {
    const CostDimension dim = cost_dimension(kind);  // rejects the mode
    const std::size_t k = kind_index(kind);
    double acc = 0.0;
    for (const auto& rec : run.outcomes)
        if (rec.possible) acc += rec.evidence * rec.cost[k];
    return {acc, dim};
}

inline CostValue finite_cost(EstimatorKind kind, PriorKind prior, const ProbeConfig& cfg,
                             double t1, double t2) {
    return finite_cost(kind, make_truncated_run(prior, cfg, t1, t2));
}

// Global relative error: sum_n P(n) eps_n / theta_n on the finite-range setup.
inline double global_relative_error(EstimatorKind kind, const EstimationRun& run) {
    detail::require_error_kind(kind);
    const std::size_t k = kind_index(kind);
    double acc = 0.0;
    for (const auto& rec : run.outcomes)
        if (rec.possible) acc += rec.evidence * rec.error[k] / rec.estimate[k];
    return acc;
}

inline double global_relative_error(EstimatorKind kind, PriorKind prior, const ProbeConfig& cfg,
                                    double t1, double t2) {
    return global_relative_error(kind, make_truncated_run(prior, cfg, t1, t2));
}

// Global relative-RMS benchmark: 3.29 sqrt of the full-range relative-square
// cost of the given estimator's outcomes. Built from stored inverse moments,
// so it is available for every kind including the mode.
inline double global_rrms(EstimatorKind kind, const EstimationRun& run) {
    const std::size_t k = kind_index(kind);
    double acc = 0.0;
    for (const auto& rec : run.outcomes)
        if (rec.possible) {
            const double th = rec.estimate[k];
            acc += rec.evidence * (th * th * rec.inv_sq_mean - 2.0 * th * rec.inv_mean + 1.0);
        }
    return 3.29 * std::sqrt(acc);
}

// Prior-weighted average of the local Cramer-Rao deviation 3.29/sqrt(I(t)),
// relative to t, over [t1, t2] with the renormalized Jeffreys prior.
inline double global_crb_numeric(const ProbeConfig& cfg, double t1, double t2,
                                 const TemperatureGrid& grid) {
    const double mass = truncated_mass(t1, t2, cfg);
    double acc = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t = grid.points[i];
        if (t < t1 || t > t2) continue;
        const double fisher = fisher_information(t, cfg);
        if (fisher <= 0.0) continue;
        acc += grid.weights[i] * jeffreys_density(t, cfg) * 3.29 / (t * std::sqrt(fisher));
    }
    return acc / mass;
}

// Closed form at equilibrium; numeric prior-weighted integral otherwise.
inline double global_crb(const ProbeConfig& cfg, double t1, double t2) {
    cfg.validate();
    if (cfg.equilibrium())
        return 6.58 * std::log(t2 / t1) /
               (std::numbers::pi * std::sqrt(static_cast<double>(cfg.n_probes)) *
                truncated_mass(t1, t2, cfg));
    return global_crb_numeric(cfg, t1, t2, *build_uniform_grid(t1, t2, 1e-3));
}

struct VanTreesResult {
    double bound = 0.0;            // 3.29 / sqrt(likelihood_term + prior_term)
    double likelihood_term = 0.0;  // integral of P0 t^2 I(t)
    double prior_term = 0.0;       // integral of P0 t^2 (d ln P0 / dt)^2
    bool boundary_ok = false;      // P0 -> 0 at the lower edge, t P0 -> 0 at the upper
};

// Estimator-independent lower bound on the global relative RMS error. The two
// integrals run over the prior's full tabulated support; the partial-
// integration boundary terms require P0 to vanish at the lower edge and t*P0
// at the upper edge, which holds for Jeffreys but not for flat or reciprocal
// priors -- those results come back flagged.
inline VanTreesResult van_trees_bound(const ProbeConfig& cfg, const PriorDensity& prior) {
    cfg.validate();
    const auto& grid = *prior.grid;
    VanTreesResult res;
    std::size_t first = grid.size(), last = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double p = prior.density[i];
        if (p <= 0.0) continue;
        if (first == grid.size()) first = i;
        last = i;
        const double t = grid.points[i];
        res.likelihood_term += grid.weights[i] * p * t * t * fisher_information(t, cfg);
        double dlog = 0.0;
        switch (prior.kind) {
            case PriorKind::Jeffreys: dlog = jeffreys_log_density_derivative(t, cfg); break;
            case PriorKind::Flat: dlog = 0.0; break;
            case PriorKind::Reciprocal: dlog = -1.0 / t; break;
        }
        res.prior_term += grid.weights[i] * p * t * t * dlog * dlog;
    }
    if (first == grid.size()) throw std::invalid_argument("van_trees_bound: empty prior");
    constexpr double edge_tol = 1e-2;
    res.boundary_ok = prior.density[first] <= edge_tol &&
                      grid.points[last] * prior.density[last] <= edge_tol;
    res.bound = 3.29 / std::sqrt(res.likelihood_term + res.prior_term);
    return res;
}

struct VanTreesEquilibrium {
    double exact = 0.0;   // 3.29 / sqrt((N+1) pi^2/8 - N + 1)
    double approx = 0.0;  // 6.81 / sqrt(N + 9.56)
};

// Equilibrium closed form of the bound; independent of the qubit gap.
inline VanTreesEquilibrium van_trees_equilibrium(double n_probes) {
    if (!(n_probes >= 1.0)) throw std::invalid_argument("n_probes: must be >= 1");
    const double pi2_8 = std::numbers::pi * std::numbers::pi / 8.0;
    return {3.29 / std::sqrt((n_probes + 1.0) * pi2_8 - n_probes + 1.0),
            6.81 / std::sqrt(n_probes + 9.56)};
}

}  // namespace qtherm
