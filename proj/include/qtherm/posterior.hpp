#pragma once

// Bayes update on the temperature grid. Posterior densities are accumulated in
// the log domain with per-outcome max subtraction, so outcomes like n = 200
// excitations at small t do not underflow before normalization.

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qtherm/grid.hpp"
#include "qtherm/priors.hpp"
#include "qtherm/thermal_model.hpp"

namespace qtherm {

// Outcome whose evidence P(n) falls below evidence_floor is rejected: it could
// not have been observed under this prior.
struct ImpossibleOutcomeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr double evidence_floor = 1e-300;

struct Posterior {
    int outcome = -1;
    GridPtr grid;
    std::vector<double> density;     // unit quadrature mass, units 1/t
    std::vector<double> cumulative;  // trapezoid running mass, ends at 1
    double evidence = 0.0;           // P(n)
    double log_evidence = -std::numeric_limits<double>::infinity();
};

// Per-(grid, config) cache of log q and log(1-q); building one posterior per
// outcome against the same cache avoids re-evaluating the thermal model.
struct LikelihoodTable {
    GridPtr grid;
    ProbeConfig cfg;
    std::vector<double> log_q, log_1mq;
};

inline LikelihoodTable make_likelihood_table(GridPtr grid, const ProbeConfig& cfg) {
    cfg.validate();
    LikelihoodTable lik;
    lik.grid = grid;
    lik.cfg = cfg;
    lik.log_q.resize(grid->size());
    lik.log_1mq.resize(grid->size());
    for (std::size_t i = 0; i < grid->size(); ++i) {
        const double q = excitation_probability(grid->points[i], cfg);
        lik.log_q[i] = q > 0.0 ? std::log(q) : -std::numeric_limits<double>::infinity();
        lik.log_1mq[i] = std::log1p(-q);
    }
    return lik;
}

// Bayes update for outcome n; empty if the evidence underflows.
inline std::optional<Posterior> try_make_posterior(int n, const PriorDensity& prior,
                                                   const LikelihoodTable& lik) {
    const int N = lik.cfg.n_probes;
    if (n < 0 || n > N) throw std::out_of_range("outcome n out of [0, n_probes]");
    const auto& grid = *prior.grid;
    const std::size_t m = grid.size();

    std::vector<double> logd(m);
    const double logC = log_binomial_coefficient(N, n);
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
        if (prior.density[i] <= 0.0) {
            logd[i] = -std::numeric_limits<double>::infinity();
            continue;
        }
        double v = logC + std::log(prior.density[i]);
        if (n > 0) v += n * lik.log_q[i];
        if (n < N) v += (N - n) * lik.log_1mq[i];
        logd[i] = v;
        if (v > peak) peak = v;
    }
    if (std::isinf(peak)) return std::nullopt;

    Posterior post;
    post.outcome = n;
    post.grid = prior.grid;
    post.density.resize(m);
    for (std::size_t i = 0; i < m; ++i)
        post.density[i] = std::isinf(logd[i]) ? 0.0 : std::exp(logd[i] - peak);

    const double mass = integrate(grid, post.density);
    post.log_evidence = std::log(mass) + peak;
    if (post.log_evidence < std::log(evidence_floor)) return std::nullopt;
    post.evidence = std::exp(post.log_evidence);
    for (auto& d : post.density) d /= mass;
    detail::cumulative_trapezoid(grid.points, post.density, post.cumulative);
    return post;
}

inline Posterior make_posterior(int n, const PriorDensity& prior, const LikelihoodTable& lik) {
    auto post = try_make_posterior(n, prior, lik);
    if (!post)
        throw ImpossibleOutcomeError("outcome " + std::to_string(n) +
                                     " has evidence below the representable floor");
    return std::move(*post);
}

inline Posterior make_posterior(int n, const PriorDensity& prior, const ProbeConfig& cfg) {
    return make_posterior(n, prior, make_likelihood_table(prior.grid, cfg));
}

// Wrap an arbitrary nonnegative density tabulation as a normalized Posterior.
// Used for synthetic distributions in diagnostics and tests.
inline Posterior make_posterior_from_density(GridPtr grid, std::vector<double> values) {
    if (values.size() != grid->size()) throw std::invalid_argument("density length != grid size");
    Posterior post;
    post.grid = grid;
    post.density = std::move(values);
    const double mass = integrate(*grid, post.density);
    if (!(mass > 0.0)) throw std::invalid_argument("density has zero mass");
    for (auto& d : post.density) d /= mass;
    post.evidence = 1.0;
    post.log_evidence = 0.0;
    detail::cumulative_trapezoid(grid->points, post.density, post.cumulative);
    return post;
}

// theta with cumulative(theta) = p, linear interpolation inside grid cells.
inline double quantile(double p, const Posterior& post) {
    if (!(p > 0.0) || !(p < 1.0)) throw std::invalid_argument("quantile level must be in (0,1)");
    return detail::interp_quantile(post.grid->points, post.cumulative, p);
}

// Piecewise-linear CDF value at theta (the inverse of quantile()).
inline double cumulative_at(double theta, const Posterior& post) {
    const auto& t = post.grid->points;
    const auto& cum = post.cumulative;
    if (theta <= t.front()) return 0.0;
    if (theta >= t.back()) return cum.back();
    auto it = std::upper_bound(t.begin(), t.end(), theta);
    const std::size_t i = static_cast<std::size_t>(it - t.begin());
    const double f = (theta - t[i - 1]) / (t[i] - t[i - 1]);
    return cum[i - 1] + f * (cum[i] - cum[i - 1]);
}

// Quadrature of f(t) against the posterior. The grid excludes t = 0, so
// integrands like 1/t, 1/t^2 and ln t are finite everywhere.
template <class F>
double posterior_expectation(F&& f, const Posterior& post) {
    const auto& g = *post.grid;
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        acc += g.weights[i] * post.density[i] * f(g.points[i]);
    return acc;
}

}  // namespace qtherm
