#pragma once

// The six point estimators and their matched error measures, all functions of
// a single Posterior. Labels follow the cost functions they optimize:
//   md  mode                  (no error measure)
//   1   median                |theta - t|
//   1r  relative median       |theta/t - 1|
//   2   mean                  (theta - t)^2
//   2r  relative mean         (theta/t - 1)^2
//   2l  logarithmic mean      ln^2(theta/t)
// Error prefactors 4.12 and 3.29 match the two-sided 90% credible width of a
// narrow Gaussian posterior. The mean estimate and the (1)/(2) error measures
// depend on the grid's upper cutoff and are flagged as such.

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include "qtherm/posterior.hpp"

namespace qtherm {

enum class EstimatorKind { Mode, Median, RelativeMedian, Mean, RelativeMean, LogMean };

inline constexpr std::array<EstimatorKind, 6> all_estimators = {
    EstimatorKind::Mode,         EstimatorKind::Median, EstimatorKind::RelativeMedian,
    EstimatorKind::Mean,         EstimatorKind::RelativeMean, EstimatorKind::LogMean};

inline constexpr std::size_t kind_index(EstimatorKind k) { return static_cast<std::size_t>(k); }

inline std::string_view estimator_label(EstimatorKind k) {
    switch (k) {
        case EstimatorKind::Mode: return "md";
        case EstimatorKind::Median: return "1";
        case EstimatorKind::RelativeMedian: return "1r";
        case EstimatorKind::Mean: return "2";
        case EstimatorKind::RelativeMean: return "2r";
        case EstimatorKind::LogMean: return "2l";
    }
    return "?";
}

inline EstimatorKind estimator_from_label(std::string_view s) {
    for (auto k : all_estimators)
        if (estimator_label(k) == s) return k;
    throw std::invalid_argument("estimators: unknown label '" + std::string(s) + "'");
}

inline bool estimate_is_cutoff_sensitive(EstimatorKind k) { return k == EstimatorKind::Mean; }

inline bool error_is_cutoff_sensitive(EstimatorKind k) {
    return k == EstimatorKind::Mean || k == EstimatorKind::Median;
}

// Grid argmax; ties break to the smallest t. Optional 3-point parabolic
// refinement for sub-cell resolution.
inline double estimate_mode(const Posterior& post, bool parabolic_refine = false) {
    const auto& t = post.grid->points;
    std::size_t best = 0;
    for (std::size_t i = 1; i < post.density.size(); ++i)
        if (post.density[i] > post.density[best]) best = i;
    if (parabolic_refine && best > 0 && best + 1 < t.size()) {
        const double d0 = post.density[best - 1], d1 = post.density[best], d2 = post.density[best + 1];
        const double denom = d0 - 2.0 * d1 + d2;
        if (denom < 0.0) {
            const double shift = 0.5 * (d0 - d2) / denom;
            return t[best] + shift * 0.5 * (t[best + 1] - t[best - 1]);
        }
    }
    return t[best];
}

namespace detail {

// Median of the reweighted density d(t) w(t), via its trapezoid cumulative.
template <class W>
double weighted_median(const Posterior& post, W&& weight) {
    const auto& t = post.grid->points;
    std::vector<double> v(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) v[i] = post.density[i] * weight(t[i]);
    std::vector<double> cum;
    cumulative_trapezoid(t, v, cum);
    return interp_quantile(t, cum, 0.5 * cum.back());
}

}  // namespace detail

inline double estimate(EstimatorKind kind, const Posterior& post) {
    switch (kind) {
        case EstimatorKind::Mode:
            return estimate_mode(post);
        case EstimatorKind::Median:
            return quantile(0.5, post);
        case EstimatorKind::RelativeMedian:
            return detail::weighted_median(post, [](double t) { return 1.0 / t; });
        case EstimatorKind::Mean:
            return posterior_expectation([](double t) { return t; }, post);
        case EstimatorKind::RelativeMean: {
            const double i1 = posterior_expectation([](double t) { return 1.0 / t; }, post);
            const double i2 = posterior_expectation([](double t) { return 1.0 / (t * t); }, post);
            return i1 / i2;
        }
        case EstimatorKind::LogMean:
            return std::exp(posterior_expectation([](double t) { return std::log(t); }, post));
    }
    throw std::invalid_argument("estimators: bad kind");
}

// Posterior average of the estimator's own cost function at a given estimate.
inline double posterior_cost(EstimatorKind kind, const Posterior& post, double est) {
    switch (kind) {
        case EstimatorKind::Mode:
            throw std::invalid_argument("estimators: mode has no cost function");
        case EstimatorKind::Median:
            return posterior_expectation([est](double t) { return std::abs(est - t); }, post);
        case EstimatorKind::RelativeMedian:
            return posterior_expectation([est](double t) { return std::abs(est / t - 1.0); }, post);
        case EstimatorKind::Mean:
            return posterior_expectation([est](double t) { return (est - t) * (est - t); }, post);
        case EstimatorKind::RelativeMean:
            return posterior_expectation(
                [est](double t) { return (est / t - 1.0) * (est / t - 1.0); }, post);
        case EstimatorKind::LogMean: {
            const double le = std::log(est);
            return posterior_expectation(
                [le](double t) { const double d = le - std::log(t); return d * d; }, post);
        }
    }
    throw std::invalid_argument("estimators: bad kind");
}

// Map an averaged cost to the 90%-matched temperature error.
inline double error_from_cost(EstimatorKind kind, double est, double mean_cost) {
    switch (kind) {
        case EstimatorKind::Mode:
            throw std::invalid_argument("estimators: mode has no error measure");
        case EstimatorKind::Median: return 4.12 * mean_cost;
        case EstimatorKind::RelativeMedian: return 4.12 * est * mean_cost;
        case EstimatorKind::Mean: return 3.29 * std::sqrt(mean_cost);
        case EstimatorKind::RelativeMean: return 3.29 * est * std::sqrt(mean_cost);
        case EstimatorKind::LogMean: return 2.0 * est * std::sinh(0.5 * 3.29 * std::sqrt(mean_cost));
    }
    throw std::invalid_argument("estimators: bad kind");
}

inline double error(EstimatorKind kind, const Posterior& post, double est) {
    return error_from_cost(kind, est, posterior_cost(kind, post, est));
}

// (5%, 95%) posterior quantiles; the width is the 90% credible error, the same
// for every estimator.
inline std::pair<double, double> credible_interval_90(const Posterior& post) {
    return {quantile(0.05, post), quantile(0.95, post)};
}

struct EstimateReport {
    EstimatorKind kind = EstimatorKind::Median;
    double estimate = 0.0;
    double error = std::numeric_limits<double>::quiet_NaN();  // NaN for the mode
    double q05 = 0.0, q50 = 0.0, q95 = 0.0;
    bool cutoff_sensitive = false;
};

inline EstimateReport make_report(EstimatorKind kind, const Posterior& post) {
    EstimateReport rep;
    rep.kind = kind;
    rep.estimate = estimate(kind, post);
    if (kind != EstimatorKind::Mode) rep.error = error(kind, post, rep.estimate);
    rep.q05 = quantile(0.05, post);
    rep.q50 = quantile(0.5, post);
    rep.q95 = quantile(0.95, post);
    rep.cutoff_sensitive = estimate_is_cutoff_sensitive(kind) || error_is_cutoff_sensitive(kind);
    return rep;
}

}  // namespace qtherm
