#pragma once

// Discretized temperature support with trapezoid quadrature weights, plus the
// small interpolation helpers shared by posteriors and priors.

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

namespace qtherm {

struct TemperatureGrid {
    std::vector<double> points;   // strictly increasing, all > 0
    std::vector<double> weights;  // trapezoid weights; sum = t_max - t_min

    std::size_t size() const { return points.size(); }
    double t_min() const { return points.front(); }
    double t_max() const { return points.back(); }
};

using GridPtr = std::shared_ptr<const TemperatureGrid>;

namespace detail {

inline void assign_trapezoid_weights(TemperatureGrid& g) {
    const auto& t = g.points;
    const std::size_t n = t.size();
    g.weights.assign(n, 0.0);
    g.weights[0] = 0.5 * (t[1] - t[0]);
    for (std::size_t i = 1; i + 1 < n; ++i) g.weights[i] = 0.5 * (t[i + 1] - t[i - 1]);
    g.weights[n - 1] = 0.5 * (t[n - 1] - t[n - 2]);
}

// Running trapezoid integral of `values` along the grid points; out[0] = 0.
inline void cumulative_trapezoid(const std::vector<double>& t, const std::vector<double>& v,
                                 std::vector<double>& out) {
    out.resize(t.size());
    out[0] = 0.0;
    for (std::size_t i = 1; i < t.size(); ++i)
        out[i] = out[i - 1] + 0.5 * (v[i] + v[i - 1]) * (t[i] - t[i - 1]);
}

// Invert a piecewise-linear cumulative at level `target`.
inline double interp_quantile(const std::vector<double>& t, const std::vector<double>& cum,
                              double target) {
    auto it = std::lower_bound(cum.begin(), cum.end(), target);
    if (it == cum.begin()) return t.front();
    if (it == cum.end()) return t.back();
    const std::size_t i = static_cast<std::size_t>(it - cum.begin());
    const double c0 = cum[i - 1], c1 = cum[i];
    return t[i - 1] + (target - c0) / (c1 - c0) * (t[i] - t[i - 1]);
}

}  // namespace detail

inline GridPtr build_uniform_grid(double t_min, double t_max, double step) {
    if (!(t_min > 0.0) || !(t_max > t_min)) throw std::invalid_argument("grid range: need 0 < t_min < t_max");
    if (!(step > 0.0) || step >= t_max - t_min) throw std::invalid_argument("grid step: degenerate range");
    const auto n_cells = static_cast<std::size_t>(std::ceil((t_max - t_min) / step - 1e-9));
    auto g = std::make_shared<TemperatureGrid>();
    g->points.resize(n_cells + 1);
    for (std::size_t i = 0; i <= n_cells; ++i) g->points[i] = t_min + static_cast<double>(i) * step;
    g->points[n_cells] = t_max;
    detail::assign_trapezoid_weights(*g);
    return g;
}

inline GridPtr build_log_grid(double t_min, double t_max, std::size_t n_points) {
    if (!(t_min > 0.0) || !(t_max > t_min)) throw std::invalid_argument("grid range: need 0 < t_min < t_max");
    if (n_points < 2) throw std::invalid_argument("grid points: need at least 2");
    auto g = std::make_shared<TemperatureGrid>();
    g->points.resize(n_points);
    const double ratio = std::log(t_max / t_min) / static_cast<double>(n_points - 1);
    for (std::size_t i = 0; i < n_points; ++i)
        g->points[i] = t_min * std::exp(static_cast<double>(i) * ratio);
    g->points[0] = t_min;
    g->points[n_points - 1] = t_max;
    detail::assign_trapezoid_weights(*g);
    return g;
}

inline double integrate(const TemperatureGrid& g, const std::vector<double>& values) {
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) acc += g.weights[i] * values[i];
    return acc;
}

template <class F>
double integrate_fn(const TemperatureGrid& g, F&& f) {
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) acc += g.weights[i] * f(g.points[i]);
    return acc;
}

}  // namespace qtherm
