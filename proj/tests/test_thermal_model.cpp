#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <vector>

#include "qtherm/grid.hpp"
#include "qtherm/thermal_model.hpp"

using namespace qtherm;
using Catch::Approx;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Independent central-difference oracle for dq/dt.
double dq_finite_difference(double t, const ProbeConfig& cfg) {
    const double h = 1e-6 * t;
    return (excitation_probability(t + h, cfg) - excitation_probability(t - h, cfg)) / (2.0 * h);
}

// Brute-force Fisher information: sum_n P(n|t) (d ln P(n|t) / dt)^2 with the
// log-likelihood vector differentiated numerically.
double fisher_brute_force(double t, const ProbeConfig& cfg) {
    const double h = 1e-5 * t;
    const auto p0 = likelihood_row(t, cfg);
    const auto pp = likelihood_row(t + h, cfg);
    const auto pm = likelihood_row(t - h, cfg);
    double acc = 0.0;
    for (std::size_t n = 0; n < p0.size(); ++n) {
        if (p0[n] <= 0.0) continue;
        const double dlogp = (std::log(pp[n]) - std::log(pm[n])) / (2.0 * h);
        acc += p0[n] * dlogp * dlogp;
    }
    return acc;
}

}  // namespace

TEST_CASE("excitation probability limits and anchors") {
    const auto eq = equilibrium_probes(200);

    SECTION("t = 0 gives a fully de-excited probe for any coupling time") {
        CHECK(excitation_probability(0.0, eq) == 0.0);
        CHECK(excitation_probability(0.0, partial_probes(200, 0.3)) == 0.0);
    }
    SECTION("Gibbs value at t = 1") {
        CHECK(excitation_probability(1.0, eq) == Approx(1.0 / (1.0 + std::exp(1.0))).epsilon(1e-14));
    }
    SECTION("zero coupling time never excites") {
        const auto idle = partial_probes(200, 0.0);
        for (double t : {0.1, 1.0, 42.0}) CHECK(excitation_probability(t, idle) == 0.0);
    }
    SECTION("high-temperature de-saturation asymptote") {
        const auto cfg = partial_probes(200, 0.01);
        const double t = 100.0;
        const double asym = (0.5 - 1.0 / (4.0 * t)) * (1.0 - std::exp(-2.0 * 0.01 * t));
        CHECK(excitation_probability(t, cfg) == Approx(asym).epsilon(0.01));
    }
    SECTION("t = inf saturates at 1/2") {
        CHECK(excitation_probability(kInf, eq) == 0.5);
        CHECK(excitation_probability(kInf, partial_probes(200, 0.01)) == 0.5);
    }
    SECTION("negative temperature is rejected") {
        CHECK_THROWS_AS(excitation_probability(-0.1, eq), std::domain_error);
    }
}

TEST_CASE("excitation probability derivative") {
    const auto eq = equilibrium_probes(200);

    SECTION("equilibrium closed form q(1-q)/t^2") {
        const double q = excitation_probability(1.0, eq);
        CHECK(excitation_probability_derivative(1.0, eq) == Approx(q * (1.0 - q)).epsilon(1e-14));
        CHECK(excitation_probability_derivative(1.0, eq) == Approx(0.196611933241).epsilon(1e-9));
    }
    SECTION("matches finite differences across configurations") {
        const std::vector<ProbeConfig> cfgs = {eq, partial_probes(10, 1.0), partial_probes(10, 0.01),
                                               partial_probes(10, 37.0)};
        for (const auto& cfg : cfgs) {
            for (double t = 0.05; t < 50.0; t *= 1.45) {
                const double exact = excitation_probability_derivative(t, cfg);
                const double fd = dq_finite_difference(t, cfg);
                CHECK(exact == Approx(fd).epsilon(1e-6));
            }
        }
    }
    SECTION("zero coupling time has zero slope") {
        CHECK(excitation_probability_derivative(3.0, partial_probes(5, 0.0)) == 0.0);
    }
    SECTION("t = 0 is a domain error") {
        CHECK_THROWS_AS(excitation_probability_derivative(0.0, eq), std::domain_error);
    }
}

TEST_CASE("Bernoulli-chain likelihood") {
    SECTION("t = 0 collapses onto the zero-excitation outcome") {
        const auto cfg = equilibrium_probes(5);
        CHECK(likelihood(0, 0.0, cfg) == 1.0);
        for (int n = 1; n <= 5; ++n) CHECK(likelihood(n, 0.0, cfg) == 0.0);
    }
    SECTION("fair-coin limit at t = inf") {
        const auto cfg = equilibrium_probes(200);
        for (int n : {0, 7, 100, 200}) {
            const double expected = std::exp(log_binomial_coefficient(200, n) - 200.0 * std::log(2.0));
            CHECK(likelihood(n, kInf, cfg) == Approx(expected).epsilon(1e-12));
        }
    }
    SECTION("direct binomial at q = 1/4") {
        const auto cfg = equilibrium_probes(2);
        const double t = 1.0 / std::log(3.0);  // q(t) = 1/4 at equilibrium
        CHECK(likelihood(0, t, cfg) == Approx(0.5625).epsilon(1e-12));
        CHECK(likelihood(1, t, cfg) == Approx(0.375).epsilon(1e-12));
        CHECK(likelihood(2, t, cfg) == Approx(0.0625).epsilon(1e-12));
    }
    SECTION("rows sum to one") {
        for (const auto& cfg : {equilibrium_probes(1), equilibrium_probes(200),
                                partial_probes(1000, 0.1), equilibrium_probes(5)}) {
            for (double t : {0.02, 0.3, 1.0, 7.0, 150.0}) {
                const auto row = likelihood_row(t, cfg);
                double s = 0.0;
                for (double p : row) s += p;
                CHECK(std::abs(s - 1.0) < 1e-12);
            }
        }
    }
    SECTION("out-of-range outcome") {
        const auto cfg = equilibrium_probes(3);
        CHECK_THROWS_AS(likelihood(4, 1.0, cfg), std::out_of_range);
        CHECK_THROWS_AS(likelihood(-1, 1.0, cfg), std::out_of_range);
    }
}

TEST_CASE("Fisher information") {
    SECTION("equilibrium closed form N q(1-q)/t^4") {
        const auto cfg = equilibrium_probes(200);
        for (double t : {0.1, 0.5, 1.0, 5.0, 40.0}) {
            const double q = excitation_probability(t, cfg);
            CHECK(fisher_information(t, cfg) ==
                  Approx(200.0 * q * (1.0 - q) / std::pow(t, 4)).epsilon(1e-12));
        }
    }
    SECTION("additive over independent probes") {
        for (double t : {0.3, 2.0}) {
            const double one = fisher_information(t, partial_probes(1, 0.7));
            CHECK(fisher_information(t, partial_probes(12, 0.7)) == Approx(12.0 * one).epsilon(1e-13));
        }
    }
    SECTION("matches the brute-force definition") {
        for (const auto& cfg : {equilibrium_probes(20), partial_probes(20, 0.5)}) {
            for (double t : {0.3, 1.0, 3.0}) {
                CHECK(fisher_information(t, cfg) == Approx(fisher_brute_force(t, cfg)).epsilon(1e-4));
            }
        }
    }
}

TEST_CASE("thermal model invariants on a fine grid") {
    const auto grid = build_log_grid(0.01, 200.0, 3000);
    const std::vector<double> taus = {0.05, 0.1, 1.0, 10.0};

    SECTION("q in [0, 1/2), strictly increasing, never above Gibbs") {
        const auto eq = equilibrium_probes(1);
        for (double tau : taus) {
            const auto cfg = partial_probes(1, tau);
            double prev = -1.0;
            for (double t : grid->points) {
                const double q = excitation_probability(t, cfg);
                REQUIRE(q >= 0.0);
                REQUIRE(q < 0.5);
                REQUIRE(q > prev);
                REQUIRE(q <= excitation_probability(t, eq) + 1e-15);
                prev = q;
            }
        }
    }
    SECTION("peak Fisher information is largest at equilibrium and ordered in coupling time") {
        const auto eq = equilibrium_probes(1);
        double peak_eq = 0.0;
        for (double t : grid->points) peak_eq = std::max(peak_eq, fisher_information(t, eq));
        double prev_peak = 0.0;
        for (double tau : taus) {  // ascending tau
            const auto cfg = partial_probes(1, tau);
            double peak = 0.0;
            for (double t : grid->points) peak = std::max(peak, fisher_information(t, cfg));
            REQUIRE(peak > prev_peak);
            REQUIRE(peak <= peak_eq);
            prev_peak = peak;
        }
    }
    SECTION("Fisher information is nonnegative everywhere") {
        for (double tau : {0.1, 1.0}) {
            const auto cfg = partial_probes(3, tau);
            for (double t : grid->points) REQUIRE(fisher_information(t, cfg) >= 0.0);
        }
    }
}

TEST_CASE("probe configuration validation") {
    CHECK_THROWS_AS(equilibrium_probes(0), std::invalid_argument);
    CHECK_THROWS_AS(partial_probes(5, -1.0), std::invalid_argument);
    ProbeConfig bad;
    bad.energy_scale = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
