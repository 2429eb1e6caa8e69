#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <stdexcept>

#include "chemo/oracles.hpp"
#include "chemo/rk45.hpp"
#include "chemo/tridiag.hpp"

using namespace chemo;
using namespace chemo::oracles;

namespace {
constexpr double pi = 3.14159265358979323846;
}

TEST_CASE("adaptive integrator reproduces closed-form solutions") {
    double y = integrate_rk45([](double, double v) { return -v; }, 0.0, 1.0, 1.0);
    CHECK(y == Catch::Approx(std::exp(-1.0)).margin(1e-9));

    double s = integrate_rk45([](double t, double) { return std::cos(t); }, 0.0, 0.0, 1.0);
    CHECK(s == Catch::Approx(std::sin(1.0)).margin(1e-9));

    // logistic growth y' = y(1-y), y(0) = 0.1
    double l = integrate_rk45([](double, double v) { return v * (1.0 - v); }, 0.0, 0.1, 3.0);
    const double exact = 1.0 / (1.0 + 9.0 * std::exp(-3.0));
    CHECK(l == Catch::Approx(exact).margin(1e-8));
}

TEST_CASE("comparison bound on a solvable linear witness") {
    // y' = 1 - y, y(0) = 2 has y = 1 + e^(-t): max at t = 0 equals the bound
    OdeWitness w{1.0, 1.0, 1.0, 2.0};
    OdeComparisonReport rep = ode_comparison(w);
    CHECK(rep.bound == Catch::Approx(2.0));
    CHECK(rep.max_y == Catch::Approx(2.0).margin(1e-7));
    CHECK(rep.t_of_max == 0.0);
    CHECK(rep.holds);
}

TEST_CASE("comparison bound at an equilibrium start") {
    // equilibrium (c2/c1)^(1/alpha) = 2 stays put
    OdeWitness w{2.0, 8.0, 2.0, 2.0};
    OdeComparisonReport rep = ode_comparison(w);
    CHECK(rep.bound == Catch::Approx(2.0));
    CHECK(rep.max_y <= rep.bound + 1e-6);
    CHECK(rep.holds);
}

TEST_CASE("comparison bound approached from below") {
    OdeWitness w{1.0, 3.0, 1.5, 0.0};
    OdeComparisonReport rep = ode_comparison(w);
    CHECK(rep.holds);
    CHECK(rep.max_y <= rep.bound + 1e-6);
    CHECK(rep.max_y == Catch::Approx(rep.bound).margin(1e-4));  // saturates at equilibrium
}

TEST_CASE("comparison bound over random witnesses") {
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> ulog(-2.0, 2.0);
    std::uniform_real_distribution<double> ua(1.0, 4.0);
    std::uniform_real_distribution<double> uy(0.0, 3.0);
    for (int trial = 0; trial < 100; ++trial) {
        OdeWitness w;
        w.c1 = std::pow(10.0, ulog(rng));
        w.c2 = std::pow(10.0, ulog(rng));
        w.alpha = ua(rng);
        w.y0 = uy(rng) * std::pow(w.c2 / w.c1, 1.0 / w.alpha);
        OdeComparisonReport rep = ode_comparison(w);
        CHECK(rep.holds);
    }
}

TEST_CASE("comparison witness validation") {
    CHECK_THROWS_AS(ode_comparison(OdeWitness{0.0, 1.0, 1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(ode_comparison(OdeWitness{1.0, -1.0, 1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(ode_comparison(OdeWitness{1.0, 1.0, 0.5, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(ode_comparison(OdeWitness{1.0, 1.0, 1.0, -0.1}), std::invalid_argument);
}

TEST_CASE("transform round-trip is exact to roundoff") {
    SemigroupProbe p = SemigroupProbe::interval(1.0, 64);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> w(p.size());
    for (auto& x : w) x = u(rng);
    std::vector<double> back = spectral::inverse_cos(spectral::forward_cos(w, p), p);
    for (std::size_t i = 0; i < w.size(); ++i) CHECK(back[i] == Catch::Approx(w[i]).margin(1e-13));
}

TEST_CASE("heat flow fixes constants and decays eigenfunctions in closed form") {
    SemigroupProbe p = SemigroupProbe::interval(1.3, 64);
    std::vector<double> c(p.size(), 2.0);
    std::vector<double> out = heat_apply(c, 0.7, p);
    for (double v : out) CHECK(v == Catch::Approx(2.0).margin(1e-13));

    for (int k = 1; k <= 5; ++k) {
        std::vector<double> w(p.size());
        for (int i = 0; i < p.nx; ++i) w[i] = p.cosx(k, i);
        const double t = 0.2;
        const double factor = std::exp(-(k * pi / p.Lx) * (k * pi / p.Lx) * t);
        std::vector<double> evolved = heat_apply(w, t, p);
        for (int i = 0; i < p.nx; ++i)
            CHECK(evolved[i] == Catch::Approx(factor * w[i]).margin(1e-10));
    }
}

TEST_CASE("heat flow satisfies the semigroup identity and conserves the mean") {
    SemigroupProbe p = SemigroupProbe::interval(1.0, 64);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> w(p.size());
    for (auto& x : w) x = u(rng);

    std::vector<double> two_step = heat_apply(heat_apply(w, 0.05, p), 0.3, p);
    std::vector<double> one_step = heat_apply(w, 0.35, p);
    for (std::size_t i = 0; i < w.size(); ++i)
        CHECK(two_step[i] == Catch::Approx(one_step[i]).margin(1e-12));

    double m0 = 0.0, m1 = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        m0 += w[i];
        m1 += one_step[i];
    }
    CHECK(m1 / p.nx == Catch::Approx(m0 / p.nx).margin(1e-12));
}

TEST_CASE("heat flow in two dimensions decays tensor eigenfunctions") {
    SemigroupProbe p = SemigroupProbe::rectangle(1.0, 0.8, 16, 12);
    const int k = 2, l = 1;
    std::vector<double> w(p.size());
    for (int i = 0; i < p.nx; ++i)
        for (int j = 0; j < p.ny; ++j)
            w[static_cast<std::size_t>(i) * p.ny + j] = p.cosx(k, i) * p.cosy(l, j);
    const double t = 0.15;
    const double lam = (k * pi / p.Lx) * (k * pi / p.Lx) + (l * pi / p.Ly) * (l * pi / p.Ly);
    std::vector<double> evolved = heat_apply(w, t, p);
    for (std::size_t i = 0; i < w.size(); ++i)
        CHECK(evolved[i] == Catch::Approx(std::exp(-lam * t) * w[i]).margin(1e-10));
}

TEST_CASE("heat flow agrees with an implicit finite-difference integration") {
    // Crank-Nicolson on the same interval, refined until its own error is
    // far below the comparison budget.
    SemigroupProbe p = SemigroupProbe::interval(1.0, 512);
    std::mt19937_64 rng(21);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> w(p.size(), 0.0);
    for (int k = 1; k <= 8; ++k) {
        const double a = 0.5 * gauss(rng) / ((1.0 + k) * (1.0 + k));
        for (int i = 0; i < p.nx; ++i) w[i] += a * p.cosx(k, i);
    }

    const double T = 0.1;
    const int steps = 5000;
    const double dt = T / steps;
    const int n = p.nx;
    const double h = p.Lx / n;
    const double r = 0.5 * dt / (h * h);

    std::vector<double> a(n), b(n), c(n), rhs(n), u = w;
    for (int i = 0; i < n; ++i) {
        const double left = (i > 0) ? 1.0 : 0.0;
        const double right = (i + 1 < n) ? 1.0 : 0.0;
        a[i] = -r * left;
        c[i] = -r * right;
        b[i] = 1.0 + r * (left + right);
    }
    std::vector<double> scratch;
    for (int s = 0; s < steps; ++s) {
        for (int i = 0; i < n; ++i) {
            const double left = (i > 0) ? u[i - 1] - u[i] : 0.0;
            const double right = (i + 1 < n) ? u[i + 1] - u[i] : 0.0;
            rhs[i] = u[i] + r * (left + right);
        }
        u = rhs;
        solve_tridiagonal(a, b, c, u, scratch);
    }

    std::vector<double> spectralv = heat_apply(w, T, p);
    double err = 0.0;
    for (int i = 0; i < n; ++i) err = std::max(err, std::abs(u[i] - spectralv[i]));
    CHECK(err < 1e-6);
}

TEST_CASE("heat flow argument validation") {
    SemigroupProbe p = SemigroupProbe::interval(1.0, 16);
    std::vector<double> w(p.size(), 1.0);
    CHECK_THROWS_AS(heat_apply(w, -0.1, p), std::invalid_argument);
    std::vector<double> short_w(8, 1.0);
    CHECK_THROWS_AS(heat_apply(short_w, 0.1, p), std::invalid_argument);
    CHECK_THROWS_AS(SemigroupProbe::interval(0.0, 16), std::invalid_argument);
    CHECK_THROWS_AS(SemigroupProbe::interval(1.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(SemigroupProbe::rectangle(1.0, 1.0, 16, 4), std::invalid_argument);
}

TEST_CASE("single-mode smoothing ratio is exactly one half at equal exponents") {
    SemigroupProbe p = SemigroupProbe::interval(1.0, 64);
    std::vector<double> w(p.size());
    for (int i = 0; i < p.nx; ++i) w[i] = p.cosx(1, i);
    // numerator decays with lambda_1 and the reference carries the same
    // factor; at p = q the algebraic prefactor is the constant 2
    for (double t : {0.01, 0.5, 3.0, 10.0}) {
        CHECK(estimate_ratio(EstimateKind::smoothing, w, t, 2.0, 2.0, p) ==
              Catch::Approx(0.5).margin(1e-9));
    }
}

TEST_CASE("estimate ratios stay finite and modest on random samples") {
    SemigroupProbe p = SemigroupProbe::interval(1.0, 64);
    std::mt19937_64 rng(2026);
    for (int s = 0; s < 10; ++s) {
        std::vector<double> w = sample_scalar(p, rng, true);
        for (double t : {1e-3, 0.1, 1.0}) {
            const double r1 = estimate_ratio(EstimateKind::smoothing, w, t, 4.0, 2.0, p);
            const double r2 = estimate_ratio(EstimateKind::gradient_smoothing, w, t, 2.0, 2.0, p);
            const double r3 = estimate_ratio(EstimateKind::gradient_contraction, w, t, 2.0, 2.0, p);
            CHECK(std::isfinite(r1));
            CHECK(std::isfinite(r2));
            CHECK(std::isfinite(r3));
            CHECK(r1 < 50.0);
            CHECK(r2 < 50.0);
            CHECK(r3 < 50.0);
        }
    }
}

TEST_CASE("estimate precondition violations are rejected") {
    SemigroupProbe p = SemigroupProbe::interval(1.0, 16);
    std::vector<double> biased(p.size(), 1.0);  // nonzero mean
    CHECK_THROWS_AS(estimate_ratio(EstimateKind::smoothing, biased, 0.5, 2.0, 2.0, p),
                    std::invalid_argument);

    std::vector<double> w(p.size());
    for (int i = 0; i < p.nx; ++i) w[i] = p.cosx(1, i);
    CHECK_THROWS_AS(estimate_ratio(EstimateKind::smoothing, w, 0.0, 2.0, 2.0, p),
                    std::invalid_argument);
    CHECK_THROWS_AS(estimate_ratio(EstimateKind::smoothing, w, 0.5, 2.0, 4.0, p),
                    std::invalid_argument);  // p < q
    CHECK_THROWS_AS(estimate_ratio(EstimateKind::gradient_contraction, w, 0.5, 1.5, 2.0, p),
                    std::invalid_argument);  // p < 2
    CHECK_THROWS_AS(
        estimate_ratio(EstimateKind::divergence_smoothing, w, 0.5, 2.0, 2.0, p),
        std::invalid_argument);  // vector kind through the scalar entry

    VectorField vf;
    vf.comp_x.assign(4, 1.0);
    CHECK_THROWS_AS(estimate_ratio_div(vf, 0.5, 2.0, 2.0, p), std::invalid_argument);
}

TEST_CASE("divergence ratio on a single sine mode matches the closed form") {
    SemigroupProbe p = SemigroupProbe::interval(1.0, 64);
    VectorField w;
    w.comp_x.assign(p.size(), 0.0);
    for (int i = 0; i < p.nx; ++i) w.comp_x[i] = p.sinx(1, i);
    // div w = (pi/L) cos(pi x/L): numerator (pi/L) e^(-lambda1 t) ||cos||_p,
    // denominator (1 + t^(-1/2)) e^(-lambda1 t) ||sin||_q
    const double t = 1.0;
    const double r = estimate_ratio_div(w, t, 2.0, 2.0, p);
    const double expected = pi / (1.0 + 1.0 / std::sqrt(t));
    CHECK(r == Catch::Approx(expected).epsilon(1e-9));
}

TEST_CASE("mean-zero samples have negligible mean") {
    SemigroupProbe p = SemigroupProbe::interval(1.0, 64);
    std::mt19937_64 rng(31);
    for (int s = 0; s < 20; ++s) {
        std::vector<double> w = sample_scalar(p, rng, true);
        double mean = 0.0;
        for (double x : w) mean += x;
        mean /= static_cast<double>(w.size());
        CHECK(std::abs(mean) <= 1e-13);
    }
}

TEST_CASE("probe verdicts are bounded for the supported kinds") {
    SemigroupProbe p = SemigroupProbe::interval(1.0, 64);
    EstimateProbeResult r1 =
        semigroup_estimate_probe(EstimateKind::smoothing, 4.0, 2.0, 100, p);
    CHECK(r1.bounded);
    CHECK(r1.c_hat > 0.0);
    CHECK(r1.c_hat < 100.0);
    CHECK(r1.c_hat_half <= r1.c_hat);

    EstimateProbeResult r2 =
        semigroup_estimate_probe(EstimateKind::gradient_contraction, 2.0, 2.0, 100, p);
    CHECK(r2.bounded);

    EstimateProbeResult r3 =
        semigroup_estimate_probe(EstimateKind::divergence_smoothing, 4.0, 2.0, 60, p);
    CHECK(r3.bounded);

    CHECK_THROWS_AS(semigroup_estimate_probe(EstimateKind::smoothing, 4.0, 2.0, 1, p),
                    std::invalid_argument);
}

TEST_CASE("a corrupted semigroup is caught by the probe") {
    SemigroupProbe p = SemigroupProbe::interval(1.0, 64);
    p.damping_scale = 0.5;  // slower decay than the eigenvalues claim
    // single mode k=1: ratio e^(-0.5 lambda1 t) / (2 e^(-lambda1 t)) grows in t
    std::vector<double> w(p.size());
    for (int i = 0; i < p.nx; ++i) w[i] = p.cosx(1, i);
    const double early = estimate_ratio(EstimateKind::smoothing, w, 0.01, 2.0, 2.0, p);
    const double late = estimate_ratio(EstimateKind::smoothing, w, 10.0, 2.0, 2.0, p);
    CHECK(late > 50.0 * early);
}
