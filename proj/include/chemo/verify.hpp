#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "chemo/grid.hpp"
#include "chemo/norms.hpp"
#include "chemo/oracles.hpp"

namespace chemo {
namespace verify {

struct CheckRow {
    std::string name;
    double measured = 0.0;  // worst observed defect or the estimated constant
    std::string detail;
    bool passed = false;
};

struct Suite {
    std::vector<CheckRow> rows;
    bool all_passed() const {
        for (const auto& r : rows)
            if (!r.passed) return false;
        return true;
    }
};

struct SuiteOptions {
    int samples = 500;          // probe sample count (halved internally for 2d)
    std::uint64_t seed = 2026;
    double damping_scale = 1.0; // != 1 deliberately breaks the semigroup rows
};

inline CheckRow check_ode_comparison(int witnesses, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> logc(-2.0, 2.0), aexp(1.0, 4.0), frac(0.0, 3.0);
    CheckRow row;
    row.name = "ode_comparison";
    double worst = 0.0;
    bool ok = true;
    for (int i = 0; i < witnesses; ++i) {
        oracles::OdeWitness w;
        w.c1 = std::pow(10.0, logc(rng));
        w.c2 = std::pow(10.0, logc(rng));
        w.alpha = aexp(rng);
        w.y0 = frac(rng) * std::pow(w.c2 / w.c1, 1.0 / w.alpha);
        auto rep = oracles::ode_comparison(w, 50.0);
        worst = std::max(worst, rep.max_y / rep.bound);
        ok = ok && rep.holds;
    }
    row.measured = worst;
    row.detail = "max y(t)/bound over " + std::to_string(witnesses) + " witnesses";
    row.passed = ok;
    return row;
}

inline CheckRow check_interpolation(int cases, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const RadialGrid g = RadialGrid::make(2, 1.3, 64);
    std::uniform_real_distribution<double> val(-2.0, 2.0), expo(1.0, 6.0), coin(0.0, 1.0);
    CheckRow row;
    row.name = "interpolation_inequality";
    double worst = 0.0;
    bool ok = true;
    for (int c = 0; c < cases; ++c) {
        std::vector<double> u(g.cells);
        for (auto& x : u) x = val(rng);
        double s = expo(rng), t = expo(rng);
        if (s > t) std::swap(s, t);
        if (coin(rng) < 0.2) t = norms::infinite_q;
        const double lam = coin(rng);
        double r;
        if (s == t) {
            r = s;
        } else if (std::isinf(t)) {
            r = s / (0.2 + 0.8 * lam);  // theta in (0.2, 1]
        } else {
            r = 1.0 / (lam / s + (1.0 - lam) / t);
            r = std::min(std::max(r, s), t);
        }
        auto chk = norms::interpolation_check(u, g.weights, s, r, t);
        if (chk.rhs > 0.0) worst = std::max(worst, chk.lhs / chk.rhs);
        ok = ok && chk.holds;
    }
    row.measured = worst;
    row.detail = "max lhs/rhs over " + std::to_string(cases) + " random fields";
    row.passed = ok;
    return row;
}

inline CheckRow check_semigroup_identities(const SuiteOptions& opt) {
    CheckRow row;
    row.name = "semigroup_identities";
    oracles::SemigroupProbe probe = oracles::SemigroupProbe::interval(1.0, 64);
    probe.damping_scale = opt.damping_scale;
    std::mt19937_64 rng(opt.seed + 17);
    double worst = 0.0;
    bool ok = true;
    const double pi = 3.14159265358979323846;
    for (int rep = 0; rep < 5; ++rep) {
        std::vector<double> w = oracles::sample_scalar(probe, rng, false, 2.0);
        double wmax = 0.0, wmean = 0.0;
        for (double x : w) {
            wmax = std::max(wmax, std::abs(x));
            wmean += x;
        }
        wmean /= static_cast<double>(w.size());
        const double s = 0.05, t = 0.3;
        std::vector<double> two = oracles::heat_apply(oracles::heat_apply(w, s, probe), t, probe);
        std::vector<double> one = oracles::heat_apply(w, s + t, probe);
        double defect = 0.0, mean_after = 0.0, contraction = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            defect = std::max(defect, std::abs(two[i] - one[i]));
            mean_after += one[i];
            contraction = std::max(contraction, std::abs(one[i]));
        }
        mean_after /= static_cast<double>(w.size());
        // The sup norm only sees cell centers, so the true (continuous) sup of
        // the band-limited field can exceed the sampled one; bound the gap by
        // (h/2) * sup|w'| computed from the cosine coefficients.
        std::vector<double> coef = oracles::spectral::forward_cos(w, probe);
        double grad_sum = 0.0;
        for (int k = 1; k < probe.nx; ++k) grad_sum += std::abs(coef[k]) * k * pi / probe.Lx;
        const double overshoot = 0.5 * (probe.Lx / probe.nx) * grad_sum;
        const double d1 = defect / std::max(1.0, wmax);
        const double d2 = std::abs(mean_after - wmean) / std::max(1.0, std::abs(wmean));
        const double d3 = std::max(0.0, contraction - wmax - overshoot) / std::max(1.0, wmax);
        worst = std::max({worst, d1, d2, d3});
        ok = ok && d1 <= 1e-12 && d2 <= 1e-12 && d3 <= 1e-12;
    }
    // closed-form evolution of an eigenfunction, against independent values
    for (int k = 1; k <= 3; ++k) {
        std::vector<double> w(probe.size());
        for (int i = 0; i < probe.nx; ++i) w[i] = std::cos(k * pi * probe.x_center(i) / probe.Lx);
        const double t = 0.2;
        std::vector<double> evolved = oracles::heat_apply(w, t, probe);
        const double lambda = (k * pi / probe.Lx) * (k * pi / probe.Lx);
        double defect = 0.0;
        for (int i = 0; i < probe.nx; ++i)
            defect = std::max(defect, std::abs(evolved[i] - std::exp(-lambda * t) * w[i]));
        worst = std::max(worst, defect);
        ok = ok && defect <= 1e-10;
    }
    row.measured = worst;
    row.detail = "max defect: composition, mean, sup bound, eigenfunction decay";
    row.passed = ok;
    return row;
}

inline CheckRow check_probe(const std::string& name, oracles::EstimateKind kind, double p,
                            double q, int samples, const oracles::SemigroupProbe& probe,
                            std::uint64_t seed) {
    CheckRow row;
    row.name = name;
    auto res = oracles::semigroup_estimate_probe(kind, p, q, samples, probe, seed);
    row.measured = res.c_hat;
    char buf[96];
    std::snprintf(buf, sizeof buf, "growth %.3f over %d samples", res.growth, res.samples);
    row.detail = buf;
    row.passed = res.bounded;
    return row;
}

/// Builds and runs the whole verification suite.
inline Suite run_suite(const SuiteOptions& opt) {
    Suite suite;
    suite.rows.push_back(check_ode_comparison(std::max(100, opt.samples / 5), opt.seed));
    suite.rows.push_back(check_interpolation(std::max(1000, opt.samples * 2), opt.seed + 1));
    suite.rows.push_back(check_semigroup_identities(opt));

    oracles::SemigroupProbe line = oracles::SemigroupProbe::interval(1.0, 64);
    line.damping_scale = opt.damping_scale;
    using EK = oracles::EstimateKind;
    suite.rows.push_back(
        check_probe("smoothing_Lq_to_Lp", EK::smoothing, 4.0, 2.0, opt.samples, line, opt.seed + 2));
    suite.rows.push_back(check_probe("gradient_smoothing", EK::gradient_smoothing, 2.0, 2.0,
                                     opt.samples, line, opt.seed + 3));
    suite.rows.push_back(check_probe("gradient_contraction", EK::gradient_contraction, 2.0, 2.0,
                                     opt.samples, line, opt.seed + 4));
    suite.rows.push_back(check_probe("divergence_smoothing", EK::divergence_smoothing, 4.0, 2.0,
                                     opt.samples, line, opt.seed + 5));

    oracles::SemigroupProbe rect = oracles::SemigroupProbe::rectangle(1.0, 0.8, 16, 12);
    rect.damping_scale = opt.damping_scale;
    const int samples_2d = std::max(2, opt.samples / 4);
    suite.rows.push_back(check_probe("smoothing_Lq_to_Lp_2d", EK::smoothing, 4.0, 2.0, samples_2d,
                                     rect, opt.seed + 6));
    suite.rows.push_back(check_probe("gradient_smoothing_2d", EK::gradient_smoothing, 2.0, 2.0,
                                     samples_2d, rect, opt.seed + 7));
    suite.rows.push_back(check_probe("gradient_contraction_2d", EK::gradient_contraction, 2.0, 2.0,
                                     samples_2d, rect, opt.seed + 8));
    suite.rows.push_back(check_probe("divergence_smoothing_2d", EK::divergence_smoothing, 4.0, 2.0,
                                     samples_2d, rect, opt.seed + 9));
    return suite;
}

}  // namespace verify
}  // namespace chemo
