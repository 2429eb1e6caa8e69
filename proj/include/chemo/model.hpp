#pragma once

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "chemo/expr.hpp"
#include "chemo/grid.hpp"

namespace chemo {

/// Exponent tuple of the model. alpha is the decay rate of the lower bound
/// on the degradation coefficient; the rest shape the nonlinearities.
struct ExponentSet {
    int n = 2;
    double gamma = 1.5;
    double p = 4.0;
    double q = 2.0;
    double alpha = 0.5;
};

/// The admissible range of alpha is the open interval (0, alpha_bound).
inline double alpha_bound(const ExponentSet& e) {
    return 2.0 * (e.p - 1.0 - e.gamma) / (e.q + e.gamma);
}

struct AdmissibilityReport {
    bool accepted = false;
    std::vector<std::string> violations;  // one human-readable line per failed hypothesis
    double alpha_bound = 0.0;
};

namespace detail {

inline void require_finite(const char* name, double v) {
    if (!std::isfinite(v))
        throw std::invalid_argument(std::string("ExponentSet: ") + name + " must be finite");
}

inline std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

}  // namespace detail

/**
 * Checks the strict hypotheses on (n, gamma, p, q, alpha):
 *
 *   n >= 2,  gamma > 1,  p > gamma + 1,  q > n*gamma/2,
 *   0 < alpha < 2(p - 1 - gamma)/(q + gamma).
 *
 * Boundary cases are rejected. Every failed inequality is reported; the
 * alpha window is reported whenever p > gamma + 1 makes it meaningful.
 * Non-finite inputs throw std::invalid_argument naming the field.
 */
inline AdmissibilityReport validate_exponents(const ExponentSet& e) {
    detail::require_finite("gamma", e.gamma);
    detail::require_finite("p", e.p);
    detail::require_finite("q", e.q);
    detail::require_finite("alpha", e.alpha);

    AdmissibilityReport rep;
    if (e.n < 2)
        rep.violations.push_back("n >= 2 fails: n = " + std::to_string(e.n));
    if (!(e.gamma > 1.0))
        rep.violations.push_back("gamma > 1 fails: gamma = " + detail::fmt(e.gamma));
    if (!(e.p > e.gamma + 1.0))
        rep.violations.push_back("p > gamma + 1 fails: p = " + detail::fmt(e.p) +
                                 ", gamma + 1 = " + detail::fmt(e.gamma + 1.0));
    if (!(e.q > 0.5 * e.n * e.gamma))
        rep.violations.push_back("q > n*gamma/2 fails: q = " + detail::fmt(e.q) +
                                 ", n*gamma/2 = " + detail::fmt(0.5 * e.n * e.gamma));
    rep.alpha_bound = alpha_bound(e);
    if (!(e.alpha > 0.0))
        rep.violations.push_back("alpha > 0 fails: alpha = " + detail::fmt(e.alpha));
    if (!(e.alpha < rep.alpha_bound))
        rep.violations.push_back("alpha < 2(p-1-gamma)/(q+gamma) fails: alpha = " +
                                 detail::fmt(e.alpha) + ", bound = " + detail::fmt(rep.alpha_bound));
    rep.accepted = rep.violations.empty();
    return rep;
}

/// Radial coefficient functions with the structural lower-bound parameters.
struct CoefficientSpec {
    RadialFn kappa = RadialFn::constant(0.0);  // growth rate kappa(s) >= 0
    RadialFn mu = RadialFn::constant(1.0);     // degradation rate mu(s)
    double mu1 = 1.0;                          // mu(s) >= mu1 * s^alpha must hold on [0, R]
    double R = 1.0;
};

/**
 * Coefficients sampled at the radial cell centers, together with the result
 * of checking the pointwise structure conditions there:
 *
 *   kappa(r_i) >= 0,  mu(r_i) >= 0        (negative_nodes)
 *   mu(r_i)  >= mu1 * r_i^alpha           (lower_bound_violations)
 *
 * Equality is accepted up to a relative slack of 1e-12 so that
 * mu(s) = mu1 * s^alpha itself always passes.
 */
struct CoefficientField {
    std::vector<double> kappa;
    std::vector<double> mu;
    double mu1 = 1.0;
    double alpha = 0.5;
    std::vector<int> negative_nodes;
    std::vector<int> lower_bound_violations;

    bool valid() const { return negative_nodes.empty() && lower_bound_violations.empty(); }

    double kappa_sup() const {
        double m = 0.0;
        for (double k : kappa) m = std::max(m, k);
        return m;
    }

    void require_valid() const {
        if (valid()) return;
        std::string msg = "coefficient field invalid:";
        if (!negative_nodes.empty()) {
            msg += " negative values at nodes {";
            for (std::size_t i = 0; i < negative_nodes.size() && i < 8; ++i)
                msg += (i ? "," : "") + std::to_string(negative_nodes[i]);
            if (negative_nodes.size() > 8) msg += ",...";
            msg += "}";
        }
        if (!lower_bound_violations.empty()) {
            msg += " mu below mu1*s^alpha at nodes {";
            for (std::size_t i = 0; i < lower_bound_violations.size() && i < 8; ++i)
                msg += (i ? "," : "") + std::to_string(lower_bound_violations[i]);
            if (lower_bound_violations.size() > 8) msg += ",...";
            msg += "}";
        }
        throw std::domain_error(msg);
    }
};

inline CoefficientField sample_coefficients(const CoefficientSpec& spec,
                                            const std::vector<double>& nodes,
                                            double alpha) {
    if (!(spec.mu1 > 0.0)) throw std::invalid_argument("CoefficientSpec: mu1 must be positive");
    CoefficientField f;
    f.mu1 = spec.mu1;
    f.alpha = alpha;
    f.kappa.resize(nodes.size());
    f.mu.resize(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double r = nodes[i];
        f.kappa[i] = spec.kappa(r);
        f.mu[i] = spec.mu(r);
        if (f.kappa[i] < 0.0 || f.mu[i] < 0.0) f.negative_nodes.push_back(static_cast<int>(i));
        const double bound = spec.mu1 * std::pow(r, alpha);
        if (f.mu[i] < bound - 1e-12 * std::max(1.0, bound))
            f.lower_bound_violations.push_back(static_cast<int>(i));
    }
    return f;
}

inline CoefficientField sample_coefficients(const CoefficientSpec& spec, const RadialGrid& g,
                                            double alpha) {
    return sample_coefficients(spec, g.nodes, alpha);
}

inline CoefficientField sample_coefficients(const CoefficientSpec& spec, const PolarGrid& g,
                                            double alpha) {
    return sample_coefficients(spec, g.nodes_r, alpha);
}

/**
 * A-priori mass bound
 *
 *   K = max( integral of u0,  sup(kappa)/mu1 * |Omega| )
 *
 * computed with the grid quadrature weights. u0 must be nonnegative.
 */
inline double mass_bound(const std::vector<double>& u0, const std::vector<double>& weights,
                         const CoefficientField& coeff) {
    if (u0.size() != weights.size())
        throw std::invalid_argument("mass_bound: field/weight size mismatch");
    double mass = 0.0, comp = 0.0, volume = 0.0, vcomp = 0.0;
    for (std::size_t i = 0; i < u0.size(); ++i) {
        if (u0[i] < 0.0)
            throw std::domain_error("mass_bound: negative initial density at node " +
                                    std::to_string(i));
        double y = weights[i] * u0[i] - comp;
        double t = mass + y;
        comp = (t - mass) - y;
        mass = t;
        double yv = weights[i] - vcomp;
        double tv = volume + yv;
        vcomp = (tv - volume) - yv;
        volume = tv;
    }
    return std::max(mass, coeff.kappa_sup() / coeff.mu1 * volume);
}

}  // namespace chemo
