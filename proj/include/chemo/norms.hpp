#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace chemo {
namespace norms {

inline constexpr double infinite_q = std::numeric_limits<double>::infinity();

/// Compensated (Kahan) accumulator for long nonuniform sums.
class KahanSum {
public:
    void add(double x) {
        double y = x - comp_;
        double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double weighted_integral(const std::vector<double>& f, const std::vector<double>& w) {
    if (f.size() != w.size()) throw std::invalid_argument("weighted_integral: size mismatch");
    KahanSum s;
    for (std::size_t i = 0; i < f.size(); ++i) s.add(w[i] * f[i]);
    return s.value();
}

/**
 * Weighted L^q norm  ( sum_i w_i |u_i|^q )^(1/q)  for q in [1, inf),
 * or max_i |u_i| for q = infinity. Requires q >= 1.
 */
inline double lq_norm(const std::vector<double>& u, const std::vector<double>& w, double q) {
    if (u.size() != w.size()) throw std::invalid_argument("lq_norm: size mismatch");
    if (std::isinf(q)) {
        double m = 0.0;
        for (double x : u) m = std::max(m, std::abs(x));
        return m;
    }
    if (!(q >= 1.0)) throw std::invalid_argument("lq_norm: q must satisfy q >= 1");
    KahanSum s;
    if (q == 1.0) {
        for (std::size_t i = 0; i < u.size(); ++i) s.add(w[i] * std::abs(u[i]));
        return s.value();
    }
    if (q == 2.0) {
        for (std::size_t i = 0; i < u.size(); ++i) s.add(w[i] * u[i] * u[i]);
        return std::sqrt(s.value());
    }
    for (std::size_t i = 0; i < u.size(); ++i) s.add(w[i] * std::pow(std::abs(u[i]), q));
    return std::pow(s.value(), 1.0 / q);
}

struct InterpolationCheck {
    double theta = 0.0;  // interpolation exponent from 1/r = theta/s + (1-theta)/t
    double lhs = 0.0;    // ||u||_r
    double rhs = 0.0;    // ||u||_s^theta * ||u||_t^(1-theta)
    bool holds = false;
};

/**
 * Evaluates both sides of the L^p interpolation inequality
 *
 *   ||u||_r <= ||u||_s^theta * ||u||_t^(1-theta),   1/r = theta/s + (1-theta)/t,
 *
 * for exponents 1 <= s <= r <= t (t may be infinity). The degenerate case
 * s = r = t takes theta = 1. `holds` allows relative slack 1e-12.
 */
inline InterpolationCheck interpolation_check(const std::vector<double>& u,
                                              const std::vector<double>& w, double s, double r,
                                              double t) {
    if (!(s >= 1.0) || !(r >= s) || !(t >= r))
        throw std::invalid_argument("interpolation_check: need 1 <= s <= r <= t");
    InterpolationCheck out;
    if (s == t) {
        out.theta = 1.0;
    } else if (std::isinf(t)) {
        out.theta = s / r;  // limit of the defining identity as t -> infinity
    } else {
        out.theta = (1.0 / r - 1.0 / t) / (1.0 / s - 1.0 / t);
    }
    out.lhs = lq_norm(u, w, r);
    out.rhs = std::pow(lq_norm(u, w, s), out.theta) * std::pow(lq_norm(u, w, t), 1.0 - out.theta);
    out.holds = out.lhs <= out.rhs * (1.0 + 1e-12) + 1e-300;
    return out;
}

inline std::string detailed(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

struct QStar {
    bool defined = false;
    double value = 0.0;
    std::string diagnostic;
};

/**
 * Auxiliary exponent q* = n*q / (n*gamma - q), defined only for q < n*gamma.
 * For q >= n*gamma the formula degenerates (infinite or negative); the result
 * carries a diagnostic instead of a value.
 */
inline QStar qstar(int n, double gamma, double q) {
    if (n < 2) throw std::invalid_argument("qstar: n must be >= 2");
    if (!(gamma > 1.0)) throw std::invalid_argument("qstar: gamma must be > 1");
    if (!(q > 0.0)) throw std::invalid_argument("qstar: q must be positive");
    QStar out;
    const double denom = n * gamma - q;
    if (!(denom > 0.0)) {
        out.diagnostic = "q* undefined: requires q < n*gamma, got q = " + detailed(q) +
                         ", n*gamma = " + detailed(n * gamma);
        return out;
    }
    out.defined = true;
    out.value = n * q / denom;
    return out;
}

struct WeightIntegral {
    bool finite = false;
    double value = 0.0;  // only meaningful when finite
    double beta = 0.0;   // exponent alpha*(q+gamma)/(p-1-gamma)
    std::string diagnostic;
};

/**
 * The radial weight integral  int_0^R r^(1-beta) dr  with
 * beta = alpha*(q+gamma)/(p-1-gamma). Finite iff beta < 2, in which case it
 * equals R^(2-beta)/(2-beta); its finiteness is equivalent to the strict
 * upper bound on alpha (for alpha > 0 and p > gamma + 1).
 */
inline WeightIntegral weight_integral(double alpha, double q, double gamma, double p, double R) {
    if (!(p > gamma + 1.0))
        throw std::invalid_argument("weight_integral: requires p > gamma + 1");
    if (!(alpha > 0.0)) throw std::invalid_argument("weight_integral: requires alpha > 0");
    if (!(q > 0.0) || !(gamma > 0.0))
        throw std::invalid_argument("weight_integral: q and gamma must be positive");
    if (!(R > 0.0)) throw std::invalid_argument("weight_integral: R must be positive");
    WeightIntegral out;
    out.beta = alpha * (q + gamma) / (p - 1.0 - gamma);
    if (out.beta < 2.0) {
        out.finite = true;
        out.value = std::pow(R, 2.0 - out.beta) / (2.0 - out.beta);
    } else {
        out.diagnostic = "integral of r^(1-beta) diverges at r = 0: beta = " + detailed(out.beta) +
                         " >= 2";
    }
    return out;
}

}  // namespace norms
}  // namespace chemo
