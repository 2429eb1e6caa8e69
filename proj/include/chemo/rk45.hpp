#pragma once

#include <cmath>
#include <stdexcept>

namespace chemo {

struct Rk45Options {
    double rtol = 1e-10;
    double atol = 1e-12;
    double h0 = 1e-3;
    double hmin = 1e-14;
    long max_steps = 2000000;
};

/**
 * Adaptive Dormand-Prince 5(4) for a scalar ODE y' = f(t, y). Used as an
 * independent reference for time integration checks; accuracy comes from the
 * embedded error estimate, not from matching the production stepper.
 * Returns y(t1). Throws std::runtime_error if the step size collapses.
 */
template <class F>
double integrate_rk45(F f, double t0, double y0, double t1, const Rk45Options& opt = {}) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    if (t1 < t0) throw std::invalid_argument("integrate_rk45: t1 must be >= t0");
    double t = t0, y = y0;
    double h = std::min(opt.h0, t1 - t0);
    if (h <= 0.0) return y;
    double k1 = f(t, y);
    for (long step = 0; step < opt.max_steps; ++step) {
        if (t1 - t <= 1e-14 * (std::abs(t1) + 1.0)) return y;
        h = std::min(h, t1 - t);
        const double k2 = f(t + c2 * h, y + h * a21 * k1);
        const double k3 = f(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
        const double k4 = f(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
        const double k5 = f(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const double k6 =
            f(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const double ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const double k7 = f(t + h, ynew);
        const double err =
            h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const double scale =
            opt.atol + opt.rtol * std::max(std::abs(y), std::abs(ynew));
        const double ratio = std::abs(err) / scale;
        if (ratio <= 1.0) {
            t += h;
            y = ynew;
            k1 = k7;  // first-same-as-last
        }
        const double grow = (ratio > 0.0) ? 0.9 * std::pow(ratio, -0.2) : 5.0;
        h *= std::min(5.0, std::max(0.2, grow));
        if (h < opt.hmin)
            throw std::runtime_error("integrate_rk45: step size collapsed");
    }
    throw std::runtime_error("integrate_rk45: step budget exhausted");
}

}  // namespace chemo
