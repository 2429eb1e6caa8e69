#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "chemo/config.hpp"
#include "chemo/elliptic.hpp"
#include "chemo/grid.hpp"
#include "chemo/model.hpp"
#include "chemo/norms.hpp"
#include "chemo/tridiag.hpp"

namespace chemo {

/// Raised when a run is requested for a parameter set outside the admissible
/// region (and force_inadmissible is not set). Carries the full report.
class InadmissibleError : public std::runtime_error {
public:
    InadmissibleError(AdmissibilityReport rep, std::string what)
        : std::runtime_error(std::move(what)), report_(std::move(rep)) {}
    const AdmissibilityReport& report() const { return report_; }

private:
    AdmissibilityReport report_;
};

struct SimState {
    double t = 0.0;
    double dt_last = 0.0;
    std::vector<double> u;
    SignalField v;
    long steps_accepted = 0;
    long steps_rejected = 0;
};

enum class BlowupReason { linf_threshold, stiffness_collapse };

inline const char* to_string(BlowupReason r) {
    return r == BlowupReason::linf_threshold ? "linf_threshold" : "stiffness_collapse";
}

struct BlowupEvent {
    double t = 0.0;
    BlowupReason reason = BlowupReason::linf_threshold;
};

struct TrajectorySample {
    double t = 0.0;
    double mass = 0.0;
    double lq = 0.0;
    double linf = 0.0;
    double dt = 0.0;
    double min_u = 0.0;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    std::optional<BlowupEvent> blowup;
    double terminated_at = 0.0;
    long steps_accepted = 0;
    long steps_rejected = 0;
    double max_mass = 0.0;
    double max_lq = 0.0;
    double max_linf = 0.0;
};

struct StepOutcome {
    bool accepted = false;
    std::string reason;  // empty when accepted
};

/**
 * Time integrator for the density/signal system on a radial or polar grid.
 *
 * One attempted step at stepsize dt runs, in order:
 *   1. explicit upwind transport along the signal gradient (rejected if any
 *      cell average would go negative),
 *   2. a Patankar-weighted reaction update u(1 + dt*kappa)/(1 + dt*mu*u^(p-1)),
 *      which cannot change sign,
 *   3. backward-Euler diffusion via sign-stable tridiagonal elimination,
 *   4. a fresh signal solve from the updated density.
 * Rejected or failed attempts leave the state untouched; the adaptive driver
 * halves the stepsize and retries, declaring stiffness collapse below dt_min.
 * Accepted states therefore satisfy u >= 0 exactly, by construction.
 */
class Simulator {
public:
    explicit Simulator(const RunConfig& cfg) : cfg_(cfg) {
        cfg_.validate();
        admissibility_ = validate_exponents(cfg_.exponents);
        if (cfg_.mode == GridMode::radial) {
            rgrid_ = RadialGrid::make(cfg_.exponents.n, cfg_.R, cfg_.cells);
            coeff_ = sample_coefficients(cfg_.coefficient_spec(), rgrid_, cfg_.exponents.alpha);
            state_.u = sample_u0(cfg_, rgrid_);
        } else {
            pgrid_ = PolarGrid::make(cfg_.R, cfg_.cells, cfg_.cells_theta);
            coeff_ = sample_coefficients(cfg_.coefficient_spec(), pgrid_, cfg_.exponents.alpha);
            state_.u = sample_u0(cfg_, pgrid_);
        }
        if (!cfg_.force_inadmissible) {
            if (!admissibility_.accepted) {
                std::string what = "inadmissible exponents:";
                for (const auto& v : admissibility_.violations) what += " [" + v + "]";
                throw InadmissibleError(admissibility_, what);
            }
            coeff_.require_valid();
        }
        kappa_max_ = coeff_.kappa_sup();
        K_ = mass_bound(state_.u, weights(), coeff_);
        linf0_ = linf();
        resolve_signal();
    }

    const RunConfig& config() const { return cfg_; }
    const AdmissibilityReport& admissibility() const { return admissibility_; }
    const CoefficientField& coefficients() const { return coeff_; }
    double mass_bound_K() const { return K_; }
    SimState& state() { return state_; }
    const SimState& state() const { return state_; }

    const std::vector<double>& weights() const {
        return cfg_.mode == GridMode::radial ? rgrid_.weights : pgrid_.weights;
    }
    const RadialGrid& radial_grid() const {
        if (cfg_.mode != GridMode::radial)
            throw std::logic_error("Simulator: not running on a radial grid");
        return rgrid_;
    }
    const PolarGrid& polar_grid() const {
        if (cfg_.mode != GridMode::polar)
            throw std::logic_error("Simulator: not running on a polar grid");
        return pgrid_;
    }

    double mass() const { return norms::weighted_integral(state_.u, weights()); }
    double lq(double q) const { return norms::lq_norm(state_.u, weights(), q); }
    double linf() const { return norms::lq_norm(state_.u, weights(), norms::infinite_q); }
    double min_u() const {
        double m = std::numeric_limits<double>::infinity();
        for (double x : state_.u) m = std::min(m, x);
        return m;
    }

    /// Largest stepsize the explicit substeps tolerate in the current state.
    double stable_dt() const {
        double rate = 0.0;
        if (cfg_.mode == GridMode::radial) {
            const double h = rgrid_.dr();
            std::vector<double> grad = signal_gradient(state_.v, rgrid_);
            for (double w : grad) rate = std::max(rate, std::abs(w) / h);
        } else {
            const double h = pgrid_.dr(), dth = pgrid_.dtheta();
            PolarGradient grad = signal_gradient(state_.v, pgrid_);
            for (double w : grad.radial) rate = std::max(rate, std::abs(w) / h);
            for (int i = 0; i < pgrid_.cells_r; ++i)
                for (int j = 0; j < pgrid_.cells_theta; ++j)
                    rate = std::max(rate, std::abs(grad.angular[pgrid_.index(i, j)]) /
                                              (pgrid_.nodes_r[i] * dth));
        }
        double dt = cfg_.dt_max;
        if (rate > 0.0) dt = std::min(dt, 0.4 / rate);
        if (kappa_max_ > 0.0) dt = std::min(dt, 0.5 / kappa_max_);
        return dt;
    }

    StepOutcome step(double dt) {
        if (!(dt > 0.0)) throw std::invalid_argument("Simulator::step: dt must be positive");
        return cfg_.mode == GridMode::radial ? step_radial(dt) : step_polar(dt);
    }

    std::optional<BlowupReason> detect_blowup() const {
        if (linf() > cfg_.blowup_factor * std::max(1.0, linf0_))
            return BlowupReason::linf_threshold;
        return std::nullopt;
    }

    /// Adaptive run to t_end with sampling and blow-up monitoring.
    Trajectory run() {
        Trajectory tr;
        auto record = [&](double dt_used) {
            TrajectorySample s;
            s.t = state_.t;
            s.mass = mass();
            s.lq = lq(cfg_.exponents.q);
            s.linf = linf();
            s.dt = dt_used;
            s.min_u = min_u();
            tr.samples.push_back(s);
            tr.max_mass = std::max(tr.max_mass, s.mass);
            tr.max_lq = std::max(tr.max_lq, s.lq);
            tr.max_linf = std::max(tr.max_linf, s.linf);
        };
        record(0.0);
        double policy_dt = cfg_.dt_init;
        int clean = 0;
        double next_sample = cfg_.sample_interval;
        const long step_budget = 5000000;
        bool sampled_here = true;
        while (state_.t < cfg_.t_end - 1e-12) {
            if (state_.steps_accepted + state_.steps_rejected > step_budget)
                throw std::runtime_error("Simulator::run: step budget exhausted");
            const double dt_stab = std::min(policy_dt, stable_dt());
            if (dt_stab < cfg_.dt_min) {
                tr.blowup = BlowupEvent{state_.t, BlowupReason::stiffness_collapse};
                break;
            }
            const double dt_use = std::min(dt_stab, cfg_.t_end - state_.t);
            StepOutcome out = step(dt_use);
            if (!out.accepted) {
                ++state_.steps_rejected;
                policy_dt = 0.5 * dt_stab;
                clean = 0;
                continue;
            }
            sampled_here = false;
            policy_dt = std::max(policy_dt, dt_stab);
            if (++clean >= 20) {
                policy_dt = std::min(2.0 * dt_stab, cfg_.dt_max);
                clean = 0;
            }
            if (auto why = detect_blowup()) {
                record(dt_use);
                sampled_here = true;
                tr.blowup = BlowupEvent{state_.t, *why};
                break;
            }
            if (state_.t >= next_sample - 1e-12) {
                record(dt_use);
                sampled_here = true;
                while (next_sample <= state_.t + 1e-12) next_sample += cfg_.sample_interval;
            }
        }
        if (!sampled_here) record(state_.dt_last);
        tr.terminated_at = state_.t;
        tr.steps_accepted = state_.steps_accepted;
        tr.steps_rejected = state_.steps_rejected;
        return tr;
    }

private:
    RunConfig cfg_;
    AdmissibilityReport admissibility_;
    RadialGrid rgrid_;
    PolarGrid pgrid_;
    CoefficientField coeff_;
    SimState state_;
    double K_ = 0.0;
    double linf0_ = 0.0;
    double kappa_max_ = 0.0;
    // scratch buffers reused across steps
    std::vector<double> buf_u_, buf_rhs_, sub_, diag_, sup_, scratch_;

    void resolve_signal() {
        if (cfg_.mode == GridMode::radial)
            state_.v = solve_signal(state_.u, rgrid_, cfg_.exponents.gamma, cfg_.solver_tol);
        else
            state_.v = solve_signal(state_.u, pgrid_, cfg_.exponents.gamma, cfg_.solver_tol,
                                    50000, &state_.v.v);
    }

    StepOutcome step_radial(double dt) {
        const int M = rgrid_.cells;
        const int n = rgrid_.dim;
        const double h = rgrid_.dr();
        const double pm1 = cfg_.exponents.p - 1.0;
        std::vector<double> grad = signal_gradient(state_.v, rgrid_);

        buf_u_ = state_.u;
        // face areas / cell volumes without the common sphere-area factor
        auto area = [&](int i) { return std::pow(rgrid_.faces[i], n - 1); };
        auto vol = [&](int i) {
            return (std::pow(rgrid_.faces[i + 1], n) - std::pow(rgrid_.faces[i], n)) / n;
        };
        // 1. upwind transport along grad v
        double prev_flux = 0.0;  // face 0 carries no area
        for (int i = 0; i < M; ++i) {
            double next_flux = 0.0;
            if (i + 1 < M) {
                const double w = grad[i + 1];
                const double up = (w > 0.0) ? state_.u[i] : state_.u[i + 1];
                next_flux = area(i + 1) * w * up;
            }
            buf_u_[i] = state_.u[i] - dt * (next_flux - prev_flux) / vol(i);
            prev_flux = next_flux;
        }
        for (int i = 0; i < M; ++i)
            if (buf_u_[i] < 0.0) return {false, "positivity loss in transport substep"};
        // 2. Patankar reaction
        for (int i = 0; i < M; ++i)
            buf_u_[i] *= (1.0 + dt * coeff_.kappa[i]) /
                         (1.0 + dt * coeff_.mu[i] * std::pow(buf_u_[i], pm1));
        // 3. implicit diffusion
        sub_.assign(M, 0.0);
        diag_.assign(M, 0.0);
        sup_.assign(M, 0.0);
        for (int i = 0; i < M; ++i) {
            const double a_lo = (i > 0) ? area(i) / h : 0.0;
            const double a_hi = (i + 1 < M) ? area(i + 1) / h : 0.0;
            sub_[i] = -dt * a_lo;
            sup_[i] = -dt * a_hi;
            diag_[i] = vol(i) + dt * (a_lo + a_hi);
            buf_u_[i] *= vol(i);
        }
        solve_tridiagonal(sub_, diag_, sup_, buf_u_, scratch_);
        for (int i = 0; i < M; ++i)
            if (buf_u_[i] < 0.0) return {false, "positivity loss in diffusion substep"};
        // 4. fresh signal
        SignalField v_new;
        try {
            v_new = solve_signal(buf_u_, rgrid_, cfg_.exponents.gamma, cfg_.solver_tol);
        } catch (const std::runtime_error& e) {
            return {false, std::string("signal solve failed: ") + e.what()};
        }
        state_.u.swap(buf_u_);
        state_.v = std::move(v_new);
        state_.t += dt;
        state_.dt_last = dt;
        ++state_.steps_accepted;
        return {true, ""};
    }

    StepOutcome step_polar(double dt) {
        const int Mr = pgrid_.cells_r, Mt = pgrid_.cells_theta;
        const double h = pgrid_.dr(), dth = pgrid_.dtheta();
        const double pm1 = cfg_.exponents.p - 1.0;
        PolarGradient grad = signal_gradient(state_.v, pgrid_);

        buf_u_ = state_.u;
        auto shell = [&](int i) {
            return 0.5 * (pgrid_.faces_r[i + 1] * pgrid_.faces_r[i + 1] -
                          pgrid_.faces_r[i] * pgrid_.faces_r[i]);
        };
        // 1. upwind transport, radial and angular faces
        for (int i = 0; i < Mr; ++i) {
            const double V = shell(i) * dth;
            for (int j = 0; j < Mt; ++j) {
                const std::size_t k = pgrid_.index(i, j);
                double div = 0.0;
                if (i + 1 < Mr) {
                    const double w = grad.radial[static_cast<std::size_t>(i + 1) * Mt + j];
                    const double up = (w > 0.0) ? state_.u[k] : state_.u[pgrid_.index(i + 1, j)];
                    div += pgrid_.faces_r[i + 1] * dth * w * up;
                }
                if (i > 0) {
                    const double w = grad.radial[static_cast<std::size_t>(i) * Mt + j];
                    const double up = (w > 0.0) ? state_.u[pgrid_.index(i - 1, j)] : state_.u[k];
                    div -= pgrid_.faces_r[i] * dth * w * up;
                }
                {   // outgoing angular face between j and j+1
                    const int jn = (j + 1) % Mt;
                    const double w = grad.angular[pgrid_.index(i, jn)];
                    const double up = (w > 0.0) ? state_.u[k] : state_.u[pgrid_.index(i, jn)];
                    div += h * w * up;
                }
                {   // incoming angular face between j-1 and j
                    const double w = grad.angular[k];
                    const double up = (w > 0.0) ? state_.u[pgrid_.index(i, (j + Mt - 1) % Mt)]
                                                : state_.u[k];
                    div -= h * w * up;
                }
                buf_u_[k] = state_.u[k] - dt * div / V;
            }
        }
        for (double x : buf_u_)
            if (x < 0.0) return {false, "positivity loss in transport substep"};
        // 2. Patankar reaction (coefficients are radial)
        for (int i = 0; i < Mr; ++i)
            for (int j = 0; j < Mt; ++j) {
                const std::size_t k = pgrid_.index(i, j);
                buf_u_[k] *= (1.0 + dt * coeff_.kappa[i]) /
                             (1.0 + dt * coeff_.mu[i] * std::pow(buf_u_[k], pm1));
            }
        // 3. Lie-split implicit diffusion: radial sweep per column, then an
        // angular sweep per ring through the cyclic solver. Both matrices are
        // M-matrices, so nonnegativity survives each sweep exactly.
        sub_.assign(Mr, 0.0);
        diag_.assign(Mr, 0.0);
        sup_.assign(Mr, 0.0);
        std::vector<double> col(Mr);
        for (int i = 0; i < Mr; ++i) {
            const double a_lo = (i > 0) ? pgrid_.faces_r[i] / h : 0.0;
            const double a_hi = (i + 1 < Mr) ? pgrid_.faces_r[i + 1] / h : 0.0;
            sub_[i] = -dt * a_lo;
            sup_[i] = -dt * a_hi;
            diag_[i] = shell(i) + dt * (a_lo + a_hi);
        }
        for (int j = 0; j < Mt; ++j) {
            for (int i = 0; i < Mr; ++i) col[i] = shell(i) * buf_u_[pgrid_.index(i, j)];
            solve_tridiagonal(sub_, diag_, sup_, col, scratch_);
            for (int i = 0; i < Mr; ++i) buf_u_[pgrid_.index(i, j)] = col[i];
        }
        std::vector<double> ring_a(Mt), ring_b(Mt), ring_c(Mt), ring_d(Mt);
        for (int i = 0; i < Mr; ++i) {
            const double V = shell(i) * dth;
            const double kth = h / (pgrid_.nodes_r[i] * dth);
            for (int j = 0; j < Mt; ++j) {
                ring_a[j] = -dt * kth;
                ring_c[j] = -dt * kth;
                ring_b[j] = V + 2.0 * dt * kth;
                ring_d[j] = V * buf_u_[pgrid_.index(i, j)];
            }
            solve_cyclic_tridiagonal(ring_a, ring_b, ring_c, ring_d);
            for (int j = 0; j < Mt; ++j) buf_u_[pgrid_.index(i, j)] = ring_d[j];
        }
        for (double x : buf_u_)
            if (x < 0.0) return {false, "positivity loss in diffusion substep"};
        // 4. fresh signal (warm-started CG)
        SignalField v_new;
        try {
            v_new = solve_signal(buf_u_, pgrid_, cfg_.exponents.gamma, cfg_.solver_tol, 50000,
                                 &state_.v.v);
        } catch (const std::runtime_error& e) {
            return {false, std::string("signal solve failed: ") + e.what()};
        }
        state_.u.swap(buf_u_);
        state_.v = std::move(v_new);
        state_.t += dt;
        state_.dt_last = dt;
        ++state_.steps_accepted;
        return {true, ""};
    }
};

}  // namespace chemo
