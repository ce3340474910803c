#pragma once

// Adaptive explicit Runge-Kutta propagation for the module vector fields,
// with full trajectory recording and optional constraint-drift monitoring.
//
// The integrator is the classic Dormand-Prince 5(4) embedded pair (the
// method behind MATLAB's ode45): seven stages, first-same-as-last, fifth
// order propagation with a fourth-order error estimate, and a PI step
// controller (safety 0.9, growth clamped to [0.2, 5.0]). Integration is
// deterministic: identical inputs produce bit-identical trajectories.

#include "regprop/projective.hpp"
#include "regprop/types.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace regprop {

using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

using RhsFn = std::function<VecX(double, const VecX&)>;
using MonitorFn = std::function<ConstraintReport(double, const VecX&)>;

/// Tolerances and step bounds for adaptive integration. initial_step = 0
/// selects an automatic starting step; max_step = 0 means unbounded.
struct IntegratorConfig {
    double rel_tol = 1e-12;
    double abs_tol = 1e-12;
    double initial_step = 0.0;
    double max_step = 0.0;
    std::int64_t max_steps = 1000000;
};

/// Recorded integration output: one entry per accepted step (including
/// the initial point). Parameter samples are strictly monotone in the
/// direction of integration. Constraint samples are present only when a
/// monitor was attached.
struct Trajectory {
    std::vector<double> parameter;
    std::vector<VecX> states;
    std::vector<ConstraintReport> constraints;

    const VecX& final_state() const { return states.back(); }
    double final_parameter() const { return parameter.back(); }
    std::size_t size() const { return parameter.size(); }
};

/// Worst constraint violations seen over all accepted steps.
struct DriftReport {
    double max_q_drift = 0.0;       ///< max |  |q| - 1  |
    double max_lambda_drift = 0.0;  ///< max | lambda |
    bool empty = true;              ///< no monitor attached
};

struct MonitoredTrajectory {
    Trajectory trajectory;
    DriftReport drift;
};

namespace detail {

/// Dormand-Prince 5(4) tableau (FSAL: stage 7 equals the new-step stage 1).
struct Dp54 {
    static constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
    static constexpr double a21 = 1.0 / 5.0;
    static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                            a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
    static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                            a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
    // Fifth-order weights (also the a7j row, FSAL).
    static constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                            b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
    // Error weights: b - bhat (fifth minus embedded fourth order).
    static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                            e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
};

/// Scaled RMS error norm of the embedded-pair defect.
inline double error_norm(const VecX& err, const VecX& y_old, const VecX& y_new, double abs_tol,
                         double rel_tol) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
        const double sc =
            abs_tol + rel_tol * std::max(std::abs(y_old[i]), std::abs(y_new[i]));
        const double q = err[i] / sc;
        acc += q * q;
    }
    return std::sqrt(acc / static_cast<double>(err.size()));
}

/// Starting-step heuristic from the local derivative magnitude and a
/// crude second-derivative probe.
inline double initial_step_guess(const RhsFn& rhs, double t0, const VecX& y0, const VecX& f0,
                                 double direction, double abs_tol, double rel_tol) {
    const auto scaled_norm = [&](const VecX& v, const VecX& ref) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            const double sc = abs_tol + rel_tol * std::abs(ref[i]);
            const double q = v[i] / sc;
            acc += q * q;
        }
        return std::sqrt(acc / static_cast<double>(v.size()));
    };
    const double d0 = scaled_norm(y0, y0);
    const double d1 = scaled_norm(f0, y0);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;

    const VecX y1 = y0 + direction * h0 * f0;
    const VecX f1 = rhs(t0 + direction * h0, y1);
    const double d2 = scaled_norm(f1 - f0, y0) / h0;
    const double dmax = std::max(d1, d2);
    const double h1 = (dmax <= 1e-15) ? std::max(1e-6, h0 * 1e-3)
                                      : std::pow(0.01 / dmax, 1.0 / 5.0);
    return std::min(100.0 * h0, h1);
}

}  // namespace detail

/// @brief Integrate y' = rhs(e, y) from span_start to span_end (either
/// direction) with the Dormand-Prince 5(4) pair, recording every accepted
/// step. The final step is truncated to land exactly on span_end. An
/// optional monitor is evaluated at every accepted point; its worst
/// readings form the drift report.
///
/// Throws StepUnderflow when error control forces the step below the
/// machine floor, MaxStepsExceeded past config.max_steps, NonFiniteState
/// if the state or a stage derivative stops being finite, and
/// std::invalid_argument for empty spans or nonpositive tolerances.
inline MonitoredTrajectory integrate_monitored(const RhsFn& rhs, const VecX& y0,
                                               double span_start, double span_end,
                                               const IntegratorConfig& config,
                                               const MonitorFn& monitor = {}) {
    if (span_end == span_start) {
        throw std::invalid_argument("integrate: empty span");
    }
    if (!(config.rel_tol > 0.0) || !(config.abs_tol > 0.0)) {
        throw std::invalid_argument("integrate: tolerances must be positive");
    }

    using D = detail::Dp54;
    const double direction = (span_end > span_start) ? 1.0 : -1.0;
    const double span_mag = std::abs(span_end - span_start);

    MonitoredTrajectory out;
    Trajectory& traj = out.trajectory;

    double t = span_start;
    VecX y = y0;
    VecX f1 = rhs(t, y);
    if (!y.allFinite() || !f1.allFinite()) {
        throw NonFiniteState("integrate: non-finite initial state or derivative");
    }

    const auto record = [&](double param, const VecX& state) {
        traj.parameter.push_back(param);
        traj.states.push_back(state);
        if (monitor) {
            const ConstraintReport rep = monitor(param, state);
            traj.constraints.push_back(rep);
            out.drift.empty = false;
            out.drift.max_q_drift = std::max(out.drift.max_q_drift, std::abs(rep.q_norm - 1.0));
            out.drift.max_lambda_drift =
                std::max(out.drift.max_lambda_drift, std::abs(rep.lambda));
        }
    };
    record(t, y);

    double h = (config.initial_step > 0.0)
                   ? config.initial_step
                   : detail::initial_step_guess(rhs, t, y, f1, direction, config.abs_tol,
                                                config.rel_tol);
    h = std::min(h, span_mag);
    if (config.max_step > 0.0) {
        h = std::min(h, config.max_step);
    }

    double err_prev = 1.0;  // PI controller memory
    bool have_prev = false;
    std::int64_t steps = 0;

    while (direction * (span_end - t) > 0.0) {
        if (++steps > config.max_steps) {
            throw MaxStepsExceeded("integrate: exceeded max_steps");
        }
        const double remaining = std::abs(span_end - t);
        bool last = false;
        if (h >= remaining) {
            h = remaining;
            last = true;
        }
        if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
            throw StepUnderflow("integrate: step size underflow");
        }
        const double hd = direction * h;

        const VecX k2 = rhs(t + D::c2 * hd, y + hd * (D::a21 * f1));
        const VecX k3 = rhs(t + D::c3 * hd, y + hd * (D::a31 * f1 + D::a32 * k2));
        const VecX k4 = rhs(t + D::c4 * hd, y + hd * (D::a41 * f1 + D::a42 * k2 + D::a43 * k3));
        const VecX k5 = rhs(t + D::c5 * hd,
                            y + hd * (D::a51 * f1 + D::a52 * k2 + D::a53 * k3 + D::a54 * k4));
        const VecX k6 =
            rhs(t + hd,
                y + hd * (D::a61 * f1 + D::a62 * k2 + D::a63 * k3 + D::a64 * k4 + D::a65 * k5));
        const VecX y_new =
            y + hd * (D::b1 * f1 + D::b3 * k3 + D::b4 * k4 + D::b5 * k5 + D::b6 * k6);
        const VecX k7 = rhs(t + hd, y_new);  // FSAL stage
        if (!y_new.allFinite() || !k7.allFinite()) {
            throw NonFiniteState("integrate: non-finite state during step");
        }

        const VecX err_vec = hd * (D::e1 * f1 + D::e3 * k3 + D::e4 * k4 + D::e5 * k5 +
                                   D::e6 * k6 + D::e7 * k7);
        const double err =
            detail::error_norm(err_vec, y, y_new, config.abs_tol, config.rel_tol);

        if (err <= 1.0) {
            t = last ? span_end : t + hd;
            y = y_new;
            f1 = k7;
            record(t, y);

            const double err_floored = std::max(err, 1e-10);
            double factor = have_prev ? 0.9 * std::pow(err_floored, -0.7 / 5.0) *
                                            std::pow(err_prev, 0.4 / 5.0)
                                      : 0.9 * std::pow(err_floored, -1.0 / 5.0);
            factor = std::min(5.0, std::max(0.2, factor));
            err_prev = err_floored;
            have_prev = true;
            h *= factor;
        } else {
            double factor = 0.9 * std::pow(err, -1.0 / 5.0);
            factor = std::min(1.0, std::max(0.2, factor));
            h *= factor;
            // A rejection resets the PI memory to plain feedback.
            have_prev = false;
        }
        if (config.max_step > 0.0) {
            h = std::min(h, config.max_step);
        }
    }
    return out;
}

/// @brief Plain integration without constraint monitoring.
inline Trajectory integrate(const RhsFn& rhs, const VecX& y0, double span_start, double span_end,
                            const IntegratorConfig& config) {
    return integrate_monitored(rhs, y0, span_start, span_end, config).trajectory;
}

/// @brief Integration with a per-step constraint monitor, returning the
/// trajectory together with the worst observed drifts.
inline MonitoredTrajectory propagate_with_monitor(const RhsFn& rhs, const VecX& y0,
                                                  double span_start, double span_end,
                                                  const IntegratorConfig& config,
                                                  const MonitorFn& monitor) {
    return integrate_monitored(rhs, y0, span_start, span_end, config, monitor);
}

}  // namespace regprop
