#pragma once

// Flat-vector packing of the structured states and ready-to-integrate
// vector-field closures for every coordinate set and evolution parameter
// the toolkit propagates in:
//
//   cartesian6   (r, v)                      in t
//   standard8    (q, u, p, p_u)              in t
//   extended10   (q, u, p, p_u, t, p_t)      in s or tau
//   quasi8       (q, p, u, w)                in s, tau, or t
//   quasi9       (q, p, u, w, t)             in s or tau (time appended)
//
// plus constraint monitors that report (|q|, lambda) for drift tracking.

#include "regprop/dynamics.hpp"
#include "regprop/projective.hpp"
#include "regprop/propagator.hpp"

#include <functional>

namespace regprop {

inline VecX pack_standard(const ProjectiveState& x) {
    VecX y(8);
    y << x.q, x.u, x.p, x.p_u;
    return y;
}

inline ProjectiveState unpack_standard(const VecX& y) {
    return ProjectiveState{y.segment<3>(0), y[3], y.segment<3>(4), y[7]};
}

inline VecX pack_extended(const ExtendedState& xe) {
    VecX y(10);
    y << xe.base.q, xe.base.u, xe.base.p, xe.base.p_u, xe.t, xe.p_t;
    return y;
}

inline ExtendedState unpack_extended(const VecX& y) {
    return ExtendedState{unpack_standard(y.head(8)), y[8], y[9]};
}

inline VecX pack_quasi(const QuasiState& x) {
    VecX y(8);
    y << x.q, x.p, x.u, x.w;
    return y;
}

inline QuasiState unpack_quasi(const VecX& y) {
    return QuasiState{y.segment<3>(0), y.segment<3>(3), y[6], y[7]};
}

inline VecX pack_cartesian(const CartesianState& c) {
    VecX y(6);
    y << c.r, c.v;
    return y;
}

inline CartesianState unpack_cartesian(const VecX& y) {
    return CartesianState{y.segment<3>(0), y.segment<3>(3)};
}

/// @brief Cartesian two-body field r'' = -dV/dr with the central Manev
/// terms plus any model perturbations, as a 6-dim first-order system in t.
inline RhsFn make_rhs_cartesian(const PotentialModel& model) {
    return [model](double t, const VecX& y) {
        const Vec3 r = y.segment<3>(0);
        const Vec3 v = y.segment<3>(3);
        const double rn = r.norm();
        if (rn == 0.0) {
            throw OriginSingularity("cartesian field: r = 0");
        }
        Vec3 acc = -(model.k1 / (rn * rn * rn) + model.k2 / (rn * rn * rn * rn)) * r;
        if (model.has_perturbation()) {
            acc -= model.perturbation(r, t).gradient;
        }
        if (model.has_nonconservative()) {
            acc += model.nonconservative(r, v, t);
        }
        VecX dy(6);
        dy << v, acc;
        return dy;
    };
}

/// @brief Time-parameterized projective field on (q, u, p, p_u).
inline RhsFn make_rhs_time(const TransformParams& params, const PotentialModel& model) {
    return [params, model](double t, const VecX& y) {
        const ProjectiveRates d = rhs_time(unpack_standard(y), params, model, t);
        VecX dy(8);
        dy << d.q_dot, d.u_dot, d.p_dot, d.p_u_dot;
        return dy;
    };
}

/// @brief Extended-phase-space field on (q, u, p, p_u, t, p_t) in the
/// fictitious parameter s. See rhs_s for the eliminate_pt distinction.
inline RhsFn make_rhs_s(const TransformParams& params, const PotentialModel& model,
                        bool eliminate_pt = true) {
    return [params, model, eliminate_pt](double, const VecX& y) {
        const ExtendedRates d = rhs_s(unpack_extended(y), params, model, eliminate_pt);
        VecX dy(10);
        dy << d.base.q_dot, d.base.u_dot, d.base.p_dot, d.base.p_u_dot, d.t_dot, d.p_t_dot;
        return dy;
    };
}

/// @brief Extended-phase-space field in the angular parameter tau.
inline RhsFn make_rhs_tau(const TransformParams& params, const PotentialModel& model,
                          bool eliminate_pt = true) {
    return [params, model, eliminate_pt](double, const VecX& y) {
        const ExtendedRates d = rhs_tau(unpack_extended(y), params, model, eliminate_pt);
        VecX dy(10);
        dy << d.base.q_dot, d.base.u_dot, d.base.p_dot, d.base.p_u_dot, d.t_dot, d.p_t_dot;
        return dy;
    };
}

/// @brief Quasi-momentum field on (q, p, u, w) for the preferred
/// transformation. With QuasiParameter::time the field parameter is t
/// itself; in s or tau the caller must track physical time separately
/// (or use make_rhs_quasi_clock).
inline RhsFn make_rhs_quasi(const PotentialModel& model, QuasiParameter parameter) {
    return [model, parameter](double e, const VecX& y) {
        const double t = (parameter == QuasiParameter::time) ? e : 0.0;
        const QuasiRates d = rhs_quasi(unpack_quasi(y), model, parameter, t);
        VecX dy(8);
        dy << d.q_dot, d.p_dot, d.u_dot, d.w_dot;
        return dy;
    };
}

/// @brief Quasi-momentum field with physical time appended as a ninth
/// component: dt = ds/u^2, or dtau/(l u^2) in tau. Supports
/// time-dependent perturbations along fictitious-parameter propagation.
inline RhsFn make_rhs_quasi_clock(const PotentialModel& model, QuasiParameter parameter) {
    if (parameter == QuasiParameter::time) {
        throw std::invalid_argument("make_rhs_quasi_clock: parameter must be s or tau");
    }
    return [model, parameter](double, const VecX& y) {
        const QuasiState x = unpack_quasi(y.head(8));
        const QuasiRates d = rhs_quasi(x, model, parameter, y[8]);
        double t_dot = 1.0 / (x.u * x.u);
        if (parameter == QuasiParameter::tau) {
            t_dot /= x.q.cross(x.p).norm();
        }
        VecX dy(9);
        dy << d.q_dot, d.p_dot, d.u_dot, d.w_dot, t_dot;
        return dy;
    };
}

/// @brief Constraint monitor for standard-ordered (and extended) state
/// vectors: reports |q| and the Lagrange multiplier lambda.
inline MonitorFn make_standard_monitor(const TransformParams& params = {}) {
    return [params](double, const VecX& y) {
        return constraint_report(unpack_standard(y.head(8)), params);
    };
}

/// @brief Constraint monitor for quasi-ordered state vectors (with or
/// without the appended clock).
inline MonitorFn make_quasi_monitor() {
    return [](double, const VecX& y) {
        return constraint_report(from_quasi(unpack_quasi(y.head(8))), TransformParams{});
    };
}

}  // namespace regprop
