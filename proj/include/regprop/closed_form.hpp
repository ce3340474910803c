#pragma once

// Closed-form flows of the unperturbed projective dynamics (preferred
// transformation n = m = -1) in the angular parameter tau, Cartesian
// recovery of position and velocity from flow states, and the
// time-of-flight map t(tau) measured from periapsis.
//
// The quasi-momentum system (q, p, u, w) decouples into a rotation of
// (q, p) about the fixed angular momentum axis and a driven harmonic
// oscillator in (u, w):
//
//   q_tau = q0 cos tau - dual(lhat) q0 sin tau        (p likewise)
//   u_tau = (u0 - k1/w^2) cos(vp tau) + (w0/w) sin(vp tau) + k1/w^2
//   w_tau = -w (u0 - k1/w^2) sin(vp tau) + w0 cos(vp tau)
//
// with w^2 = l^2 - k2 and vp = w/l. Pure Kepler (k2 = 0) has w = l and
// vp = 1; the Manev formulas then reproduce the Kepler ones bitwise, a
// property the tests rely on.

#include "regprop/dynamics.hpp"
#include "regprop/projective.hpp"
#include "regprop/types.hpp"

#include <cmath>

namespace regprop {

/// Initial data for the unperturbed Kepler flow. The simplified flag
/// selects the pre-simplified formulas that replace l by |p0| and assume
/// the constraint |q| = 1, lambda = 0 holds (valid on the constraint
/// manifold only; the default keeps the exact group action).
struct KeplerFlowInput {
    QuasiState x0;
    double k1 = 1.0;
    bool simplified = false;
};

/// Initial data for the unperturbed Manev flow (inverse-square plus
/// inverse-cube, coefficient k2). Requires l0^2 - k2 > 0.
struct ManevFlowInput {
    QuasiState x0;
    double k1 = 1.0;
    double k2 = 0.0;
};

namespace detail {

/// Rotational and radial closed-form advance shared by the Kepler and
/// Manev flows. rot_scale is the magnitude used for the (q, p) rotation
/// generator (exact: |l|; simplified: |p0|).
inline QuasiState advance_quasi(const QuasiState& x0, double k1, double tau, double l,
                                double omega, double varpi, bool simplified) {
    const double c = std::cos(tau);
    const double s = std::sin(tau);

    QuasiState x;
    if (simplified) {
        // On-manifold substitutions dual(lhat) q = -phat, dual(lhat) p = l qhat
        // with l ~ |p0| and |q0| = 1.
        x.q = x0.q * c + (x0.p / l) * s;
        x.p = x0.p * c - l * x0.q * s;
    } else {
        const Vec3 lhat_wedge_q = (x0.q.dot(x0.p) * x0.q - x0.q.squaredNorm() * x0.p) / l;
        const Vec3 lhat_wedge_p = (x0.p.squaredNorm() * x0.q - x0.q.dot(x0.p) * x0.p) / l;
        x.q = x0.q * c - lhat_wedge_q * s;
        x.p = x0.p * c - lhat_wedge_p * s;
    }

    const double u_eq = k1 / (omega * omega);
    const double cr = std::cos(varpi * tau);
    const double sr = std::sin(varpi * tau);
    x.u = (x0.u - u_eq) * cr + (x0.w / omega) * sr + u_eq;
    x.w = -omega * (x0.u - u_eq) * sr + x0.w * cr;
    return x;
}

}  // namespace detail

/// @brief Advance the unperturbed Kepler quasi-state by the angle tau.
/// Exact group action: flows compose, and l, |q|, |p|, q.p, the
/// eccentricity vector and its quadrature pair are all invariant.
/// Throws RectilinearOrbit when l = 0.
inline QuasiState kepler_flow(const KeplerFlowInput& inp, double tau) {
    const double l = inp.simplified ? inp.x0.p.norm() : inp.x0.q.cross(inp.x0.p).norm();
    if (!(l > 0.0)) {
        throw RectilinearOrbit("kepler_flow: l = 0");
    }
    return detail::advance_quasi(inp.x0, inp.k1, tau, l, l, 1.0, inp.simplified);
}

/// @brief Advance the unperturbed Manev quasi-state by the angle tau.
/// The (q, p) rotation is the Kepler one; the radial oscillator runs at
/// the shifted frequency vp = sqrt(l^2 - k2)/l, so apsides precess by
/// 2 pi (1/vp - 1) per radial period. Degenerates bitwise to kepler_flow
/// at k2 = 0. Throws ImaginaryFrequency when l^2 <= k2.
inline QuasiState manev_flow(const ManevFlowInput& inp, double tau) {
    const double l = inp.x0.q.cross(inp.x0.p).norm();
    const FrequencyPair fr = radial_frequencies(l, inp.k2);
    return detail::advance_quasi(inp.x0, inp.k1, tau, l, fr.omega, fr.varpi, false);
}

/// @brief Momentum conjugate to u from the quasi-momentum w = u^2 p_u.
/// Throws DegenerateState at u = 0.
inline double pu_from_w(double u, double w) {
    if (u == 0.0) {
        throw DegenerateState("pu_from_w: u = 0");
    }
    return w / (u * u);
}

/// Cartesian recovery mode: `full` composes the exact inverse-coordinate
/// map (valid for any q), `simplified` uses the constraint-manifold
/// shortcut r = q/u, v = u p - w q.
enum class RecoveryMode { full, simplified };

/// @brief Position and velocity of a quasi-state. Both modes agree when
/// |q| = 1 and q.p = 0; only `full` is exact off the constraint manifold.
/// Throws DegenerateState unless u > 0.
inline CartesianState recover_cartesian(const QuasiState& x,
                                        RecoveryMode mode = RecoveryMode::simplified) {
    if (!(x.u > 0.0)) {
        throw DegenerateState("recover_cartesian: requires u > 0");
    }
    if (mode == RecoveryMode::full) {
        return forward(from_quasi(x));
    }
    CartesianState c;
    c.r = x.q / x.u;
    c.v = x.u * x.p - x.w * x.q;
    return c;
}

namespace detail {

/// x - sin x evaluated without cancellation: Taylor tail for small x,
/// direct subtraction once the difference carries enough leading digits.
inline double x_minus_sin(double x) {
    if (std::abs(x) < 0.3) {
        const double x2 = x * x;
        return x * x2 / 6.0 *
               (1.0 - x2 / 20.0 *
                          (1.0 - x2 / 42.0 *
                                     (1.0 - x2 / 72.0 * (1.0 - x2 / 110.0 * (1.0 - x2 / 156.0)))));
    }
    return x - std::sin(x);
}

/// sinh x - x, same scheme (all Taylor terms positive).
inline double sinh_minus_x(double x) {
    if (std::abs(x) < 0.3) {
        const double x2 = x * x;
        return x * x2 / 6.0 *
               (1.0 + x2 / 20.0 *
                          (1.0 + x2 / 42.0 *
                                     (1.0 + x2 / 72.0 * (1.0 + x2 / 110.0 * (1.0 + x2 / 156.0)))));
    }
    return std::sinh(x) - x;
}

}  // namespace detail

/// @brief Elapsed time from periapsis to true anomaly tau on the conic
/// with eccentricity ecc, gravitational parameter k1, and angular
/// momentum l. Four branches:
///
///   e = 0   t = (l^3/k1^2) tau
///   e < 1   arctangent (eccentric-anomaly) form, continued across
///           revolutions by full-period offsets so t is defined and
///           strictly increasing for all tau
///   e = 1   Barker form (1/2)(tan(tau/2) + tan^3(tau/2)/3)
///   e > 1   inverse-hyperbolic-tangent form, |tau| inside the asymptotes
///
/// The e near 1 branches are evaluated through the grouping
/// (E - sin E) + (1 - e) sin E (and its hyperbolic mirror), which stays
/// fully accurate arbitrarily close to the parabolic boundary. Odd in
/// tau on every branch. Throws AsymptoteReached when e > 1 and tau is at
/// or beyond the asymptotic true anomaly.
inline double time_of_flight(double ecc, double k1, double l, double tau) {
    if (!(l > 0.0)) {
        throw RectilinearOrbit("time_of_flight: l = 0");
    }
    if (ecc < 0.0) {
        throw std::invalid_argument("time_of_flight: eccentricity must be nonnegative");
    }
    const double scale = l * l * l / (k1 * k1);

    if (ecc == 0.0) {
        return scale * tau;
    }

    if (std::abs(ecc - 1.0) < 1e-14) {
        const double d = std::tan(0.5 * tau);
        return scale * 0.5 * (d + d * d * d / 3.0);
    }

    if (ecc < 1.0) {
        // Wrap into [-pi, pi) and do whole revolutions with the period.
        const double n_rev = std::floor((tau + M_PI) / (2.0 * M_PI));
        const double tau_w = tau - 2.0 * M_PI * n_rev;
        const double one_minus_e2 = (1.0 - ecc) * (1.0 + ecc);
        const double beta3 = one_minus_e2 * std::sqrt(one_minus_e2);

        const double ratio = std::sqrt((1.0 - ecc) / (1.0 + ecc));
        const double E = 2.0 * std::atan2(ratio * std::sin(0.5 * tau_w), std::cos(0.5 * tau_w));
        const double sinE = std::sin(E);
        const double kepler_lhs = detail::x_minus_sin(E) + (1.0 - ecc) * sinE;  // E - e sin E
        return scale * (kepler_lhs + 2.0 * M_PI * n_rev) / beta3;
    }

    // Hyperbolic: defined only between the asymptotes.
    if (!(std::abs(tau) < M_PI) || !(1.0 + ecc * std::cos(tau) > 1e-12)) {
        throw AsymptoteReached("time_of_flight: tau at or beyond hyperbolic asymptote");
    }
    const double e2_minus_1 = (ecc - 1.0) * (ecc + 1.0);
    const double beta3 = e2_minus_1 * std::sqrt(e2_minus_1);
    const double ratio = std::sqrt((ecc - 1.0) / (ecc + 1.0));
    const double H = 2.0 * std::atanh(ratio * std::tan(0.5 * tau));
    const double kepler_lhs = detail::sinh_minus_x(H) + (ecc - 1.0) * std::sinh(H);  // e sinh H - H
    return scale * kepler_lhs / beta3;
}

/// Inhomogeneous (gravity-driven) part of the radial closed form, as it
/// appears alongside the homogeneous 2x2 rotation block.
struct SigmaPair {
    double sigma_u = 0.0;
    double sigma_w = 0.0;
};

/// @brief Particular-solution offsets sigma_u = (k1/l^2)(1 - cos tau),
/// sigma_w = (k1/l) sin tau, satisfying the reversal identity
/// -Sigma_tau^{-1} sigma_tau = sigma_{-tau}. Throws RectilinearOrbit
/// when l = 0.
inline SigmaPair sigma_inhomogeneous(double l, double k1, double tau) {
    if (!(l > 0.0)) {
        throw RectilinearOrbit("sigma_inhomogeneous: l = 0");
    }
    SigmaPair s;
    s.sigma_u = k1 / (l * l) * (1.0 - std::cos(tau));
    s.sigma_w = k1 / l * std::sin(tau);
    return s;
}

}  // namespace regprop
