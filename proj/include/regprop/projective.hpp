#pragma once

// The canonically extended projective transformation between Cartesian
// phase space (r, v) in R^6 and the redundant projective phase space
// (q, u, p, p_u) in R^8, for the two-parameter family
//
//     r = u^n |q|^m q ,      n != 0 ,
//
// together with the constraint/multiplier bookkeeping and the orbit
// geometry (LVLH triad, eccentricity/Hamilton vectors, conic radius)
// built on top of it. The preferred member of the family is n = m = -1,
// for which u = 1/r and the configuration constraint is |q| = 1.
//
// The momenta are extended canonically: with B the Jacobian of the
// configuration map augmented by the constraint direction, velocities and
// momenta are related by (v, lambda) = B^-T (p, p_u). The forward map
// never assumes the integrals |q| = 1, qhat.p = 0; the inverse map is the
// restricted right-inverse that picks the representative |q| = 1,
// lambda = 0 on the gauge orbit.

#include "regprop/so3.hpp"
#include "regprop/types.hpp"

#include <cmath>

namespace regprop {

/// Exponent pair (n, m) selecting a member of the transformation family.
/// n must be nonzero; (-1, -1) is the preferred choice used by all the
/// closed-form machinery.
struct TransformParams {
    double n = -1.0;
    double m = -1.0;
};

/// Redundant projective phase-space point (q, u, p, p_u).
struct ProjectiveState {
    Vec3 q = Vec3::Zero();   ///< projective coordinate, |q| = 1 on the constraint manifold
    double u = 0.0;          ///< radial coordinate, r = u^n |q|^(m+1)
    Vec3 p = Vec3::Zero();   ///< momentum conjugate to q
    double p_u = 0.0;        ///< momentum conjugate to u

    /// Quasi-momentum w = u^2 p_u; for n = m = -1 this equals u' = -rdot.
    double w() const { return u * u * p_u; }
};

/// Inertial Cartesian phase-space point.
struct CartesianState {
    Vec3 r = Vec3::Zero();
    Vec3 v = Vec3::Zero();
};

/// Snapshot of the gauge quantities that should stay pinned along a
/// propagation: |q| (exactly 1 on the constraint manifold) and the
/// Lagrange multiplier lambda (exactly 0 there).
struct ConstraintReport {
    double q_norm = 0.0;
    double lambda = 0.0;
};

/// Conserved Kepler orbit frame: eccentricity vector e (toward periapsis),
/// Hamilton vector h (along the periapsis velocity direction, scaled so
/// |h| = |e|), and the unit orbit normal.
struct PerifocalFrame {
    Vec3 e_vec = Vec3::Zero();
    Vec3 h_vec = Vec3::Zero();
    Vec3 l_hat = Vec3::Zero();
    double eccentricity = 0.0;
    double semilatus_rectum = 0.0;
};

/// Conic-section type with the classification thresholds used by the
/// time-of-flight branches: |e - 1| < 1e-9 counts as parabolic and
/// e < 1e-12 as circular.
enum class ConicClass { circular, elliptic, parabolic, hyperbolic };

inline ConicClass classify_conic(double ecc) {
    if (ecc < 1e-12) return ConicClass::circular;
    if (std::abs(ecc - 1.0) < 1e-9) return ConicClass::parabolic;
    return ecc < 1.0 ? ConicClass::elliptic : ConicClass::hyperbolic;
}

namespace detail {
inline void require_valid(const TransformParams& params) {
    if (params.n == 0.0) {
        throw std::invalid_argument("TransformParams: exponent n must be nonzero");
    }
}
}  // namespace detail

/// @brief Full forward map Gamma: (q, u, p, p_u) -> (r, v).
///
///     r = u^n |q|^m q
///     v = (1 / (u^n |q|^m)) [ (I - qhat qhat^T) p + (u / (n |q|)) p_u qhat ]
///
/// No constraint simplification is applied; the map is exact for any state
/// with u > 0 and q != 0 (DegenerateState otherwise). Scalars:
/// |r| = u^n |q|^(m+1) and rhat = qhat.
inline CartesianState forward(const ProjectiveState& x, const TransformParams& params = {}) {
    detail::require_valid(params);
    const double qn = x.q.norm();
    if (!(x.u > 0.0) || qn == 0.0) {
        throw DegenerateState("forward: requires u > 0 and q != 0");
    }
    const Vec3 qhat = x.q / qn;
    const double scale = std::pow(x.u, params.n) * std::pow(qn, params.m);

    CartesianState c;
    c.r = scale * x.q;
    const Vec3 p_transverse = x.p - qhat * qhat.dot(x.p);
    c.v = (p_transverse + (x.u / (params.n * qn)) * x.p_u * qhat) / scale;
    return c;
}

/// @brief Restricted inverse of the forward map, choosing the gauge
/// representative |q| = 1, lambda = 0.
///
///     q = rhat,  u = r^(1/n),  p = r (I + m rhat rhat^T) v,
///     p_u = n r^(-1/n) (r . v)
///
/// For n = m = -1 this reduces to q = rhat, p = r^2 d(rhat)/dt, u = 1/r,
/// p_u = -r^2 rdot. Throws OriginSingularity at r = 0.
inline ProjectiveState inverse(const CartesianState& c, const TransformParams& params = {}) {
    detail::require_valid(params);
    const double r = c.r.norm();
    if (r == 0.0) {
        throw OriginSingularity("inverse: Cartesian state at the origin");
    }
    const Vec3 rhat = c.r / r;

    ProjectiveState x;
    x.q = rhat;
    x.u = std::pow(r, 1.0 / params.n);
    x.p = r * (c.v + params.m * rhat * rhat.dot(c.v));
    x.p_u = params.n * std::pow(r, -1.0 / params.n) * c.r.dot(c.v);
    return x;
}

/// @brief Lagrange multiplier paired with the unit-norm constraint,
/// lambda = (1/|q|) (q.p - ((m+1)/n) u p_u). Vanishes identically for
/// states produced by `inverse`.
inline double lagrange_multiplier(const ProjectiveState& x, const TransformParams& params = {}) {
    detail::require_valid(params);
    const double qn = x.q.norm();
    if (qn == 0.0) {
        throw DegenerateState("lagrange_multiplier: q = 0");
    }
    return (x.q.dot(x.p) - (params.m + 1.0) / params.n * x.u * x.p_u) / qn;
}

/// @brief Gauge snapshot (|q|, lambda) for drift monitoring.
inline ConstraintReport constraint_report(const ProjectiveState& x,
                                          const TransformParams& params = {}) {
    return ConstraintReport{x.q.norm(), lagrange_multiplier(x, params)};
}

/// @brief Local-vertical/local-horizontal triad as matrix columns
/// (radial, transverse, orbit-normal) = (qhat, lhat x qhat, lhat).
///
/// Right-handed and orthonormal by construction. Throws RectilinearOrbit
/// when q x p = 0.
inline Mat3 lvlh_basis(const ProjectiveState& x) {
    const Vec3 l = x.q.cross(x.p);
    const double lmag = l.norm();
    const double qn = x.q.norm();
    if (!(lmag > 0.0) || qn == 0.0) {
        throw RectilinearOrbit("lvlh_basis: q x p = 0");
    }
    const Vec3 l_hat = l / lmag;
    const Vec3 t_r = x.q / qn;
    const Vec3 t_tau = l_hat.cross(t_r);  // equals -dual(lhat) * qhat
    Mat3 basis;
    basis.col(0) = t_r;
    basis.col(1) = t_tau;
    basis.col(2) = l_hat;
    return basis;
}

/// @brief Conserved perifocal frame from a projective state (preferred
/// transformation n = m = -1), for the pure inverse-square problem with
/// gravitational parameter k1.
///
///     k1 e = l^2 (u - k1/l^2) qhat - w dual(l) qhat
///     h    = -dual(lhat) e
///
/// The Hamilton vector is stored scaled by l relative to its classical
/// definition v/k1 + dual(lhat) rhat / l, which makes |h| = |e| and keeps
/// it dimensionless alongside e.
inline PerifocalFrame perifocal_frame(const ProjectiveState& x, double k1) {
    if (!(k1 > 0.0)) {
        throw DegenerateState("perifocal_frame: requires k1 > 0");
    }
    const AngularMomentum am = angular_momentum(x.q, x.p);
    if (!(am.mag > 0.0)) {
        throw RectilinearOrbit("perifocal_frame: q x p = 0");
    }
    const double qn = x.q.norm();
    if (qn == 0.0 || !(x.u > 0.0)) {
        throw DegenerateState("perifocal_frame: requires u > 0 and q != 0");
    }
    const Vec3 qhat = x.q / qn;
    const Vec3 l_hat = am.vec / am.mag;
    const double l2 = am.mag * am.mag;
    const double w = x.w();

    PerifocalFrame frame;
    frame.e_vec = ((l2 * x.u - k1) * qhat - w * am.mat * qhat) / k1;
    frame.h_vec = -hodge_dual(l_hat) * frame.e_vec;
    frame.l_hat = l_hat;
    frame.eccentricity = frame.e_vec.norm();
    frame.semilatus_rectum = l2 / k1;
    return frame;
}

/// @brief Conic radius r = p_slr / (1 + e cos(tau)).
///
/// Throws AsymptoteReached when the denominator is non-positive (true
/// anomaly at or beyond the asymptote of an open orbit).
inline double conic_radius(double p_slr, double ecc, double true_anomaly) {
    const double denom = 1.0 + ecc * std::cos(true_anomaly);
    if (denom <= 0.0) {
        throw AsymptoteReached("conic_radius: 1 + e cos(tau) <= 0");
    }
    return p_slr / denom;
}

/// State in the modified ordering (q, p, u, w) with the quasi-momentum
/// w = u^2 p_u in place of p_u. This is the ordering in which the
/// unperturbed dynamics become a linear ODE with constant coefficients.
struct QuasiState {
    Vec3 q = Vec3::Zero();
    Vec3 p = Vec3::Zero();
    double u = 0.0;
    double w = 0.0;
};

inline QuasiState to_quasi(const ProjectiveState& x) {
    return QuasiState{x.q, x.p, x.u, x.w()};
}

/// Inverse of `to_quasi`; requires u != 0 to recover p_u = w / u^2.
inline ProjectiveState from_quasi(const QuasiState& x) {
    if (x.u == 0.0) {
        throw DegenerateState("from_quasi: u = 0 has no conjugate momentum");
    }
    return ProjectiveState{x.q, x.u, x.p, x.w / (x.u * x.u)};
}

}  // namespace regprop
