#pragma once

// Hamiltonians and equations of motion for perturbed central-force dynamics
// in projective coordinates, in three evolution parameters:
//
//   physical time t,
//   the fictitious parameter s with dt = r^2 ds (a Sundman-type rescaling),
//   the angular parameter tau with dtau = |l| ds (the true-anomaly-like
//   variable; tau advances 2 pi per revolution for central forces).
//
// The s- and tau-parameterized systems live on the extended phase space
// (q, u, p, p_u, t, p_t), where p_t = -H along solutions. Two equivalent
// forms of the extended right-hand sides are provided:
//
//   * the default form eliminates p_t using p_t = -H, which reduces the
//     (q, u, p, p_u) block to a conformal scaling t' * (time derivatives);
//   * the raw form keeps the (H + p_t)-proportional terms that come from
//     differentiating t'(q, u) (H + p_t). Both agree on solutions, but
//     their variational (STM) dynamics differ: only the raw 10-state
//     system has a symplectic state transition matrix.
//
// Central potential: V0(r) = -k1/r - (1/2) k2/r^2 (inverse-square plus
// optional inverse-cube force). Arbitrary conservative perturbations enter
// through a potential callback, non-conservative accelerations through a
// separate callback; both are mapped to generalized forces with the
// transpose-Jacobian rule.

#include "regprop/projective.hpp"
#include "regprop/so3.hpp"
#include "regprop/types.hpp"

#include <cmath>
#include <functional>
#include <optional>

namespace regprop {

/// Value, spatial gradient, and explicit time partial of a perturbing
/// potential V1 evaluated at a Cartesian position.
struct PerturbationEval {
    double value = 0.0;
    Vec3 gradient = Vec3::Zero();
    double time_partial = 0.0;
};

using PerturbationFn = std::function<PerturbationEval(const Vec3& r, double t)>;
using AccelerationFn = std::function<Vec3(const Vec3& r, const Vec3& v, double t)>;

/// Force model: central coefficients plus optional perturbation callbacks.
/// k1 is the gravitational parameter (inverse-square), k2 the inverse-cube
/// strength; k2 = 0 recovers the pure Kepler problem.
struct PotentialModel {
    double k1 = 1.0;
    double k2 = 0.0;
    PerturbationFn perturbation;      ///< conservative V1(r, t), analytic gradient required
    AccelerationFn nonconservative;   ///< acceleration a_nc(r, v, t)

    bool has_perturbation() const { return static_cast<bool>(perturbation); }
    bool has_nonconservative() const { return static_cast<bool>(nonconservative); }
};

/// Generalized force conjugate to (q, u): the pullback of a Cartesian
/// acceleration F through the transpose of the configuration Jacobian.
struct GeneralizedForce {
    Vec3 f = Vec3::Zero();
    double f_u = 0.0;
};

/// Projective state on the extended phase space, carrying physical time
/// and its conjugate momentum p_t (equal to -H on solutions).
struct ExtendedState {
    ProjectiveState base;
    double t = 0.0;
    double p_t = 0.0;
};

/// Radial oscillator frequencies: omega^2 = l^2 - k2 in s, and the ratio
/// varpi = omega / l in tau. Pure Kepler has omega = l, varpi = 1.
struct FrequencyPair {
    double omega = 0.0;
    double varpi = 0.0;
};

/// @brief Radial frequencies for angular momentum magnitude l and
/// inverse-cube coefficient k2. Throws ImaginaryFrequency when
/// l^2 <= k2 (the oscillatory closed form no longer applies) and
/// RectilinearOrbit when l = 0.
inline FrequencyPair radial_frequencies(double l, double k2) {
    if (!(l > 0.0)) {
        throw RectilinearOrbit("radial_frequencies: l = 0");
    }
    const double omega2 = l * l - k2;
    if (!(omega2 > 0.0)) {
        throw ImaginaryFrequency("radial_frequencies: l^2 <= k2");
    }
    // Keep omega bitwise equal to l when k2 = 0 so the Manev formulas
    // degenerate to the Kepler ones exactly, not just to rounding.
    const double omega = (k2 == 0.0) ? l : std::sqrt(omega2);
    return FrequencyPair{omega, omega / l};
}

/// Time derivative of a projective state (same layout as the state).
struct ProjectiveRates {
    Vec3 q_dot = Vec3::Zero();
    double u_dot = 0.0;
    Vec3 p_dot = Vec3::Zero();
    double p_u_dot = 0.0;
};

/// Derivative of an extended state with respect to s or tau.
struct ExtendedRates {
    ProjectiveRates base;
    double t_dot = 0.0;
    double p_t_dot = 0.0;
};

/// @brief Hamiltonian (total energy) in Cartesian variables:
/// K = v^2/2 - k1/r - k2/(2 r^2) + V1(r, t).
inline double hamiltonian_cartesian(const CartesianState& c, const PotentialModel& model,
                                    double t = 0.0) {
    const double r = c.r.norm();
    if (r == 0.0) {
        throw OriginSingularity("hamiltonian_cartesian: r = 0");
    }
    double h = 0.5 * c.v.squaredNorm() - model.k1 / r - 0.5 * model.k2 / (r * r);
    if (model.has_perturbation()) {
        h += model.perturbation(c.r, t).value;
    }
    return h;
}

/// @brief Hamiltonian in projective variables,
///
///   H = (1 / (u^{2n} |q|^{2m+2})) (l^2 + u^2 p_u^2 / n^2) / 2 + V(q, u, t),
///
/// with the potential evaluated at the unconstrained radius
/// r = u^n |q|^{m+1} (the |q| = 1 integral is never substituted before
/// differentiating). Equals the Cartesian Hamiltonian composed with the
/// forward map.
inline double hamiltonian_projective(const ProjectiveState& x, const TransformParams& params,
                                     const PotentialModel& model, double t = 0.0) {
    const double qn = x.q.norm();
    if (!(x.u > 0.0) || qn == 0.0) {
        throw DegenerateState("hamiltonian_projective: requires u > 0 and q != 0");
    }
    const double l2 = x.q.cross(x.p).squaredNorm();
    const double n = params.n;
    const double r2 = std::pow(x.u, 2.0 * n) * std::pow(qn, 2.0 * params.m + 2.0);
    const double r = std::pow(x.u, n) * std::pow(qn, params.m + 1.0);

    double h = 0.5 * (l2 + x.u * x.u * x.p_u * x.p_u / (n * n)) / r2 - model.k1 / r -
               0.5 * model.k2 / (r * r);
    if (model.has_perturbation()) {
        const Vec3 r_vec = std::pow(x.u, n) * std::pow(qn, params.m) * x.q;
        h += model.perturbation(r_vec, t).value;
    }
    return h;
}

/// @brief Pull a Cartesian acceleration back to the generalized force
/// conjugate to (q, u):
///
///   f   = u^n |q|^m (I + m qhat qhat^T) F     (the dr/dq transpose)
///   f_u = n u^{n-1} |q|^{m+1} (qhat . F)      (the dr/du contraction)
///
/// For m = -1 the force f is transverse: q . f = 0, and purely radial
/// accelerations map to f = 0.
inline GeneralizedForce generalized_forces(const Vec3& F, const ProjectiveState& x,
                                           const TransformParams& params = {}) {
    detail::require_valid(params);
    const double qn = x.q.norm();
    if (!(x.u > 0.0) || qn == 0.0) {
        throw DegenerateState("generalized_forces: requires u > 0 and q != 0");
    }
    const Vec3 qhat = x.q / qn;
    GeneralizedForce g;
    g.f = std::pow(x.u, params.n) * std::pow(qn, params.m) *
          (F + params.m * qhat * qhat.dot(F));
    g.f_u = params.n * std::pow(x.u, params.n - 1.0) * std::pow(qn, params.m + 1.0) *
            qhat.dot(F);
    return g;
}

namespace detail {

/// Total Cartesian perturbing acceleration (conservative gradient force
/// plus non-conservative term) at a projective state. Returns nullopt
/// when the model has neither, so unperturbed paths never evaluate the
/// forward map.
inline std::optional<Vec3> total_perturbing_acceleration(const ProjectiveState& x,
                                                         const TransformParams& params,
                                                         const PotentialModel& model, double t) {
    if (!model.has_perturbation() && !model.has_nonconservative()) {
        return std::nullopt;
    }
    const CartesianState c = forward(x, params);
    Vec3 F = Vec3::Zero();
    if (model.has_perturbation()) {
        F -= model.perturbation(c.r, t).gradient;
    }
    if (model.has_nonconservative()) {
        F += model.nonconservative(c.r, c.v, t);
    }
    return F;
}

}  // namespace detail

/// @brief Time-parameterized canonical equations of motion,
///
///   qdot   = -(1/r^2) dual(l) q
///   udot   =  (1/r^2) u^2 p_u / n^2
///   pdot   = -(1/r^2) dual(l) p
///            + ((m+1)/(r^2 |q|^2)) (l^2 + u^2 p_u^2 / n^2) q - dV0/dq + f
///   pudot  =  (n/(r^2 u)) (l^2 + ((n-1)/n^3) u^2 p_u^2) - dV0/du + f_u
///
/// with r^2 = u^{2n} |q|^{2m+2} and (f, f_u) the generalized form of the
/// total perturbing acceleration. The central potential is differentiated
/// at the unconstrained radius, never pre-simplified with |q| = 1.
inline ProjectiveRates rhs_time(const ProjectiveState& x, const TransformParams& params,
                                const PotentialModel& model, double t = 0.0) {
    detail::require_valid(params);
    const double qn = x.q.norm();
    if (!(x.u > 0.0) || qn == 0.0) {
        throw DegenerateState("rhs_time: requires u > 0 and q != 0");
    }
    const double n = params.n;
    const double m = params.m;
    const Vec3 qhat = x.q / qn;
    const Vec3 l_wedge_q = x.q.dot(x.p) * x.q - qn * qn * x.p;  // dual(l) q
    const Vec3 l_wedge_p = x.p.squaredNorm() * x.q - x.q.dot(x.p) * x.p;  // dual(l) p
    const double l2 = x.q.cross(x.p).squaredNorm();
    const double u2pu2 = x.u * x.u * x.p_u * x.p_u;

    const double inv_r2 = 1.0 / (std::pow(x.u, 2.0 * n) * std::pow(qn, 2.0 * m + 2.0));
    const double r = std::pow(x.u, n) * std::pow(qn, m + 1.0);
    const double dV0_dr = model.k1 / (r * r) + model.k2 / (r * r * r);

    ProjectiveRates d;
    d.q_dot = -inv_r2 * l_wedge_q;
    d.u_dot = inv_r2 * x.u * x.u * x.p_u / (n * n);
    d.p_dot = -inv_r2 * l_wedge_p +
              (m + 1.0) * inv_r2 / (qn * qn) * (l2 + u2pu2 / (n * n)) * x.q -
              dV0_dr * (m + 1.0) * std::pow(x.u, n) * std::pow(qn, m) * qhat;
    d.p_u_dot = n * inv_r2 / x.u * (l2 + (n - 1.0) / (n * n * n) * u2pu2) -
                dV0_dr * n * std::pow(x.u, n - 1.0) * std::pow(qn, m + 1.0);

    if (auto F = detail::total_perturbing_acceleration(x, params, model, t)) {
        const GeneralizedForce g = generalized_forces(*F, x, params);
        d.p_dot += g.f;
        d.p_u_dot += g.f_u;
    }
    return d;
}

/// @brief Equations of motion in the fictitious parameter s (dt = r^2 ds)
/// on the extended phase space.
///
/// With `eliminate_pt` (the default) the (q, u, p, p_u) block is exactly
/// t' = r^2 times `rhs_time`, the conformal-scaling identity that holds
/// once p_t = -H is substituted. With `eliminate_pt = false` the raw
/// derivatives of t'(q, u) (H + p_t) are kept:
///
///   p'   -= (H + p_t) (2m+2) (t'/|q|) qhat
///   p_u' -= (H + p_t) (2n/u) t'
///
/// which vanish on solutions but change the variational dynamics. In both
/// forms t' = r^2 and
///
///   p_t' = -t' dV1/dt - (alpha . q' + alpha_u u')
///
/// with (alpha, alpha_u) the generalized non-conservative force, i.e. the
/// power balance that keeps p_t = -H consistent.
inline ExtendedRates rhs_s(const ExtendedState& xe, const TransformParams& params,
                           const PotentialModel& model, bool eliminate_pt = true) {
    const ProjectiveState& x = xe.base;
    const double qn = x.q.norm();
    const double tp =
        std::pow(x.u, 2.0 * params.n) * std::pow(qn, 2.0 * params.m + 2.0);  // t' = r^2

    const ProjectiveRates dt = rhs_time(x, params, model, xe.t);

    ExtendedRates d;
    d.base.q_dot = tp * dt.q_dot;
    d.base.u_dot = tp * dt.u_dot;
    d.base.p_dot = tp * dt.p_dot;
    d.base.p_u_dot = tp * dt.p_u_dot;
    d.t_dot = tp;

    if (!eliminate_pt) {
        const double h_plus_pt = hamiltonian_projective(x, params, model, xe.t) + xe.p_t;
        const Vec3 qhat = x.q / qn;
        d.base.p_dot -= h_plus_pt * (2.0 * params.m + 2.0) * (tp / qn) * qhat;
        d.base.p_u_dot -= h_plus_pt * (2.0 * params.n / x.u) * tp;
    }

    d.p_t_dot = 0.0;
    if (model.has_perturbation()) {
        const CartesianState c = forward(x, params);
        d.p_t_dot -= tp * model.perturbation(c.r, xe.t).time_partial;
    }
    if (model.has_nonconservative()) {
        const CartesianState c = forward(x, params);
        const GeneralizedForce alpha =
            generalized_forces(model.nonconservative(c.r, c.v, xe.t), x, params);
        d.p_t_dot -= alpha.f.dot(d.base.q_dot) + alpha.f_u * d.base.u_dot;
    }
    return d;
}

/// @brief Equations of motion in the angular parameter tau: the s-rates
/// divided by |l|, with l recomputed from (q, p) at every call so the
/// identity dtau = |l| ds holds exactly along perturbed motion too.
/// Throws RectilinearOrbit when l = 0.
inline ExtendedRates rhs_tau(const ExtendedState& xe, const TransformParams& params,
                             const PotentialModel& model, bool eliminate_pt = true) {
    const double l = xe.base.q.cross(xe.base.p).norm();
    if (!(l > 0.0)) {
        throw RectilinearOrbit("rhs_tau: l = 0");
    }
    ExtendedRates d = rhs_s(xe, params, model, eliminate_pt);
    d.base.q_dot /= l;
    d.base.u_dot /= l;
    d.base.p_dot /= l;
    d.base.p_u_dot /= l;
    d.t_dot /= l;
    d.p_t_dot /= l;
    return d;
}

/// Derivative of a quasi-momentum state (q, p, u, w).
struct QuasiRates {
    Vec3 q_dot = Vec3::Zero();
    Vec3 p_dot = Vec3::Zero();
    double u_dot = 0.0;
    double w_dot = 0.0;
};

/// Evolution parameter selector for the quasi-momentum system.
enum class QuasiParameter { s, tau, time };

/// @brief Equations of motion of the quasi-momentum coordinates
/// x = (q, p, u, w), w = u^2 p_u, for the preferred transformation
/// n = m = -1:
///
///   q' = -dual(l) q ,   p' = -dual(l) p + f / u^2 ,
///   u' = w ,            w' = -(l^2 - k2) u + k1 + f_u ,
///
/// in s; the tau form divides by |l|, and the time form multiplies by
/// u^2 (dt = ds / u^2). The unperturbed system is linear in x and,
/// crucially, free of any division by u, so it propagates through and
/// beyond radial infinity (u <= 0) without singularity.
inline QuasiRates rhs_quasi(const QuasiState& x, const PotentialModel& model,
                            QuasiParameter parameter = QuasiParameter::s, double t = 0.0) {
    const Vec3 l_wedge_q = x.q.dot(x.p) * x.q - x.q.squaredNorm() * x.p;
    const Vec3 l_wedge_p = x.p.squaredNorm() * x.q - x.q.dot(x.p) * x.p;
    const double l2 = x.q.cross(x.p).squaredNorm();

    QuasiRates d;
    d.q_dot = -l_wedge_q;
    d.p_dot = -l_wedge_p;
    d.u_dot = x.w;
    d.w_dot = -(l2 - model.k2) * x.u + model.k1;

    if (model.has_perturbation() || model.has_nonconservative()) {
        const TransformParams preferred{};
        const ProjectiveState xs = from_quasi(x);
        if (auto F = detail::total_perturbing_acceleration(xs, preferred, model, t)) {
            const GeneralizedForce g = generalized_forces(*F, xs, preferred);
            d.p_dot += g.f / (x.u * x.u);
            d.w_dot += g.f_u;
        }
    }

    switch (parameter) {
        case QuasiParameter::s:
            break;
        case QuasiParameter::tau: {
            const double l = std::sqrt(l2);
            if (!(l > 0.0)) {
                throw RectilinearOrbit("rhs_quasi: l = 0");
            }
            d.q_dot /= l;
            d.p_dot /= l;
            d.u_dot /= l;
            d.w_dot /= l;
            break;
        }
        case QuasiParameter::time: {
            const double u2 = x.u * x.u;
            d.q_dot *= u2;
            d.p_dot *= u2;
            d.u_dot *= u2;
            d.w_dot *= u2;
            break;
        }
    }
    return d;
}

/// Time rates of the angular momentum and momentum magnitudes under a
/// generalized force.
struct AngularMomentumRates {
    Vec3 ldot_vec = Vec3::Zero();  ///< d l / dt = q x f
    double ldot_mag = 0.0;         ///< d |l| / dt = (|q|^2 / l) p . f
    double pdot_mag = 0.0;         ///< d |p| / dt = phat . f
};

/// @brief Evolution of l, |l|, |p| under the generalized force f. All
/// three vanish for radial (central) accelerations, which have f = 0.
/// Throws RectilinearOrbit when l = 0.
inline AngularMomentumRates angular_momentum_rates(const ProjectiveState& x,
                                                   const GeneralizedForce& force) {
    const double l = x.q.cross(x.p).norm();
    if (!(l > 0.0)) {
        throw RectilinearOrbit("angular_momentum_rates: l = 0");
    }
    AngularMomentumRates rates;
    rates.ldot_vec = x.q.cross(force.f);
    rates.ldot_mag = x.q.squaredNorm() / l * x.p.dot(force.f);
    const double pn = x.p.norm();
    rates.pdot_mag = (pn > 0.0) ? x.p.dot(force.f) / pn : 0.0;
    return rates;
}

/// Residuals of the decoupled second-order (in s) form of the preferred
/// dynamics; both are zero along exact trajectories.
struct SecondOrderResidual {
    Vec3 rotational = Vec3::Zero();  ///< q'' + l^2 q - (|q|^2 / u^2) f
    double radial = 0.0;             ///< u'' + (l^2 - k2) u - k1 - f_u
};

/// @brief Second-order residuals from sampled s-derivatives. The angular
/// momentum is reconstructed from (q, q') via l = (q x q') / |q|^2, which
/// is exact for the preferred dynamics where q' = -dual(l) q.
inline SecondOrderResidual second_order_residual(const Vec3& q, const Vec3& dq_ds,
                                                 const Vec3& d2q_ds2, double u, double d2u_ds2,
                                                 const PotentialModel& model,
                                                 const GeneralizedForce& force = {}) {
    const double qn2 = q.squaredNorm();
    if (qn2 == 0.0) {
        throw DegenerateState("second_order_residual: q = 0");
    }
    const double l2 = q.cross(dq_ds).squaredNorm() / (qn2 * qn2);
    SecondOrderResidual res;
    res.rotational = d2q_ds2 + l2 * q - (qn2 / (u * u)) * force.f;
    res.radial = d2u_ds2 + (l2 - model.k2) * u - model.k1 - force.f_u;
    return res;
}

}  // namespace regprop
