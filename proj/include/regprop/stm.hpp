#pragma once

// State transition matrices of the unperturbed (Kepler) projective flow
// in closed form, generic variational-equation propagation, and the
// symplectic-structure diagnostics used throughout the test suites.
//
// Closed forms provided:
//
//   Sigma  block rotation e^{M tau/l}: R_tau(lhat) on q and on p plus the
//          2x2 radial rotation, an 8x8 element of Sp(6;2);
//   Phi    exact flow Jacobian of the quasi-momentum system in tau, both
//          the unsimplified version (valid for any q, p) and the
//          constraint-manifold simplification with l ~ |p|;
//   Theta  the Jacobian of the *pre-simplified* flow (l replaced by |p0|
//          before differentiating), which is deliberately not equal to
//          Phi, since differentiation and constraint substitution do
//          not commute;
//   Psi    the canonical-coordinate STM obtained from Phi by chain rule
//          through w = u^2 p_u.
//
// Every matrix carries coordinate-ordering and evolution-parameter tags;
// composition refuses mismatched tags, since the orderings (q,p,u,w) and
// (q,u,p,p_u) look alike at a glance and silent mixing is the easiest
// mistake to make with these objects.

#include "regprop/closed_form.hpp"
#include "regprop/dynamics.hpp"
#include "regprop/projective.hpp"
#include "regprop/propagator.hpp"
#include "regprop/so3.hpp"
#include "regprop/types.hpp"

#include <cmath>
#include <functional>
#include <string>

namespace regprop {

/// Row/column convention of an STM.
enum class StateOrdering {
    modified,          ///< (q, p, u, w), 8x8
    standard,          ///< (q, u, p, p_u), 8x8
    canonical_paired,  ///< (q, p, u, p_u), 8x8 (output of psi_canonical)
    extended6,         ///< (q, p), 6x6 rotational subsystem
    radial2,           ///< (u, w), 2x2 radial subsystem
    extended10,        ///< (q, u, p, p_u, t, p_t), 10x10
};

/// Independent variable the STM differentiates along.
enum class EvolutionParameter { time, fictitious_s, true_anomaly };

inline Eigen::Index ordering_dimension(StateOrdering ordering) {
    switch (ordering) {
        case StateOrdering::extended6: return 6;
        case StateOrdering::radial2: return 2;
        case StateOrdering::extended10: return 10;
        default: return 8;
    }
}

/// State transition matrix with mandatory coordinate and parameter tags.
struct Stm {
    MatX entries;
    StateOrdering ordering = StateOrdering::modified;
    EvolutionParameter parameter = EvolutionParameter::true_anomaly;

    static Stm identity(StateOrdering ordering, EvolutionParameter parameter) {
        const Eigen::Index n = ordering_dimension(ordering);
        return Stm{MatX::Identity(n, n), ordering, parameter};
    }
};

/// @brief Chain two STMs: result maps the domain of `earlier` to the
/// codomain of `later`. Tags must agree exactly; mismatches throw rather
/// than silently producing a wrong-basis product.
inline Stm compose(const Stm& later, const Stm& earlier) {
    if (later.ordering != earlier.ordering || later.parameter != earlier.parameter) {
        throw std::invalid_argument("compose: STM coordinate or parameter tags differ");
    }
    if (later.entries.cols() != earlier.entries.rows()) {
        throw DimensionMismatch("compose: incompatible STM dimensions");
    }
    return Stm{later.entries * earlier.entries, later.ordering, later.parameter};
}

/// Symplectic form selector. j62_modified is J6;2 = diag(J6, J2) for the
/// pair-grouped orderings ((q,p) then a conjugate scalar pair); the
/// standard forms put all positions before all momenta.
enum class SymplecticForm {
    j8_standard,   ///< (q, u, p, p_u): [[0, I4], [-I4, 0]]
    j62_modified,  ///< (q, p | u, w or p_u): diag([[0,I3],[-I3,0]], [[0,1],[-1,0]])
    j10_extended,  ///< (q, u, p, p_u, t, p_t): diag(J8, J2)
};

inline MatX symplectic_form_matrix(SymplecticForm form) {
    const auto canonical = [](Eigen::Index half) {
        MatX j = MatX::Zero(2 * half, 2 * half);
        j.topRightCorner(half, half) = MatX::Identity(half, half);
        j.bottomLeftCorner(half, half) = -MatX::Identity(half, half);
        return j;
    };
    switch (form) {
        case SymplecticForm::j8_standard: return canonical(4);
        case SymplecticForm::j62_modified: {
            MatX j = MatX::Zero(8, 8);
            j.topLeftCorner(6, 6) = canonical(3);
            j.bottomRightCorner(2, 2) = canonical(1);
            return j;
        }
        case SymplecticForm::j10_extended: {
            MatX j = MatX::Zero(10, 10);
            j.topLeftCorner(8, 8) = canonical(4);
            j.bottomRightCorner(2, 2) = canonical(1);
            return j;
        }
    }
    throw std::invalid_argument("symplectic_form_matrix: unknown form");
}

/// @brief Max-norm defect of the symplectic condition, ||S^T J S - J||.
/// Zero exactly when S preserves the form. Throws DimensionMismatch when
/// S and J disagree in size.
inline double symplectic_residual(const MatX& s, SymplecticForm form) {
    const MatX j = symplectic_form_matrix(form);
    if (s.rows() != j.rows() || s.cols() != j.cols()) {
        throw DimensionMismatch("symplectic_residual: matrix size does not match form");
    }
    return (s.transpose() * j * s - j).cwiseAbs().maxCoeff();
}

inline double symplectic_residual(const Stm& s, SymplecticForm form) {
    return symplectic_residual(s.entries, form);
}

/// @brief Generator M of the unperturbed linear quasi-momentum system in
/// the ordering (q, p, u, w): block-diagonal with -dual(l) twice and the
/// radial block [[0, 1], [-l^2, 0]]. Eigenvalues are {0, 0} and three
/// pairs +-i l. Throws RectilinearOrbit when l = 0.
inline MatX generator_matrix(const Vec3& l_vec) {
    const double l = l_vec.norm();
    if (!(l > 0.0)) {
        throw RectilinearOrbit("generator_matrix: l = 0");
    }
    MatX m = MatX::Zero(8, 8);
    const Mat3 neg_dual = -hodge_dual(l_vec);
    m.block<3, 3>(0, 0) = neg_dual;
    m.block<3, 3>(3, 3) = neg_dual;
    m(6, 7) = 1.0;
    m(7, 6) = -l * l;
    return m;
}

/// @brief Closed-form exponential Sigma_tau = e^{M tau / l}: a rotation
/// by tau about lhat on each of q and p, and the 2x2 radial rotation
/// [[cos tau, sin tau / l], [-l sin tau, cos tau]]. An element of
/// Sp(6;2) for every tau, with Sigma_{-tau} as inverse.
inline Stm sigma_matrix(const Vec3& l_vec, double tau) {
    const double l = l_vec.norm();
    if (!(l > 0.0)) {
        throw RectilinearOrbit("sigma_matrix: l = 0");
    }
    const Mat3 rot = rodrigues_rotation(l_vec, tau);
    Stm s = Stm::identity(StateOrdering::modified, EvolutionParameter::true_anomaly);
    s.entries.block<3, 3>(0, 0) = rot;
    s.entries.block<3, 3>(3, 3) = rot;
    const double c = std::cos(tau);
    const double sn = std::sin(tau);
    s.entries(6, 6) = c;
    s.entries(6, 7) = sn / l;
    s.entries(7, 6) = -l * sn;
    s.entries(7, 7) = c;
    return s;
}

/// @brief Block matrix [[0, I_n], [-l^2 I_n, 0]] of size 2n, the n-fold
/// radial-oscillator generator.
inline MatX oscillator_block_matrix(Eigen::Index n, double l) {
    MatX m = MatX::Zero(2 * n, 2 * n);
    m.topRightCorner(n, n) = MatX::Identity(n, n);
    m.bottomLeftCorner(n, n) = -l * l * MatX::Identity(n, n);
    return m;
}

/// @brief Closed-form exponential of oscillator_block_matrix times the
/// parameter s: [[cos(ls) I, sin(ls)/l I], [-l sin(ls) I, cos(ls) I]].
inline MatX oscillator_block_exp(Eigen::Index n, double l, double s) {
    const double c = std::cos(l * s);
    const double sn = std::sin(l * s);
    MatX e = MatX::Zero(2 * n, 2 * n);
    e.topLeftCorner(n, n) = c * MatX::Identity(n, n);
    e.topRightCorner(n, n) = sn / l * MatX::Identity(n, n);
    e.bottomLeftCorner(n, n) = -l * sn * MatX::Identity(n, n);
    e.bottomRightCorner(n, n) = c * MatX::Identity(n, n);
    return e;
}

/// @brief Rotational-subsystem flow matrix built from the alternative
/// generator A = [[-(q.p) I, |q|^2 I], [-|p|^2 I, (q.p) I]], which
/// satisfies A^2 = -l^2 I and whose coefficients are themselves integrals
/// of the unperturbed motion. Returns the 6x6 e^{A tau / l} acting on
/// (q, p); equals the Rodrigues-rotation route on flow states.
inline Stm rotational_flow_alternative(const Vec3& q0, const Vec3& p0, double tau) {
    const double l = q0.cross(p0).norm();
    if (!(l > 0.0)) {
        throw RectilinearOrbit("rotational_flow_alternative: l = 0");
    }
    const double c = std::cos(tau);
    const double sn = std::sin(tau);
    const double qp = q0.dot(p0);
    Stm s{MatX::Zero(6, 6), StateOrdering::extended6, EvolutionParameter::true_anomaly};
    s.entries.topLeftCorner(3, 3) = (c - qp / l * sn) * Mat3::Identity();
    s.entries.topRightCorner(3, 3) = q0.squaredNorm() / l * sn * Mat3::Identity();
    s.entries.bottomLeftCorner(3, 3) = -p0.squaredNorm() / l * sn * Mat3::Identity();
    s.entries.bottomRightCorner(3, 3) = (c + qp / l * sn) * Mat3::Identity();
    return s;
}

/// @brief Exact Jacobian of the unperturbed Kepler flow in tau at the
/// initial quasi-state x0, ordering (q, p, u, w). Valid for arbitrary
/// (q, p) with l > 0: no constraint-manifold simplification is applied.
/// The (u, w) rows pick up their (q0, p0) sensitivity purely through l.
/// Phi_0 = I and Phi_tau^{-1} = Phi_{-tau} evaluated at the flow image.
inline Stm phi_full(const QuasiState& x0, double k1, double tau) {
    const Vec3 l_vec = x0.q.cross(x0.p);
    const double l = l_vec.norm();
    if (!(l > 0.0)) {
        throw RectilinearOrbit("phi_full: l = 0");
    }
    const Vec3 lhat = l_vec / l;
    const Mat3 lhat_star = hodge_dual(lhat);
    const Mat3 q_star = hodge_dual(x0.q);
    const Mat3 p_star = hodge_dual(x0.p);
    const Vec3 lhat_wedge_q = lhat_star * x0.q;
    const Vec3 lhat_wedge_p = lhat_star * x0.p;
    const Mat3 lhat_outer = lhat * lhat.transpose();
    const double c = std::cos(tau);
    const double sn = std::sin(tau);

    Stm s = Stm::identity(StateOrdering::modified, EvolutionParameter::true_anomaly);
    s.entries.block<3, 3>(0, 0) =
        c * Mat3::Identity() -
        sn / l * (l * lhat_star - q_star * p_star - lhat_wedge_q * lhat_wedge_p.transpose());
    s.entries.block<3, 3>(0, 3) = x0.q.squaredNorm() / l * sn * lhat_outer;
    s.entries.block<3, 3>(3, 0) = -x0.p.squaredNorm() / l * sn * lhat_outer;
    s.entries.block<3, 3>(3, 3) =
        c * Mat3::Identity() -
        sn / l * (l * lhat_star + p_star * q_star + lhat_wedge_p * lhat_wedge_q.transpose());

    // (u, w) sensitivities enter only through l; rows are the chain rule
    // through dl/dq = dual(lhat) p, dl/dp = -dual(lhat) q.
    const double a_coef = 2.0 * k1 / (l * l) * (1.0 - c) + x0.w / l * sn;
    const double b_coef = (x0.u + k1 / (l * l)) * sn;
    s.entries.block<1, 3>(6, 0) = -(a_coef / l) * lhat_wedge_p.transpose();
    s.entries.block<1, 3>(6, 3) = (a_coef / l) * lhat_wedge_q.transpose();
    s.entries.block<1, 3>(7, 0) = -b_coef * lhat_wedge_p.transpose();
    s.entries.block<1, 3>(7, 3) = b_coef * lhat_wedge_q.transpose();

    s.entries(6, 6) = c;
    s.entries(6, 7) = sn / l;
    s.entries(7, 6) = -l * sn;
    s.entries(7, 7) = c;
    return s;
}

namespace detail {

inline void require_constraint(const QuasiState& x0, const char* who) {
    const double qn = x0.q.norm();
    if (std::abs(qn - 1.0) > 1e-8 || std::abs(x0.q.dot(x0.p)) / qn > 1e-8) {
        throw ConstraintViolated(std::string(who) +
                                 ": requires |q| = 1 and q.p = 0 within 1e-8");
    }
}

}  // namespace detail

/// @brief Constraint-manifold simplification of phi_full with l replaced
/// by |p| after differentiating. Valid only where |q| = 1 and q.p = 0;
/// agrees with phi_full there. Throws ConstraintViolated off-manifold.
inline Stm phi_simplified(const QuasiState& x0, double k1, double tau) {
    detail::require_constraint(x0, "phi_simplified");
    const double l = x0.p.norm();
    if (!(l > 0.0)) {
        throw RectilinearOrbit("phi_simplified: p = 0");
    }
    const Vec3 lhat = x0.q.cross(x0.p) / x0.q.cross(x0.p).norm();
    const Mat3 lhat_star = hodge_dual(lhat);
    const Mat3 lhat_outer = lhat * lhat.transpose();
    const Vec3 phat = x0.p / l;
    const double c = std::cos(tau);
    const double sn = std::sin(tau);

    Stm s = Stm::identity(StateOrdering::modified, EvolutionParameter::true_anomaly);
    const Mat3 rot = c * Mat3::Identity() - sn * lhat_star;
    s.entries.block<3, 3>(0, 0) = rot;
    s.entries.block<3, 3>(0, 3) = sn / l * lhat_outer;
    s.entries.block<3, 3>(3, 0) = -l * sn * lhat_outer;
    s.entries.block<3, 3>(3, 3) = rot;

    const double a_coef = 2.0 * k1 / (l * l) * (1.0 - c) + x0.w / l * sn;
    const double b_coef = (x0.u + k1 / (l * l)) * sn;
    s.entries.block<1, 3>(6, 0) = -a_coef * x0.q.transpose();
    s.entries.block<1, 3>(6, 3) = -(a_coef / l) * phat.transpose();
    s.entries.block<1, 3>(7, 0) = -l * b_coef * x0.q.transpose();
    s.entries.block<1, 3>(7, 3) = -b_coef * phat.transpose();

    s.entries(6, 6) = c;
    s.entries(6, 7) = sn / l;
    s.entries(7, 6) = -l * sn;
    s.entries(7, 7) = c;
    return s;
}

/// @brief Jacobian of the pre-simplified flow, i.e. the closed form with
/// l already replaced by |p0| before differentiating. Deliberately not
/// equal to phi_full or phi_simplified: substituting the constraint and
/// then differentiating discards the sensitivity of l to (q0, p0)
/// directions off the manifold. Matches finite differences of the
/// pre-simplified flow formulas, not of the true flow.
inline Stm theta_matrix(const QuasiState& x0, double k1, double tau) {
    detail::require_constraint(x0, "theta_matrix");
    const double p = x0.p.norm();
    if (!(p > 0.0)) {
        throw RectilinearOrbit("theta_matrix: p = 0");
    }
    const Vec3 phat = x0.p / p;
    const Mat3 phat_outer = phat * phat.transpose();
    const double c = std::cos(tau);
    const double sn = std::sin(tau);

    Stm s = Stm::identity(StateOrdering::modified, EvolutionParameter::true_anomaly);
    s.entries.block<3, 3>(0, 0) = c * Mat3::Identity();
    s.entries.block<3, 3>(0, 3) = sn / p * (Mat3::Identity() - phat_outer);
    s.entries.block<3, 3>(3, 0) = -p * sn * Mat3::Identity();
    s.entries.block<3, 3>(3, 3) = c * Mat3::Identity() - sn * x0.q * phat.transpose();

    const double a_coef = 2.0 * k1 / (p * p) * (1.0 - c) + x0.w / p * sn;
    const double b_coef = (x0.u + k1 / (p * p)) * sn;
    s.entries.block<1, 3>(6, 0).setZero();
    s.entries.block<1, 3>(6, 3) = -(a_coef / p) * phat.transpose();
    s.entries.block<1, 3>(7, 0).setZero();
    s.entries.block<1, 3>(7, 3) = -b_coef * phat.transpose();

    s.entries(6, 6) = c;
    s.entries(6, 7) = sn / p;
    s.entries(7, 6) = -p * sn;
    s.entries(7, 7) = c;
    return s;
}

/// @brief Convert a (q, p, u, w) STM to the canonical coordinates
/// z = (q, p, u, p_u) via the chain rule through w = u^2 p_u:
/// Psi = (dz/dx at the endpoint) Phi (dx/dz at the start). Canonical
/// STMs of time-parameterized flows are symplectic with respect to
/// J6;2; fictitious-parameter STMs in general are not. Throws
/// DegenerateState when either endpoint has u = 0.
inline Stm psi_canonical(const Stm& phi, const QuasiState& x0, const QuasiState& x_tau) {
    if (phi.ordering != StateOrdering::modified) {
        throw std::invalid_argument("psi_canonical: input STM must be (q, p, u, w) ordered");
    }
    if (x0.u == 0.0 || x_tau.u == 0.0) {
        throw DegenerateState("psi_canonical: u = 0 at an endpoint");
    }
    // dx/dz at x0: w = u^2 p_u with p_u0 = w0/u0^2.
    MatX x_of_z = MatX::Identity(8, 8);
    x_of_z(7, 6) = 2.0 * x0.w / x0.u;   // dw/du = 2 u p_u
    x_of_z(7, 7) = x0.u * x0.u;         // dw/dp_u
    // dz/dx at x_tau (the inverse block).
    MatX z_of_x = MatX::Identity(8, 8);
    z_of_x(7, 6) = -2.0 * x_tau.w / (x_tau.u * x_tau.u * x_tau.u);  // dp_u/du = -2w/u^3
    z_of_x(7, 7) = 1.0 / (x_tau.u * x_tau.u);
    return Stm{z_of_x * phi.entries * x_of_z, StateOrdering::canonical_paired, phi.parameter};
}

/// @brief Reorder a pair-grouped canonical STM (q, p, u, p_u) into the
/// standard ordering (q, u, p, p_u) by row/column permutation.
inline Stm paired_to_standard(const Stm& s) {
    if (s.ordering != StateOrdering::canonical_paired) {
        throw std::invalid_argument("paired_to_standard: input must be (q, p, u, p_u) ordered");
    }
    // Row i of P selects source component perm[i].
    const int perm[8] = {0, 1, 2, 6, 3, 4, 5, 7};
    MatX p = MatX::Zero(8, 8);
    for (int i = 0; i < 8; ++i) {
        p(i, perm[i]) = 1.0;
    }
    return Stm{p * s.entries * p.transpose(), StateOrdering::standard, s.parameter};
}

/// @brief Analytic Jacobian of the unperturbed quasi-momentum field
/// (Kepler or Manev) at x, in the requested evolution parameter,
/// ordering (q, p, u, w). The tau form carries the extra rank-one term
/// from differentiating the 1/l normalization; the time form carries the
/// u^2 conformal factor.
inline MatX quasi_field_jacobian(const QuasiState& x, double k1, double k2,
                                 QuasiParameter parameter = QuasiParameter::s) {
    const Vec3 l_vec = x.q.cross(x.p);
    const double l2 = l_vec.squaredNorm();
    const Mat3 l_star = hodge_dual(l_vec);
    const Mat3 q_star = hodge_dual(x.q);
    const Mat3 p_star = hodge_dual(x.p);

    MatX jac = MatX::Zero(8, 8);
    jac.block<3, 3>(0, 0) = -(l_star - q_star * p_star);
    jac.block<3, 3>(0, 3) = x.q.squaredNorm() * Mat3::Identity() - x.q * x.q.transpose();
    jac.block<3, 3>(3, 0) = -(x.p.squaredNorm() * Mat3::Identity() - x.p * x.p.transpose());
    jac.block<3, 3>(3, 3) = -(l_star + p_star * q_star);
    jac(6, 7) = 1.0;
    jac.block<1, 3>(7, 0) = -2.0 * x.u * (l_star * x.p).transpose();
    jac.block<1, 3>(7, 3) = 2.0 * x.u * (l_star * x.q).transpose();
    jac(7, 6) = -(l2 - k2);

    if (parameter == QuasiParameter::s) {
        return jac;
    }
    PotentialModel model;
    model.k1 = k1;
    model.k2 = k2;
    const QuasiRates rates = rhs_quasi(x, model, QuasiParameter::s);
    VecX field(8);
    field << rates.q_dot, rates.p_dot, rates.u_dot, rates.w_dot;

    if (parameter == QuasiParameter::tau) {
        const double l = std::sqrt(l2);
        if (!(l > 0.0)) {
            throw RectilinearOrbit("quasi_field_jacobian: l = 0");
        }
        // d(X/l)/dx = J/l - (X/l^2) (dl/dx)^T.
        VecX dl(8);
        dl << (l_star * x.p) / l, -(l_star * x.q) / l, 0.0, 0.0;
        return jac / l - field * dl.transpose() / l2;
    }
    MatX jt = x.u * x.u * jac;
    jt.col(6) += 2.0 * x.u * field;
    return jt;
}

/// @brief Central-difference Jacobian, h_i = 1e-6 max(1, |x_i|).
inline MatX fd_jacobian(const std::function<VecX(const VecX&)>& f, const VecX& x) {
    const Eigen::Index n = x.size();
    const Eigen::Index m = f(x).size();
    MatX jac(m, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double h = 1e-6 * std::max(1.0, std::abs(x[i]));
        VecX xp = x;
        VecX xm = x;
        xp[i] += h;
        xm[i] -= h;
        jac.col(i) = (f(xp) - f(xm)) / (2.0 * h);
    }
    return jac;
}

/// @brief Fourth-order five-point Jacobian for accuracy-critical
/// variational runs, where the O(h^2) bias of the three-point stencil
/// would accumulate over many orbits.
inline MatX fd_jacobian_order4(const std::function<VecX(const VecX&)>& f, const VecX& x,
                               double h_scale = 1e-3) {
    const Eigen::Index n = x.size();
    const Eigen::Index m = f(x).size();
    MatX jac(m, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double h = h_scale * std::max(1.0, std::abs(x[i]));
        VecX x1 = x, x2 = x, x3 = x, x4 = x;
        x1[i] -= 2.0 * h;
        x2[i] -= h;
        x3[i] += h;
        x4[i] += 2.0 * h;
        jac.col(i) = (f(x1) - 8.0 * f(x2) + 8.0 * f(x3) - f(x4)) / (12.0 * h);
    }
    return jac;
}

using JacobianFn = std::function<MatX(double, const VecX&)>;

/// Result of variational propagation: the STM over the span plus the
/// reference trajectory endpoint it was linearized about.
struct VariationalResult {
    Stm stm;
    VecX x_final;
};

/// @brief Propagate dPhi/de = (dX/dx) Phi, Phi(0) = I, alongside the
/// reference trajectory x' = X(e, x). The Jacobian callback may be
/// analytic or a finite-difference wrapper. Tags on the result are the
/// caller-declared ordering and parameter of the supplied field.
inline VariationalResult stm_variational(const RhsFn& rhs, const JacobianFn& jacobian,
                                         const VecX& x0, double span_start, double span_end,
                                         const IntegratorConfig& config, StateOrdering ordering,
                                         EvolutionParameter parameter) {
    const Eigen::Index n = x0.size();
    VecX y0(n + n * n);
    y0.head(n) = x0;
    Eigen::Map<MatX>(y0.data() + n, n, n) = MatX::Identity(n, n);

    const RhsFn augmented = [&rhs, &jacobian, n](double e, const VecX& y) {
        const VecX x = y.head(n);
        const Eigen::Map<const MatX> phi(y.data() + n, n, n);
        VecX dy(y.size());
        dy.head(n) = rhs(e, x);
        Eigen::Map<MatX>(dy.data() + n, n, n) = jacobian(e, x) * phi;
        return dy;
    };

    const Trajectory traj = integrate(augmented, y0, span_start, span_end, config);
    const VecX& yf = traj.final_state();
    VariationalResult out{Stm{MatX(Eigen::Map<const MatX>(yf.data() + n, n, n)), ordering,
                              parameter},
                          VecX(yf.head(n))};
    return out;
}

}  // namespace regprop
