#pragma once

// Concrete perturbation models. The only built-in is the J2 oblateness
// term, provided along two independent routes that the tests compare:
// Cartesian potential/force callbacks for a PotentialModel, and the
// analytic projective generalized forces. The projective potential is
// expressed in the unsimplified variables (q3/|q| rather than q3): the
// constraint |q| = 1 may only be substituted after differentiation, so
// every gradient here keeps the full |q| dependence.

#include "regprop/dynamics.hpp"
#include "regprop/projective.hpp"
#include "regprop/types.hpp"

#include <cmath>

namespace regprop {

/// Oblateness model with the constants folded into a single coefficient
/// j2 = (3/2) J2 k1 R_a^2 of dimension length^5 / time^2.
struct J2Model {
    double j2 = 0.0;
    double k1 = 1.0;
    double R_a = 1.0;

    J2Model(double J2_coefficient, double k1_in, double equatorial_radius)
        : j2(1.5 * J2_coefficient * k1_in * equatorial_radius * equatorial_radius),
          k1(k1_in),
          R_a(equatorial_radius) {
        if (!(R_a > 0.0)) {
            throw std::invalid_argument("J2Model: equatorial radius must be positive");
        }
    }
};

/// @brief Oblateness potential V1 = (j2 / 3 r^3)(3 rhat3^2 - 1).
/// Throws OriginSingularity at r = 0.
inline double j2_potential_cartesian(const Vec3& r, const J2Model& m) {
    const double rn = r.norm();
    if (rn == 0.0) {
        throw OriginSingularity("j2_potential_cartesian: r = 0");
    }
    const double rhat3 = r[2] / rn;
    return m.j2 / (3.0 * rn * rn * rn) * (3.0 * rhat3 * rhat3 - 1.0);
}

/// @brief Oblateness acceleration F = -dV1/dr =
/// (j2 / r^4) [(5 rhat3^2 - 1) rhat - 2 rhat3 e3].
inline Vec3 j2_force_cartesian(const Vec3& r, const J2Model& m) {
    const double rn = r.norm();
    if (rn == 0.0) {
        throw OriginSingularity("j2_force_cartesian: r = 0");
    }
    const Vec3 rhat = r / rn;
    const double rhat3 = rhat[2];
    Vec3 f = (5.0 * rhat3 * rhat3 - 1.0) * rhat;
    f[2] -= 2.0 * rhat3;
    return m.j2 / (rn * rn * rn * rn) * f;
}

/// @brief Analytic projective generalized forces of the J2 term for the
/// preferred transformation (n = m = -1):
///
///   f   = (2 j2 u^3 / |q|) (qhat3^2 qhat - qhat3 e3)
///   f_u = -j2 u^2 (3 qhat3^2 - 1)
///
/// Identical to pulling j2_force_cartesian back through
/// generalized_forces; both derivations are kept and cross-checked.
/// Throws DegenerateState unless u > 0 and q != 0.
inline GeneralizedForce j2_generalized(const ProjectiveState& x, const J2Model& m) {
    const double qn = x.q.norm();
    if (!(x.u > 0.0) || qn == 0.0) {
        throw DegenerateState("j2_generalized: requires u > 0 and q != 0");
    }
    const Vec3 qhat = x.q / qn;
    const double qhat3 = qhat[2];
    const double u3 = x.u * x.u * x.u;

    GeneralizedForce g;
    g.f = qhat3 * qhat3 * qhat;
    g.f[2] -= qhat3;
    g.f *= 2.0 * m.j2 * u3 / qn;
    g.f_u = -m.j2 * x.u * x.u * (3.0 * qhat3 * qhat3 - 1.0);
    return g;
}

/// @brief J2 contribution to the projective Hamiltonian,
/// V1(q, u) = (1/3) j2 u^3 (3 qhat3^2 - 1); equals the Cartesian
/// potential composed with the forward map.
inline double j2_hamiltonian_term(const ProjectiveState& x, const J2Model& m) {
    const double qn = x.q.norm();
    if (!(x.u > 0.0) || qn == 0.0) {
        throw DegenerateState("j2_hamiltonian_term: requires u > 0 and q != 0");
    }
    const double qhat3 = x.q[2] / qn;
    return m.j2 / 3.0 * x.u * x.u * x.u * (3.0 * qhat3 * qhat3 - 1.0);
}

/// @brief Pure inverse-square model.
inline PotentialModel make_kepler_model(double k1) {
    PotentialModel model;
    model.k1 = k1;
    return model;
}

/// @brief Inverse-square plus inverse-cube model.
inline PotentialModel make_manev_model(double k1, double k2) {
    PotentialModel model;
    model.k1 = k1;
    model.k2 = k2;
    return model;
}

/// @brief Kepler model carrying the J2 term as a conservative
/// perturbation callback (analytic gradient, no explicit time
/// dependence).
inline PotentialModel make_j2_model(const J2Model& m) {
    PotentialModel model;
    model.k1 = m.k1;
    model.perturbation = [m](const Vec3& r, double) {
        PerturbationEval eval;
        eval.value = j2_potential_cartesian(r, m);
        eval.gradient = -j2_force_cartesian(r, m);
        eval.time_partial = 0.0;
        return eval;
    };
    return model;
}

}  // namespace regprop
