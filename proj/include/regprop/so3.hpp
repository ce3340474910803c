#pragma once

// Rotation-group kinematics on R^3 specialized to the sign conventions used
// throughout this library.
//
// The central object is the Hodge dual of a vector,
//
//     dual(u)_ij := eps_ijk u_k ,
//
// which is the NEGATIVE of the usual cross-product matrix: dual(u) * w equals
// w x u, not u x w. All downstream formulas (angular-momentum products,
// Rodrigues rotations, flow matrices) are written against this convention,
// so the sign lives in exactly one place.

#include "regprop/types.hpp"

#include <cmath>

namespace regprop {

/// @brief Hodge dual of a 3-vector: dual(u)_ij = eps_ijk u_k.
///
/// dual(u) * w = w x u = -(u x w). The matrix is antisymmetric and
/// dual(u) * u = 0.
inline Mat3 hodge_dual(const Vec3& u) {
    Mat3 m;
    // clang-format off
    m <<    0.0,  u.z(), -u.y(),
         -u.z(),    0.0,  u.x(),
          u.y(), -u.x(),    0.0;
    // clang-format on
    return m;
}

/// @brief Recover u from an antisymmetric matrix with dual(u) = a.
///
/// Uses u_i = (1/2) eps_ijk a_jk, which averages the two off-diagonal
/// copies of each component. Throws NonAntisymmetric when the symmetric
/// part of `a` exceeds 1e-12 * max(1, max|a_ij|).
inline Vec3 hodge_inverse(const Mat3& a) {
    const double sym = (a + a.transpose()).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    if (sym > 1e-12 * scale) {
        throw NonAntisymmetric("hodge_inverse: matrix is not antisymmetric");
    }
    return Vec3(0.5 * (a(1, 2) - a(2, 1)),
                0.5 * (a(2, 0) - a(0, 2)),
                0.5 * (a(0, 1) - a(1, 0)));
}

/// @brief Matrix exponential exp(dual(rho) * eps) for a general (not
/// necessarily unit) vector rho.
///
/// exp(dual(rho) eps) = cos(r eps) I + sin(r eps) dual(rhat)
///                      + (1 - cos(r eps)) rhat rhat^T,  r = |rho|.
/// For rho = 0 this is the identity.
inline Mat3 hodge_exp(const Vec3& rho, double eps) {
    const double r = rho.norm();
    if (r == 0.0) {
        return Mat3::Identity();
    }
    const Vec3 rhat = rho / r;
    const double c = std::cos(r * eps);
    const double s = std::sin(r * eps);
    return c * Mat3::Identity() + s * hodge_dual(rhat) +
           (1.0 - c) * (rhat * rhat.transpose());
}

/// @brief Rodrigues rotation by `angle` about `axis` (right-hand rule).
///
/// R = cos(a) I - sin(a) dual(nhat) + (1 - cos(a)) nhat nhat^T
///   = exp(-dual(nhat) a),
/// so R * x rotates x counterclockwise about nhat. Satisfies the
/// composition law R(a1) R(a2) = R(a1 + a2) for a common axis.
/// Throws ZeroAxis when |axis| < 1e-300.
inline Mat3 rodrigues_rotation(const Vec3& axis, double angle) {
    const double n = axis.norm();
    if (n < 1e-300) {
        throw ZeroAxis("rodrigues_rotation: axis has zero length");
    }
    const Vec3 nhat = axis / n;
    return hodge_exp(nhat, -angle);
}

/// Specific angular momentum of a coordinate/velocity (or coordinate/
/// momentum) pair in the three shapes the formulas need: the vector
/// x cross y, its wedge matrix x (x) y - y (x) x = dual(x cross y), and the
/// magnitude.
struct AngularMomentum {
    Vec3 vec;    ///< l = x cross y
    Mat3 mat;    ///< dual(l) = x y^T - y x^T
    double mag;  ///< |l|, with l^2 = x^2 y^2 - (x.y)^2
};

/// @brief Angular momentum triple (vector, wedge matrix, magnitude) of (x, y).
inline AngularMomentum angular_momentum(const Vec3& x, const Vec3& y) {
    AngularMomentum am;
    am.vec = x.cross(y);
    am.mat = x * y.transpose() - y * x.transpose();
    am.mag = am.vec.norm();
    return am;
}

}  // namespace regprop
