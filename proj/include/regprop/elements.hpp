#pragma once

// Classical orbit elements and their conversion to and from Cartesian
// states: standard perifocal construction with the 3-1-3 rotation
// Rz(raan) Rx(i) Rz(omega_arg). Conventions:
//
//   * a is signed: positive for ellipses, negative for hyperbolas
//     (P_slr = a (1 - e^2) is positive either way); for parabolic orbits
//     (|e - 1| < 1e-12) a holds the periapsis radius and P_slr = 2a.
//   * Degenerate geometries are folded deterministically on recovery:
//     near-zero inclination (sin i < 1e-10) sets raan = 0 and measures
//     omega_arg from e1; near-zero eccentricity (e < 1e-12) sets
//     omega_arg = 0 and measures the true anomaly from the node.
//   * Recovered raan and omega_arg lie in [0, 2 pi), true_anomaly in
//     (-pi, pi] (hyperbolic anomalies never wrap).

#include "regprop/projective.hpp"
#include "regprop/so3.hpp"
#include "regprop/types.hpp"

#include <cmath>

namespace regprop {

struct OrbitElements {
    double a = 1.0;             ///< semimajor axis (periapsis radius when parabolic)
    double e = 0.0;             ///< eccentricity
    double i = 0.0;             ///< inclination, rad
    double omega_arg = 0.0;     ///< argument of periapsis, rad
    double raan = 0.0;          ///< right ascension of ascending node, rad
    double true_anomaly = 0.0;  ///< rad
};

namespace detail {

inline double wrap_two_pi(double angle) {
    const double two_pi = 2.0 * M_PI;
    double w = std::fmod(angle, two_pi);
    if (w < 0.0) {
        w += two_pi;
    }
    return w;
}

}  // namespace detail

/// @brief Semilatus rectum of an element set, honoring the parabolic
/// a-as-periapsis-radius convention.
inline double semilatus_rectum_of(const OrbitElements& el) {
    if (std::abs(el.e - 1.0) < 1e-12) {
        return 2.0 * el.a;
    }
    return el.a * (1.0 - el.e) * (1.0 + el.e);
}

/// @brief Cartesian state of an element set: perifocal conic position
/// and velocity rotated into the inertial frame. Throws AsymptoteReached
/// when 1 + e cos f is not positive (hyperbolic input at or past the
/// asymptote) and std::invalid_argument for nonpositive semilatus rectum
/// or negative eccentricity.
inline CartesianState elements_to_cartesian(const OrbitElements& el, double k1) {
    if (el.e < 0.0) {
        throw std::invalid_argument("elements_to_cartesian: eccentricity must be nonnegative");
    }
    const double p_slr = semilatus_rectum_of(el);
    if (!(p_slr > 0.0)) {
        throw std::invalid_argument("elements_to_cartesian: semilatus rectum must be positive"
                                    " (check the sign convention of a)");
    }
    const double denom = 1.0 + el.e * std::cos(el.true_anomaly);
    if (!(denom > 1e-12)) {
        throw AsymptoteReached("elements_to_cartesian: true anomaly at or beyond asymptote");
    }
    const double r = p_slr / denom;
    const double cf = std::cos(el.true_anomaly);
    const double sf = std::sin(el.true_anomaly);
    const Vec3 r_pf(r * cf, r * sf, 0.0);
    const double vs = std::sqrt(k1 / p_slr);
    const Vec3 v_pf(-vs * sf, vs * (el.e + cf), 0.0);

    const Mat3 rot = rodrigues_rotation(Vec3::UnitZ(), el.raan) *
                     rodrigues_rotation(Vec3::UnitX(), el.i) *
                     rodrigues_rotation(Vec3::UnitZ(), el.omega_arg);
    return CartesianState{rot * r_pf, rot * v_pf};
}

/// @brief Elements of a Cartesian state, with the degeneracy folding
/// described in the header comment. Throws RectilinearOrbit for zero
/// angular momentum and OriginSingularity at r = 0.
inline OrbitElements cartesian_to_elements(const CartesianState& c, double k1) {
    const double rn = c.r.norm();
    if (rn == 0.0) {
        throw OriginSingularity("cartesian_to_elements: r = 0");
    }
    const Vec3 l_vec = c.r.cross(c.v);
    const double l = l_vec.norm();
    if (!(l > 0.0)) {
        throw RectilinearOrbit("cartesian_to_elements: r x v = 0");
    }
    const Vec3 lhat = l_vec / l;
    const Vec3 e_vec = c.v.cross(l_vec) / k1 - c.r / rn;
    const double ecc = e_vec.norm();

    OrbitElements el;
    el.e = ecc;
    el.i = std::acos(std::clamp(lhat[2], -1.0, 1.0));
    if (std::abs(ecc - 1.0) < 1e-12) {
        el.a = l * l / (2.0 * k1);  // periapsis radius of the parabola
    } else {
        const double energy = 0.5 * c.v.squaredNorm() - k1 / rn;
        el.a = -k1 / (2.0 * energy);
    }

    // Node line; folds to e1 when the orbit plane is (anti)equatorial.
    const Vec3 node_raw(-l_vec[1], l_vec[0], 0.0);  // e3 x l
    const bool equatorial = node_raw.norm() / l < 1e-10;
    Vec3 node = Vec3::UnitX();
    if (equatorial) {
        el.raan = 0.0;
    } else {
        node = node_raw.normalized();
        el.raan = detail::wrap_two_pi(std::atan2(node[1], node[0]));
    }

    const Vec3 rhat = c.r / rn;
    const auto angle_about_lhat = [&lhat](const Vec3& from, const Vec3& to) {
        return std::atan2(from.cross(to).dot(lhat), from.dot(to));
    };
    if (ecc < 1e-12) {
        el.omega_arg = 0.0;
        el.true_anomaly = angle_about_lhat(node, rhat);
    } else {
        const Vec3 ehat = e_vec / ecc;
        el.omega_arg = detail::wrap_two_pi(angle_about_lhat(node, ehat));
        el.true_anomaly = angle_about_lhat(ehat, rhat);
    }
    return el;
}

}  // namespace regprop
