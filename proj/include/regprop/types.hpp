#pragma once

// Common fixed-size linear algebra aliases and the error taxonomy shared by
// every module in the library. All numerical routines work in dimensionless
// internal units (central-body gravitational parameter and reference length
// scaled to one at ingestion); nothing in here assumes a unit system.

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace regprop {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Base class for all library errors so callers can catch one type.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A matrix that was required to be antisymmetric is not.
struct NonAntisymmetric : Error {
    using Error::Error;
};

/// A rotation axis with (numerically) zero length was supplied.
struct ZeroAxis : Error {
    using Error::Error;
};

/// A projective state sits outside the domain of the transformation
/// (non-positive radial coordinate u, or zero q).
struct DegenerateState : Error {
    using Error::Error;
};

/// A Cartesian state at the origin cannot be mapped to projective
/// coordinates.
struct OriginSingularity : Error {
    using Error::Error;
};

/// Angular momentum vanishes; rotational constructions (LVLH basis,
/// anomaly parameterization, frequencies) are undefined.
struct RectilinearOrbit : Error {
    using Error::Error;
};

/// A conic evaluation was requested at or beyond the asymptotic true
/// anomaly where 1 + e cos(tau) <= 0.
struct AsymptoteReached : Error {
    using Error::Error;
};

/// The oscillator frequency omega^2 = l^2 - k2 is non-positive, so the
/// radial closed-form solution is no longer trigonometric.
struct ImaginaryFrequency : Error {
    using Error::Error;
};

/// A routine that assumes the unit-norm / transversality integrals
/// (|q| = 1, qhat.p = 0) received a state violating them.
struct ConstraintViolated : Error {
    using Error::Error;
};

/// Matrix dimensions or coordinate-ordering tags are inconsistent.
struct DimensionMismatch : Error {
    using Error::Error;
};

/// The adaptive integrator drove the step size below the representable
/// floor without meeting the error tolerance.
struct StepUnderflow : Error {
    using Error::Error;
};

/// The adaptive integrator exceeded its step budget.
struct MaxStepsExceeded : Error {
    using Error::Error;
};

/// A state or derivative evaluation produced NaN or infinity.
struct NonFiniteState : Error {
    using Error::Error;
};

}  // namespace regprop
