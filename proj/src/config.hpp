#pragma once

// Scenario configuration for the command-line tools. Configs are flat
// INI-style documents with [scenario], [model], [integrator], and
// [output] sections. ScenarioConfig mirrors the file verbatim (angles in
// degrees, lengths in whatever the units key says), so
// parse_config(serialize_config(x)) == x holds bitwise; unit conversion
// and validation happen only when a config is turned into a RunPlan.

#include "regprop/perturbations.hpp"
#include "regprop/projective.hpp"
#include "regprop/propagator.hpp"

#include <optional>
#include <stdexcept>
#include <string>

namespace regprop::cli {

/// Raised for malformed or inconsistent configuration input. The front
/// end maps this to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Verbatim image of a config file. Doubles hold exactly what was
/// parsed; nothing is converted until build_plan.
struct ScenarioConfig {
    // [scenario]
    std::string input = "elements";  ///< elements | cartesian
    double a = 1.0;                  ///< semimajor axis, config length units
    double e = 0.0;
    double i = 0.0;      ///< deg
    double omega = 0.0;  ///< deg
    double raan = 0.0;   ///< deg
    double f = 0.0;      ///< deg
    double rx = 0.0, ry = 0.0, rz = 0.0;  ///< cartesian input, config units
    double vx = 0.0, vy = 0.0, vz = 0.0;
    std::string coordinates = "projective";  ///< cartesian | projective | projective_quasi | extended
    std::string parameter = "tau";           ///< t | s | tau
    std::optional<double> span;              ///< evolution-parameter span
    std::optional<double> span_periods;      ///< span as osculating orbit counts
    std::string units = "scaled";            ///< si | scaled

    // [model]
    std::string model = "kepler";  ///< kepler | manev | j2
    double gravitational_parameter = 1.0;
    double equatorial_radius = 1.0;
    double j2_coefficient = 0.0;
    double manev_coefficient = 0.0;

    // [integrator]
    double rel_tol = 1e-12;
    double abs_tol = 1e-12;
    double initial_step = 0.0;
    double max_step = 0.0;
    std::int64_t max_steps = 1000000;

    // [output]
    std::string trajectory = "trajectory.csv";
    std::string drift;  ///< empty: no drift report

    bool operator==(const ScenarioConfig&) const = default;
};

/// Shortest-faithful decimal form of a double (17 significant digits,
/// locale independent); from_chars recovers the exact bits.
std::string format_full(double value);

ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);
std::string serialize_config(const ScenarioConfig& cfg);

/// Everything run_propagate needs, in scaled internal units: for SI
/// input, lengths are divided by the equatorial radius and times by
/// sqrt(R^3 / mu), which pins k1 = 1 and R = 1.
struct RunPlan {
    CartesianState start;       ///< scaled initial state
    PotentialModel model;       ///< k1, k2, perturbation in scaled units
    std::string coordinates;    ///< validated copy of the config strings
    std::string parameter;
    double span = 0.0;          ///< evolution-parameter window is [0, span]
    double period = 0.0;        ///< osculating two-body period, scaled time
    IntegratorConfig integrator;
};

/// Validates the config and assembles the scaled initial state, model,
/// and span. Throws ConfigError for unknown enum strings, inconsistent
/// coordinate/parameter combinations, missing or doubled span keys, and
/// geometrically impossible inputs.
RunPlan build_plan(const ScenarioConfig& cfg);

}  // namespace regprop::cli
