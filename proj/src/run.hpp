#pragma once

// Execution of the propagate, stm, and elements commands: assemble the
// vector field for the configured coordinate set and evolution
// parameter, integrate, and emit CSV trajectories, drift-report JSON,
// and STM or state tables.

#include "config.hpp"

#include <iosfwd>

namespace regprop::cli {

/// Propagates the scenario and writes the trajectory CSV (plus the
/// drift-report JSON when [output] drift is set) under out_dir.
void run_propagate(const ScenarioConfig& cfg, const std::string& out_dir);

enum class StmMode { closed_form, variational };

/// Writes the 8x8 state transition matrix of the quasi-momentum
/// coordinates (q, p, u, w) over [0, tau] at the scenario's initial
/// state, as CSV with a header row. The closed form is exact for the
/// Kepler model only; the variational route integrates dPhi = J Phi
/// along the perturbed trajectory.
void run_stm(const ScenarioConfig& cfg, double tau, StmMode mode, std::ostream& out);

/// Classical elements for the elements subcommand, angles in degrees.
struct ElementInput {
    double a = 1.0;
    double e = 0.0;
    double i = 0.0;
    double omega = 0.0;
    double raan = 0.0;
    double f = 0.0;
    double mu = 1.0;
};

/// Converts the element set to a Cartesian state and writes it as a
/// one-row CSV.
void run_elements(const ElementInput& input, std::ostream& out);

}  // namespace regprop::cli
