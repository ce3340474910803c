#pragma once

// Built-in verification suites for the verify subcommand. Each suite is
// a self-contained batch of residual checks against the library's
// analytic ground truths; results are printed as a table and optionally
// dumped as JSON, one object per check.

#include "config.hpp"

#include <string>
#include <vector>

namespace regprop::cli {

/// One verification check. For most checks pass means residual below
/// tolerance; separation checks (two quantities required to differ)
/// record pass as residual above tolerance.
struct CheckResult {
    std::string name;
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

/// Raised for a suite name outside the published set. The front end
/// maps this to exit code 2.
struct UnknownSuite : ConfigError {
    using ConfigError::ConfigError;
};

/// Runs one named suite: roundtrip, conservation, closedform, stm,
/// symplectic, or j2. Throws UnknownSuite otherwise.
std::vector<CheckResult> run_suite(const std::string& name);

/// Runs one suite or, for "all", every suite (in parallel, capped by the
/// REGPROP_THREADS environment variable). Prints a residual table,
/// writes the JSON report when json_path is nonempty, and returns 0 when
/// every check passed, 1 otherwise.
int run_verify(const std::string& suite, const std::string& json_path);

}  // namespace regprop::cli
