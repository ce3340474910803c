// Command-line front end: propagate a configured scenario, run the
// built-in verification suites, or print state transition matrices and
// element conversions. Exit codes: 0 success, 1 failed verification
// checks, 2 usage or configuration errors, 3 runtime failures.

#include "config.hpp"
#include "run.hpp"
#include "verify.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using namespace regprop::cli;

    CLI::App app{"regprop: regularized central-force orbit propagation"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    CLI::App* propagate = app.add_subcommand(
        "propagate", "integrate a scenario and write trajectory/drift files");
    propagate->add_option("--config", config_path, "scenario config file")->required();
    propagate->add_option("--out", out_dir, "output directory (default: current)");

    std::string suite;
    std::string json_path;
    CLI::App* verify = app.add_subcommand("verify", "run a built-in verification suite");
    verify->add_option("--suite", suite, "roundtrip, conservation, closedform, stm,"
                                         " symplectic, j2, or all")
        ->required();
    verify->add_option("--json", json_path, "write the JSON report here");

    std::string stm_config;
    double stm_tau = 0.0;
    bool stm_closed = false;
    bool stm_variational = false;
    CLI::App* stm = app.add_subcommand(
        "stm", "print the quasi-coordinate state transition matrix over [0, tau]");
    stm->add_option("--config", stm_config, "scenario config file")->required();
    stm->add_option("--tau", stm_tau, "angular span of the transition matrix")->required();
    CLI::Option* closed_flag = stm->add_flag("--closed-form", stm_closed,
                                             "exact Kepler transition matrix (default)");
    stm->add_flag("--variational", stm_variational, "integrate the variational equations")
        ->excludes(closed_flag);

    ElementInput el;
    bool to_cartesian = false;
    CLI::App* elements = app.add_subcommand(
        "elements", "convert classical orbit elements (angles in degrees)");
    elements->add_option("--a", el.a, "semimajor axis")->required();
    elements->add_option("--e", el.e, "eccentricity")->required();
    elements->add_option("--i", el.i, "inclination, deg");
    elements->add_option("--omega", el.omega, "argument of periapsis, deg");
    elements->add_option("--raan", el.raan, "right ascension of ascending node, deg");
    elements->add_option("--f", el.f, "true anomaly, deg");
    elements->add_option("--mu", el.mu, "gravitational parameter");
    elements->add_flag("--to-cartesian", to_cartesian, "emit the Cartesian state as CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (propagate->parsed()) {
            run_propagate(load_config(config_path), out_dir);
            return 0;
        }
        if (verify->parsed()) {
            return run_verify(suite, json_path);
        }
        if (stm->parsed()) {
            const StmMode mode =
                stm_variational ? StmMode::variational : StmMode::closed_form;
            run_stm(load_config(stm_config), stm_tau, mode, std::cout);
            return 0;
        }
        if (elements->parsed()) {
            if (!to_cartesian) {
                std::cerr << "elements: nothing to do (pass --to-cartesian)\n";
                return 2;
            }
            run_elements(el, std::cout);
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
