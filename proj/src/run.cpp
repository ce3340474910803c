#include "run.hpp"

#include "regprop/elements.hpp"
#include "regprop/stm.hpp"
#include "regprop/systems.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <ostream>
#include <vector>

namespace regprop::cli {

namespace {

void write_row(std::ostream& out, const double* values, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) {
        if (i > 0) {
            out << ',';
        }
        out << format_full(values[i]);
    }
    out << '\n';
}

void write_header(std::ostream& out, const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i > 0) {
            out << ',';
        }
        out << names[i];
    }
    out << '\n';
}

/// Vector field, initial packing, and CSV schema for one scenario. The
/// CSV row is the evolution parameter followed by the leading csv_cols
/// state components (trailing components, like the eliminated p_t of a
/// non-extended fictitious-parameter run, are integrated but not
/// emitted).
struct AssembledRun {
    RhsFn rhs;
    VecX y0;
    MonitorFn monitor;
    std::vector<std::string> header;
    Eigen::Index csv_cols = 0;
};

AssembledRun assemble(const RunPlan& plan) {
    const TransformParams params{};
    const bool fictitious = plan.parameter != "t";
    AssembledRun run;

    if (plan.coordinates == "cartesian") {
        run.rhs = make_rhs_cartesian(plan.model);
        run.y0 = pack_cartesian(plan.start);
        run.header = {"t", "x", "y", "z", "vx", "vy", "vz"};
        run.csv_cols = 6;
        return run;
    }

    const ProjectiveState x0 = inverse(plan.start, params);

    if (plan.coordinates == "projective_quasi") {
        const QuasiState q0 = to_quasi(x0);
        run.monitor = make_quasi_monitor();
        run.header = {plan.parameter, "q1", "q2", "q3", "p1", "p2", "p3", "u", "w"};
        if (!fictitious) {
            run.rhs = make_rhs_quasi(plan.model, QuasiParameter::time);
            run.y0 = pack_quasi(q0);
            run.csv_cols = 8;
        } else {
            const auto p = plan.parameter == "s" ? QuasiParameter::s : QuasiParameter::tau;
            run.rhs = make_rhs_quasi_clock(plan.model, p);
            run.y0 = VecX(9);
            run.y0 << pack_quasi(q0), 0.0;
            run.header.push_back("t");
            run.csv_cols = 9;
        }
        return run;
    }

    run.monitor = make_standard_monitor(params);
    run.header = {plan.parameter, "q1", "q2", "q3", "u", "p1", "p2", "p3", "pu"};
    if (plan.coordinates == "projective" && !fictitious) {
        run.rhs = make_rhs_time(params, plan.model);
        run.y0 = pack_standard(x0);
        run.csv_cols = 8;
        return run;
    }

    // Fictitious-parameter runs carry (t, p_t); the extended coordinate
    // set keeps p_t dynamical, the plain projective set eliminates it
    // against the Hamiltonian and omits it from the CSV.
    const bool extended = plan.coordinates == "extended";
    const double h0 = hamiltonian_projective(x0, params, plan.model, 0.0);
    run.y0 = pack_extended(ExtendedState{x0, 0.0, -h0});
    run.header.push_back("t");
    run.csv_cols = 9;
    if (extended) {
        run.header.push_back("pt");
        run.csv_cols = 10;
    }
    if (plan.parameter == "s") {
        run.rhs = make_rhs_s(params, plan.model, !extended);
    } else {
        run.rhs = make_rhs_tau(params, plan.model, !extended);
    }
    return run;
}

JacobianFn fd_field_jacobian(const RhsFn& rhs) {
    return [rhs](double e, const VecX& x) {
        return fd_jacobian_order4([&](const VecX& z) { return rhs(e, z); }, x);
    };
}

}  // namespace

void run_propagate(const ScenarioConfig& cfg, const std::string& out_dir) {
    const RunPlan plan = build_plan(cfg);
    const AssembledRun run = assemble(plan);
    const MonitorFn monitor = cfg.drift.empty() ? MonitorFn{} : run.monitor;
    const MonitoredTrajectory result =
        integrate_monitored(run.rhs, run.y0, 0.0, plan.span, plan.integrator, monitor);

    namespace fs = std::filesystem;
    const fs::path dir = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
    fs::create_directories(dir);

    const fs::path csv_path = dir / cfg.trajectory;
    std::ofstream csv(csv_path);
    if (!csv) {
        throw std::runtime_error("cannot write trajectory file '" + csv_path.string() + "'");
    }
    write_header(csv, run.header);
    std::vector<double> row(static_cast<std::size_t>(run.csv_cols) + 1);
    for (std::size_t k = 0; k < result.trajectory.size(); ++k) {
        row[0] = result.trajectory.parameter[k];
        for (Eigen::Index j = 0; j < run.csv_cols; ++j) {
            row[static_cast<std::size_t>(j) + 1] = result.trajectory.states[k][j];
        }
        write_row(csv, row.data(), row.size());
    }

    if (!cfg.drift.empty()) {
        nlohmann::json report;
        report["max_q_drift"] = result.drift.max_q_drift;
        report["max_lambda_drift"] = result.drift.max_lambda_drift;
        const fs::path drift_path = dir / cfg.drift;
        std::ofstream drift(drift_path);
        if (!drift) {
            throw std::runtime_error("cannot write drift report '" + drift_path.string() + "'");
        }
        drift << report.dump(2) << '\n';
    }
}

void run_stm(const ScenarioConfig& cfg, double tau, StmMode mode, std::ostream& out) {
    const RunPlan plan = build_plan(cfg);
    const QuasiState x0 = to_quasi(inverse(plan.start));

    Stm stm = Stm::identity(StateOrdering::modified, EvolutionParameter::true_anomaly);
    if (mode == StmMode::closed_form) {
        if (cfg.model != "kepler") {
            throw ConfigError("the closed-form stm exists for the kepler model only;"
                              " use --variational");
        }
        stm = phi_full(x0, plan.model.k1, tau);
    } else {
        const RhsFn rhs = make_rhs_quasi(plan.model, QuasiParameter::tau);
        JacobianFn jacobian;
        if (plan.model.has_perturbation()) {
            jacobian = fd_field_jacobian(rhs);
        } else {
            const double k1 = plan.model.k1;
            const double k2 = plan.model.k2;
            jacobian = [k1, k2](double, const VecX& x) {
                return quasi_field_jacobian(unpack_quasi(x), k1, k2, QuasiParameter::tau);
            };
        }
        stm = stm_variational(rhs, jacobian, pack_quasi(x0), 0.0, tau, plan.integrator,
                              StateOrdering::modified, EvolutionParameter::true_anomaly)
                  .stm;
    }

    write_header(out, {"q1", "q2", "q3", "p1", "p2", "p3", "u", "w"});
    std::vector<double> row(8);
    for (Eigen::Index r = 0; r < 8; ++r) {
        for (Eigen::Index c = 0; c < 8; ++c) {
            row[static_cast<std::size_t>(c)] = stm.entries(r, c);
        }
        write_row(out, row.data(), row.size());
    }
}

void run_elements(const ElementInput& input, std::ostream& out) {
    OrbitElements el;
    el.a = input.a;
    el.e = input.e;
    el.i = input.i * M_PI / 180.0;
    el.omega_arg = input.omega * M_PI / 180.0;
    el.raan = input.raan * M_PI / 180.0;
    el.true_anomaly = input.f * M_PI / 180.0;

    CartesianState c;
    try {
        c = elements_to_cartesian(el, input.mu);
    } catch (const std::exception& err) {
        throw ConfigError(std::string("invalid element set: ") + err.what());
    }

    write_header(out, {"x", "y", "z", "vx", "vy", "vz"});
    const double row[6] = {c.r[0], c.r[1], c.r[2], c.v[0], c.v[1], c.v[2]};
    write_row(out, row, 6);
}

}  // namespace regprop::cli
