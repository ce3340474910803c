#include "verify.hpp"

#include "regprop/closed_form.hpp"
#include "regprop/elements.hpp"
#include "regprop/stm.hpp"
#include "regprop/systems.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

namespace regprop::cli {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

/// Random conic state (gravitational parameter 1): eccentricity in
/// [e_min, e_max], semilatus rectum in [0.6, 1.8], anomaly inside the
/// physical branch, plane oriented by a random rotation.
CartesianState sample_state(std::mt19937& rng, double e_min, double e_max) {
    std::uniform_real_distribution<double> ue(e_min, e_max);
    std::uniform_real_distribution<double> up(0.6, 1.8);
    std::uniform_real_distribution<double> uf(-0.9, 0.9);
    std::uniform_real_distribution<double> uang(0.0, kTwoPi);
    std::uniform_real_distribution<double> ucos(-1.0, 1.0);

    const double ecc = ue(rng);
    const double p_slr = up(rng);
    const double f_max = (ecc >= 1.0) ? std::acos(-1.0 / ecc) : M_PI;
    const double f = uf(rng) * f_max;
    const double r = p_slr / (1.0 + ecc * std::cos(f));
    const Vec3 r_pf(r * std::cos(f), r * std::sin(f), 0.0);
    const double vs = std::sqrt(1.0 / p_slr);
    const Vec3 v_pf(-vs * std::sin(f), vs * (ecc + std::cos(f)), 0.0);

    const double z = ucos(rng);
    const double az = uang(rng);
    const double sz = std::sqrt(std::max(0.0, 1.0 - z * z));
    const Vec3 axis(sz * std::cos(az), sz * std::sin(az), z);
    const Mat3 rot = rodrigues_rotation(axis, uang(rng));
    return CartesianState{rot * r_pf, rot * v_pf};
}

/// The oblate-body reference scenario in scaled units (body radius and
/// gravitational parameter both 1, Earth J2).
CartesianState reference_start() {
    OrbitElements el;
    el.a = 8.59767038e3 / 6378.1363;
    el.e = 0.2;
    el.i = 20.0 * M_PI / 180.0;
    el.omega_arg = 70.0 * M_PI / 180.0;
    el.raan = 135.0 * M_PI / 180.0;
    el.true_anomaly = 0.0;
    return elements_to_cartesian(el, 1.0);
}

PotentialModel reference_model() {
    return make_j2_model(J2Model(1.0826267e-3, 1.0, 1.0));
}

double reference_period() {
    const double a = 8.59767038e3 / 6378.1363;
    return kTwoPi * std::sqrt(a * a * a);
}

IntegratorConfig tight_config() {
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-12;
    cfg.abs_tol = 1e-12;
    return cfg;
}

/// Largest componentwise deviation between two states of the same
/// packing, relative to the larger state's own scale.
double relative_gap(const VecX& actual, const VecX& expected) {
    const double scale = std::max({actual.cwiseAbs().maxCoeff(),
                                   expected.cwiseAbs().maxCoeff(), 1e-300});
    return (actual - expected).cwiseAbs().maxCoeff() / scale;
}

JacobianFn fd_field_jacobian(const RhsFn& rhs) {
    return [rhs](double e, const VecX& x) {
        return fd_jacobian_order4([&](const VecX& z) { return rhs(e, z); }, x);
    };
}

std::vector<CheckResult> suite_roundtrip() {
    std::mt19937 rng(74205);
    double worst_forward = 0.0;
    double worst_inverse = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const CartesianState c = sample_state(rng, 0.0, 2.5);
        const ProjectiveState x = inverse(c);
        const CartesianState c2 = forward(x);
        VecX cart(6), cart2(6);
        cart << c.r, c.v;
        cart2 << c2.r, c2.v;
        worst_forward = std::max(worst_forward, relative_gap(cart2, cart));

        const ProjectiveState x2 = inverse(c2);
        worst_inverse =
            std::max(worst_inverse, relative_gap(pack_standard(x2), pack_standard(x)));
    }
    return {{"forward_after_inverse_identity", worst_forward, 1e-12, worst_forward < 1e-12},
            {"inverse_after_forward_identity", worst_inverse, 1e-12, worst_inverse < 1e-12}};
}

std::vector<CheckResult> suite_conservation() {
    const PotentialModel model = reference_model();
    const ProjectiveState x0 = inverse(reference_start());
    const double h0 = hamiltonian_projective(x0, TransformParams{}, model, 0.0);
    const VecX y0 = pack_extended(ExtendedState{x0, 0.0, -h0});

    const MonitoredTrajectory run =
        integrate_monitored(make_rhs_tau(TransformParams{}, model, true), y0, 0.0, 20.0 * kTwoPi,
                            tight_config(), make_standard_monitor());
    return {{"q_norm_drift_20_orbits", run.drift.max_q_drift, 1e-9,
             run.drift.max_q_drift < 1e-9},
            {"lambda_drift_20_orbits", run.drift.max_lambda_drift, 1e-9,
             run.drift.max_lambda_drift < 1e-9}};
}

std::vector<CheckResult> suite_closedform() {
    std::vector<CheckResult> out;
    const PotentialModel kepler = make_kepler_model(1.0);
    for (double ecc : {0.0, 0.2, 0.9, 1.0, 1.8}) {
        QuasiState x0;
        x0.q = Vec3::UnitX();
        x0.p = Vec3::UnitY();
        x0.u = 1.0 + ecc;  // periapsis of the conic with l = 1, k1 = 1
        x0.w = 0.0;

        const Trajectory traj = integrate(make_rhs_quasi(kepler, QuasiParameter::tau),
                                          pack_quasi(x0), 0.0, 40.0 * M_PI, tight_config());
        double worst = 0.0;
        for (std::size_t k = 0; k < traj.size(); ++k) {
            const QuasiState ref = kepler_flow({x0, 1.0}, traj.parameter[k]);
            worst = std::max(worst,
                             (traj.states[k] - pack_quasi(ref)).cwiseAbs().maxCoeff());
        }
        std::ostringstream name;
        name << "closed_form_vs_integration_e_" << ecc;
        out.push_back({name.str(), worst, 1e-9, worst < 1e-9});
    }
    return out;
}

std::vector<CheckResult> suite_stm() {
    const double k1 = 1.0;
    QuasiState x0;
    x0.q = Vec3::UnitX();
    x0.p = Vec3(0.0, 1.1, 0.3);
    x0.u = 1.2;
    x0.w = 0.25;
    const double tau = 1.7;

    const Stm phi = phi_full(x0, k1, tau);

    const auto flow = [k1, tau](const VecX& z) {
        return pack_quasi(kepler_flow({unpack_quasi(z), k1}, tau));
    };
    const MatX fd = fd_jacobian_order4(flow, pack_quasi(x0));
    const double fd_gap = (phi.entries - fd).cwiseAbs().maxCoeff();

    const RhsFn rhs = make_rhs_quasi(make_kepler_model(k1), QuasiParameter::tau);
    const JacobianFn jac = [k1](double, const VecX& x) {
        return quasi_field_jacobian(unpack_quasi(x), k1, 0.0, QuasiParameter::tau);
    };
    const VariationalResult var =
        stm_variational(rhs, jac, pack_quasi(x0), 0.0, tau, tight_config(),
                        StateOrdering::modified, EvolutionParameter::true_anomaly);
    const double var_gap = (phi.entries - var.stm.entries).cwiseAbs().maxCoeff();

    const double sigma_defect =
        symplectic_residual(sigma_matrix(x0.q.cross(x0.p), 2.4), SymplecticForm::j62_modified);

    const double tau2 = 2.3;
    const QuasiState x_mid = kepler_flow({x0, k1}, tau);
    const Stm chained = compose(phi_full(x_mid, k1, tau2), phi);
    const double semigroup_gap =
        (phi_full(x0, k1, tau + tau2).entries - chained.entries).cwiseAbs().maxCoeff();

    const Stm backward = phi_full(x_mid, k1, -tau);
    const double inverse_gap =
        (compose(backward, phi).entries - MatX::Identity(8, 8)).cwiseAbs().maxCoeff();

    const double theta_gap =
        (theta_matrix(x0, k1, tau).entries - phi.entries).cwiseAbs().maxCoeff();

    return {{"phi_vs_finite_differences", fd_gap, 1e-6, fd_gap < 1e-6},
            {"phi_vs_variational", var_gap, 1e-8, var_gap < 1e-8},
            {"sigma_symplectic_j62", sigma_defect, 1e-13, sigma_defect < 1e-13},
            {"phi_semigroup", semigroup_gap, 1e-10, semigroup_gap < 1e-10},
            {"phi_inverse", inverse_gap, 1e-10, inverse_gap < 1e-10},
            {"theta_phi_separation", theta_gap, 1e-3, theta_gap > 1e-3}};
}

std::vector<CheckResult> suite_symplectic() {
    const PotentialModel model = reference_model();
    const TransformParams params{};
    const CartesianState start = reference_start();
    const ProjectiveState x0 = inverse(start);
    const double period = reference_period();
    const double l0 = start.r.cross(start.v).norm();

    // Time route: quasi coordinates (q, p, u, w), converted to the
    // canonical (q, p, u, p_u) transition matrix afterward.
    const RhsFn rhs_t = make_rhs_quasi(model, QuasiParameter::time);
    const VariationalResult var_t =
        stm_variational(rhs_t, fd_field_jacobian(rhs_t), pack_quasi(to_quasi(x0)), 0.0,
                        2.0 * period, tight_config(), StateOrdering::modified,
                        EvolutionParameter::time);
    const Stm psi_t =
        psi_canonical(var_t.stm, to_quasi(x0), unpack_quasi(var_t.x_final));
    const double time_defect = symplectic_residual(psi_t, SymplecticForm::j62_modified);

    // Fictitious-parameter route without the extension: (q, u, p, p_u)
    // with p_t eliminated against the Hamiltonian.
    const RhsFn rhs_s10 = make_rhs_s(params, model, true);
    const RhsFn rhs_s8 = [rhs_s10](double e, const VecX& y8) {
        VecX y10(10);
        y10 << y8, 0.0, 0.0;
        return VecX(rhs_s10(e, y10).head(8));
    };
    const VariationalResult var_s =
        stm_variational(rhs_s8, fd_field_jacobian(rhs_s8), pack_standard(x0), 0.0,
                        2.0 * kTwoPi / l0, tight_config(), StateOrdering::standard,
                        EvolutionParameter::fictitious_s);
    const double s_defect = symplectic_residual(var_s.stm, SymplecticForm::j8_standard);

    // Extended route: (q, u, p, p_u, t, p_t) with p_t dynamical restores
    // the canonical structure in s.
    const double h0 = hamiltonian_projective(x0, params, model, 0.0);
    const RhsFn rhs_ext = make_rhs_s(params, model, false);
    const VariationalResult var_ext =
        stm_variational(rhs_ext, fd_field_jacobian(rhs_ext),
                        pack_extended(ExtendedState{x0, 0.0, -h0}), 0.0, 2.0 * kTwoPi / l0,
                        tight_config(), StateOrdering::extended10,
                        EvolutionParameter::fictitious_s);
    const double ext_defect = symplectic_residual(var_ext.stm, SymplecticForm::j10_extended);

    return {{"time_psi_symplectic", time_defect, 1e-6, time_defect < 1e-6},
            {"s_nonextended_defect_exceeds", s_defect, 1e-2, s_defect > 1e-2},
            {"s_extended_symplectic", ext_defect, 1e-6, ext_defect < 1e-6}};
}

std::vector<CheckResult> suite_j2() {
    const PotentialModel model = reference_model();
    const TransformParams params{};
    const CartesianState start = reference_start();
    const ProjectiveState x0 = inverse(start);
    const double h0 = hamiltonian_projective(x0, params, model, 0.0);
    const VecX y0 = pack_extended(ExtendedState{x0, 0.0, -h0});

    const Trajectory projective = integrate(make_rhs_tau(params, model, true), y0, 0.0,
                                            20.0 * kTwoPi, tight_config());

    // Compare against an independent Cartesian propagation at 25 shared
    // physical times pulled from the projective run's clock channel.
    const RhsFn cart = make_rhs_cartesian(model);
    VecX yc(6);
    yc << start.r, start.v;
    double t_prev = 0.0;
    double worst_position = 0.0;
    double worst_l3 = 0.0;
    const double l3_0 = start.r.cross(start.v)[2];
    const std::size_t count = 25;
    for (std::size_t k = 1; k <= count; ++k) {
        const std::size_t idx = k * (projective.size() - 1) / count;
        const double t_k = projective.states[idx][8];
        if (!(t_k > t_prev)) {
            continue;
        }
        yc = integrate(cart, yc, t_prev, t_k, tight_config()).final_state();
        t_prev = t_k;

        const CartesianState rec = forward(unpack_standard(projective.states[idx].head(8)));
        worst_position = std::max(worst_position, (rec.r - yc.head<3>()).norm());
        worst_l3 = std::max(worst_l3, std::abs(rec.r.cross(rec.v)[2] - l3_0));
    }
    return {{"position_error_vs_cartesian_20_orbits", worst_position, 1e-6,
             worst_position < 1e-6},
            {"l3_conservation_20_orbits", worst_l3, 1e-9, worst_l3 < 1e-9}};
}

int thread_cap() {
    if (const char* env = std::getenv("REGPROP_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) {
            return n;
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

const std::vector<std::string> kSuiteNames = {"roundtrip", "conservation", "closedform",
                                              "stm",       "symplectic",   "j2"};

}  // namespace

std::vector<CheckResult> run_suite(const std::string& name) {
    if (name == "roundtrip") return suite_roundtrip();
    if (name == "conservation") return suite_conservation();
    if (name == "closedform") return suite_closedform();
    if (name == "stm") return suite_stm();
    if (name == "symplectic") return suite_symplectic();
    if (name == "j2") return suite_j2();
    throw UnknownSuite("unknown verify suite '" + name + "' (expected one of: roundtrip,"
                       " conservation, closedform, stm, symplectic, j2, all)");
}

int run_verify(const std::string& suite, const std::string& json_path) {
    std::vector<std::string> todo;
    if (suite == "all") {
        todo = kSuiteNames;
    } else {
        if (std::find(kSuiteNames.begin(), kSuiteNames.end(), suite) == kSuiteNames.end()) {
            throw UnknownSuite("unknown verify suite '" + suite + "' (expected one of:"
                               " roundtrip, conservation, closedform, stm, symplectic, j2,"
                               " all)");
        }
        todo = {suite};
    }

    std::vector<std::vector<CheckResult>> results(todo.size());
    if (suite == "all") {
        const std::size_t cap = static_cast<std::size_t>(thread_cap());
        for (std::size_t base = 0; base < todo.size(); base += cap) {
            const std::size_t wave = std::min(cap, todo.size() - base);
            std::vector<std::future<std::vector<CheckResult>>> futures;
            futures.reserve(wave);
            for (std::size_t i = 0; i < wave; ++i) {
                futures.push_back(std::async(std::launch::async, run_suite, todo[base + i]));
            }
            for (std::size_t i = 0; i < wave; ++i) {
                results[base + i] = futures[i].get();
            }
        }
    } else {
        results[0] = run_suite(suite);
    }

    bool all_pass = true;
    nlohmann::json report = nlohmann::json::array();
    for (std::size_t s = 0; s < todo.size(); ++s) {
        for (const CheckResult& check : results[s]) {
            all_pass = all_pass && check.pass;
            std::cout << (check.pass ? "PASS  " : "FAIL  ") << todo[s] << '/' << check.name
                      << "  residual " << format_full(check.residual) << "  tolerance "
                      << format_full(check.tolerance) << '\n';
            report.push_back({{"name", todo[s] + "/" + check.name},
                              {"residual", check.residual},
                              {"tolerance", check.tolerance},
                              {"pass", check.pass}});
        }
    }
    std::cout << (all_pass ? "all checks passed" : "some checks FAILED") << '\n';

    if (!json_path.empty()) {
        std::ofstream out(json_path);
        if (!out) {
            throw std::runtime_error("cannot write verify report '" + json_path + "'");
        }
        out << report.dump(2) << '\n';
    }
    return all_pass ? 0 : 1;
}

}  // namespace regprop::cli
