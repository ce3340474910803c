// Tests for the adaptive Dormand-Prince integrator: accuracy, exact
// terminal landing, determinism, empirical order, failure modes, and the
// constraint monitors.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "regprop/perturbations.hpp"
#include "regprop/projective.hpp"
#include "regprop/propagator.hpp"
#include "regprop/systems.hpp"
#include "support/oracles.hpp"

using namespace regprop;

namespace {

/// y = (cos t, -sin t) solves y1' = y2, y2' = -y1 from (1, 0).
const RhsFn kOscillator = [](double, const VecX& y) {
    VecX d(2);
    d << y(1), -y(0);
    return d;
};

VecX oscillator_exact(double t) {
    VecX y(2);
    y << std::cos(t), -std::sin(t);
    return y;
}

VecX unit_start() {
    VecX y(2);
    y << 1.0, 0.0;
    return y;
}

}  // namespace

TEST_CASE("integrator reproduces known solutions") {
    SECTION("a zero field holds the state constant") {
        const RhsFn zero = [](double, const VecX& y) { return VecX(VecX::Zero(y.size())); };
        VecX y0(3);
        y0 << 1.0, -2.0, 0.5;
        const Trajectory traj = integrate(zero, y0, 0.0, 10.0, {});
        CHECK((traj.final_state() - y0).norm() == 0.0);
    }

    SECTION("harmonic oscillator returns home after a full period") {
        IntegratorConfig cfg;
        cfg.rel_tol = 1e-12;
        cfg.abs_tol = 1e-12;
        const Trajectory traj = integrate(kOscillator, unit_start(), 0.0, 2.0 * M_PI, cfg);
        CHECK((traj.final_state() - unit_start()).norm() <= 1e-9);
    }

    SECTION("the final sample lands exactly on the requested endpoint") {
        const Trajectory traj = integrate(kOscillator, unit_start(), 0.0, 1.7, {});
        CHECK(traj.final_parameter() == 1.7);  // bitwise, not approximately
        CHECK(traj.parameter.front() == 0.0);
        CHECK((traj.states.front() - unit_start()).norm() == 0.0);
    }

    SECTION("backward spans integrate with descending samples") {
        IntegratorConfig cfg;
        cfg.rel_tol = 1e-12;
        cfg.abs_tol = 1e-12;
        const Trajectory traj = integrate(kOscillator, unit_start(), 0.0, -3.0, cfg);
        CHECK(traj.final_parameter() == -3.0);
        CHECK((traj.final_state() - oscillator_exact(-3.0)).norm() <= 1e-10);
        for (std::size_t i = 1; i < traj.size(); ++i) {
            CHECK(traj.parameter[i] < traj.parameter[i - 1]);
        }
    }
}

TEST_CASE("accepted samples are strictly monotone and start at the initial point") {
    const Trajectory traj = integrate(kOscillator, unit_start(), 0.0, 12.0, {});
    REQUIRE(traj.size() >= 3);
    REQUIRE(traj.states.size() == traj.parameter.size());
    for (std::size_t i = 1; i < traj.size(); ++i) {
        CHECK(traj.parameter[i] > traj.parameter[i - 1]);
    }
}

TEST_CASE("repeated runs are bitwise deterministic") {
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-10;
    cfg.abs_tol = 1e-10;
    const Trajectory a = integrate(kOscillator, unit_start(), 0.0, 9.3, cfg);
    const Trajectory b = integrate(kOscillator, unit_start(), 0.0, 9.3, cfg);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.parameter[i] == b.parameter[i]);
        CHECK(a.states[i] == b.states[i]);
    }
}

TEST_CASE("fixed-step probe shows at least fifth-order convergence") {
    // Pinning initial_step = max_step with sloppy tolerances turns the
    // controller into a fixed-step method; halving the step should then
    // shrink the endpoint error by about 2^5.
    auto endpoint_error = [](double h) {
        IntegratorConfig cfg;
        cfg.rel_tol = 1e-2;
        cfg.abs_tol = 1e-2;
        cfg.initial_step = h;
        cfg.max_step = h;
        const double t_end = 1.6;
        const Trajectory traj = integrate(kOscillator, unit_start(), 0.0, t_end, cfg);
        return (traj.final_state() - oscillator_exact(t_end)).norm();
    };
    const double coarse = endpoint_error(0.1);
    const double fine = endpoint_error(0.05);
    const double order = std::log2(coarse / fine);
    CHECK(order >= 4.5);
}

TEST_CASE("failure modes raise the documented errors") {
    SECTION("empty spans and nonpositive tolerances are invalid arguments") {
        CHECK_THROWS_AS(integrate(kOscillator, unit_start(), 1.0, 1.0, {}), std::invalid_argument);
        IntegratorConfig bad;
        bad.rel_tol = 0.0;
        CHECK_THROWS_AS(integrate(kOscillator, unit_start(), 0.0, 1.0, bad),
                        std::invalid_argument);
        bad.rel_tol = 1e-12;
        bad.abs_tol = -1.0;
        CHECK_THROWS_AS(integrate(kOscillator, unit_start(), 0.0, 1.0, bad),
                        std::invalid_argument);
    }

    SECTION("a step budget that is too small is reported") {
        IntegratorConfig cfg;
        cfg.max_steps = 5;
        CHECK_THROWS_AS(integrate(kOscillator, unit_start(), 0.0, 50.0, cfg), MaxStepsExceeded);
    }

    SECTION("a derivative rougher than machine precision underflows the step") {
        // Oscillates on a 1e-20 scale: no step small enough to resolve it
        // stays above the floor, so the controller must give up.
        const RhsFn rough = [](double t, const VecX& y) {
            VecX d(y.size());
            d.setConstant(1e20 * std::sin(1e20 * t + 1.0));
            return d;
        };
        VecX y0(1);
        y0 << 0.0;
        CHECK_THROWS_AS(integrate(rough, y0, 0.0, 1.0, {}), StepUnderflow);
    }

    SECTION("non-finite states are caught, not propagated") {
        const RhsFn poison = [](double t, const VecX& y) {
            VecX d(y.size());
            d.setConstant(t < 0.5 ? 1.0 : std::numeric_limits<double>::quiet_NaN());
            return d;
        };
        VecX y0(1);
        y0 << 0.0;
        CHECK_THROWS_AS(integrate(poison, y0, 0.0, 1.0, {}), NonFiniteState);

        VecX nan_start(2);
        nan_start << std::numeric_limits<double>::quiet_NaN(), 0.0;
        CHECK_THROWS_AS(integrate(kOscillator, nan_start, 0.0, 1.0, {}), NonFiniteState);
    }
}

TEST_CASE("constraint monitors track |q| and lambda along propagations") {
    std::mt19937 rng(3433);
    const auto orbit = oracle::sample_orbit(rng, 0.1, 0.4);
    const ProjectiveState x0 = inverse(CartesianState{orbit.r, orbit.v});
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-12;
    cfg.abs_tol = 1e-12;

    SECTION("kepler propagation in tau holds both constraints below 1e-11") {
        PotentialModel kepler;
        ExtendedState xe;
        xe.base = x0;
        xe.p_t = -hamiltonian_projective(x0, {}, kepler);
        const MonitoredTrajectory run =
            propagate_with_monitor(make_rhs_tau({}, kepler), pack_extended(xe), 0.0,
                                   20.0 * M_PI, cfg, make_standard_monitor());
        CHECK_FALSE(run.drift.empty);
        CHECK(run.drift.max_q_drift <= 1e-11);
        CHECK(run.drift.max_lambda_drift <= 1e-11);
    }

    SECTION("oblate propagation in s stays below 1e-9 over ten orbits") {
        const PotentialModel model = make_j2_model(J2Model(1.0e-3, 1.0, 1.0));
        ExtendedState xe;
        xe.base = x0;
        xe.p_t = -hamiltonian_projective(x0, {}, model);
        const double l0 = x0.q.cross(x0.p).norm();
        const MonitoredTrajectory run =
            propagate_with_monitor(make_rhs_s({}, model), pack_extended(xe), 0.0,
                                   20.0 * M_PI / l0, cfg, make_standard_monitor());
        CHECK_FALSE(run.drift.empty);
        CHECK(run.drift.max_q_drift <= 1e-9);
        CHECK(run.drift.max_lambda_drift <= 1e-9);
        REQUIRE(run.trajectory.constraints.size() == run.trajectory.size());
    }

    SECTION("cartesian propagation has no monitor and an empty report") {
        PotentialModel kepler;
        const MonitoredTrajectory run = integrate_monitored(
            make_rhs_cartesian(kepler), pack_cartesian(CartesianState{orbit.r, orbit.v}), 0.0,
            10.0, cfg);
        CHECK(run.drift.empty);
        CHECK(run.drift.max_q_drift == 0.0);
        CHECK(run.trajectory.constraints.empty());
    }
}
