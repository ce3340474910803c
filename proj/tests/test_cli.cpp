// End-to-end coverage of the command-line front end: config round
// trips, plan validation, CSV schemas and full-precision output, drift
// reports, exit codes, and cross-parameter consistency, exercised both
// through the library objects and through the installed binary.

#include "config.hpp"
#include "run.hpp"
#include "verify.hpp"

#include "regprop/closed_form.hpp"
#include "regprop/elements.hpp"
#include "regprop/stm.hpp"
#include "regprop/systems.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <json.hpp>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace regprop;
using namespace regprop::cli;
namespace fs = std::filesystem;

namespace {

fs::path work_dir() {
    const fs::path dir = fs::temp_directory_path() / "regprop_cli_tests";
    fs::create_directories(dir);
    return dir;
}

fs::path config_dir() {
    return fs::path(REGPROP_CONFIG_DIR);
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(REGPROP_CLI_PATH) + " " + args;
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

double parse_field(const std::string& field) {
    double value = 0.0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
    REQUIRE(res.ec == std::errc{});
    REQUIRE(res.ptr == field.data() + field.size());
    return value;
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (true) {
        const auto comma = line.find(',', pos);
        fields.push_back(line.substr(pos, comma == std::string::npos ? comma : comma - pos));
        if (comma == std::string::npos) {
            break;
        }
        pos = comma + 1;
    }
    return fields;
}

struct Csv {
    std::string header;
    std::vector<std::vector<std::string>> raw;
    std::vector<std::vector<double>> rows;
};

Csv load_csv(const fs::path& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    Csv csv;
    REQUIRE(std::getline(in, csv.header));
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const auto fields = split_line(line);
        std::vector<double> row;
        row.reserve(fields.size());
        for (const std::string& f : fields) {
            row.push_back(parse_field(f));
        }
        csv.raw.push_back(fields);
        csv.rows.push_back(std::move(row));
    }
    return csv;
}

/// A scenario config whose every double carries nontrivial trailing
/// digits, to make the bitwise round trip meaningful.
ScenarioConfig awkward_config() {
    ScenarioConfig cfg;
    cfg.input = "elements";
    cfg.a = 8.59767038e3;
    cfg.e = 0.2;
    cfg.i = 20.0 + 1.0 / 3.0;
    cfg.omega = 70.07;
    cfg.raan = 135.001;
    cfg.f = 1e-3;
    cfg.rx = M_PI;
    cfg.vy = -2.5000000000000004e-7;
    cfg.coordinates = "extended";
    cfg.parameter = "tau";
    cfg.span_periods = 20.5;
    cfg.units = "si";
    cfg.model = "j2";
    cfg.gravitational_parameter = 398600.4415;
    cfg.equatorial_radius = 6378.1363;
    cfg.j2_coefficient = 1.0826267e-3;
    cfg.manev_coefficient = 0.1 + 0.2;
    cfg.rel_tol = 1e-12;
    cfg.abs_tol = 3e-13;
    cfg.initial_step = 1.0 / 1024.0 + 1e-18;
    cfg.max_step = 0.30000000000000004;
    cfg.max_steps = 123456789012;
    cfg.trajectory = "out.csv";
    cfg.drift = "drift.json";
    return cfg;
}

}  // namespace

TEST_CASE("scenario configs serialize and reparse bitwise") {
    SECTION("every field survives, including optionals") {
        const ScenarioConfig cfg = awkward_config();
        CHECK(parse_config(serialize_config(cfg)) == cfg);

        ScenarioConfig other = cfg;
        other.span_periods.reset();
        other.span = 17.000000000000004;
        other.input = "cartesian";
        other.coordinates = "projective_quasi";
        other.parameter = "s";
        other.drift.clear();
        CHECK(parse_config(serialize_config(other)) == other);
    }

    SECTION("hand-written text with comments and stray whitespace") {
        const std::string text =
            "# leading comment\n"
            "[scenario]\n"
            "  input = elements  ; trailing note\n"
            "a=2.5\n"
            "\n"
            "parameter   =   s\n"
            "span = 12.0\n"
            "[integrator]\n"
            "max_steps = 5000\n";
        const ScenarioConfig cfg = parse_config(text);
        CHECK(cfg.input == "elements");
        CHECK(cfg.a == 2.5);
        CHECK(cfg.parameter == "s");
        CHECK(cfg.span.has_value());
        CHECK(*cfg.span == 12.0);
        CHECK_FALSE(cfg.span_periods.has_value());
        CHECK(cfg.max_steps == 5000);
        CHECK(cfg.e == 0.0);  // untouched defaults
    }

    SECTION("malformed documents raise ConfigError") {
        CHECK_THROWS_AS(parse_config("[scenario]\nbogus_key = 1\n"), ConfigError);
        CHECK_THROWS_AS(parse_config("[nosuch]\na = 1\n"), ConfigError);
        CHECK_THROWS_AS(parse_config("a = 1\n"), ConfigError);
        CHECK_THROWS_AS(parse_config("[scenario]\na = twelve\n"), ConfigError);
        CHECK_THROWS_AS(parse_config("[scenario\na = 1\n"), ConfigError);
        CHECK_THROWS_AS(parse_config("[scenario]\njust words\n"), ConfigError);
        CHECK_THROWS_AS(parse_config("[integrator]\nmax_steps = 1.5\n"), ConfigError);
    }

    SECTION("full-precision formatting parses back to the same bits") {
        for (double v : {M_PI, 0.1, 1e-12, 8.59767038e3, -3.5e-300, 0.0,
                         0.30000000000000004, 2.2250738585072014e-308}) {
            CHECK(parse_field(format_full(v)) == v);
        }
    }
}

TEST_CASE("plans validate and normalize the scenario") {
    SECTION("si units rescale to body radius 1 and k1 = 1") {
        const ScenarioConfig cfg = load_config((config_dir() / "j2_scenario.cfg").string());
        const RunPlan plan = build_plan(cfg);
        CHECK(plan.model.k1 == 1.0);
        CHECK(plan.coordinates == "extended");

        // Periapsis start: r = a (1 - e) in units of the body radius.
        const double a_scaled = 8.59767038e3 / 6378.1363;
        CHECK(plan.start.r.norm() == Catch::Approx(a_scaled * 0.8).epsilon(1e-12));
        CHECK(plan.period ==
              Catch::Approx(2.0 * M_PI * std::pow(a_scaled, 1.5)).epsilon(1e-9));
        CHECK(plan.span == 20.0 * 2.0 * M_PI);
    }

    SECTION("span_periods converts per evolution parameter") {
        ScenarioConfig cfg = load_config((config_dir() / "kepler_tau.cfg").string());
        CHECK(build_plan(cfg).span == 3.0 * 2.0 * M_PI);

        cfg.parameter = "t";
        const RunPlan in_time = build_plan(cfg);
        CHECK(in_time.span == Catch::Approx(3.0 * in_time.period).epsilon(1e-15));

        cfg.parameter = "s";
        const RunPlan in_s = build_plan(cfg);
        const double l0 = in_s.start.r.cross(in_s.start.v).norm();
        CHECK(in_s.span == Catch::Approx(3.0 * 2.0 * M_PI / l0).epsilon(1e-15));
    }

    SECTION("inconsistent combinations are rejected") {
        const ScenarioConfig base = load_config((config_dir() / "kepler_tau.cfg").string());

        ScenarioConfig bad = base;
        bad.coordinates = "cartesian";
        CHECK_THROWS_AS(build_plan(bad), ConfigError);  // cartesian needs parameter t

        bad = base;
        bad.coordinates = "extended";
        bad.parameter = "t";
        CHECK_THROWS_AS(build_plan(bad), ConfigError);

        bad = base;
        bad.span = 1.0;  // both span and span_periods
        CHECK_THROWS_AS(build_plan(bad), ConfigError);

        bad = base;
        bad.span_periods.reset();  // neither
        CHECK_THROWS_AS(build_plan(bad), ConfigError);

        bad = base;
        bad.coordinates = "spherical";
        CHECK_THROWS_AS(build_plan(bad), ConfigError);

        bad = base;
        bad.e = 1.5;
        bad.a = -1.2;  // hyperbolic: no period to count
        CHECK_THROWS_AS(build_plan(bad), ConfigError);

        bad = base;
        bad.coordinates = "cartesian";
        bad.parameter = "t";
        CHECK_THROWS_AS(build_plan(bad), ConfigError);  // drift report needs q, lambda

        bad = base;
        bad.model = "drag";
        CHECK_THROWS_AS(build_plan(bad), ConfigError);
    }
}

TEST_CASE("propagate writes the documented schemas at full precision") {
    const fs::path dir = work_dir() / "propagate";
    fs::remove_all(dir);

    REQUIRE(run_cli("propagate --config " + (config_dir() / "kepler_tau.cfg").string() +
                    " --out " + dir.string()) == 0);

    const Csv csv = load_csv(dir / "kepler_tau.csv");
    CHECK(csv.header == "tau,q1,q2,q3,u,p1,p2,p3,pu,t");
    REQUIRE(csv.rows.size() > 10);
    CHECK(csv.rows.front()[0] == 0.0);
    CHECK(csv.rows.back()[0] == 3.0 * 2.0 * M_PI);  // exact terminal landing
    for (std::size_t k = 1; k < csv.rows.size(); ++k) {
        REQUIRE(csv.rows[k][0] > csv.rows[k - 1][0]);
    }

    SECTION("numeric fields are full precision (format-parse fixed point)") {
        for (std::size_t k = 0; k < std::min<std::size_t>(csv.raw.size(), 5); ++k) {
            for (const std::string& field : csv.raw[k]) {
                CHECK(format_full(parse_field(field)) == field);
            }
        }
    }

    SECTION("rows reproduce the closed-form flow and its clock") {
        const RunPlan plan = build_plan(load_config((config_dir() / "kepler_tau.cfg").string()));
        const QuasiState x0 = to_quasi(inverse(plan.start));
        const double l = x0.q.cross(x0.p).norm();
        const double ecc = perifocal_frame(from_quasi(x0), 1.0).eccentricity;
        for (std::size_t k = 0; k < csv.rows.size(); k += csv.rows.size() / 16 + 1) {
            const auto& row = csv.rows[k];
            const QuasiState ref = kepler_flow({x0, 1.0}, row[0]);
            CHECK(std::abs(row[1] - ref.q[0]) <= 1e-9);
            CHECK(std::abs(row[2] - ref.q[1]) <= 1e-9);
            CHECK(std::abs(row[3] - ref.q[2]) <= 1e-9);
            CHECK(std::abs(row[4] - ref.u) <= 1e-9);
            CHECK(std::abs(row[5] - ref.p[0]) <= 1e-9);
            CHECK(std::abs(row[6] - ref.p[1]) <= 1e-9);
            CHECK(std::abs(row[7] - ref.p[2]) <= 1e-9);
            CHECK(std::abs(row[8] - pu_from_w(ref.u, ref.w)) <= 1e-9);
            // The scenario starts at periapsis, so the clock column is a
            // plain time of flight in the true anomaly.
            CHECK(std::abs(row[9] - time_of_flight(ecc, 1.0, l, row[0])) <= 1e-9);
        }
    }

    SECTION("drift report carries the monitored maxima") {
        const nlohmann::json drift = nlohmann::json::parse(slurp(dir / "kepler_tau_drift.json"));
        REQUIRE(drift.contains("max_q_drift"));
        REQUIRE(drift.contains("max_lambda_drift"));
        CHECK(drift["max_q_drift"].get<double>() < 1e-9);
        CHECK(drift["max_lambda_drift"].get<double>() < 1e-9);
    }

    SECTION("extended coordinates append the conjugate time momentum") {
        REQUIRE(run_cli("propagate --config " + (config_dir() / "j2_scenario.cfg").string() +
                        " --out " + dir.string()) == 0);
        const Csv ext = load_csv(dir / "j2_trajectory.csv");
        CHECK(ext.header == "tau,q1,q2,q3,u,p1,p2,p3,pu,t,pt");
        REQUIRE(ext.rows.front().size() == 11);
        // Static conservative perturbation: p_t is an integral of motion.
        CHECK(std::abs(ext.rows.back()[10] - ext.rows.front()[10]) <= 1e-9);
        const nlohmann::json drift = nlohmann::json::parse(slurp(dir / "j2_drift.json"));
        CHECK(drift["max_q_drift"].get<double>() < 1e-9);
        CHECK(drift["max_lambda_drift"].get<double>() < 1e-9);
    }

    SECTION("quasi coordinates carry the appended clock in s") {
        REQUIRE(run_cli("propagate --config " + (config_dir() / "manev_s.cfg").string() +
                        " --out " + dir.string()) == 0);
        const Csv quasi = load_csv(dir / "manev_s.csv");
        CHECK(quasi.header == "s,q1,q2,q3,p1,p2,p3,u,w,t");
        REQUIRE(quasi.rows.front().size() == 10);
        CHECK(quasi.rows.back()[9] > 0.0);
    }

    SECTION("cartesian coordinates use the plain six-column schema") {
        ScenarioConfig cfg = load_config((config_dir() / "kepler_tau.cfg").string());
        cfg.coordinates = "cartesian";
        cfg.parameter = "t";
        cfg.trajectory = "cartesian.csv";
        cfg.drift.clear();
        const fs::path cfg_path = work_dir() / "cartesian.cfg";
        std::ofstream(cfg_path) << serialize_config(cfg);

        REQUIRE(run_cli("propagate --config " + cfg_path.string() + " --out " + dir.string()) ==
                0);
        const Csv cart = load_csv(dir / "cartesian.csv");
        CHECK(cart.header == "t,x,y,z,vx,vy,vz");
        const auto energy = [](const std::vector<double>& row) {
            const Vec3 r(row[1], row[2], row[3]);
            const Vec3 v(row[4], row[5], row[6]);
            return 0.5 * v.squaredNorm() - 1.0 / r.norm();
        };
        CHECK(std::abs(energy(cart.rows.back()) - energy(cart.rows.front())) <= 1e-10);
    }
}

TEST_CASE("t and tau parameterizations meet at matched physical times") {
    const fs::path dir = work_dir() / "matched";
    fs::remove_all(dir);

    ScenarioConfig tau_cfg = load_config((config_dir() / "kepler_tau.cfg").string());
    tau_cfg.drift.clear();
    tau_cfg.trajectory = "tau.csv";
    const fs::path tau_path = work_dir() / "matched_tau.cfg";
    std::ofstream(tau_path) << serialize_config(tau_cfg);
    REQUIRE(run_cli("propagate --config " + tau_path.string() + " --out " + dir.string()) == 0);
    const Csv tau_run = load_csv(dir / "tau.csv");
    const double t_final = tau_run.rows.back()[9];

    ScenarioConfig t_cfg = tau_cfg;
    t_cfg.parameter = "t";
    t_cfg.span_periods.reset();
    t_cfg.span = t_final;  // serialized at full precision, so bitwise equal
    t_cfg.trajectory = "time.csv";
    const fs::path t_path = work_dir() / "matched_t.cfg";
    std::ofstream(t_path) << serialize_config(t_cfg);
    REQUIRE(run_cli("propagate --config " + t_path.string() + " --out " + dir.string()) == 0);
    const Csv t_run = load_csv(dir / "time.csv");
    CHECK(t_run.rows.back()[0] == t_final);

    const auto recover = [](const std::vector<double>& row, std::size_t first) {
        const ProjectiveState x{Vec3(row[first], row[first + 1], row[first + 2]), row[first + 3],
                                Vec3(row[first + 4], row[first + 5], row[first + 6]),
                                row[first + 7]};
        return forward(x);
    };
    const CartesianState from_tau = recover(tau_run.rows.back(), 1);
    const CartesianState from_t = recover(t_run.rows.back(), 1);
    CHECK((from_tau.r - from_t.r).norm() <= 1e-8 * from_t.r.norm());
    CHECK((from_tau.v - from_t.v).norm() <= 1e-8 * from_t.v.norm());
}

TEST_CASE("stm subcommand prints the transition matrix") {
    const fs::path dir = work_dir() / "stm";
    fs::create_directories(dir);
    const std::string cfg_path = (config_dir() / "kepler_tau.cfg").string();

    REQUIRE(run_cli("stm --config " + cfg_path + " --tau 1.7 > " +
                    (dir / "closed.csv").string()) == 0);
    const Csv closed = load_csv(dir / "closed.csv");
    CHECK(closed.header == "q1,q2,q3,p1,p2,p3,u,w");
    REQUIRE(closed.rows.size() == 8);
    REQUIRE(closed.rows.front().size() == 8);

    const RunPlan plan = build_plan(load_config(cfg_path));
    const Stm phi = phi_full(to_quasi(inverse(plan.start)), 1.0, 1.7);
    for (Eigen::Index r = 0; r < 8; ++r) {
        for (Eigen::Index c = 0; c < 8; ++c) {
            CHECK(closed.rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] ==
                  phi.entries(r, c));  // full-precision CSV is bit exact
        }
    }

    REQUIRE(run_cli("stm --config " + cfg_path + " --tau 1.7 --variational > " +
                    (dir / "var.csv").string()) == 0);
    const Csv var = load_csv(dir / "var.csv");
    double gap = 0.0;
    for (std::size_t r = 0; r < 8; ++r) {
        for (std::size_t c = 0; c < 8; ++c) {
            gap = std::max(gap, std::abs(var.rows[r][c] - closed.rows[r][c]));
        }
    }
    CHECK(gap <= 1e-9);

    CHECK(run_cli("stm --config " + (config_dir() / "manev_s.cfg").string() +
                  " --tau 1.0 --closed-form 2> /dev/null") == 2);
}

TEST_CASE("verify subcommand reports residuals and exit codes") {
    const fs::path report = work_dir() / "verify_roundtrip.json";
    REQUIRE(run_cli("verify --suite roundtrip --json " + report.string() + " > /dev/null") == 0);
    const nlohmann::json checks = nlohmann::json::parse(slurp(report));
    REQUIRE(checks.is_array());
    REQUIRE(checks.size() == 2);
    for (const auto& check : checks) {
        REQUIRE(check.contains("name"));
        REQUIRE(check.contains("residual"));
        REQUIRE(check.contains("tolerance"));
        REQUIRE(check.contains("pass"));
        CHECK(check["pass"].get<bool>());
        CHECK(check["residual"].get<double>() < check["tolerance"].get<double>());
    }

    CHECK(run_cli("verify --suite nosuch 2> /dev/null") == 2);

    SECTION("suites are also callable in-process") {
        const auto results = run_suite("stm");
        CHECK(results.size() == 6);
        for (const auto& check : results) {
            CHECK(check.pass);
        }
        CHECK_THROWS_AS(run_suite("bogus") , UnknownSuite);
    }
}

TEST_CASE("failure exit codes distinguish usage, config, and runtime") {
    CHECK(run_cli("propagate --config /nonexistent.cfg 2> /dev/null") == 2);
    CHECK(run_cli("propagate 2> /dev/null") == 2);         // missing required option
    CHECK(run_cli("2> /dev/null") == 2);                   // missing subcommand
    CHECK(run_cli("elements --a 1 --e 0.1 2> /dev/null") == 2);  // no --to-cartesian
    CHECK(run_cli("elements --a 1 --e -0.5 --to-cartesian 2> /dev/null") == 2);

    const fs::path bad_key = work_dir() / "bad_key.cfg";
    std::ofstream(bad_key) << "[scenario]\nwarp_factor = 9\n";
    CHECK(run_cli("propagate --config " + bad_key.string() + " 2> /dev/null") == 2);

    ScenarioConfig cfg = load_config((config_dir() / "kepler_tau.cfg").string());
    cfg.rel_tol = 0.0;  // passes parsing, dies inside the integrator
    const fs::path zero_tol = work_dir() / "zero_tol.cfg";
    std::ofstream(zero_tol) << serialize_config(cfg);
    CHECK(run_cli("propagate --config " + zero_tol.string() + " --out " +
                  (work_dir() / "zero_tol_out").string() + " 2> /dev/null") == 3);

    const fs::path good = work_dir() / "elements_ok.txt";
    REQUIRE(run_cli("elements --a 2 --e 0.25 --to-cartesian > " + good.string()) == 0);
    const Csv state = load_csv(good);
    CHECK(state.header == "x,y,z,vx,vy,vz");
    CHECK(state.rows.front()[0] == 1.5);  // periapsis radius a (1 - e)
}
