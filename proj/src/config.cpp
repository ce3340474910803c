#include "config.hpp"

#include "regprop/elements.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace regprop::cli {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) {
        return {};
    }
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& value, const std::string& key, int line_no) {
    double out = 0.0;
    const char* first = value.data();
    const char* last = first + value.size();
    const auto res = std::from_chars(first, last, out);
    if (res.ec != std::errc{} || res.ptr != last) {
        throw ConfigError("config line " + std::to_string(line_no) + ": key '" + key +
                          "' expects a number, got '" + value + "'");
    }
    return out;
}

std::int64_t parse_int(const std::string& value, const std::string& key, int line_no) {
    std::int64_t out = 0;
    const char* first = value.data();
    const char* last = first + value.size();
    const auto res = std::from_chars(first, last, out);
    if (res.ec != std::errc{} || res.ptr != last) {
        throw ConfigError("config line " + std::to_string(line_no) + ": key '" + key +
                          "' expects an integer, got '" + value + "'");
    }
    return out;
}

void apply_key(ScenarioConfig& cfg, const std::string& section, const std::string& key,
               const std::string& value, int line_no) {
    const auto num = [&] { return parse_double(value, key, line_no); };
    if (section == "scenario") {
        if (key == "input") { cfg.input = value; return; }
        if (key == "a") { cfg.a = num(); return; }
        if (key == "e") { cfg.e = num(); return; }
        if (key == "i") { cfg.i = num(); return; }
        if (key == "omega") { cfg.omega = num(); return; }
        if (key == "raan") { cfg.raan = num(); return; }
        if (key == "f") { cfg.f = num(); return; }
        if (key == "rx") { cfg.rx = num(); return; }
        if (key == "ry") { cfg.ry = num(); return; }
        if (key == "rz") { cfg.rz = num(); return; }
        if (key == "vx") { cfg.vx = num(); return; }
        if (key == "vy") { cfg.vy = num(); return; }
        if (key == "vz") { cfg.vz = num(); return; }
        if (key == "coordinates") { cfg.coordinates = value; return; }
        if (key == "parameter") { cfg.parameter = value; return; }
        if (key == "span") { cfg.span = num(); return; }
        if (key == "span_periods") { cfg.span_periods = num(); return; }
        if (key == "units") { cfg.units = value; return; }
    } else if (section == "model") {
        if (key == "type") { cfg.model = value; return; }
        if (key == "gravitational_parameter") { cfg.gravitational_parameter = num(); return; }
        if (key == "equatorial_radius") { cfg.equatorial_radius = num(); return; }
        if (key == "j2_coefficient") { cfg.j2_coefficient = num(); return; }
        if (key == "manev_coefficient") { cfg.manev_coefficient = num(); return; }
    } else if (section == "integrator") {
        if (key == "rel_tol") { cfg.rel_tol = num(); return; }
        if (key == "abs_tol") { cfg.abs_tol = num(); return; }
        if (key == "initial_step") { cfg.initial_step = num(); return; }
        if (key == "max_step") { cfg.max_step = num(); return; }
        if (key == "max_steps") { cfg.max_steps = parse_int(value, key, line_no); return; }
    } else if (section == "output") {
        if (key == "trajectory") { cfg.trajectory = value; return; }
        if (key == "drift") { cfg.drift = value; return; }
    }
    throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key +
                      "' in section [" + section + "]");
}

}  // namespace

std::string format_full(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

ScenarioConfig parse_config(const std::string& text) {
    ScenarioConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto comment = line.find_first_of("#;");
        if (comment != std::string::npos) {
            line.erase(comment);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": unterminated section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            if (section != "scenario" && section != "model" && section != "integrator" &&
                section != "output") {
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": unknown section [" + section + "]");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected 'key = value', got '" + line + "'");
        }
        if (section.empty()) {
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": key outside any section");
        }
        apply_key(cfg, section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), line_no);
    }
    return cfg;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const ScenarioConfig& cfg) {
    std::ostringstream out;
    out << "[scenario]\n";
    out << "input = " << cfg.input << "\n";
    out << "a = " << format_full(cfg.a) << "\n";
    out << "e = " << format_full(cfg.e) << "\n";
    out << "i = " << format_full(cfg.i) << "\n";
    out << "omega = " << format_full(cfg.omega) << "\n";
    out << "raan = " << format_full(cfg.raan) << "\n";
    out << "f = " << format_full(cfg.f) << "\n";
    out << "rx = " << format_full(cfg.rx) << "\n";
    out << "ry = " << format_full(cfg.ry) << "\n";
    out << "rz = " << format_full(cfg.rz) << "\n";
    out << "vx = " << format_full(cfg.vx) << "\n";
    out << "vy = " << format_full(cfg.vy) << "\n";
    out << "vz = " << format_full(cfg.vz) << "\n";
    out << "coordinates = " << cfg.coordinates << "\n";
    out << "parameter = " << cfg.parameter << "\n";
    if (cfg.span) {
        out << "span = " << format_full(*cfg.span) << "\n";
    }
    if (cfg.span_periods) {
        out << "span_periods = " << format_full(*cfg.span_periods) << "\n";
    }
    out << "units = " << cfg.units << "\n";
    out << "\n[model]\n";
    out << "type = " << cfg.model << "\n";
    out << "gravitational_parameter = " << format_full(cfg.gravitational_parameter) << "\n";
    out << "equatorial_radius = " << format_full(cfg.equatorial_radius) << "\n";
    out << "j2_coefficient = " << format_full(cfg.j2_coefficient) << "\n";
    out << "manev_coefficient = " << format_full(cfg.manev_coefficient) << "\n";
    out << "\n[integrator]\n";
    out << "rel_tol = " << format_full(cfg.rel_tol) << "\n";
    out << "abs_tol = " << format_full(cfg.abs_tol) << "\n";
    out << "initial_step = " << format_full(cfg.initial_step) << "\n";
    out << "max_step = " << format_full(cfg.max_step) << "\n";
    out << "max_steps = " << cfg.max_steps << "\n";
    out << "\n[output]\n";
    out << "trajectory = " << cfg.trajectory << "\n";
    if (!cfg.drift.empty()) {
        out << "drift = " << cfg.drift << "\n";
    }
    return out.str();
}

RunPlan build_plan(const ScenarioConfig& cfg) {
    if (cfg.input != "elements" && cfg.input != "cartesian") {
        throw ConfigError("scenario.input must be 'elements' or 'cartesian', got '" + cfg.input +
                          "'");
    }
    if (cfg.coordinates != "cartesian" && cfg.coordinates != "projective" &&
        cfg.coordinates != "projective_quasi" && cfg.coordinates != "extended") {
        throw ConfigError("scenario.coordinates must be one of cartesian, projective,"
                          " projective_quasi, extended; got '" + cfg.coordinates + "'");
    }
    if (cfg.parameter != "t" && cfg.parameter != "s" && cfg.parameter != "tau") {
        throw ConfigError("scenario.parameter must be 't', 's', or 'tau', got '" + cfg.parameter +
                          "'");
    }
    if (cfg.coordinates == "cartesian" && cfg.parameter != "t") {
        throw ConfigError("cartesian coordinates evolve in t only");
    }
    if (cfg.coordinates == "extended" && cfg.parameter == "t") {
        throw ConfigError("extended coordinates evolve in a fictitious parameter (s or tau)");
    }
    if (cfg.units != "si" && cfg.units != "scaled") {
        throw ConfigError("scenario.units must be 'si' or 'scaled', got '" + cfg.units + "'");
    }
    if (cfg.model != "kepler" && cfg.model != "manev" && cfg.model != "j2") {
        throw ConfigError("model.type must be 'kepler', 'manev', or 'j2', got '" + cfg.model +
                          "'");
    }
    if (cfg.span.has_value() == cfg.span_periods.has_value()) {
        throw ConfigError("set exactly one of scenario.span and scenario.span_periods");
    }
    if (!(cfg.gravitational_parameter > 0.0)) {
        throw ConfigError("model.gravitational_parameter must be positive");
    }
    if (!(cfg.equatorial_radius > 0.0)) {
        throw ConfigError("model.equatorial_radius must be positive");
    }
    if (!cfg.drift.empty() && cfg.coordinates == "cartesian") {
        throw ConfigError("the (|q|, lambda) drift report needs projective-family coordinates");
    }

    RunPlan plan;
    plan.coordinates = cfg.coordinates;
    plan.parameter = cfg.parameter;
    plan.integrator = IntegratorConfig{cfg.rel_tol, cfg.abs_tol, cfg.initial_step, cfg.max_step,
                                       cfg.max_steps};

    // Unit normalization. SI configs are rescaled so that the body's
    // equatorial radius and gravitational parameter are both 1; scaled
    // configs pass through untouched.
    const bool si = cfg.units == "si";
    const double length_scale = si ? cfg.equatorial_radius : 1.0;
    const double time_scale =
        si ? std::sqrt(cfg.equatorial_radius * cfg.equatorial_radius * cfg.equatorial_radius /
                       cfg.gravitational_parameter)
           : 1.0;
    const double k1 = si ? 1.0 : cfg.gravitational_parameter;
    const double radius = si ? 1.0 : cfg.equatorial_radius;

    if (cfg.model == "kepler") {
        plan.model = make_kepler_model(k1);
    } else if (cfg.model == "manev") {
        const double k2_scale = si ? time_scale * time_scale /
                                         (length_scale * length_scale * length_scale * length_scale)
                                   : 1.0;
        plan.model = make_manev_model(k1, cfg.manev_coefficient * k2_scale);
    } else {
        plan.model = make_j2_model(J2Model(cfg.j2_coefficient, k1, radius));
    }

    if (cfg.input == "elements") {
        OrbitElements el;
        el.a = cfg.a / length_scale;
        el.e = cfg.e;
        el.i = cfg.i * M_PI / 180.0;
        el.omega_arg = cfg.omega * M_PI / 180.0;
        el.raan = cfg.raan * M_PI / 180.0;
        el.true_anomaly = cfg.f * M_PI / 180.0;
        try {
            plan.start = elements_to_cartesian(el, k1);
        } catch (const std::exception& err) {
            throw ConfigError(std::string("scenario elements are not a valid state: ") +
                              err.what());
        }
    } else {
        plan.start = CartesianState{Vec3(cfg.rx, cfg.ry, cfg.rz) / length_scale,
                                    Vec3(cfg.vx, cfg.vy, cfg.vz) * (time_scale / length_scale)};
    }

    // Osculating two-body period from the Kepler part of the energy;
    // span_periods counts these nominal revolutions even under J2 or
    // Manev terms.
    const double rn = plan.start.r.norm();
    const double energy = 0.5 * plan.start.v.squaredNorm() - k1 / rn;
    if (energy < 0.0) {
        const double sma = -k1 / (2.0 * energy);
        plan.period = 2.0 * M_PI * std::sqrt(sma * sma * sma / k1);
    }

    if (cfg.span) {
        plan.span = *cfg.span;
    } else {
        if (!(plan.period > 0.0)) {
            throw ConfigError("span_periods requires an elliptic scenario");
        }
        if (cfg.parameter == "t") {
            plan.span = *cfg.span_periods * plan.period;
        } else if (cfg.parameter == "tau") {
            plan.span = *cfg.span_periods * 2.0 * M_PI;
        } else {
            const double l0 = plan.start.r.cross(plan.start.v).norm();
            if (!(l0 > 0.0)) {
                throw ConfigError("span_periods in s requires nonzero angular momentum");
            }
            plan.span = *cfg.span_periods * 2.0 * M_PI / l0;
        }
    }
    if (!(plan.span != 0.0) || !std::isfinite(plan.span)) {
        throw ConfigError("propagation span must be nonzero and finite");
    }
    return plan;
}

}  // namespace regprop::cli
