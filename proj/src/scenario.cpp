#include "tvcsim/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace tvcsim {

namespace {

using nlohmann::json;

constexpr double kDegToRad = M_PI / 180.0;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw std::runtime_error("scenario config: " + where + ": " + what);
}

void check_keys(const json& j, const std::string& where,
                std::initializer_list<const char*> allowed) {
    if (!j.is_object()) fail(where, "expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                known = true;
                break;
            }
        if (!known) fail(where, "unknown key \"" + it.key() + "\"");
    }
}

double get_num(const json& j, const char* key, double fallback,
               const std::string& where) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number()) fail(where + "." + key, "expected a number");
    return v.get<double>();
}

int get_int(const json& j, const char* key, int fallback, const std::string& where) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number_integer() && !v.is_number_unsigned())
        fail(where + "." + key, "expected an integer");
    return v.get<int>();
}

std::uint64_t get_u64(const json& j, const char* key, std::uint64_t fallback,
                      const std::string& where) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0)
        return static_cast<std::uint64_t>(v.get<std::int64_t>());
    fail(where + "." + key, "expected a non-negative integer");
}

bool get_bool(const json& j, const char* key, bool fallback, const std::string& where) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_boolean()) fail(where + "." + key, "expected a boolean");
    return v.get<bool>();
}

TrajectoryTable parse_trajectory(const json& j, const std::string& base_dir) {
    check_keys(j, "trajectory", {"path", "synthetic"});
    if (j.contains("path") && j.contains("synthetic"))
        fail("trajectory", "give either \"path\" or \"synthetic\", not both");
    if (j.contains("path")) {
        const json& v = j.at("path");
        if (!v.is_string()) fail("trajectory.path", "expected a string");
        std::filesystem::path p = v.get<std::string>();
        if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
        return load_trajectory(p.string());
    }
    double duration = 80.0, spacing = 1.0;
    if (j.contains("synthetic")) {
        const json& s = j.at("synthetic");
        check_keys(s, "trajectory.synthetic", {"duration", "spacing"});
        duration = get_num(s, "duration", duration, "trajectory.synthetic");
        spacing = get_num(s, "spacing", spacing, "trajectory.synthetic");
    }
    return synth_reference_trajectory(duration, spacing);
}

} // namespace

SimScenario default_scenario() {
    SimScenario sc;
    sc.table = synth_reference_trajectory();
    return sc;
}

SimScenario scenario_from_json_text(const std::string& text,
                                    const std::string& base_dir) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        fail("parse", e.what());
    }
    check_keys(j, "top level",
               {"trajectory", "controller", "tuning", "wind", "sensors", "delays",
                "rates", "command", "seeds", "model", "duration"});

    SimScenario sc = default_scenario();

    bool explicit_duration = j.contains("duration");
    if (explicit_duration) {
        if (!j.at("duration").is_number()) fail("duration", "expected a number");
        sc.duration = j.at("duration").get<double>();
    }

    if (j.contains("trajectory")) {
        sc.table = parse_trajectory(j.at("trajectory"), base_dir);
        if (!explicit_duration) sc.duration = sc.table.duration();
    }

    if (j.contains("controller")) {
        const json& c = j.at("controller");
        check_keys(c, "controller", {"kind", "use_actuator_beta"});
        if (c.contains("kind")) {
            const json& v = c.at("kind");
            if (!v.is_string()) fail("controller.kind", "expected a string");
            sc.controller = controller_kind_from_string(v.get<std::string>());
        }
        sc.use_actuator_beta =
            get_bool(c, "use_actuator_beta", sc.use_actuator_beta, "controller");
    }

    if (j.contains("tuning")) {
        const json& t = j.at("tuning");
        check_keys(t, "tuning",
                   {"omega_theta", "zeta", "G0", "omega_qdot", "omega_beta",
                    "omega_beta0", "nodes"});
        sc.tuning.omega_theta = get_num(t, "omega_theta", sc.tuning.omega_theta, "tuning");
        sc.tuning.zeta = get_num(t, "zeta", sc.tuning.zeta, "tuning");
        sc.tuning.G0 = get_num(t, "G0", sc.tuning.G0, "tuning");
        sc.tuning.omega_qdot = get_num(t, "omega_qdot", sc.tuning.omega_qdot, "tuning");
        sc.tuning.omega_beta = get_num(t, "omega_beta", sc.tuning.omega_beta, "tuning");
        sc.tuning.omega_beta0 =
            get_num(t, "omega_beta0", sc.tuning.omega_beta0, "tuning");
        sc.tuning.n_nodes = get_int(t, "nodes", sc.tuning.n_nodes, "tuning");
    }

    if (j.contains("wind")) {
        const json& w = j.at("wind");
        check_keys(w, "wind", {"enabled", "sigma", "seed"});
        sc.wind.enabled = get_bool(w, "enabled", sc.wind.enabled, "wind");
        sc.wind.sigma = get_num(w, "sigma", sc.wind.sigma, "wind");
        sc.wind.seed = get_u64(w, "seed", sc.wind.seed, "wind");
    }

    if (j.contains("sensors")) {
        const json& s = j.at("sensors");
        check_keys(s, "sensors", {"gyro_3sigma_dps", "attitude_3sigma_deg"});
        sc.sensors.gyro_3sigma_dps =
            get_num(s, "gyro_3sigma_dps", sc.sensors.gyro_3sigma_dps, "sensors");
        sc.sensors.attitude_3sigma_deg =
            get_num(s, "attitude_3sigma_deg", sc.sensors.attitude_3sigma_deg, "sensors");
    }

    if (j.contains("delays")) {
        const json& d = j.at("delays");
        check_keys(d, "delays", {"tvc_samples"});
        sc.delays.tvc_samples = get_int(d, "tvc_samples", sc.delays.tvc_samples, "delays");
    }

    if (j.contains("rates")) {
        const json& r = j.at("rates");
        check_keys(r, "rates", {"f_gnc", "f_wind", "f_int"});
        sc.rates.f_gnc = get_num(r, "f_gnc", sc.rates.f_gnc, "rates");
        sc.rates.f_wind = get_num(r, "f_wind", sc.rates.f_wind, "rates");
        sc.rates.f_int = get_num(r, "f_int", sc.rates.f_int, "rates");
    }

    if (j.contains("command")) {
        const json& c = j.at("command");
        check_keys(c, "command", {"step_time", "step_amplitude_deg"});
        sc.command.step_time = get_num(c, "step_time", sc.command.step_time, "command");
        sc.command.step_amplitude =
            get_num(c, "step_amplitude_deg",
                    sc.command.step_amplitude / kDegToRad, "command") *
            kDegToRad;
    }

    if (j.contains("seeds")) {
        const json& s = j.at("seeds");
        check_keys(s, "seeds", {"master"});
        sc.master_seed = get_u64(s, "master", sc.master_seed, "seeds");
    }

    if (j.contains("model")) {
        const json& m = j.at("model");
        check_keys(m, "model", {"actuator", "twd", "drift", "limits"});
        sc.model.actuator = get_bool(m, "actuator", sc.model.actuator, "model");
        sc.model.twd = get_bool(m, "twd", sc.model.twd, "model");
        sc.model.drift = get_bool(m, "drift", sc.model.drift, "model");
        sc.model.limits = get_bool(m, "limits", sc.model.limits, "model");
    }

    sc.validate();
    return sc;
}

SimScenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario config: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return scenario_from_json_text(
        buf.str(), std::filesystem::path(path).parent_path().string());
}

} // namespace tvcsim
