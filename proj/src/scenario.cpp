#include "dqsim/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dqsim/errors.hpp"

namespace dqsim {

namespace {

constexpr double kTwoPi = 6.283185307179586476925;

using json = nlohmann::json;

double require_number(const json& obj, const std::string& key) {
    if (!obj.contains(key) || !obj[key].is_number()) {
        throw ConfigError("scenario: missing or non-numeric key '" + key + "'");
    }
    return obj[key].get<double>();
}

double number_or(const json& obj, const std::string& key, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) {
        throw ConfigError("scenario: non-numeric key '" + key + "'");
    }
    return obj[key].get<double>();
}

}  // namespace

double Scenario::omega_mech() const { return speed_rpm * kTwoPi / 60.0; }

double Scenario::omega_elec() const { return motor.pole_pairs * omega_mech(); }

double Scenario::rev_period_s() const { return 60.0 / speed_rpm; }

double Scenario::settle_time_s() const {
    return mode == RunMode::closed_loop ? 5.0 / regulator_bandwidth_rad_s : 0.0;
}

void validate(const Scenario& s) {
    const auto fail = [](const std::string& what) { throw ConfigError("scenario: " + what); };

    if (!(s.motor.r_ohm > 0.0)) fail("r_ohm must be > 0");
    if (!(s.motor.l_d_henry > 0.0)) fail("l_d_henry must be > 0");
    if (!(s.motor.l_q_henry > 0.0)) fail("l_q_henry must be > 0");
    if (!(s.motor.lambda_m_weber >= 0.0)) fail("lambda_m_weber must be >= 0");
    if (s.motor.pole_pairs < 1) fail("pole_pairs must be >= 1");
    if (!(s.speed_rpm > 0.0)) fail("speed_rpm must be > 0");
    if (!std::isfinite(s.command_dq.d) || !std::isfinite(s.command_dq.q)) {
        fail("command currents must be finite");
    }

    for (double gain : {s.current_error.gain_a, s.current_error.gain_b, s.current_error.gain_c}) {
        if (!(1.0 + gain > 0.0)) fail("current sensor gain error would invert a sensor");
    }
    std::set<int> orders;
    for (const auto& h : s.position_error.harmonics) {
        if (h.order < 1) fail("position harmonic orders must be positive integers");
        if (!(h.amplitude_mech_rad >= 0.0)) fail("position harmonic amplitudes must be >= 0");
        if (!orders.insert(h.order).second) fail("position harmonic orders must be distinct");
    }

    if (!(s.sample_rate_hz > 0.0)) fail("sample_rate_hz must be > 0");
    const double min_rate = 20.0 * s.motor.pole_pairs * s.speed_rpm / 60.0;
    if (s.sample_rate_hz < min_rate) {
        std::ostringstream msg;
        msg << "sample_rate_hz must be at least 20 * p * speed_hz = " << min_rate << " Hz";
        fail(msg.str());
    }
    if (!(s.duration_s > 0.0)) fail("duration_s must be > 0");

    if (s.mode == RunMode::closed_loop) {
        if (!(s.regulator_bandwidth_rad_s > 0.0)) fail("regulator_bandwidth_rad_s must be > 0");
        if (!(s.voltage_limit_volt > 0.0)) fail("voltage_limit_volt must be > 0");
        const double dt = 1.0 / s.sample_rate_hz;
        if (dt > max_stable_dt(s.motor)) {
            std::ostringstream msg;
            msg << "sample period " << dt << " s exceeds the integrator stability bound "
                << max_stable_dt(s.motor) << " s; raise sample_rate_hz";
            fail(msg.str());
        }
    }

    const double analyzable = s.duration_s - s.settle_time_s();
    const double revs = std::floor(analyzable / s.rev_period_s() + 1e-9);
    if (revs < 10.0) {
        std::ostringstream msg;
        msg << "duration_s leaves " << revs << " whole revolutions after the "
            << s.settle_time_s() << " s settling window; need at least 10 ("
            << s.settle_time_s() + 10.0 * s.rev_period_s() << " s total)";
        fail(msg.str());
    }
}

Scenario parse_scenario(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("scenario: JSON parse error: ") + e.what());
    }

    Scenario s;
    if (!root.contains("motor") || !root["motor"].is_object()) {
        throw ConfigError("scenario: missing 'motor' object");
    }
    const json& m = root["motor"];
    s.motor.r_ohm = require_number(m, "r_ohm");
    s.motor.l_d_henry = require_number(m, "l_d_henry");
    s.motor.l_q_henry = require_number(m, "l_q_henry");
    s.motor.lambda_m_weber = require_number(m, "lambda_m_weber");
    const double pp = require_number(m, "pole_pairs");
    if (pp != std::floor(pp)) throw ConfigError("scenario: pole_pairs must be an integer");
    s.motor.pole_pairs = static_cast<int>(pp);

    s.speed_rpm = require_number(root, "speed_rpm");
    s.command_dq.d = require_number(root, "command_d_ampere");
    s.command_dq.q = require_number(root, "command_q_ampere");

    if (root.contains("position_error")) {
        const json& pe = root["position_error"];
        s.position_error.static_offset_elec_rad =
            number_or(pe, "static_offset_elec_rad", 0.0);
        if (pe.contains("harmonics")) {
            if (!pe["harmonics"].is_array()) {
                throw ConfigError("scenario: position_error.harmonics must be an array");
            }
            for (const json& h : pe["harmonics"]) {
                PositionHarmonic ph;
                const double order = require_number(h, "order");
                if (order != std::floor(order)) {
                    throw ConfigError("scenario: harmonic order must be an integer");
                }
                ph.order = static_cast<int>(order);
                ph.amplitude_mech_rad = require_number(h, "amplitude_mech_rad");
                ph.phase_rad = number_or(h, "phase_rad", 0.0);
                s.position_error.harmonics.push_back(ph);
            }
        }
    }
    if (root.contains("current_error")) {
        const json& ce = root["current_error"];
        s.current_error.gain_a = number_or(ce, "gain_a", 0.0);
        s.current_error.gain_b = number_or(ce, "gain_b", 0.0);
        s.current_error.gain_c = number_or(ce, "gain_c", 0.0);
        s.current_error.offset_a_ampere = number_or(ce, "offset_a_ampere", 0.0);
        s.current_error.offset_b_ampere = number_or(ce, "offset_b_ampere", 0.0);
        s.current_error.offset_c_ampere = number_or(ce, "offset_c_ampere", 0.0);
    }

    if (!root.contains("mode") || !root["mode"].is_string()) {
        throw ConfigError("scenario: missing 'mode' string");
    }
    const std::string mode = root["mode"].get<std::string>();
    if (mode == "open_loop") {
        s.mode = RunMode::open_loop;
    } else if (mode == "closed_loop") {
        s.mode = RunMode::closed_loop;
    } else {
        throw ConfigError("scenario: mode must be 'open_loop' or 'closed_loop'");
    }

    s.duration_s = require_number(root, "duration_s");
    s.sample_rate_hz = require_number(root, "sample_rate_hz");
    s.regulator_bandwidth_rad_s = number_or(root, "regulator_bandwidth_rad_s", 0.0);
    s.voltage_limit_volt = number_or(root, "voltage_limit_volt", 0.0);

    validate(s);
    return s;
}

Scenario load_scenario(const std::filesystem::path& json_path) {
    std::ifstream in(json_path);
    if (!in) {
        throw IoError("cannot open scenario file: " + json_path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) {
        throw IoError("error reading scenario file: " + json_path.string());
    }
    return parse_scenario(buf.str());
}

}  // namespace dqsim
