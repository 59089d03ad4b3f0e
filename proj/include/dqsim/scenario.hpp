#pragma once

#include <filesystem>
#include <string>

#include "dqsim/plant.hpp"
#include "dqsim/sensing.hpp"

// Scenario configuration: one JSON document fully describes a run. All keys
// carry their unit in the name; nothing is inferred.

namespace dqsim {

enum class RunMode { open_loop, closed_loop };

struct Scenario {
    MotorParams motor;
    double speed_rpm = 0.0;              // mechanical shaft speed
    SynchronousCurrents command_dq;      // current command I*
    PositionErrorSpec position_error;
    CurrentErrorSpec current_error;
    RunMode mode = RunMode::open_loop;
    double duration_s = 0.0;
    double sample_rate_hz = 0.0;
    double regulator_bandwidth_rad_s = 0.0;  // closed loop only
    double voltage_limit_volt = 0.0;         // closed loop only

    double omega_mech() const;   // rad/s
    double omega_elec() const;   // rad/s
    double rev_period_s() const;
    double settle_time_s() const;  // 5 / bandwidth in closed loop, 0 otherwise
};

// Throws ConfigError when any invariant fails: positive motor constants,
// non-inverted current sensors (1 + gain > 0), distinct positive harmonic
// orders, at least 10 analyzable whole revolutions after the settling
// window, sample rate >= 20 * p * speed_hz, and a closed-loop sample period
// inside the integrator's stability bound.
void validate(const Scenario& s);

// Parses and validates a scenario. JSON syntax errors, missing keys and
// wrong types all surface as ConfigError; an unreadable file as IoError.
Scenario load_scenario(const std::filesystem::path& json_path);
Scenario parse_scenario(const std::string& json_text);

}  // namespace dqsim
