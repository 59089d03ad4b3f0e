#pragma once

#include "dqsim/estimation.hpp"
#include "dqsim/plant.hpp"

// Synchronous-frame current regulator: one PI per axis plus back-EMF
// feedforward, with per-axis output clamping and conditional anti-windup.
// The regulator is only ever handed *estimated* currents; the harness owns
// the boundary that keeps true currents out of reach.

namespace dqsim {

struct PiGains {
    double kp_d = 0.0;  // V/A
    double ki_d = 0.0;  // V/(A s)
    double kp_q = 0.0;
    double ki_q = 0.0;
};

struct RegulatorState {
    double integrator_d = 0.0;  // volts
    double integrator_q = 0.0;
    double prev_error_d = 0.0;  // amperes, for the trapezoidal accumulation
    double prev_error_q = 0.0;
    Voltages last_command;
};

// Pole-zero-cancellation tuning: kp = L * w_bw, ki = R * w_bw per axis,
// giving a first-order closed-loop response at the requested bandwidth on
// the nominal plant.
PiGains tune_bandwidth(const MotorParams& params, double bandwidth_rad_s);

// One regulator update. error = command - estimated; the voltage command is
// kp * error + integrator + back-EMF feedforward, clamped per axis to
// +/- v_limit. The trapezoidal integrator freezes whenever its axis is
// saturated and the error would push it deeper in, and is itself bounded by
// the voltage limit. dt must be positive.
Voltages regulator_step(RegulatorState& state, const SynchronousCurrents& command_dq,
                        const SynchronousCurrents& estimated_dq, double omega_e,
                        const MotorParams& params, const PiGains& gains, double dt,
                        double v_limit);

// True currents carried by the plant when the regulator tracks its corrupted
// estimate perfectly: the estimation decomposition solved for the true
// current at estimate == command. Throws std::domain_error when the gain
// errors make the 2x2 system singular (possible only for physically
// degenerate specs with 1 + k_igc <= k_igp).
SynchronousCurrents ideal_closed_loop(const SynchronousCurrents& command_dq, double theta_e,
                                      double theta_e_hat, const CurrentErrorSpec& spec);

}  // namespace dqsim
