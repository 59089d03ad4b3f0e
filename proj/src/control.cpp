#include "dqsim/control.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dqsim {

namespace {

struct AxisResult {
    double integrator;
    double output;
};

AxisResult pi_axis(double error, double prev_error, double integrator, double kp, double ki,
                   double feedforward, double dt, double v_limit) {
    const double trial = integrator + ki * dt * 0.5 * (error + prev_error);
    double v = kp * error + trial + feedforward;
    if (std::abs(v) <= v_limit) {
        return {trial, v};
    }
    const double clamped = std::clamp(v, -v_limit, v_limit);
    // Freeze the integrator while the error keeps pushing into the rail;
    // let it unwind as soon as the error changes sign.
    const bool deeper = (v > v_limit && error > 0.0) || (v < -v_limit && error < 0.0);
    const double kept = deeper ? integrator : trial;
    return {std::clamp(kept, -v_limit, v_limit), clamped};
}

}  // namespace

PiGains tune_bandwidth(const MotorParams& params, double bandwidth_rad_s) {
    if (!(bandwidth_rad_s > 0.0)) {
        throw std::invalid_argument("tune_bandwidth: bandwidth must be positive");
    }
    return {
        params.l_d_henry * bandwidth_rad_s,
        params.r_ohm * bandwidth_rad_s,
        params.l_q_henry * bandwidth_rad_s,
        params.r_ohm * bandwidth_rad_s,
    };
}

Voltages regulator_step(RegulatorState& state, const SynchronousCurrents& command_dq,
                        const SynchronousCurrents& estimated_dq, double omega_e,
                        const MotorParams& params, const PiGains& gains, double dt,
                        double v_limit) {
    if (!(dt > 0.0)) {
        throw std::invalid_argument("regulator_step: dt must be positive");
    }
    const double e_d = command_dq.d - estimated_dq.d;
    const double e_q = command_dq.q - estimated_dq.q;
    const Voltages ff = back_emf(omega_e, params);

    const AxisResult d = pi_axis(e_d, state.prev_error_d, state.integrator_d, gains.kp_d,
                                 gains.ki_d, ff.v_d, dt, v_limit);
    const AxisResult q = pi_axis(e_q, state.prev_error_q, state.integrator_q, gains.kp_q,
                                 gains.ki_q, ff.v_q, dt, v_limit);

    state.integrator_d = d.integrator;
    state.integrator_q = q.integrator;
    state.prev_error_d = e_d;
    state.prev_error_q = e_q;
    state.last_command = {d.output, q.output};
    return state.last_command;
}

SynchronousCurrents ideal_closed_loop(const SynchronousCurrents& command_dq, double theta_e,
                                      double theta_e_hat, const CurrentErrorSpec& spec) {
    const ErrorDecomposition dec = error_constants(spec);

    // estimate = [(1 + k_igc) M + k_igp G] I + offset vector; set the
    // estimate to the command and solve the 2x2 system for I.
    const Mat2 rot = m_theta(theta_e_hat - theta_e);
    const Mat2 puls = gain_pulsation_matrix(theta_e + theta_e_hat + dec.phi_igp);
    const double s = 1.0 + dec.k_igc;
    const Mat2 a{
        s * rot.a11 + dec.k_igp * puls.a11, s * rot.a12 + dec.k_igp * puls.a12,
        s * rot.a21 + dec.k_igp * puls.a21, s * rot.a22 + dec.k_igp * puls.a22,
    };
    const double det = a.det();  // equals (1 + k_igc)^2 - k_igp^2
    if (std::abs(det) < 1e-12) {
        throw std::domain_error(
            "ideal_closed_loop: gain errors make the estimation map singular "
            "(1 + k_igc <= k_igp)");
    }
    const double off_angle = theta_e_hat + dec.phi_iop;
    const double b_d = command_dq.d - dec.k_iop * std::cos(off_angle);
    const double b_q = command_dq.q + dec.k_iop * std::sin(off_angle);
    return {
        (a.a22 * b_d - a.a12 * b_q) / det,
        (-a.a21 * b_d + a.a11 * b_q) / det,
    };
}

}  // namespace dqsim
