#include "dqsim/plant.hpp"

#include <algorithm>
#include <stdexcept>

namespace dqsim {

Voltages back_emf(double omega_e, const MotorParams& params) {
    return {0.0, omega_e * params.lambda_m_weber};
}

PlantState derivative(const PlantState& state, const Voltages& volts, double omega_e,
                      const MotorParams& params) {
    const double di_d =
        (volts.v_d - params.r_ohm * state.i_d - omega_e * params.l_q_henry * state.i_q) /
        params.l_d_henry;
    const double di_q =
        (volts.v_q - params.r_ohm * state.i_q + omega_e * params.l_d_henry * state.i_d -
         omega_e * params.lambda_m_weber) /
        params.l_q_henry;
    return {di_d, di_q};
}

PlantState steady_state(const Voltages& volts, double omega_e, const MotorParams& params) {
    // [R        w L_q] [i_d]   [v_d            ]
    // [-w L_d   R    ] [i_q] = [v_q - w lam_m  ]
    const double r = params.r_ohm;
    const double wld = omega_e * params.l_d_henry;
    const double wlq = omega_e * params.l_q_henry;
    const double det = r * r + wld * wlq;
    const double b_d = volts.v_d;
    const double b_q = volts.v_q - omega_e * params.lambda_m_weber;
    return {
        (r * b_d - wlq * b_q) / det,
        (wld * b_d + r * b_q) / det,
    };
}

Voltages steady_voltage(const PlantState& state, double omega_e, const MotorParams& params) {
    return {
        params.r_ohm * state.i_d + omega_e * params.l_q_henry * state.i_q,
        params.r_ohm * state.i_q - omega_e * params.l_d_henry * state.i_d +
            omega_e * params.lambda_m_weber,
    };
}

double max_stable_dt(const MotorParams& params) {
    return 0.2 * std::min(params.l_d_henry, params.l_q_henry) / params.r_ohm;
}

PlantState step(const PlantState& state, const Voltages& volts, double omega_e, double dt,
                const MotorParams& params) {
    if (dt == 0.0) {
        return state;
    }
    if (!(dt > 0.0) || dt > max_stable_dt(params)) {
        throw std::invalid_argument("plant step dt outside (0, 0.2*min(L)/R]");
    }
    const auto add = [](const PlantState& s, const PlantState& k, double h) {
        return PlantState{s.i_d + h * k.i_d, s.i_q + h * k.i_q};
    };
    const PlantState k1 = derivative(state, volts, omega_e, params);
    const PlantState k2 = derivative(add(state, k1, 0.5 * dt), volts, omega_e, params);
    const PlantState k3 = derivative(add(state, k2, 0.5 * dt), volts, omega_e, params);
    const PlantState k4 = derivative(add(state, k3, dt), volts, omega_e, params);
    return {
        state.i_d + dt / 6.0 * (k1.i_d + 2.0 * k2.i_d + 2.0 * k3.i_d + k4.i_d),
        state.i_q + dt / 6.0 * (k1.i_q + 2.0 * k2.i_q + 2.0 * k3.i_q + k4.i_q),
    };
}

double torque(const PlantState& state, const MotorParams& params) {
    return 1.5 * params.pole_pairs *
           (params.lambda_m_weber * state.i_q +
            (params.l_d_henry - params.l_q_henry) * state.i_d * state.i_q);
}

}  // namespace dqsim
