#pragma once

#include "dqsim/frames.hpp"

// Synchronous-frame electrical model of a PMSM whose shaft is driven at a
// fixed externally-imposed speed (dyno operation). Mechanical dynamics,
// saturation and inverter nonlinearity are out of scope.
//
// Voltage equations, with s the derivative operator:
//
//   [v_d]   [L_d s + R     w_e L_q ] [i_d]   [0        ]
//   [v_q] = [-w_e L_d      L_q s + R] [i_q] + [w_e lam_m]
//
// Note the cross-coupling sign placement: +w_e L_q in the d row and
// -w_e L_d in the q row. This is the opposite of the arrangement most
// textbooks print; it is kept as-is because every error-decomposition
// constant downstream was worked out against this form.

namespace dqsim {

struct MotorParams {
    double r_ohm = 0.0;          // combined motor + inverter resistance
    double l_d_henry = 0.0;
    double l_q_henry = 0.0;
    double lambda_m_weber = 0.0; // magnet flux linkage
    int pole_pairs = 1;
};

struct PlantState {
    double i_d = 0.0;
    double i_q = 0.0;
};

struct Voltages {
    double v_d = 0.0;
    double v_q = 0.0;
};

// Speed-proportional EMF from the magnet flux; lands entirely on the q axis.
Voltages back_emf(double omega_e, const MotorParams& params);

// Right-hand side of the state equation, di/dt as a PlantState.
PlantState derivative(const PlantState& state, const Voltages& volts, double omega_e,
                      const MotorParams& params);

// Currents solving the voltage equations with s = 0. The static 2x2 system
// has determinant R^2 + w_e^2 L_d L_q > 0, so it is always solvable.
PlantState steady_state(const Voltages& volts, double omega_e, const MotorParams& params);

// Voltages that hold the given currents in steady state (the s = 0 forward
// equations). Inverse of steady_state.
Voltages steady_voltage(const PlantState& state, double omega_e, const MotorParams& params);

// Classical RK4 step. dt == 0 is a no-op; dt must otherwise lie in
// (0, 0.2 * min(L_d, L_q) / R] to keep the explicit integrator well inside
// its stability region. Throws std::invalid_argument outside that range.
PlantState step(const PlantState& state, const Voltages& volts, double omega_e, double dt,
                const MotorParams& params);

// Electromagnetic torque, 1.5 * p * (lam_m * i_q + (L_d - L_q) * i_d * i_q).
double torque(const PlantState& state, const MotorParams& params);

// Largest dt accepted by step() for these parameters.
double max_stable_dt(const MotorParams& params);

}  // namespace dqsim
