#include "dqsim/sensing.hpp"

#include <cmath>

namespace dqsim {

double position_estimate(double theta_m, const MotorParams& params,
                         const PositionErrorSpec& spec) {
    double theta_e_hat = params.pole_pairs * theta_m + spec.static_offset_elec_rad;
    for (const auto& h : spec.harmonics) {
        theta_e_hat += params.pole_pairs * h.amplitude_mech_rad *
                       std::sin(h.order * theta_m + h.phase_rad);
    }
    return theta_e_hat;
}

PhaseCurrents measure_currents(const PhaseCurrents& true_abc, const CurrentErrorSpec& spec) {
    return {
        (1.0 + spec.gain_a) * true_abc.a + spec.offset_a_ampere,
        (1.0 + spec.gain_b) * true_abc.b + spec.offset_b_ampere,
        (1.0 + spec.gain_c) * true_abc.c + spec.offset_c_ampere,
    };
}

}  // namespace dqsim
