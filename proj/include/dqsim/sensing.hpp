#pragma once

#include <vector>

#include "dqsim/frames.hpp"
#include "dqsim/plant.hpp"

// Deterministic error models for the two transducers of a current-controlled
// drive: the position sensor and the three phase-current sensors. Both map
// true signals to measured signals; neither adds noise, quantization or
// latency (hooks for those would sit here if ever needed).

namespace dqsim {

// One periodic component of the position error, expressed in the mechanical
// domain: amplitude_mech_rad * sin(order * theta_m + phase_rad).
struct PositionHarmonic {
    int order = 1;                  // cycles per shaft revolution, > 0
    double amplitude_mech_rad = 0.0;
    double phase_rad = 0.0;
};

struct PositionErrorSpec {
    double static_offset_elec_rad = 0.0;
    std::vector<PositionHarmonic> harmonics;

    bool is_zero() const {
        if (static_offset_elec_rad != 0.0) return false;
        for (const auto& h : harmonics)
            if (h.amplitude_mech_rad != 0.0) return false;
        return true;
    }
};

// Per-phase gain and offset errors: measured = (1 + gain) * true + offset.
struct CurrentErrorSpec {
    double gain_a = 0.0;
    double gain_b = 0.0;
    double gain_c = 0.0;
    double offset_a_ampere = 0.0;
    double offset_b_ampere = 0.0;
    double offset_c_ampere = 0.0;
};

// Electrical position estimate for a shaft at mechanical angle theta_m:
//   p * theta_m + static offset + p * sum_r amp_r * sin(r * theta_m + ph_r)
// Harmonic amplitudes are mechanical and get scaled by the pole-pair count
// here; configs must store them unscaled. The result is not wrapped.
double position_estimate(double theta_m, const MotorParams& params,
                         const PositionErrorSpec& spec);

// Applies the per-phase gain/offset model to a true phase-current triple.
PhaseCurrents measure_currents(const PhaseCurrents& true_abc, const CurrentErrorSpec& spec);

}  // namespace dqsim
