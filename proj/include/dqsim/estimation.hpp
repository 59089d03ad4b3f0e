#pragma once

#include <vector>

#include "dqsim/frames.hpp"
#include "dqsim/sensing.hpp"

// Two routes from true currents to the synchronous-frame current estimate a
// drive controller actually sees:
//
//   1. The brute-force chain: corrupt the phase currents with the sensor
//      model, then transform at the *estimated* electrical angle. This is
//      the ground truth everything else is checked against.
//
//   2. A closed-form decomposition of the same chain into
//         (1 + K_igc) * M(dth) * I  +  K_igp * G(th + th_hat + phi_igp) * I
//         + K_iop * [cos(th_hat + phi_iop), -sin(th_hat + phi_iop)]
//      where M is the rotation by the position error, G the conjugation
//      matrix produced by the negative-sequence image of the gain errors,
//      and the last term the rotating image of the offset errors. The two
//      routes agree to machine precision; a randomized sweep asserting this
//      is exposed through the harness.
//
// The zero-sequence current exists only on the brute-force route; the
// decomposition covers d and q.

namespace dqsim {

struct Mat2 {
    double a11 = 1.0, a12 = 0.0;
    double a21 = 0.0, a22 = 1.0;

    SynchronousCurrents apply(const SynchronousCurrents& v) const {
        return {a11 * v.d + a12 * v.q, a21 * v.d + a22 * v.q};
    }
    double det() const { return a11 * a22 - a12 * a21; }
};

// Scalar constants and phases of the decomposition. k_igc is the mean gain
// error; k_igp the magnitude of the gain imbalance (zero iff all three gains
// are equal); k_iop the magnitude of the offset image in the orthogonal
// stationary frame (zero iff all three offsets are equal).
struct ErrorDecomposition {
    double k_igc = 0.0;
    double k_igp = 0.0;        // dimensionless
    double k_iop = 0.0;        // amperes
    double phi_igp = 0.0;
    double phi_iop = 0.0;
};

// One spectral line of the estimated dq currents, on the mechanical-order
// axis (cycles per shaft revolution). Order 0 entries are DC shifts relative
// to the true dq operating point.
struct PredictedLine {
    double order = 0.0;
    double amplitude_ampere = 0.0;
    char channel = 'd';  // 'd' or 'q'
};

// Brute-force estimation chain at the estimated electrical angle.
Dq0Currents estimate_dq_oracle(const PhaseCurrents& true_abc, double theta_e_hat,
                               const CurrentErrorSpec& spec);

// Rotation by the position error, [[cos, sin], [-sin, cos]].
Mat2 m_theta(double delta_theta_e);

// Conjugation matrix of the gain-imbalance term, [[cos, -sin], [-sin, -cos]]
// at the given angle. Determinant -1: this term maps the conjugate of the
// current vector, which is what makes two balanced gains plus one odd one
// pulse at twice the electrical frequency.
Mat2 gain_pulsation_matrix(double angle);

ErrorDecomposition error_constants(const CurrentErrorSpec& spec);

// Closed-form route. Equals the d/q part of estimate_dq_oracle applied to
// inverse_park_abc(true_dq, theta_e) to numerical precision.
SynchronousCurrents estimate_dq_analytic(const SynchronousCurrents& true_dq, double theta_e,
                                         double theta_e_hat, const CurrentErrorSpec& spec);

// Spectral lines of the estimated dq currents for a shaft spinning at
// constant speed with the true currents held at true_dq. Exact up to
// truncation of the phase-modulation series; requires every harmonic to
// satisfy |p * amplitude| < 0.2 rad so the truncation is meaningful, and
// throws std::invalid_argument otherwise. Lines below 1e-9 A are dropped,
// so an error-free spec yields an empty list.
std::vector<PredictedLine> predicted_orders(const PositionErrorSpec& position_spec,
                                            const CurrentErrorSpec& current_spec,
                                            const MotorParams& params,
                                            const SynchronousCurrents& true_dq);

}  // namespace dqsim
