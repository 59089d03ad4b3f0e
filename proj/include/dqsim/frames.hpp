#pragma once

#include <cmath>

// Reference-frame transformations between the stationary phase frame (abc),
// the stationary orthogonal frame (alpha/beta/0) and the rotor-synchronous
// frame (dq).
//
// Conventions, fixed project-wide:
//   - Amplitude-invariant Clarke scaling (2/3): a balanced three-phase set of
//     peak amplitude A maps to an alpha/beta vector of length A.
//   - Park rotation [[cos, sin], [-sin, cos]]: positive angle rotates the
//     stationary vector into the synchronous frame, so a balanced
//     positive-sequence set is DC in dq.
// All sensor-error constants elsewhere in the library assume exactly these
// two choices; do not swap in a power-invariant variant.

namespace dqsim {

struct PhaseCurrents {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
};

struct OrthogonalCurrents {
    double alpha = 0.0;
    double beta = 0.0;
    double zero = 0.0;
};

struct SynchronousCurrents {
    double d = 0.0;
    double q = 0.0;
};

// dq plus the zero-sequence component, which rides along unrotated.
struct Dq0Currents {
    double d = 0.0;
    double q = 0.0;
    double zero = 0.0;

    SynchronousCurrents dq() const { return {d, q}; }
};

inline OrthogonalCurrents clarke(const PhaseCurrents& abc) {
    constexpr double inv_sqrt3 = 0.57735026918962576451;
    return {
        (2.0 / 3.0) * (abc.a - 0.5 * abc.b - 0.5 * abc.c),
        (abc.b - abc.c) * inv_sqrt3,
        (abc.a + abc.b + abc.c) / 3.0,
    };
}

inline SynchronousCurrents park(const OrthogonalCurrents& ab, double theta_e) {
    const double c = std::cos(theta_e);
    const double s = std::sin(theta_e);
    return {
        c * ab.alpha + s * ab.beta,
        -s * ab.alpha + c * ab.beta,
    };
}

// Composite abc -> dq0 at the given electrical angle.
inline Dq0Currents park_abc(const PhaseCurrents& abc, double theta_e) {
    const OrthogonalCurrents ab = clarke(abc);
    const SynchronousCurrents dq = park(ab, theta_e);
    return {dq.d, dq.q, ab.zero};
}

// dq -> abc at the given electrical angle. Produces a zero-sequence-free
// phase set; park_abc(inverse_park_abc(x, th), th) == x.
inline PhaseCurrents inverse_park_abc(const SynchronousCurrents& dq, double theta_e) {
    constexpr double half_sqrt3 = 0.86602540378443864676;
    const double c = std::cos(theta_e);
    const double s = std::sin(theta_e);
    const double alpha = c * dq.d - s * dq.q;
    const double beta = s * dq.d + c * dq.q;
    return {
        alpha,
        -0.5 * alpha + half_sqrt3 * beta,
        -0.5 * alpha - half_sqrt3 * beta,
    };
}

}  // namespace dqsim
