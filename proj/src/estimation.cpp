#include "dqsim/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>

namespace dqsim {

namespace {

constexpr double kLineFloorAmpere = 1e-9;

// J_n for signed integer order.
double bessel_j(int n, double x) {
    const double j = std::cyl_bessel_j(static_cast<double>(std::abs(n)), x);
    return (n < 0 && (n & 1)) ? -j : j;
}

}  // namespace

Dq0Currents estimate_dq_oracle(const PhaseCurrents& true_abc, double theta_e_hat,
                               const CurrentErrorSpec& spec) {
    return park_abc(measure_currents(true_abc, spec), theta_e_hat);
}

Mat2 m_theta(double delta_theta_e) {
    const double c = std::cos(delta_theta_e);
    const double s = std::sin(delta_theta_e);
    return {c, s, -s, c};
}

Mat2 gain_pulsation_matrix(double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {c, -s, -s, -c};
}

ErrorDecomposition error_constants(const CurrentErrorSpec& spec) {
    ErrorDecomposition dec;
    dec.k_igc = (spec.gain_a + spec.gain_b + spec.gain_c) / 3.0;

    // Both imbalance constants come from the Clarke image of the respective
    // error triple. For the gains that image is the negative-sequence
    // component, which carries a factor 1/2 relative to the phase-frame
    // magnitude; equivalently k_igp = (1/3) * sqrt(sum_x dK_x^2 -
    // sum_{x<y} dK_x dK_y), which vanishes exactly for balanced gains.
    const OrthogonalCurrents g = clarke({spec.gain_a, spec.gain_b, spec.gain_c});
    dec.k_igp = 0.5 * std::hypot(g.alpha, g.beta);
    dec.phi_igp = dec.k_igp > 0.0 ? std::atan2(g.beta, g.alpha) : 0.0;

    const OrthogonalCurrents o =
        clarke({spec.offset_a_ampere, spec.offset_b_ampere, spec.offset_c_ampere});
    dec.k_iop = std::hypot(o.alpha, o.beta);
    dec.phi_iop = dec.k_iop > 0.0 ? std::atan2(-o.beta, o.alpha) : 0.0;
    return dec;
}

SynchronousCurrents estimate_dq_analytic(const SynchronousCurrents& true_dq, double theta_e,
                                         double theta_e_hat, const CurrentErrorSpec& spec) {
    const ErrorDecomposition dec = error_constants(spec);

    const Mat2 rot = m_theta(theta_e_hat - theta_e);
    const SynchronousCurrents rotated = rot.apply(true_dq);
    const double common = 1.0 + dec.k_igc;

    const Mat2 puls = gain_pulsation_matrix(theta_e + theta_e_hat + dec.phi_igp);
    const SynchronousCurrents pulsating = puls.apply(true_dq);

    const double off_angle = theta_e_hat + dec.phi_iop;
    return {
        common * rotated.d + dec.k_igp * pulsating.d + dec.k_iop * std::cos(off_angle),
        common * rotated.q + dec.k_igp * pulsating.q - dec.k_iop * std::sin(off_angle),
    };
}

std::vector<PredictedLine> predicted_orders(const PositionErrorSpec& position_spec,
                                            const CurrentErrorSpec& current_spec,
                                            const MotorParams& params,
                                            const SynchronousCurrents& true_dq) {
    using cplx = std::complex<double>;
    const cplx j{0.0, 1.0};
    const int p = params.pole_pairs;

    for (const auto& h : position_spec.harmonics) {
        if (std::abs(p * h.amplitude_mech_rad) >= 0.2) {
            throw std::invalid_argument(
                "predicted_orders: position harmonic amplitude too large for the "
                "phase-modulation expansion (|p * amplitude| must stay below 0.2 rad)");
        }
    }

    // The estimate as a complex signal d + jq is
    //   (1 + k_igc) * I * e^{-j dth}  +  lam * conj(I) * e^{-j(2 th + dth)}
    //   + off * e^{-j(th + dth)}
    // with th = p*theta_m and dth the position error. Expanding e^{-j dth}
    // through the Bessel series of each sinusoidal harmonic turns the signal
    // into a sum of complex exponentials over integer mechanical orders;
    // every term below reuses that one series, shifted by its base order.
    std::map<int, cplx> series;
    series[0] = std::exp(-j * position_spec.static_offset_elec_rad);
    for (const auto& h : position_spec.harmonics) {
        const double depth = p * h.amplitude_mech_rad;
        int n_max = 1;
        while (n_max < 12 && std::abs(bessel_j(n_max + 1, depth)) > 1e-14) ++n_max;
        std::map<int, cplx> expanded;
        for (const auto& [order, coeff] : series) {
            for (int n = -n_max; n <= n_max; ++n) {
                expanded[order - n * h.order] +=
                    coeff * bessel_j(n, depth) * std::exp(-j * (n * h.phase_rad));
            }
        }
        series = std::move(expanded);
    }

    const ErrorDecomposition dec = error_constants(current_spec);
    const cplx current{true_dq.d, true_dq.q};
    const OrthogonalCurrents g =
        clarke({current_spec.gain_a, current_spec.gain_b, current_spec.gain_c});
    const cplx neg_seq_gain = 0.5 * cplx{g.alpha, -g.beta};
    const OrthogonalCurrents o = clarke({current_spec.offset_a_ampere,
                                         current_spec.offset_b_ampere,
                                         current_spec.offset_c_ampere});
    const cplx offset_image{o.alpha, o.beta};

    std::map<int, cplx> lines;
    for (const auto& [order, coeff] : series) {
        lines[order] += (1.0 + dec.k_igc) * current * coeff;
        lines[order - 2 * p] += neg_seq_gain * std::conj(current) * coeff;
        lines[order - p] += offset_image * coeff;
    }
    lines[0] -= current;  // report DC as the shift away from the true operating point

    // Fold the two-sided complex exponentials into one-sided real amplitudes
    // per channel: d picks up (z_k + conj(z_-k)), q picks up (z_k - conj(z_-k)).
    std::vector<PredictedLine> out;
    const auto at = [&lines](int k) {
        const auto it = lines.find(k);
        return it == lines.end() ? cplx{0.0, 0.0} : it->second;
    };
    int max_order = 0;
    for (const auto& [order, coeff] : lines) max_order = std::max(max_order, std::abs(order));
    for (int k = 0; k <= max_order; ++k) {
        double amp_d, amp_q;
        if (k == 0) {
            amp_d = std::abs(at(0).real());
            amp_q = std::abs(at(0).imag());
        } else {
            amp_d = std::abs(at(k) + std::conj(at(-k)));
            amp_q = std::abs(at(k) - std::conj(at(-k)));
        }
        if (amp_d > kLineFloorAmpere) out.push_back({double(k), amp_d, 'd'});
        if (amp_q > kLineFloorAmpere) out.push_back({double(k), amp_q, 'q'});
    }
    return out;
}

}  // namespace dqsim
