#include "dqsim/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace dqsim {

namespace {

constexpr double kTwoPi = 6.283185307179586476925;

// FFTW planning is not thread-safe; execution is.
std::mutex g_plan_mutex;

}  // namespace

Spectrum spectrum(const TimeSeries& ts, double omega_m) {
    const std::size_t n = ts.samples.size();
    if (!(ts.dt > 0.0) || n < 2) {
        throw std::invalid_argument("spectrum: need dt > 0 and at least 2 samples");
    }
    if (!(omega_m > 0.0)) {
        throw std::invalid_argument("spectrum: mechanical speed must be positive");
    }
    const double f_mech = omega_m / kTwoPi;
    const double revolutions = static_cast<double>(n) * ts.dt * f_mech;
    if (revolutions < 10.0 * (1.0 - 1e-9)) {
        std::ostringstream msg;
        msg << "spectrum: record covers " << revolutions
            << " revolutions; need at least 10 (minimum duration " << 10.0 / f_mech
            << " s at this speed)";
        throw std::invalid_argument(msg.str());
    }

    double* in = fftw_alloc_real(n);
    fftw_complex* out = fftw_alloc_complex(n / 2 + 1);
    // Periodic Hann; its coherent gain is exactly 1/2.
    for (std::size_t k = 0; k < n; ++k) {
        const double w = 0.5 - 0.5 * std::cos(kTwoPi * static_cast<double>(k) / n);
        in[k] = ts.samples[k] * w;
    }
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(g_plan_mutex);
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in, out, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(g_plan_mutex);
        fftw_destroy_plan(plan);
    }

    const double coherent_gain = 0.5;
    const double order_step = 1.0 / revolutions;
    const double freq_step = 1.0 / (static_cast<double>(n) * ts.dt);
    Spectrum spec;
    spec.lines.reserve(n / 2 + 1);
    for (std::size_t k = 0; k <= n / 2; ++k) {
        const double mag = std::hypot(out[k][0], out[k][1]) / (coherent_gain * n);
        const bool two_sided_bin = k != 0 && !(n % 2 == 0 && k == n / 2);
        spec.lines.push_back({
            order_step * static_cast<double>(k),
            freq_step * static_cast<double>(k),
            two_sided_bin ? 2.0 * mag : mag,
        });
    }
    fftw_free(in);
    fftw_free(out);
    return spec;
}

double harmonic_at(const Spectrum& spec, double order) {
    if (spec.lines.empty()) {
        throw std::out_of_range("harmonic_at: empty spectrum");
    }
    const double max_order = spec.lines.back().order;
    if (order < -0.25 || order > max_order + 0.25) {
        throw std::out_of_range("harmonic_at: order outside spectrum range");
    }
    const double order_step = spec.lines.size() > 1 ? spec.lines[1].order : 1.0;
    const auto idx = [&](double o) {
        return static_cast<long>(std::lround(o / order_step));
    };
    const long lo = std::max(0L, idx(order - 0.25));
    const long hi = std::min(static_cast<long>(spec.lines.size()) - 1, idx(order + 0.25));
    long peak = lo;
    for (long k = lo; k <= hi; ++k) {
        if (spec.lines[k].magnitude > spec.lines[peak].magnitude) peak = k;
    }
    if (peak == 0 || peak == static_cast<long>(spec.lines.size()) - 1) {
        return spec.lines[peak].magnitude;
    }
    const double ym = spec.lines[peak - 1].magnitude;
    const double y0 = spec.lines[peak].magnitude;
    const double yp = spec.lines[peak + 1].magnitude;
    const double denom = ym - 2.0 * y0 + yp;
    if (std::abs(denom) < 1e-300) {
        return y0;
    }
    const double shift = 0.5 * (ym - yp) / denom;
    if (std::abs(shift) > 1.0) {
        return y0;  // neighbors do not describe a parabola around this peak
    }
    return y0 - 0.25 * (ym - yp) * shift;
}

}  // namespace dqsim
