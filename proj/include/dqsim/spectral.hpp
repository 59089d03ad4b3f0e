#pragma once

#include <string>
#include <vector>

// Order-domain amplitude spectra of simulated time series: Hann-windowed FFT
// with the frequency axis normalized to the shaft rotation frequency, so a
// component at k cycles per revolution sits at order k regardless of speed.
// Single-sided amplitude convention: a pure sinusoid of amplitude A reports
// magnitude A at its order, and a DC level c reports c at order 0.

namespace dqsim {

struct TimeSeries {
    double dt = 0.0;  // seconds per sample
    std::string name;
    std::vector<double> samples;
};

struct SpectralLine {
    double order = 0.0;
    double freq_hz = 0.0;
    double magnitude = 0.0;
};

struct Spectrum {
    std::vector<SpectralLine> lines;  // ascending order, spacing 1/revolutions
};

// Amplitude spectrum referenced to the mechanical speed omega_m (rad/s, > 0).
// The record must span at least 10 shaft revolutions; the leakage and
// amplitude guarantees additionally assume the caller sampled fast enough
// for the orders it cares about (20x is comfortable) and cut the record to
// a whole number of revolutions. Throws std::invalid_argument on a record
// that is too short, naming the minimum duration.
Spectrum spectrum(const TimeSeries& ts, double omega_m);

// Peak magnitude within +/- 0.25 order of the requested order, refined by
// parabolic interpolation over the three bins around the local peak. Throws
// std::out_of_range when the requested order is outside the spectrum.
double harmonic_at(const Spectrum& spec, double order);

}  // namespace dqsim
