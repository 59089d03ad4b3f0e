#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dqsim/runner.hpp"

// Result persistence. All floating-point values in CSV files are written
// with 17 significant digits so a reparse reproduces them bit for bit.

namespace dqsim {

struct EmitFormats {
    bool csv = true;
    bool json = true;
    bool svg = false;
};

// Parses a comma-separated subset of "csv,svg,json"; throws ConfigError on
// anything else.
EmitFormats parse_formats(const std::string& list);

// Writes into out_dir (created if missing):
//   timeseries.csv            one row per sample, fixed column set
//   spectrum_<channel>.csv    order,freq_hz,magnitude per line
//   predicted_orders.json     the analytic line table
//   plot_<channel>.svg        waveform left, order spectrum right
// Returns the paths written. Filesystem failures surface as IoError.
std::vector<std::filesystem::path> emit(const RunResult& result,
                                        const std::filesystem::path& out_dir,
                                        const EmitFormats& formats);

}  // namespace dqsim
