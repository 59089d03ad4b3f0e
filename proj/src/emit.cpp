#include "dqsim/emit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dqsim/errors.hpp"

namespace dqsim {

namespace {

std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open for writing: " + path.string());
    }
    return out;
}

void finish_out(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

void write_timeseries_csv(const RunResult& r, const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    out << "t,theta_m,theta_e,theta_e_hat,ia,ib,ic,ia_m,ib_m,ic_m,id,iq,id_est,iq_est,vd,vq,"
           "torque\n";
    for (std::size_t k = 0; k < r.t.size(); ++k) {
        out << fmt17(r.t[k]) << ',' << fmt17(r.theta_m[k]) << ',' << fmt17(r.theta_e[k]) << ','
            << fmt17(r.theta_e_hat[k]) << ',' << fmt17(r.ia[k]) << ',' << fmt17(r.ib[k]) << ','
            << fmt17(r.ic[k]) << ',' << fmt17(r.ia_m[k]) << ',' << fmt17(r.ib_m[k]) << ','
            << fmt17(r.ic_m[k]) << ',' << fmt17(r.id[k]) << ',' << fmt17(r.iq[k]) << ','
            << fmt17(r.id_est[k]) << ',' << fmt17(r.iq_est[k]) << ',' << fmt17(r.vd[k]) << ','
            << fmt17(r.vq[k]) << ',' << fmt17(r.torque_nm[k]) << '\n';
    }
    finish_out(out, path);
}

void write_spectrum_csv(const Spectrum& spec, const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    out << "order,freq_hz,magnitude\n";
    for (const auto& line : spec.lines) {
        out << fmt17(line.order) << ',' << fmt17(line.freq_hz) << ',' << fmt17(line.magnitude)
            << '\n';
    }
    finish_out(out, path);
}

void write_predicted_json(const std::vector<PredictedLine>& lines,
                          const std::filesystem::path& path) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& line : lines) {
        arr.push_back({{"order", line.order},
                       {"amplitude_ampere", line.amplitude_ampere},
                       {"channel", std::string(1, line.channel)}});
    }
    std::ofstream out = open_out(path);
    out << arr.dump(2) << '\n';
    finish_out(out, path);
}

// Minimal static SVG: waveform panel on the left, order-domain stem plot on
// the right, mirroring how the estimated currents are usually presented.
void write_channel_svg(const RunResult& r, const std::vector<double>& samples,
                       const Spectrum& spec, const std::string& channel,
                       const std::filesystem::path& path) {
    const int width = 960, height = 360;
    const int panel_w = 420, panel_h = 260, top = 50;
    const int left_x = 50, right_x = 520;

    const std::size_t n0 = r.analysis_start;
    const std::size_t len = std::min<std::size_t>(r.analysis_length, 4000);
    double lo = samples[n0], hi = samples[n0];
    const std::size_t stride = std::max<std::size_t>(1, r.analysis_length / len);
    for (std::size_t k = n0; k < n0 + r.analysis_length; k += stride) {
        lo = std::min(lo, samples[k]);
        hi = std::max(hi, samples[k]);
    }
    if (hi - lo < 1e-12) {
        hi += 0.5;
        lo -= 0.5;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
        << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n"
        << "<text x=\"" << left_x << "\" y=\"28\" font-family=\"sans-serif\" font-size=\"15\">"
        << channel << " waveform (steady window)</text>\n"
        << "<text x=\"" << right_x << "\" y=\"28\" font-family=\"sans-serif\" font-size=\"15\">"
        << channel << " order spectrum</text>\n";

    // Waveform polyline.
    svg << "<rect x=\"" << left_x << "\" y=\"" << top << "\" width=\"" << panel_w
        << "\" height=\"" << panel_h << "\" fill=\"none\" stroke=\"#444\"/>\n<polyline fill=\"none\" "
           "stroke=\"#0b61a4\" stroke-width=\"1\" points=\"";
    const double t0 = r.t[n0];
    const double t_span = r.t[n0 + r.analysis_length - 1] - t0;
    for (std::size_t k = n0; k < n0 + r.analysis_length; k += stride) {
        const double x = left_x + panel_w * (r.t[k] - t0) / t_span;
        const double y = top + panel_h * (1.0 - (samples[k] - lo) / (hi - lo));
        svg << std::round(x * 10.0) / 10.0 << ',' << std::round(y * 10.0) / 10.0 << ' ';
    }
    svg << "\"/>\n";
    svg << "<text x=\"" << left_x << "\" y=\"" << top + panel_h + 24
        << "\" font-family=\"sans-serif\" font-size=\"12\">t: " << t0 << " .. " << t0 + t_span
        << " s, range " << lo << " .. " << hi << " A</text>\n";

    // Spectrum stems up to a readable order span.
    const double max_order = std::min(spec.lines.back().order, 14.0);
    double peak = 1e-12;
    for (const auto& line : spec.lines) {
        if (line.order <= max_order) peak = std::max(peak, line.magnitude);
    }
    svg << "<rect x=\"" << right_x << "\" y=\"" << top << "\" width=\"" << panel_w
        << "\" height=\"" << panel_h << "\" fill=\"none\" stroke=\"#444\"/>\n";
    for (const auto& line : spec.lines) {
        if (line.order > max_order) break;
        const double x = right_x + panel_w * line.order / max_order;
        const double y = top + panel_h * (1.0 - line.magnitude / peak);
        svg << "<line x1=\"" << std::round(x * 10.0) / 10.0 << "\" y1=\"" << top + panel_h
            << "\" x2=\"" << std::round(x * 10.0) / 10.0 << "\" y2=\""
            << std::round(y * 10.0) / 10.0 << "\" stroke=\"#a40b0b\" stroke-width=\"1\"/>\n";
    }
    for (int o = 0; o <= static_cast<int>(max_order); o += 2) {
        const double x = right_x + panel_w * o / max_order;
        svg << "<text x=\"" << std::round(x * 10.0) / 10.0 << "\" y=\"" << top + panel_h + 16
            << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" << o
            << "</text>\n";
    }
    svg << "<text x=\"" << right_x << "\" y=\"" << top + panel_h + 36
        << "\" font-family=\"sans-serif\" font-size=\"12\">mechanical order; peak " << peak
        << " A</text>\n</svg>\n";

    std::ofstream out = open_out(path);
    out << svg.str();
    finish_out(out, path);
}

}  // namespace

EmitFormats parse_formats(const std::string& list) {
    EmitFormats formats{false, false, false};
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item == "csv") {
            formats.csv = true;
        } else if (item == "json") {
            formats.json = true;
        } else if (item == "svg") {
            formats.svg = true;
        } else if (!item.empty()) {
            throw ConfigError("unknown output format '" + item + "' (expected csv, json, svg)");
        }
    }
    if (!formats.csv && !formats.json && !formats.svg) {
        throw ConfigError("no output format selected");
    }
    return formats;
}

std::vector<std::filesystem::path> emit(const RunResult& result,
                                        const std::filesystem::path& out_dir,
                                        const EmitFormats& formats) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        throw IoError("cannot create output directory " + out_dir.string() + ": " +
                      ec.message());
    }

    std::vector<std::filesystem::path> written;
    if (formats.csv) {
        const auto ts_path = out_dir / "timeseries.csv";
        write_timeseries_csv(result, ts_path);
        written.push_back(ts_path);
        for (const auto& [channel, spec] : result.spectra) {
            const auto path = out_dir / ("spectrum_" + channel + ".csv");
            write_spectrum_csv(spec, path);
            written.push_back(path);
        }
    }
    if (formats.json) {
        const auto path = out_dir / "predicted_orders.json";
        write_predicted_json(result.predicted, path);
        written.push_back(path);
    }
    if (formats.svg) {
        const auto& id_spec = result.spectra.at("id_est");
        const auto& iq_spec = result.spectra.at("iq_est");
        const auto id_path = out_dir / "plot_id_est.svg";
        const auto iq_path = out_dir / "plot_iq_est.svg";
        write_channel_svg(result, result.id_est, id_spec, "id_est", id_path);
        write_channel_svg(result, result.iq_est, iq_spec, "iq_est", iq_path);
        written.push_back(id_path);
        written.push_back(iq_path);
    }
    return written;
}

}  // namespace dqsim
