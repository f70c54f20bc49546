#ifndef BOSEGAS_SVG_HPP
#define BOSEGAS_SVG_HPP

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "bosegas/csv.hpp"
#include "bosegas/errors.hpp"

namespace bosegas::cli {

struct PlotSpec {
    std::string x_column;
    std::string y_column;
    std::string series_column;
    std::string title;
    bool log_x = false;
    bool log_y = false;
    int width = 880;
    int height = 560;
};

// Presentation defaults per CSV kind.
inline PlotSpec default_plot_spec(const std::string& kind) {
    PlotSpec s;
    if (kind == "locality") {
        s = {"LBC", "one_minus_F", "T", "fidelity error vs boundary size", false, true};
    } else if (kind == "profile") {
        s = {"T", "F", "LBC", "fidelity vs temperature", false, true};
    } else if (kind == "phase") {
        s = {"T", "condensate_fraction", "L", "condensate fraction vs temperature", false, false};
    } else if (kind == "correlations") {
        s = {"dist", "corr", "T", "density-density correlations vs distance", false, true};
    } else if (kind == "subsystems") {
        s = {"T", "purity", "shape", "subsystem purity vs temperature", false, false};
    } else {
        throw ConfigError("no default plot for CSV kind '" + kind + "'");
    }
    return s;
}

namespace detail_svg {

struct Series {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

inline int column_index(const CsvTable& table, const std::string& name) {
    for (std::size_t i = 0; i < table.header.size(); ++i)
        if (table.header[i] == name) return static_cast<int>(i);
    throw ConfigError("plot: column '" + name + "' not in CSV header");
}

inline const char* palette(std::size_t i) {
    static const char* colors[] = {"#2166ac", "#b2182b", "#1b7837", "#762a83", "#e08214",
                                   "#35978f", "#c51b7d", "#666666", "#8c510a", "#4393c3"};
    return colors[i % (sizeof(colors) / sizeof(colors[0]))];
}

// Tick positions: 1-2-5 ladder on linear axes, decades on log axes.
inline std::vector<double> ticks(double lo, double hi, bool log_scale) {
    std::vector<double> out;
    if (!(hi > lo)) return {lo};
    if (log_scale) {
        const int e0 = static_cast<int>(std::ceil(lo - 1e-9));
        const int e1 = static_cast<int>(std::floor(hi + 1e-9));
        int step = std::max(1, (e1 - e0) / 8);
        for (int e = e0; e <= e1; e += step) out.push_back(e);
        if (out.empty()) out = {lo, hi};
        return out;
    }
    const double span = hi - lo;
    const double raw = span / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (mag * m >= raw) {
            step = mag * m;
            break;
        }
    const double first = std::ceil(lo / step) * step;
    for (double v = first; v <= hi + 1e-9 * span; v += step) out.push_back(v);
    return out;
}

inline std::string tick_label(double v, bool log_scale) {
    char buf[32];
    if (log_scale) {
        std::snprintf(buf, sizeof buf, "1e%d", static_cast<int>(std::lround(v)));
    } else {
        std::snprintf(buf, sizeof buf, "%g", std::abs(v) < 1e-12 ? 0.0 : v);
    }
    return buf;
}

} // namespace detail_svg

// Static SVG line plot: one polyline per value of the series column. Points
// that cannot be shown on a log axis (<= 0) or parse as NaN are skipped.
inline std::string render_plot_svg(const CsvTable& table, const PlotSpec& spec) {
    using namespace detail_svg;
    std::vector<Series> series;
    if (!table.rows.empty()) {
        const int xi = column_index(table, spec.x_column);
        const int yi = column_index(table, spec.y_column);
        const int si = spec.series_column.empty() ? -1 : column_index(table, spec.series_column);
        std::map<std::string, std::size_t> by_label;
        for (const auto& row : table.rows) {
            const double x = std::strtod(row[xi].c_str(), nullptr);
            const double y = std::strtod(row[yi].c_str(), nullptr);
            if (std::isnan(x) || std::isnan(y)) continue;
            if (spec.log_x && !(x > 0.0)) continue;
            if (spec.log_y && !(y > 0.0)) continue;
            const std::string label = si < 0 ? "data" : row[si];
            auto [it, inserted] = by_label.emplace(label, series.size());
            if (inserted) series.push_back({spec.series_column + " = " + label, {}});
            series[it->second].points.emplace_back(spec.log_x ? std::log10(x) : x,
                                                   spec.log_y ? std::log10(y) : y);
        }
    }

    double x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
    bool first = true;
    for (const auto& s : series)
        for (const auto& [x, y] : s.points) {
            if (first) {
                x_lo = x_hi = x;
                y_lo = y_hi = y;
                first = false;
            }
            x_lo = std::min(x_lo, x);
            x_hi = std::max(x_hi, x);
            y_lo = std::min(y_lo, y);
            y_hi = std::max(y_hi, y);
        }
    if (x_hi - x_lo < 1e-12) x_hi = x_lo + 1.0;
    if (y_hi - y_lo < 1e-12) y_hi = y_lo + 1.0;
    const double x_pad = 0.03 * (x_hi - x_lo), y_pad = 0.05 * (y_hi - y_lo);
    x_lo -= x_pad;
    x_hi += x_pad;
    y_lo -= y_pad;
    y_hi += y_pad;

    const double ml = 76, mr = 160, mt = 44, mb = 52;
    const double pw = spec.width - ml - mr, ph = spec.height - mt - mb;
    auto sx = [&](double x) { return ml + (x - x_lo) / (x_hi - x_lo) * pw; };
    auto sy = [&](double y) { return mt + ph - (y - y_lo) / (y_hi - y_lo) * ph; };

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\""
        << spec.height << "\" viewBox=\"0 0 " << spec.width << " " << spec.height << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << ml << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\">"
        << spec.title << "</text>\n"
        << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
        << "\" fill=\"none\" stroke=\"black\"/>\n";

    for (double t : ticks(x_lo + x_pad, x_hi - x_pad, spec.log_x)) {
        const double px = sx(t);
        svg << "<line x1=\"" << px << "\" y1=\"" << mt + ph << "\" x2=\"" << px << "\" y2=\""
            << mt + ph + 5 << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << px << "\" y=\"" << mt + ph + 20
            << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">"
            << tick_label(t, spec.log_x) << "</text>\n";
    }
    for (double t : ticks(y_lo + y_pad, y_hi - y_pad, spec.log_y)) {
        const double py = sy(t);
        svg << "<line x1=\"" << ml - 5 << "\" y1=\"" << py << "\" x2=\"" << ml << "\" y2=\"" << py
            << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << ml - 8 << "\" y=\"" << py + 4
            << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">"
            << tick_label(t, spec.log_y) << "</text>\n";
    }
    svg << "<text x=\"" << ml + pw / 2 << "\" y=\"" << spec.height - 12
        << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">"
        << spec.x_column << (spec.log_x ? " (log)" : "") << "</text>\n"
        << "<text x=\"18\" y=\"" << mt + ph / 2
        << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" "
        << "transform=\"rotate(-90 18 " << mt + ph / 2 << ")\">" << spec.y_column
        << (spec.log_y ? " (log)" : "") << "</text>\n";

    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& s = series[i];
        if (s.points.empty()) continue;
        svg << "<polyline fill=\"none\" stroke=\"" << palette(i)
            << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& [x, y] : s.points) svg << sx(x) << "," << sy(y) << " ";
        svg << "\"/>\n";
        for (const auto& [x, y] : s.points)
            svg << "<circle cx=\"" << sx(x) << "\" cy=\"" << sy(y) << "\" r=\"2\" fill=\""
                << palette(i) << "\"/>\n";
        const double ly = mt + 16 + 18 * static_cast<double>(i);
        svg << "<line x1=\"" << ml + pw + 10 << "\" y1=\"" << ly - 4 << "\" x2=\"" << ml + pw + 30
            << "\" y2=\"" << ly - 4 << "\" stroke=\"" << palette(i) << "\" stroke-width=\"2\"/>\n"
            << "<text x=\"" << ml + pw + 34 << "\" y=\"" << ly
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.label << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

inline void render_plot(const std::string& csv_path, PlotSpec spec, const std::string& out_path) {
    const CsvTable table = read_csv(csv_path);
    if (spec.x_column.empty()) {
        PlotSpec def = default_plot_spec(table.kind);
        def.log_x = spec.log_x || def.log_x;
        def.log_y = spec.log_y || def.log_y;
        if (!spec.title.empty()) def.title = spec.title;
        spec = def;
    }
    const std::string svg = render_plot_svg(table, spec);
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + out_path + "' for writing");
    out << svg;
    if (!out) throw IoError("write failed for '" + out_path + "'");
}

} // namespace bosegas::cli

#endif
