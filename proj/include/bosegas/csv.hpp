#ifndef BOSEGAS_CSV_HPP
#define BOSEGAS_CSV_HPP

#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "bosegas/errors.hpp"
#include "bosegas/experiments.hpp"

namespace bosegas::cli {

inline constexpr const char* kCsvSchemaVersion = "v1";

// 17 significant digits: round-trip exact for double, byte-stable across runs.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct CsvTable {
    std::string kind;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

inline std::string to_text(const CsvTable& table) {
    std::ostringstream out;
    out << "# bosegas-csv " << kCsvSchemaVersion << " kind=" << table.kind << "\n";
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (i) out << ',';
        out << table.header[i];
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << row[i];
        }
        out << '\n';
    }
    return out.str();
}

inline void write_csv(const std::string& path, const CsvTable& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << to_text(table);
    if (!out) throw IoError("write failed for '" + path + "'");
}

inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    CsvTable table;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.rfind("# bosegas-csv", 0) == 0) {
            const std::size_t pos = line.find("kind=");
            if (pos != std::string::npos) table.kind = line.substr(pos + 5);
            continue;
        }
        if (line.empty() || line.front() == '#') continue;
        std::vector<std::string> fields;
        std::string cur;
        for (char c : line) {
            if (c == ',') {
                fields.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        fields.push_back(cur);
        if (!have_header) {
            table.header = std::move(fields);
            have_header = true;
        } else {
            table.rows.push_back(std::move(fields));
        }
    }
    return table;
}

// ------------------------------------------------------------------ tables

inline CsvTable locality_table(const std::vector<experiments::LocalityRow>& rows,
                               const std::string& kind) {
    CsvTable t;
    t.kind = kind;
    t.header = {"kind", "T", "L0", "LBC", "mu_L0", "mu_LBC", "F", "one_minus_F"};
    for (const auto& r : rows)
        t.rows.push_back({r.kind, format_double(r.t), std::to_string(r.l0), std::to_string(r.lbc),
                          format_double(r.mu_l0), format_double(r.mu_lbc), format_double(r.f),
                          format_double(r.one_minus_f)});
    return t;
}

// One schema for every fitted curve an experiment emits. p1/p2/p3 are
// slope/intercept for linear fits, amplitude/exponent for exponential and
// power-law fits, amplitude/exponent/offset for the offset power law.
inline CsvTable fits_table(const std::vector<experiments::FitRow>& fits, const std::string& kind) {
    CsvTable t;
    t.kind = kind + "_fits";
    t.header = {"kind",   "fit",    "group1", "group2",    "model",     "p1",
                "p1_err", "p2",     "p2_err", "p3",        "p3_err",    "window_lo",
                "window_hi", "n_points", "rss",    "r_squared", "flag",      "method"};
    for (const auto& f : fits) {
        const auto& r = f.result;
        double p1, p1e, p2, p2e;
        const double nan = std::numeric_limits<double>::quiet_NaN();
        double p3 = nan, p3e = nan;
        if (r.model == fitting::FitModel::linear) {
            p1 = r.slope;
            p1e = r.slope_err;
            p2 = r.intercept;
            p2e = r.intercept_err;
        } else {
            p1 = r.amplitude;
            p1e = r.amplitude_err;
            p2 = r.exponent;
            p2e = r.exponent_err;
            if (r.model == fitting::FitModel::powerlaw_offset) {
                p3 = r.offset;
                p3e = r.offset_err;
            }
        }
        t.rows.push_back({f.kind, f.fit, format_double(f.group1), format_double(f.group2),
                          fitting::to_string(r.model), format_double(p1), format_double(p1e),
                          format_double(p2), format_double(p2e), format_double(p3),
                          format_double(p3e), format_double(r.window.lo),
                          format_double(r.window.hi), std::to_string(r.n_points),
                          format_double(r.rss), format_double(r.r_squared), f.flag, f.method});
    }
    return t;
}

inline CsvTable minima_table(const std::vector<experiments::MinimumRow>& rows) {
    CsvTable t;
    t.kind = "profile_minima";
    t.header = {"kind", "LBC", "minimum", "T", "F", "one_minus_F"};
    for (const auto& r : rows)
        t.rows.push_back({"profile", std::to_string(r.lbc), r.minimum, format_double(r.t),
                          format_double(r.f), format_double(r.one_minus_f)});
    return t;
}

inline CsvTable phase_table(const std::vector<experiments::PhaseRow>& rows) {
    CsvTable t;
    t.kind = "phase";
    t.header = {"kind", "T", "L", "mu", "condensate_fraction"};
    for (const auto& r : rows)
        t.rows.push_back({"phase", format_double(r.t), std::to_string(r.l), format_double(r.mu),
                          format_double(r.condensate_fraction)});
    return t;
}

inline CsvTable correlations_table(const std::vector<experiments::CorrRow>& rows) {
    CsvTable t;
    t.kind = "correlations";
    t.header = {"kind", "T", "L0", "dist", "corr", "corr_minus_inf", "corr_inf"};
    for (const auto& r : rows)
        t.rows.push_back({"correlations", format_double(r.t), std::to_string(r.l0),
                          std::to_string(r.dist), format_double(r.corr),
                          format_double(r.corr_minus_inf), format_double(r.corr_inf)});
    return t;
}

inline CsvTable subsystems_table(const std::vector<experiments::SubsystemRow>& rows) {
    CsvTable t;
    t.kind = "subsystems";
    t.header = {"kind", "shape", "T", "L0", "LBC", "mu_L0", "mu_LBC", "F", "purity", "entropy"};
    for (const auto& r : rows)
        t.rows.push_back({"subsystems", r.shape, format_double(r.t), std::to_string(r.l0),
                          std::to_string(r.lbc), format_double(r.mu_l0), format_double(r.mu_lbc),
                          format_double(r.f), format_double(r.purity), format_double(r.entropy)});
    return t;
}

} // namespace bosegas::cli

#endif
