#ifndef BOSEGAS_CONFIG_HPP
#define BOSEGAS_CONFIG_HPP

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bosegas/errors.hpp"
#include "bosegas/experiments.hpp"

namespace bosegas::cli {

enum class ExperimentKind { locality, profile, phase, correlations, subsystems };

inline const char* to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::locality: return "locality";
        case ExperimentKind::profile: return "profile";
        case ExperimentKind::phase: return "phase";
        case ExperimentKind::correlations: return "correlations";
        case ExperimentKind::subsystems: return "subsystems";
    }
    return "?";
}

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::locality;
    experiments::LocalityConfig locality;
    experiments::ProfileConfig profile;
    experiments::PhaseConfig phase;
    experiments::CorrelationConfig correlations;
    experiments::SubsystemsConfig subsystems;
};

namespace detail {

struct Entry {
    std::string value;
    int line = 0;
};

using Section = std::map<std::string, Entry>;
using RawConfig = std::map<std::string, Section>;

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    std::size_t b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
}

inline RawConfig parse_raw(const std::string& text) {
    RawConfig raw;
    std::string section;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
            section = trim(t.substr(1, t.size() - 2));
            if (section.empty())
                throw ConfigError("line " + std::to_string(lineno) + ": empty section name");
            raw[section];
            continue;
        }
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value, got '" +
                              t + "'");
        const std::string key = trim(t.substr(0, eq));
        if (key.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        if (section.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": key '" + key +
                              "' outside any [section]");
        raw[section][key] = Entry{trim(t.substr(eq + 1)), lineno};
    }
    return raw;
}

inline double parse_double(const std::string& text, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': cannot parse number '" + text + "'");
    }
}

inline int parse_int(const std::string& text, const std::string& key) {
    const double v = parse_double(text, key);
    const int i = static_cast<int>(std::llround(v));
    if (std::abs(v - i) > 1e-9)
        throw ConfigError("key '" + key + "': expected integer, got '" + text + "'");
    return i;
}

inline bool parse_bool(const std::string& text, const std::string& key) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw ConfigError("key '" + key + "': expected boolean, got '" + text + "'");
}

inline std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : text) {
        if (c == sep) {
            parts.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(trim(cur));
    return parts;
}

// Scalars and lo:hi:step ranges, comma separated.
inline std::vector<double> parse_grid(const std::string& text, const std::string& key) {
    std::vector<double> out;
    for (const std::string& part : split(text, ',')) {
        if (part.empty())
            throw ConfigError("key '" + key + "': empty list element");
        const std::vector<std::string> r = split(part, ':');
        if (r.size() == 1) {
            out.push_back(parse_double(r[0], key));
        } else if (r.size() == 3) {
            const double lo = parse_double(r[0], key);
            const double hi = parse_double(r[1], key);
            const double step = parse_double(r[2], key);
            if (!(step > 0.0) || hi < lo)
                throw ConfigError("key '" + key + "': bad range '" + part + "'");
            const int n = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
            for (int i = 0; i <= n; ++i) out.push_back(lo + i * step);
        } else {
            throw ConfigError("key '" + key + "': bad element '" + part +
                              "' (want value or lo:hi:step)");
        }
    }
    return out;
}

inline std::vector<int> parse_int_grid(const std::string& text, const std::string& key) {
    std::vector<int> out;
    for (double v : parse_grid(text, key)) {
        const int i = static_cast<int>(std::llround(v));
        if (std::abs(v - i) > 1e-9)
            throw ConfigError("key '" + key + "': expected integers, got " + std::to_string(v));
        out.push_back(i);
    }
    return out;
}

inline std::string format_double_cfg(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <class T, class Fmt>
std::string join(const std::vector<T>& values, Fmt&& fmt) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ", ";
        out += fmt(values[i]);
    }
    return out;
}

class SectionReader {
public:
    SectionReader(const Section* section, std::string name) : section_(section), name_(std::move(name)) {}

    bool has(const std::string& key) const {
        return section_ && section_->count(key) > 0;
    }

    std::string get(const std::string& key) {
        return section_->at(key).value;
    }

    void take_int(const std::string& key, int& out) {
        known_.insert(key);
        if (has(key)) out = parse_int(get(key), key);
    }
    void take_double(const std::string& key, double& out) {
        known_.insert(key);
        if (has(key)) out = parse_double(get(key), key);
    }
    void take_bool(const std::string& key, bool& out) {
        known_.insert(key);
        if (has(key)) out = parse_bool(get(key), key);
    }
    void take_grid(const std::string& key, std::vector<double>& out) {
        known_.insert(key);
        if (has(key)) out = parse_grid(get(key), key);
    }
    void take_int_grid(const std::string& key, std::vector<int>& out) {
        known_.insert(key);
        if (has(key)) out = parse_int_grid(get(key), key);
    }
    void take_shape(const std::string& key, experiments::SubsystemShape& out) {
        known_.insert(key);
        if (has(key)) out = experiments::SubsystemShape::parse(get(key));
    }
    void take_shapes(const std::string& key, std::vector<experiments::SubsystemShape>& out) {
        known_.insert(key);
        if (!has(key)) return;
        out.clear();
        for (const std::string& part : split(get(key), ','))
            out.push_back(experiments::SubsystemShape::parse(part));
    }
    void take_window(const std::string& key, double& lo, double& hi) {
        known_.insert(key);
        if (!has(key)) return;
        const std::vector<double> v = parse_grid(get(key), key);
        if (v.size() != 2)
            throw ConfigError("key '" + key + "': expected 'lo, hi'");
        lo = v[0];
        hi = v[1];
    }

    void reject_unknown() const {
        if (!section_) return;
        for (const auto& [key, entry] : *section_)
            if (!known_.count(key))
                throw ConfigError("unknown key '" + key + "' in section [" + name_ + "] (line " +
                                  std::to_string(entry.line) + ")");
    }

private:
    const Section* section_;
    std::string name_;
    std::set<std::string> known_;
};

} // namespace detail

inline ExperimentKind parse_kind(const std::string& name) {
    for (ExperimentKind k :
         {ExperimentKind::locality, ExperimentKind::profile, ExperimentKind::phase,
          ExperimentKind::correlations, ExperimentKind::subsystems})
        if (name == to_string(k)) return k;
    throw ConfigError("unknown experiment kind '" + name + "'");
}

// Built-in grids from the reproduction recipes; overridable per key.
inline void apply_defaults(ExperimentConfig& cfg) {
    auto grid = [](double lo, double hi, double step) {
        std::vector<double> v;
        const int n = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
        for (int i = 0; i <= n; ++i) v.push_back(lo + i * step);
        return v;
    };
    cfg.profile.temperatures = grid(0.3, 8.0, 0.1);
    cfg.profile.refine_temperatures = grid(5.0, 7.0, 0.02);
    cfg.phase.temperatures = grid(4.8, 6.2, 0.01);
    cfg.correlations.powerlaw_temperatures = grid(1.0, 4.0, 0.5);
    cfg.correlations.exponential_temperatures = grid(5.8, 7.0, 0.2);
    cfg.subsystems.temperatures = grid(0.5, 8.0, 0.25);
}

// Parse from text, apply overrides ("key=value", targeting the active
// section), validate. Unknown keys/sections are rejected by name.
inline ExperimentConfig parse_config_text(const std::string& text, ExperimentKind kind,
                                          const std::vector<std::string>& overrides = {}) {
    detail::RawConfig raw = detail::parse_raw(text);

    static const std::set<std::string> known_sections{"locality", "profile", "phase",
                                                      "correlations", "subsystems"};
    for (const auto& [section, entries] : raw)
        if (!known_sections.count(section))
            throw ConfigError("unknown section [" + section + "]");

    const std::string active = to_string(kind);
    for (const std::string& ov : overrides) {
        const std::size_t eq = ov.find('=');
        if (eq == std::string::npos)
            throw ConfigError("override '" + ov + "' is not key=value");
        const std::string key = detail::trim(ov.substr(0, eq));
        if (key.empty()) throw ConfigError("override '" + ov + "' has empty key");
        raw[active][key] = detail::Entry{detail::trim(ov.substr(eq + 1)), 0};
    }

    ExperimentConfig cfg;
    cfg.kind = kind;
    apply_defaults(cfg);

    const detail::Section* section = nullptr;
    if (auto it = raw.find(active); it != raw.end()) section = &it->second;
    detail::SectionReader r(section, active);

    switch (kind) {
        case ExperimentKind::locality: {
            auto& c = cfg.locality;
            r.take_int("L0", c.l0);
            r.take_int("LC", c.lc);
            r.take_shape("shape", c.shape);
            r.take_grid("T", c.temperatures);
            r.take_int_grid("LBC", c.boundary_sizes);
            r.take_bool("reuse_mu", c.reuse_mu);
            r.take_double("n", c.n_target);
            r.take_int("threads", c.threads);
            r.reject_unknown();
            c.validate();
            break;
        }
        case ExperimentKind::profile: {
            auto& c = cfg.profile;
            r.take_int("L0", c.l0);
            r.take_int("LC", c.lc);
            r.take_shape("shape", c.shape);
            r.take_int_grid("LBC", c.boundary_sizes);
            r.take_grid("T", c.temperatures);
            r.take_grid("T_refine", c.refine_temperatures);
            r.take_window("gamma_window", c.gamma_window.lo, c.gamma_window.hi);
            r.take_double("n", c.n_target);
            r.take_int("threads", c.threads);
            r.reject_unknown();
            c.validate();
            break;
        }
        case ExperimentKind::phase: {
            auto& c = cfg.phase;
            r.take_int_grid("L", c.sizes);
            r.take_grid("T", c.temperatures);
            r.take_window("window", c.window_lo, c.window_hi);
            r.take_double("n", c.n_target);
            r.take_int("threads", c.threads);
            r.reject_unknown();
            c.validate();
            break;
        }
        case ExperimentKind::correlations: {
            auto& c = cfg.correlations;
            r.take_int_grid("L0_powerlaw", c.powerlaw_sizes);
            r.take_grid("T_powerlaw", c.powerlaw_temperatures);
            r.take_int_grid("L0_exponential", c.exponential_sizes);
            r.take_grid("T_exponential", c.exponential_temperatures);
            r.take_double("unreliable_below", c.unreliable_below);
            r.take_double("n", c.n_target);
            r.take_int("threads", c.threads);
            r.reject_unknown();
            c.validate();
            break;
        }
        case ExperimentKind::subsystems: {
            auto& c = cfg.subsystems;
            r.take_int("L0", c.l0);
            r.take_int("LBC", c.lbc);
            r.take_shapes("shapes", c.shapes);
            r.take_grid("T", c.temperatures);
            r.take_double("n", c.n_target);
            r.take_int("threads", c.threads);
            r.reject_unknown();
            c.validate();
            break;
        }
    }
    return cfg;
}

inline ExperimentConfig parse_config(const std::string& path, ExperimentKind kind,
                                     const std::vector<std::string>& overrides = {}) {
    std::string text;
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open config file '" + path + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        text = buf.str();
    }
    return parse_config_text(text, kind, overrides);
}

// The effective configuration, explicit about every key; parsing it back
// reproduces the same configuration.
inline std::string serialize_config(const ExperimentConfig& cfg) {
    using detail::format_double_cfg;
    using detail::join;
    std::ostringstream out;
    out << "[" << to_string(cfg.kind) << "]\n";
    auto fmt_d = [](double v) { return format_double_cfg(v); };
    auto fmt_i = [](int v) { return std::to_string(v); };
    switch (cfg.kind) {
        case ExperimentKind::locality: {
            const auto& c = cfg.locality;
            out << "L0 = " << c.l0 << "\n"
                << "LC = " << c.lc << "\n"
                << "shape = " << c.shape.name() << "\n"
                << "T = " << join(c.temperatures, fmt_d) << "\n"
                << "LBC = " << join(c.boundary_sizes, fmt_i) << "\n"
                << "reuse_mu = " << (c.reuse_mu ? "true" : "false") << "\n"
                << "n = " << format_double_cfg(c.n_target) << "\n"
                << "threads = " << c.threads << "\n";
            break;
        }
        case ExperimentKind::profile: {
            const auto& c = cfg.profile;
            out << "L0 = " << c.l0 << "\n"
                << "LC = " << c.lc << "\n"
                << "shape = " << c.shape.name() << "\n"
                << "LBC = " << join(c.boundary_sizes, fmt_i) << "\n"
                << "T = " << join(c.temperatures, fmt_d) << "\n"
                << "T_refine = " << join(c.refine_temperatures, fmt_d) << "\n"
                << "gamma_window = " << format_double_cfg(c.gamma_window.lo) << ", "
                << format_double_cfg(c.gamma_window.hi) << "\n"
                << "n = " << format_double_cfg(c.n_target) << "\n"
                << "threads = " << c.threads << "\n";
            break;
        }
        case ExperimentKind::phase: {
            const auto& c = cfg.phase;
            out << "L = " << join(c.sizes, fmt_i) << "\n"
                << "T = " << join(c.temperatures, fmt_d) << "\n"
                << "window = " << format_double_cfg(c.window_lo) << ", "
                << format_double_cfg(c.window_hi) << "\n"
                << "n = " << format_double_cfg(c.n_target) << "\n"
                << "threads = " << c.threads << "\n";
            break;
        }
        case ExperimentKind::correlations: {
            const auto& c = cfg.correlations;
            out << "L0_powerlaw = " << join(c.powerlaw_sizes, fmt_i) << "\n"
                << "T_powerlaw = " << join(c.powerlaw_temperatures, fmt_d) << "\n"
                << "L0_exponential = " << join(c.exponential_sizes, fmt_i) << "\n"
                << "T_exponential = " << join(c.exponential_temperatures, fmt_d) << "\n"
                << "unreliable_below = " << format_double_cfg(c.unreliable_below) << "\n"
                << "n = " << format_double_cfg(c.n_target) << "\n"
                << "threads = " << c.threads << "\n";
            break;
        }
        case ExperimentKind::subsystems: {
            const auto& c = cfg.subsystems;
            std::string shapes;
            for (std::size_t i = 0; i < c.shapes.size(); ++i) {
                if (i) shapes += ", ";
                shapes += c.shapes[i].name();
            }
            out << "L0 = " << c.l0 << "\n"
                << "LBC = " << c.lbc << "\n"
                << "shapes = " << shapes << "\n"
                << "T = " << join(c.temperatures, fmt_d) << "\n"
                << "n = " << format_double_cfg(c.n_target) << "\n"
                << "threads = " << c.threads << "\n";
            break;
        }
    }
    return out.str();
}

} // namespace bosegas::cli

#endif
