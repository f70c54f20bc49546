#ifndef BOSEGAS_EXPERIMENTS_HPP
#define BOSEGAS_EXPERIMENTS_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "bosegas/correlations.hpp"
#include "bosegas/covariance.hpp"
#include "bosegas/errors.hpp"
#include "bosegas/fitting.hpp"
#include "bosegas/gaussian.hpp"
#include "bosegas/parallel.hpp"
#include "bosegas/thermo.hpp"

namespace bosegas::experiments {

using model::LatticeSpec;
using model::Site;
using model::ThermalParams;

// Estimated critical temperature of the n = 1 gas; picks the default fit
// regime per temperature (power law at T <= T_c, exponential above).
inline constexpr double kCriticalTemperature = 5.6;

// Subsystem C: an nx x ny x nz block of sites anchored at the origin.
// Placement is irrelevant under periodic boundaries (covered by the
// translation-invariance tests), so the anchor is fixed.
struct SubsystemShape {
    int nx = 2, ny = 2, nz = 2;

    static SubsystemShape parse(const std::string& text) {
        SubsystemShape s;
        if (std::sscanf(text.c_str(), "%dx%dx%d", &s.nx, &s.ny, &s.nz) != 3 || s.nx < 1 ||
            s.ny < 1 || s.nz < 1)
            throw ConfigError("bad subsystem shape '" + text + "' (want e.g. 2x2x2)");
        return s;
    }

    std::string name() const {
        return std::to_string(nx) + "x" + std::to_string(ny) + "x" + std::to_string(nz);
    }

    int volume() const { return nx * ny * nz; }

    std::vector<Site> sites() const {
        std::vector<Site> out;
        out.reserve(volume());
        for (int x = 0; x < nx; ++x)
            for (int y = 0; y < ny; ++y)
                for (int z = 0; z < nz; ++z) out.push_back({x, y, z});
        return out;
    }
};

inline void check_even(const char* name, int value) {
    if (value < 2 || value % 2 != 0)
        throw ConfigError(std::string(name) + " must be even and >= 2, got " +
                          std::to_string(value));
}

// ------------------------------------------------------------------ configs

struct LocalityConfig {
    int l0 = 100;
    int lc = 2;
    SubsystemShape shape{2, 2, 2};
    std::vector<double> temperatures{0.6, 2.6, 4.6, 5.6, 6.0, 7.0};
    std::vector<int> boundary_sizes; // default 6,8,...,l0 filled by validate()
    bool reuse_mu = false;
    double n_target = 1.0;
    int threads = 0;

    void validate() {
        check_even("L0", l0);
        check_even("LC", lc);
        if (shape.nx > lc || shape.ny > lc || shape.nz > lc)
            throw ConfigError("subsystem shape " + shape.name() + " does not fit in LC = " +
                              std::to_string(lc));
        if (boundary_sizes.empty())
            for (int l = 6; l <= l0; l += 2) boundary_sizes.push_back(l);
        for (int l : boundary_sizes) {
            check_even("LBC", l);
            if (l < lc || l > l0)
                throw ConfigError("LBC = " + std::to_string(l) + " violates LC <= LBC <= L0");
        }
        if (temperatures.empty()) throw ConfigError("empty temperature grid");
        std::sort(boundary_sizes.begin(), boundary_sizes.end());
        std::sort(temperatures.begin(), temperatures.end());
    }
};

struct ProfileConfig {
    int l0 = 100;
    int lc = 2;
    SubsystemShape shape{2, 2, 2};
    std::vector<int> boundary_sizes{8, 12, 16, 20, 24};
    std::vector<double> temperatures;        // coarse grid
    std::vector<double> refine_temperatures; // overlay
    fitting::Window gamma_window{6.2, 7.0};
    double n_target = 1.0;
    int threads = 0;

    std::vector<double> merged_grid() const {
        std::vector<double> t = temperatures;
        t.insert(t.end(), refine_temperatures.begin(), refine_temperatures.end());
        std::sort(t.begin(), t.end());
        std::vector<double> out;
        for (double v : t)
            if (out.empty() || v - out.back() > 1e-9) out.push_back(v);
        return out;
    }

    void validate() {
        check_even("L0", l0);
        check_even("LC", lc);
        if (shape.nx > lc || shape.ny > lc || shape.nz > lc)
            throw ConfigError("subsystem shape " + shape.name() + " does not fit in LC");
        for (int l : boundary_sizes) {
            check_even("LBC", l);
            if (l < lc || l > l0)
                throw ConfigError("LBC = " + std::to_string(l) + " violates LC <= LBC <= L0");
        }
        if (merged_grid().size() < 2) throw ConfigError("profile temperature grid too small");
    }
};

struct PhaseConfig {
    std::vector<int> sizes{100, 200, 250, 300, 350};
    std::vector<double> temperatures; // default 4.8:6.2:0.01 filled by config layer
    double window_lo = 0.01;
    double window_hi = 0.05;
    double n_target = 1.0;
    int threads = 0;

    void validate() {
        if (sizes.size() < 2) throw ConfigError("phase scan needs >= 2 system sizes");
        for (int l : sizes) check_even("L", l);
        if (temperatures.size() < 2) throw ConfigError("phase temperature grid too small");
        if (!(window_lo > 0.0 && window_lo < window_hi))
            throw ConfigError("bad condensate-fraction window");
        std::sort(sizes.begin(), sizes.end());
        std::sort(temperatures.begin(), temperatures.end());
    }
};

struct CorrelationConfig {
    std::vector<int> powerlaw_sizes{300};
    std::vector<double> powerlaw_temperatures; // default 1:4:0.5
    std::vector<int> exponential_sizes{80, 100};
    std::vector<double> exponential_temperatures; // default 5.8:7:0.2
    double unreliable_below = 0.5; // exponents excluded at and below this T
    double n_target = 1.0;
    int threads = 0;

    void validate() {
        for (int l : powerlaw_sizes) check_even("L0", l);
        for (int l : exponential_sizes) check_even("L0", l);
        if (powerlaw_sizes.empty() && exponential_sizes.empty())
            throw ConfigError("correlation scan has no system sizes");
    }
};

struct SubsystemsConfig {
    int l0 = 16;
    int lbc = 8;
    std::vector<SubsystemShape> shapes{{2, 1, 1}, {2, 2, 1}, {2, 2, 2}};
    std::vector<double> temperatures; // default 0.5:8:0.25
    double n_target = 1.0;
    int threads = 0;

    void validate() {
        check_even("L0", l0);
        check_even("LBC", lbc);
        if (lbc > l0) throw ConfigError("LBC must be <= L0");
        for (const auto& s : shapes)
            if (s.nx > 2 || s.ny > 2 || s.nz > 2)
                throw ConfigError("subsystem shape " + s.name() + " not supported (max 2x2x2)");
        if (temperatures.empty()) throw ConfigError("empty temperature grid");
    }
};

// ------------------------------------------------------------------ rows

struct LocalityRow {
    std::string kind = "locality";
    double t = 0.0;
    int l0 = 0;
    int lbc = 0;
    double mu_l0 = 0.0;
    double mu_lbc = 0.0;
    double f = 0.0;
    double one_minus_f = 0.0;
};

struct FitRow {
    std::string kind;      // experiment kind
    std::string fit;       // which recipe produced it
    double group1 = std::numeric_limits<double>::quiet_NaN(); // T or L context
    double group2 = std::numeric_limits<double>::quiet_NaN(); // L0/LBC context
    fitting::FitResult result;
    std::string flag = "ok";
    std::string method; // extrapolation metadata
};

struct MinimumRow {
    int lbc = 0;
    std::string minimum; // "global" | "local"
    double t = 0.0;
    double f = 0.0;
    double one_minus_f = 0.0;
};

struct PhaseRow {
    double t = 0.0;
    int l = 0;
    double mu = 0.0;
    double condensate_fraction = 0.0;
};

struct CorrRow {
    double t = 0.0;
    int l0 = 0;
    int dist = 0;
    double corr = 0.0;
    double corr_minus_inf = 0.0;
    double corr_inf = 0.0;
};

struct SubsystemRow {
    std::string shape;
    double t = 0.0;
    int l0 = 0;
    int lbc = 0;
    double mu_l0 = 0.0;
    double mu_lbc = 0.0;
    double f = 0.0;
    double purity = 0.0;
    double entropy = 0.0;
};

struct ProfileResult {
    std::vector<LocalityRow> rows; // kind = "profile"
    std::vector<MinimumRow> minima;
    std::vector<FitRow> fits; // gamma_vs_T per LBC + gamma_law
};

struct PhaseResult {
    std::vector<PhaseRow> rows;
    std::vector<FitRow> fits; // tc_linear per L + tc_extrapolation
    std::vector<std::pair<int, fitting::ZeroCrossing>> tc_per_size;
    double tc_infinity = 0.0;
    double tc_infinity_err = 0.0;
};

struct CorrelationResult {
    std::vector<CorrRow> rows;
    std::vector<FitRow> fits; // corr_powerlaw / corr_exponential / eta_law
};

// ------------------------------------------------------------------ drivers

// Fidelity between the subsystem of the L0 system and the same-shape
// subsystem of a periodic reference system of side LBC, at equal temperature
// and (separately solved) equal density.
inline std::vector<LocalityRow> locality_sweep(LocalityConfig cfg) {
    cfg.validate();
    const std::vector<Site> sub_sites = cfg.shape.sites();
    std::vector<std::vector<LocalityRow>> per_t(cfg.temperatures.size());

    parallel_for(cfg.temperatures.size(), cfg.threads, [&](std::size_t ti) {
        const double t = cfg.temperatures[ti];
        const double beta = 1.0 / t;
        const LatticeSpec full = LatticeSpec::cubic(cfg.l0);
        const double mu0 = model::solve_mu(model::BoseKernel(full, beta), cfg.n_target);
        const model::DisplacementKernel k0(full, {beta, mu0});
        const auto state_c = model::covariance_from_kernel(k0, sub_sites);

        auto& rows = per_t[ti];
        for (int lbc : cfg.boundary_sizes) {
            LocalityRow row;
            row.t = t;
            row.l0 = cfg.l0;
            row.lbc = lbc;
            row.mu_l0 = mu0;
            long double ln_f;
            if (lbc == cfg.l0) {
                row.mu_lbc = mu0;
                ln_f = gaussian::log_fidelity(state_c, state_c);
            } else {
                const LatticeSpec ref = LatticeSpec::cubic(lbc);
                const double mu2 =
                    cfg.reuse_mu ? mu0 : model::solve_mu(model::BoseKernel(ref, beta), cfg.n_target);
                row.mu_lbc = mu2;
                const model::DisplacementKernel k2(ref, {beta, mu2});
                const auto state_cp = model::covariance_from_kernel(k2, sub_sites);
                ln_f = gaussian::log_fidelity(state_c, state_cp);
            }
            row.f = static_cast<double>(std::exp(ln_f));
            row.one_minus_f = static_cast<double>(-std::expm1(ln_f));
            rows.push_back(row);
        }
    });

    std::vector<LocalityRow> rows;
    for (auto& r : per_t) rows.insert(rows.end(), r.begin(), r.end());
    std::sort(rows.begin(), rows.end(), [](const LocalityRow& a, const LocalityRow& b) {
        return std::tie(a.t, a.l0, a.lbc) < std::tie(b.t, b.l0, b.lbc);
    });
    return rows;
}

enum class Regime { below, above };

// Boundary-size cutoff: smallest LBC whose fidelity error dips below 1e-14.
inline double locality_cut(const std::vector<const LocalityRow*>& rows) {
    for (const LocalityRow* r : rows)
        if (r->one_minus_f < 1e-14) return r->lbc;
    return std::numeric_limits<double>::infinity();
}

// Decay of 1 - F with LBC. Below/at the transition: power law over
// LBC in [6, L0/3]. Above: exponential over [max(Lmax - 2 L0/5, 6), Lmax],
// Lmax = min(2 L0/3, L_cut).
inline std::vector<FitRow> fit_locality(const std::vector<LocalityRow>& rows, Regime regime) {
    std::map<std::pair<double, int>, std::vector<const LocalityRow*>> groups;
    for (const auto& r : rows) groups[{r.t, r.l0}].push_back(&r);

    std::vector<FitRow> out;
    for (auto& [key, group] : groups) {
        const auto [t, l0] = key;
        std::sort(group.begin(), group.end(),
                  [](const LocalityRow* a, const LocalityRow* b) { return a->lbc < b->lbc; });
        FitRow fr;
        fr.kind = rows.front().kind;
        fr.group1 = t;
        fr.group2 = l0;
        std::vector<fitting::DataPoint> pts;
        if (regime == Regime::below) {
            fr.fit = "locality_below";
            const fitting::Window w{6.0, l0 / 3.0};
            for (const LocalityRow* r : group)
                if (w.contains(r->lbc) && r->one_minus_f > 0.0)
                    pts.push_back({double(r->lbc), r->one_minus_f});
            if (pts.size() < 2)
                throw NumericError("fit_locality: window [6, L0/3] has < 2 usable points at T = " +
                                   std::to_string(t));
            fr.result = fitting::powerlaw_fit(pts, w);
        } else {
            fr.fit = "locality_above";
            const double cut = locality_cut(group);
            const double l_max = std::min(2.0 * l0 / 3.0, cut);
            const double l_min = std::max(l_max - 2.0 * l0 / 5.0, 6.0);
            const fitting::Window w{l_min, l_max};
            for (const LocalityRow* r : group)
                if (w.contains(r->lbc) && r->one_minus_f > 0.0)
                    pts.push_back({double(r->lbc), r->one_minus_f});
            if (pts.size() < 2)
                throw NumericError("fit_locality: window empty after L_cut truncation at T = " +
                                   std::to_string(t));
            fr.result = fitting::exponential_fit(pts, w);
        }
        out.push_back(std::move(fr));
    }
    return out;
}

struct MinimaReport {
    int global_index = -1;
    std::vector<int> local_indices;
};

// Global argmin plus strict interior local minima of a sampled curve.
inline MinimaReport find_minima(const std::vector<double>& values) {
    MinimaReport rep;
    if (values.empty()) return rep;
    rep.global_index = 0;
    for (int i = 1; i < static_cast<int>(values.size()); ++i)
        if (values[i] < values[rep.global_index]) rep.global_index = i;
    for (int i = 1; i + 1 < static_cast<int>(values.size()); ++i)
        if (values[i] < values[i - 1] && values[i] < values[i + 1]) rep.local_indices.push_back(i);
    return rep;
}

inline ProfileResult temperature_profile(ProfileConfig cfg) {
    cfg.validate();
    const std::vector<double> grid = cfg.merged_grid();
    const std::vector<Site> sub_sites = cfg.shape.sites();
    std::vector<std::vector<LocalityRow>> per_t(grid.size());

    parallel_for(grid.size(), cfg.threads, [&](std::size_t ti) {
        const double t = grid[ti];
        const double beta = 1.0 / t;
        const LatticeSpec full = LatticeSpec::cubic(cfg.l0);
        const double mu0 = model::solve_mu(model::BoseKernel(full, beta), cfg.n_target);
        const model::DisplacementKernel k0(full, {beta, mu0});
        const auto state_c = model::covariance_from_kernel(k0, sub_sites);
        for (int lbc : cfg.boundary_sizes) {
            LocalityRow row;
            row.kind = "profile";
            row.t = t;
            row.l0 = cfg.l0;
            row.lbc = lbc;
            row.mu_l0 = mu0;
            long double ln_f;
            if (lbc == cfg.l0) {
                row.mu_lbc = mu0;
                ln_f = gaussian::log_fidelity(state_c, state_c);
            } else {
                const LatticeSpec ref = LatticeSpec::cubic(lbc);
                const double mu2 = model::solve_mu(model::BoseKernel(ref, beta), cfg.n_target);
                row.mu_lbc = mu2;
                const model::DisplacementKernel k2(ref, {beta, mu2});
                ln_f = gaussian::log_fidelity(state_c,
                                              model::covariance_from_kernel(k2, sub_sites));
            }
            row.f = static_cast<double>(std::exp(ln_f));
            row.one_minus_f = static_cast<double>(-std::expm1(ln_f));
            per_t[ti].push_back(row);
        }
    });

    ProfileResult res;
    for (auto& r : per_t) res.rows.insert(res.rows.end(), r.begin(), r.end());
    std::sort(res.rows.begin(), res.rows.end(), [](const LocalityRow& a, const LocalityRow& b) {
        return std::tie(a.t, a.l0, a.lbc) < std::tie(b.t, b.l0, b.lbc);
    });

    std::vector<fitting::DataPoint> gamma_points;
    for (int lbc : cfg.boundary_sizes) {
        std::vector<double> f_curve;
        std::vector<const LocalityRow*> curve;
        for (const auto& r : res.rows)
            if (r.lbc == lbc) {
                curve.push_back(&r);
                f_curve.push_back(r.f);
            }
        const MinimaReport rep = find_minima(f_curve);
        MinimumRow g{lbc, "global", curve[rep.global_index]->t, curve[rep.global_index]->f,
                     curve[rep.global_index]->one_minus_f};
        res.minima.push_back(g);
        for (int i : rep.local_indices)
            if (i != rep.global_index)
                res.minima.push_back({lbc, "local", curve[i]->t, curve[i]->f,
                                      curve[i]->one_minus_f});

        std::vector<fitting::DataPoint> pts;
        for (const auto* r : curve)
            if (cfg.gamma_window.contains(r->t) && r->one_minus_f > 0.0)
                pts.push_back({r->t, r->one_minus_f});
        if (pts.size() < 2) continue; // grid does not sample the gamma window
        FitRow fr;
        fr.kind = "profile";
        fr.fit = "gamma_vs_T";
        fr.group1 = lbc;
        fr.group2 = cfg.l0;
        fr.result = fitting::exponential_fit(pts, cfg.gamma_window);
        gamma_points.push_back({double(lbc), fr.result.exponent});
        res.fits.push_back(std::move(fr));
    }
    if (gamma_points.size() >= 2) {
        FitRow law;
        law.kind = "profile";
        law.fit = "gamma_law";
        law.group2 = cfg.l0;
        law.result = fitting::linear_fit(gamma_points);
        res.fits.push_back(std::move(law));
    }
    return res;
}

// mu(T, L) and condensate fraction over the grid; T_c(L) from the zero
// crossing of a linear fit through the condensate-fraction window; 1/L
// extrapolation of T_c.
inline PhaseResult phase_transition_scan(PhaseConfig cfg) {
    cfg.validate();
    const std::size_t nt = cfg.temperatures.size();
    PhaseResult res;
    res.rows.resize(cfg.sizes.size() * nt);

    std::vector<std::pair<int, double>> tasks;
    for (int l : cfg.sizes)
        for (double t : cfg.temperatures) tasks.emplace_back(l, t);

    parallel_for(tasks.size(), cfg.threads, [&](std::size_t i) {
        const auto [l, t] = tasks[i];
        const double beta = 1.0 / t;
        const model::BoseKernel kernel(LatticeSpec::cubic(l), beta);
        const double mu = model::solve_mu(kernel, cfg.n_target);
        res.rows[i] = {t, l, mu, kernel.condensate_fraction(mu)};
    });
    std::sort(res.rows.begin(), res.rows.end(), [](const PhaseRow& a, const PhaseRow& b) {
        return std::tie(a.t, a.l) < std::tie(b.t, b.l);
    });

    std::vector<std::pair<double, double>> tc_pairs;
    for (int l : cfg.sizes) {
        std::vector<fitting::DataPoint> pts;
        for (const auto& r : res.rows)
            if (r.l == l && r.condensate_fraction >= cfg.window_lo &&
                r.condensate_fraction <= cfg.window_hi)
                pts.push_back({r.t, r.condensate_fraction});
        if (pts.size() < 2)
            throw NumericError("phase_transition_scan: condensate-fraction window [" +
                               std::to_string(cfg.window_lo) + ", " +
                               std::to_string(cfg.window_hi) + "] holds < 2 points at L = " +
                               std::to_string(l) + "; use a finer temperature grid");
        FitRow fr;
        fr.kind = "phase";
        fr.fit = "tc_linear";
        fr.group1 = l;
        fr.result = fitting::linear_fit(pts);
        const fitting::ZeroCrossing z = fitting::zero_crossing(fr.result);
        res.tc_per_size.emplace_back(l, z);
        tc_pairs.emplace_back(double(l), z.value);
        res.fits.push_back(std::move(fr));
    }

    FitRow ex;
    ex.kind = "phase";
    ex.fit = "tc_extrapolation";
    ex.method = "linear_in_inverse_L";
    ex.result = fitting::extrapolate_inverse_size(tc_pairs);
    res.tc_infinity = ex.result.intercept;
    res.tc_infinity_err = ex.result.intercept_err;
    res.fits.push_back(std::move(ex));
    return res;
}

// Correlation decay along one axis: power law with additive offset at and
// below the transition (window [10, 2 L0/5]), exponential above (window
// [L0/5, 7 L0/20]), and the linear temperature law of the exponential rate.
inline CorrelationResult correlation_scan(CorrelationConfig cfg) {
    cfg.validate();
    struct Task {
        int l0;
        double t;
        bool powerlaw;
    };
    std::vector<Task> tasks;
    for (int l : cfg.powerlaw_sizes)
        for (double t : cfg.powerlaw_temperatures) tasks.push_back({l, t, true});
    for (int l : cfg.exponential_sizes)
        for (double t : cfg.exponential_temperatures) tasks.push_back({l, t, false});

    std::vector<std::vector<CorrRow>> rows_per_task(tasks.size());
    std::vector<FitRow> fit_per_task(tasks.size());

    parallel_for(tasks.size(), cfg.threads, [&](std::size_t i) {
        const Task& task = tasks[i];
        const double beta = 1.0 / task.t;
        const LatticeSpec spec = LatticeSpec::cubic(task.l0);
        const double mu = model::solve_mu(model::BoseKernel(spec, beta), cfg.n_target);
        const int d_max = task.powerlaw ? (2 * task.l0) / 5 : (7 * task.l0) / 20;
        const auto curve = correlations::correlation_curve(spec, {beta, mu}, d_max);

        auto& rows = rows_per_task[i];
        rows.reserve(curve.distance.size());
        for (std::size_t j = 0; j < curve.distance.size(); ++j)
            rows.push_back({task.t, task.l0, curve.distance[j], curve.corr[j],
                            curve.corr[j] - curve.corr_inf, curve.corr_inf});

        FitRow fr;
        fr.kind = "correlations";
        fr.group1 = task.t;
        fr.group2 = task.l0;
        std::vector<fitting::DataPoint> pts;
        for (std::size_t j = 0; j < curve.distance.size(); ++j)
            pts.push_back({double(curve.distance[j]), curve.corr[j]});
        if (task.powerlaw) {
            fr.fit = "corr_powerlaw";
            if (task.t <= cfg.unreliable_below) {
                fr.flag = "excluded_low_T";
            } else {
                const fitting::Window w{10.0, 2.0 * task.l0 / 5.0};
                fr.result =
                    fitting::powerlaw_offset_fit(pts, w, curve.corr_inf);
            }
        } else {
            fr.fit = "corr_exponential";
            const fitting::Window w{task.l0 / 5.0, 7.0 * task.l0 / 20.0};
            fr.result = fitting::exponential_fit(pts, w);
        }
        fit_per_task[i] = std::move(fr);
    });

    CorrelationResult res;
    for (auto& r : rows_per_task) res.rows.insert(res.rows.end(), r.begin(), r.end());
    std::sort(res.rows.begin(), res.rows.end(), [](const CorrRow& a, const CorrRow& b) {
        return std::tie(a.t, a.l0, a.dist) < std::tie(b.t, b.l0, b.dist);
    });
    for (auto& f : fit_per_task) res.fits.push_back(std::move(f));
    std::sort(res.fits.begin(), res.fits.end(), [](const FitRow& a, const FitRow& b) {
        return std::tie(a.fit, a.group2, a.group1) < std::tie(b.fit, b.group2, b.group1);
    });

    for (int l0 : cfg.exponential_sizes) {
        std::vector<fitting::DataPoint> pts;
        for (const auto& f : res.fits)
            if (f.fit == "corr_exponential" && int(f.group2) == l0 && f.flag == "ok")
                pts.push_back({f.group1, f.result.exponent});
        if (pts.size() < 2) continue;
        FitRow law;
        law.kind = "correlations";
        law.fit = "eta_law";
        law.group2 = l0;
        law.result = fitting::linear_fit(pts);
        res.fits.push_back(std::move(law));
    }
    return res;
}

// F, purity, entropy of the subsystem across temperatures for each shape.
inline std::vector<SubsystemRow> subsystem_report(SubsystemsConfig cfg) {
    cfg.validate();
    std::vector<std::vector<SubsystemRow>> per_t(cfg.temperatures.size());
    parallel_for(cfg.temperatures.size(), cfg.threads, [&](std::size_t ti) {
        const double t = cfg.temperatures[ti];
        const double beta = 1.0 / t;
        const LatticeSpec full = LatticeSpec::cubic(cfg.l0);
        const LatticeSpec ref = LatticeSpec::cubic(cfg.lbc);
        const double mu0 = model::solve_mu(model::BoseKernel(full, beta), cfg.n_target);
        const double mu2 = model::solve_mu(model::BoseKernel(ref, beta), cfg.n_target);
        const model::DisplacementKernel k0(full, {beta, mu0});
        const model::DisplacementKernel k2(ref, {beta, mu2});
        for (const auto& shape : cfg.shapes) {
            const auto sites = shape.sites();
            const auto state_c = model::covariance_from_kernel(k0, sites);
            const auto state_cp = model::covariance_from_kernel(k2, sites);
            SubsystemRow row;
            row.shape = shape.name();
            row.t = t;
            row.l0 = cfg.l0;
            row.lbc = cfg.lbc;
            row.mu_l0 = mu0;
            row.mu_lbc = mu2;
            row.f = gaussian::fidelity(state_c, state_cp);
            row.purity = gaussian::purity(state_c);
            row.entropy = gaussian::entropy(state_c);
            per_t[ti].push_back(row);
        }
    });
    std::vector<SubsystemRow> rows;
    for (auto& r : per_t) rows.insert(rows.end(), r.begin(), r.end());
    std::sort(rows.begin(), rows.end(), [](const SubsystemRow& a, const SubsystemRow& b) {
        return std::tie(a.shape, a.t) < std::tie(b.shape, b.t);
    });
    return rows;
}

struct FiniteSizeEstimate {
    fitting::FitResult fit;
    std::string method = "linear_in_inverse_L";
};

// Continuum estimate of a finite-size exponent sequence nu(L0).
inline FiniteSizeEstimate finite_size_exponent(const std::vector<std::pair<double, double>>& nu_per_size) {
    FiniteSizeEstimate est;
    est.fit = fitting::extrapolate_inverse_size(nu_per_size);
    return est;
}

} // namespace bosegas::experiments

#endif
