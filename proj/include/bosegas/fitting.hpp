#ifndef BOSEGAS_FITTING_HPP
#define BOSEGAS_FITTING_HPP

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "bosegas/errors.hpp"

namespace bosegas::fitting {

struct DataPoint {
    double x = 0.0;
    double y = 0.0;
};

struct Window {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    bool contains(double x) const { return x >= lo && x <= hi; }
};

enum class FitModel { linear, exponential, powerlaw, powerlaw_offset };

inline const char* to_string(FitModel m) {
    switch (m) {
        case FitModel::linear: return "linear";
        case FitModel::exponential: return "exponential";
        case FitModel::powerlaw: return "powerlaw";
        case FitModel::powerlaw_offset: return "powerlaw_offset";
    }
    return "?";
}

// One fitted curve. Fields are populated per model:
//   linear:           y = slope x + intercept
//   exponential:      y = amplitude e^{-exponent x}   (log-space fit)
//   powerlaw:         y = amplitude x^{-exponent}     (log-log fit)
//   powerlaw_offset:  y = amplitude x^{-exponent} + offset
// rss/r_squared refer to the space the least squares ran in (log space for
// exponential/powerlaw; linear space for the offset fit).
struct FitResult {
    FitModel model = FitModel::linear;
    Window window;
    int n_points = 0;
    double rss = 0.0;
    double r_squared = 1.0;

    double slope = std::numeric_limits<double>::quiet_NaN();
    double intercept = std::numeric_limits<double>::quiet_NaN();
    double slope_err = std::numeric_limits<double>::quiet_NaN();
    double intercept_err = std::numeric_limits<double>::quiet_NaN();
    double slope_intercept_cov = std::numeric_limits<double>::quiet_NaN();

    double amplitude = std::numeric_limits<double>::quiet_NaN();
    double amplitude_err = std::numeric_limits<double>::quiet_NaN();
    double exponent = std::numeric_limits<double>::quiet_NaN();
    double exponent_err = std::numeric_limits<double>::quiet_NaN();

    double offset = std::numeric_limits<double>::quiet_NaN();
    double offset_err = std::numeric_limits<double>::quiet_NaN();
};

inline std::vector<DataPoint> in_window(const std::vector<DataPoint>& points, Window w) {
    std::vector<DataPoint> out;
    for (const auto& p : points)
        if (w.contains(p.x)) out.push_back(p);
    return out;
}

// Ordinary least squares, standard errors from residual variance
// s^2 = RSS/(n-2); exact fits report zero errors.
inline FitResult linear_fit(const std::vector<DataPoint>& points, Window window = {}) {
    const std::vector<DataPoint> pts = in_window(points, window);
    const int n = static_cast<int>(pts.size());
    if (n < 2)
        throw NumericError("linear_fit: need >= 2 points in window, have " + std::to_string(n));

    long double sx = 0.0L, sy = 0.0L;
    for (const auto& p : pts) {
        sx += p.x;
        sy += p.y;
    }
    const long double mx = sx / n, my = sy / n;
    long double sxx = 0.0L, sxy = 0.0L;
    for (const auto& p : pts) {
        sxx += (p.x - mx) * (p.x - mx);
        sxy += (p.x - mx) * (p.y - my);
    }
    if (sxx <= 0.0L)
        throw NumericError("linear_fit: degenerate x values");

    FitResult r;
    r.model = FitModel::linear;
    r.window = window;
    r.n_points = n;
    const long double slope = sxy / sxx;
    const long double intercept = my - slope * mx;
    r.slope = static_cast<double>(slope);
    r.intercept = static_cast<double>(intercept);

    long double rss = 0.0L, tss = 0.0L;
    for (const auto& p : pts) {
        const long double e = p.y - (slope * p.x + intercept);
        rss += e * e;
        tss += (p.y - my) * (p.y - my);
    }
    r.rss = static_cast<double>(rss);
    r.r_squared = tss > 0.0L ? static_cast<double>(1.0L - rss / tss) : 1.0;

    const long double s2 = n > 2 ? rss / (n - 2) : 0.0L;
    r.slope_err = static_cast<double>(std::sqrt(s2 / sxx));
    r.intercept_err = static_cast<double>(std::sqrt(s2 * (1.0L / n + mx * mx / sxx)));
    r.slope_intercept_cov = static_cast<double>(-s2 * mx / sxx);
    return r;
}

// 1 - F or corr decaying as amplitude e^{-exponent x}: straight line in
// (x, ln y). Errors propagate from the log-space regression.
inline FitResult exponential_fit(const std::vector<DataPoint>& points, Window window = {}) {
    std::vector<DataPoint> logpts;
    for (const auto& p : in_window(points, window)) {
        if (!(p.y > 0.0))
            throw NumericError("exponential_fit: nonpositive y at x = " + std::to_string(p.x));
        logpts.push_back({p.x, std::log(p.y)});
    }
    FitResult r = linear_fit(logpts);
    r.model = FitModel::exponential;
    r.window = window;
    r.exponent = -r.slope;
    r.exponent_err = r.slope_err;
    r.amplitude = std::exp(r.intercept);
    r.amplitude_err = r.amplitude * r.intercept_err;
    return r;
}

// amplitude x^{-exponent}: straight line in (ln x, ln y).
inline FitResult powerlaw_fit(const std::vector<DataPoint>& points, Window window = {}) {
    std::vector<DataPoint> logpts;
    for (const auto& p : in_window(points, window)) {
        if (!(p.x > 0.0) || !(p.y > 0.0))
            throw NumericError("powerlaw_fit: nonpositive data at x = " + std::to_string(p.x));
        logpts.push_back({std::log(p.x), std::log(p.y)});
    }
    FitResult r = linear_fit(logpts);
    r.model = FitModel::powerlaw;
    r.window = window;
    r.exponent = -r.slope;
    r.exponent_err = r.slope_err;
    r.amplitude = std::exp(r.intercept);
    r.amplitude_err = r.amplitude * r.intercept_err;
    return r;
}

namespace detail {

// Log-space RSS of the inner fit of y - c; +inf once c touches the data.
inline long double offset_objective(const std::vector<DataPoint>& pts, double c,
                                    FitResult* fit_out = nullptr) {
    std::vector<DataPoint> logpts;
    logpts.reserve(pts.size());
    for (const auto& p : pts) {
        const double yc = p.y - c;
        if (!(yc > 0.0)) return std::numeric_limits<long double>::infinity();
        logpts.push_back({std::log(p.x), std::log(yc)});
    }
    const FitResult f = linear_fit(logpts);
    if (fit_out) *fit_out = f;
    return f.rss;
}

} // namespace detail

// y = amplitude / x^exponent + offset. Outer golden-section over the offset
// (1e-12 bracket tolerance), analytic log-log fit inside; parameter errors
// from the Gauss-Newton Jacobian at the optimum, s^2 = RSS/(n-3) in linear
// space.
inline FitResult powerlaw_offset_fit(const std::vector<DataPoint>& points, Window window,
                                     double offset_seed) {
    const std::vector<DataPoint> pts = in_window(points, window);
    const int n = static_cast<int>(pts.size());
    if (n < 4)
        throw NumericError("powerlaw_offset_fit: need >= 4 points in window, have " +
                           std::to_string(n));
    for (const auto& p : pts)
        if (!(p.x > 0.0))
            throw NumericError("powerlaw_offset_fit: nonpositive x at " + std::to_string(p.x));

    double y_min = pts[0].y, y_max = pts[0].y;
    for (const auto& p : pts) {
        y_min = std::min(y_min, p.y);
        y_max = std::max(y_max, p.y);
    }
    const double span = y_max - y_min;
    if (!(span > 0.0))
        throw NumericError("powerlaw_offset_fit: constant y data");

    double lo = std::min(y_min - span, offset_seed - 0.5 * span);
    double hi = y_min - 1e-14 * span;
    if (!(lo < hi))
        lo = y_min - span;

    // The log-space objective is not unimodal over a wide bracket (it decays
    // slowly as c -> -inf), so a coarse scan locates the global basin first;
    // golden section then refines inside one grid cell. The seed joins the
    // scan so a physically informed offset is never missed.
    const int n_scan = 256;
    const double scan_step = (hi - lo) / n_scan;
    int best_i = 0;
    double best_c = lo;
    long double best_f = detail::offset_objective(pts, lo);
    for (int i = 1; i <= n_scan; ++i) {
        const double c = lo + scan_step * i;
        const long double f = detail::offset_objective(pts, c);
        if (f < best_f) {
            best_f = f;
            best_c = c;
            best_i = i;
        }
    }
    if (offset_seed > lo && offset_seed < hi &&
        detail::offset_objective(pts, offset_seed) < best_f) {
        best_c = offset_seed;
        best_i = static_cast<int>((offset_seed - lo) / scan_step);
    }
    if (best_i == 0)
        throw NumericError("powerlaw_offset_fit: offset minimum hit the lower bracket edge; "
                           "cannot bracket the optimal offset");

    constexpr double inv_phi = 0.6180339887498949;
    double a = std::max(lo, best_c - scan_step);
    double b = std::min(hi, best_c + scan_step);
    double c1 = b - inv_phi * (b - a);
    double c2 = a + inv_phi * (b - a);
    long double f1 = detail::offset_objective(pts, c1);
    long double f2 = detail::offset_objective(pts, c2);
    const double tol = 1e-12 * std::max(1.0, std::abs(y_min));
    while (b - a > tol) {
        if (f1 <= f2) {
            b = c2;
            c2 = c1;
            f2 = f1;
            c1 = b - inv_phi * (b - a);
            f1 = detail::offset_objective(pts, c1);
        } else {
            a = c1;
            c1 = c2;
            f1 = f2;
            c2 = a + inv_phi * (b - a);
            f2 = detail::offset_objective(pts, c2);
        }
    }
    const double c_star = 0.5 * (a + b);

    FitResult inner;
    if (!std::isfinite(static_cast<double>(detail::offset_objective(pts, c_star, &inner))))
        throw NumericError("powerlaw_offset_fit: degenerate optimum");

    FitResult r;
    r.model = FitModel::powerlaw_offset;
    r.window = window;
    r.n_points = n;
    r.exponent = -inner.slope;
    r.amplitude = std::exp(inner.intercept);
    r.offset = c_star;

    // Gauss-Newton errors at (amplitude, exponent, offset)
    Eigen::MatrixXd jac(n, 3);
    long double rss = 0.0L, tss = 0.0L, my = 0.0L;
    for (const auto& p : pts) my += p.y;
    my /= n;
    for (int i = 0; i < n; ++i) {
        const double xb = std::pow(pts[i].x, -r.exponent);
        jac(i, 0) = xb;
        jac(i, 1) = -r.amplitude * std::log(pts[i].x) * xb;
        jac(i, 2) = 1.0;
        const long double e = pts[i].y - (r.amplitude * xb + r.offset);
        rss += e * e;
        tss += (pts[i].y - my) * (pts[i].y - my);
    }
    r.rss = static_cast<double>(rss);
    r.r_squared = tss > 0.0L ? static_cast<double>(1.0L - rss / tss) : 1.0;
    const double s2 = n > 3 ? static_cast<double>(rss) / (n - 3) : 0.0;
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::MatrixXd cov = s2 * jtj.inverse();
    r.amplitude_err = std::sqrt(std::max(cov(0, 0), 0.0));
    r.exponent_err = std::sqrt(std::max(cov(1, 1), 0.0));
    r.offset_err = std::sqrt(std::max(cov(2, 2), 0.0));
    return r;
}

struct ZeroCrossing {
    double value = 0.0;
    double stderr_value = 0.0;
};

// x* = -intercept/slope of a linear fit, error by first-order propagation
// with the slope-intercept covariance.
inline ZeroCrossing zero_crossing(const FitResult& fit) {
    if (fit.model != FitModel::linear)
        throw NumericError("zero_crossing: requires a linear fit");
    if (fit.slope == 0.0)
        throw NumericError("zero_crossing: zero slope");
    ZeroCrossing z;
    z.value = -fit.intercept / fit.slope;
    const double a = fit.slope, b = fit.intercept;
    const double var = (b * b / (a * a * a * a)) * fit.slope_err * fit.slope_err +
                       (1.0 / (a * a)) * fit.intercept_err * fit.intercept_err -
                       2.0 * (b / (a * a * a)) * fit.slope_intercept_cov;
    z.stderr_value = std::sqrt(std::max(var, 0.0));
    return z;
}

// Linear fit of value against 1/L; the intercept estimates the L -> infinity
// limit.
inline FitResult extrapolate_inverse_size(const std::vector<std::pair<double, double>>& pairs) {
    if (pairs.size() < 2)
        throw NumericError("extrapolate_inverse_size: need >= 2 sizes");
    std::vector<DataPoint> pts;
    pts.reserve(pairs.size());
    for (const auto& [size, value] : pairs) {
        if (!(size > 0.0))
            throw NumericError("extrapolate_inverse_size: sizes must be positive");
        pts.push_back({1.0 / size, value});
    }
    return linear_fit(pts);
}

} // namespace bosegas::fitting

#endif
