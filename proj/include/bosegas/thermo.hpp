#ifndef BOSEGAS_THERMO_HPP
#define BOSEGAS_THERMO_HPP

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "bosegas/errors.hpp"
#include "bosegas/lattice.hpp"

namespace bosegas::model {

// Grand-canonical parameters, convention: mode occupation 1/(e^{beta eps + mu} - 1),
// k_B = 1, hopping amplitude = 1, T = 1/beta. mu > 0 is required for a
// normalizable state because eps(0) = 0.
struct ThermalParams {
    double beta = 0.0;
    double mu = 0.0;
    double n_target = 1.0;
};

inline void check_thermal(double beta, double mu) {
    if (!(beta > 0.0))
        throw NumericError("beta must be > 0, got " + std::to_string(beta));
    if (!(mu > 0.0))
        throw NumericError("mu must be > 0, got " + std::to_string(mu));
}

inline double occupation(double beta, double mu, double eps) {
    check_thermal(beta, mu);
    if (!(eps >= 0.0))
        throw NumericError("dispersion energy must be >= 0, got " + std::to_string(eps));
    return 1.0 / std::expm1(beta * eps + mu);
}

// Momentum-grid summation engine for one (lattice, beta). Folds each axis by
// m <-> L-m so grid sums run over (L/2+1)^3 weighted terms instead of L^3.
// All sums accumulate slice partials into long double (<= 1e-12 relative).
class BoseKernel {
public:
    BoseKernel(const LatticeSpec& spec, double beta) : spec_(spec), beta_(beta) {
        if (!(beta > 0.0))
            throw NumericError("beta must be > 0, got " + std::to_string(beta));
        const int half = spec.side / 2;
        axis_eps_.resize(half + 1);
        axis_w_.resize(half + 1);
        axis_mult_.resize(half + 1);
        for (int m = 0; m <= half; ++m) {
            const double e = 2.0 * (1.0 - std::cos(2.0 * std::numbers::pi * m / spec.side));
            axis_eps_[m] = e;
            axis_w_[m] = std::exp(-beta * e);
            axis_mult_[m] = (m == 0 || m == half) ? 1.0 : 2.0;
        }
    }

    const LatticeSpec& spec() const { return spec_; }
    double beta() const { return beta_; }

    // (1/V) sum_k 1/(e^{beta eps(k) + mu} - 1)
    double density(double mu) const {
        return weighted_sum(mu, axis_mult_, axis_mult_, axis_mult_) /
               static_cast<double>(spec_.volume());
    }

    // g(d) = (1/V) sum_k cos(k.d) / (e^{beta eps(k) + mu} - 1); the covariance
    // matrix entry for any site pair at displacement d.
    double displacement_sum(double mu, const Site& d) const {
        return weighted_sum(mu, axis_chi(d[0]), axis_chi(d[1]), axis_chi(d[2])) /
               static_cast<double>(spec_.volume());
    }

    double condensate_fraction(double mu) const {
        check_thermal(beta_, mu);
        const double n0 = 1.0 / std::expm1(mu);
        return n0 / (static_cast<double>(spec_.volume()) * density(mu));
    }

    // Folded phase weights for one axis and integer displacement component.
    std::vector<double> axis_chi(int d) const {
        const int L = spec_.side;
        const int half = L / 2;
        std::vector<double> chi(half + 1);
        chi[0] = 1.0;
        for (int m = 1; m < half; ++m)
            chi[m] = 2.0 * std::cos(2.0 * std::numbers::pi * m * d / L);
        chi[half] = (d % 2 == 0) ? 1.0 : -1.0;
        return chi;
    }

private:
    // sum over the folded grid of chi_x chi_y chi_z / (e^{beta eps + mu} - 1).
    // Occupations with e^{-beta eps - mu} > 0.99 are recomputed through expm1
    // to avoid the 1 - t cancellation near the condensate mode.
    double weighted_sum(double mu, const std::vector<double>& cx,
                        const std::vector<double>& cy,
                        const std::vector<double>& cz) const {
        check_thermal(beta_, mu);
        const int n = static_cast<int>(axis_w_.size());
        const double u = std::exp(-mu);
        long double total = 0.0L;
        std::vector<double> occ(n);
        for (int a = 0; a < n; ++a) {
            const double pa = u * axis_w_[a];
            long double slice = 0.0L;
            for (int b = 0; b < n; ++b) {
                const double pab = pa * axis_w_[b];
                if (pab * axis_w_[0] > 0.99) {
                    double s = 0.0;
                    for (int c = 0; c < n; ++c) {
                        const double t = pab * axis_w_[c];
                        double o;
                        if (t > 0.99)
                            o = 1.0 / std::expm1(beta_ * (axis_eps_[a] + axis_eps_[b] + axis_eps_[c]) + mu);
                        else
                            o = t / (1.0 - t);
                        s += cz[c] * o;
                    }
                    slice += static_cast<long double>(cy[b]) * s;
                } else {
                    for (int c = 0; c < n; ++c) {
                        const double t = pab * axis_w_[c];
                        occ[c] = t / (1.0 - t);
                    }
                    double s = 0.0;
                    for (int c = 0; c < n; ++c) s += cz[c] * occ[c];
                    slice += static_cast<long double>(cy[b]) * s;
                }
            }
            total += static_cast<long double>(cx[a]) * slice;
        }
        return static_cast<double>(total);
    }

    LatticeSpec spec_;
    double beta_;
    std::vector<double> axis_eps_;
    std::vector<double> axis_w_;
    std::vector<double> axis_mult_;
};

inline double density(const LatticeSpec& spec, double beta, double mu) {
    return BoseKernel(spec, beta).density(mu);
}

inline double condensate_fraction(const LatticeSpec& spec, double beta, double mu) {
    return BoseKernel(spec, beta).condensate_fraction(mu);
}

// Bisection for mu with density(beta, mu) = n_target. Bracket (1e-16, 1e3],
// geometric midpoints (mu* ranges over many decades), at most 200 iterations,
// accepted at 1e-12 relative density error. density is strictly decreasing in
// mu, and diverges as mu -> 0+ on a finite lattice, so the bracket straddles
// any positive target.
inline double solve_mu(const BoseKernel& kernel, double n_target) {
    if (!(n_target > 0.0))
        throw NumericError("n_target must be > 0, got " + std::to_string(n_target));
    double lo = 1e-16, hi = 1e3;
    const double rel_tol = 1e-12;
    if (kernel.density(lo) < n_target || kernel.density(hi) > n_target)
        throw NumericError("solve_mu: bracket (1e-16, 1e3] does not straddle the "
                           "target density (internal invariant violation)");
    double best_mu = hi, best_err = std::abs(kernel.density(hi) - n_target);
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = std::sqrt(lo * hi);
        if (mid <= lo || mid >= hi) break;
        const double err = kernel.density(mid) - n_target;
        if (std::abs(err) < best_err) {
            best_err = std::abs(err);
            best_mu = mid;
        }
        if (std::abs(err) <= rel_tol * n_target) return mid;
        if (err > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    if (best_err <= 1e-10 * n_target) return best_mu;
    throw NumericError("solve_mu: did not reach 1e-10 relative density accuracy");
}

inline double solve_mu(const LatticeSpec& spec, double beta, double n_target) {
    return solve_mu(BoseKernel(spec, beta), n_target);
}

} // namespace bosegas::model

#endif
