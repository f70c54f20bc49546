#ifndef BOSEGAS_COVARIANCE_HPP
#define BOSEGAS_COVARIANCE_HPP

#include <fftw3.h>

#include <map>
#include <mutex>
#include <numbers>
#include <set>
#include <vector>

#include "bosegas/errors.hpp"
#include "bosegas/lattice.hpp"
#include "bosegas/state.hpp"
#include "bosegas/thermo.hpp"

namespace bosegas::model {

inline void check_sites(const LatticeSpec& spec, const std::vector<Site>& sites) {
    std::set<Site> seen;
    for (const Site& s : sites) {
        if (!spec.contains(s))
            throw NumericError("site (" + std::to_string(s[0]) + "," + std::to_string(s[1]) +
                               "," + std::to_string(s[2]) + ") outside lattice of side " +
                               std::to_string(spec.side));
        if (!seen.insert(s).second)
            throw NumericError("duplicate site in site list");
    }
}

// Covariance matrix by direct momentum summation,
// M[a][b] = (1/V) sum_k cos(k.(n_a - n_b)) / (e^{beta eps(k) + mu} - 1).
// Entries are memoized per canonical displacement, so equivalent pairs get
// bit-identical values and translation invariance holds exactly.
inline gaussian::ThermalGaussianState covariance(const LatticeSpec& spec,
                                                 const ThermalParams& params,
                                                 const std::vector<Site>& sites) {
    check_sites(spec, sites);
    const BoseKernel kernel(spec, params.beta);
    const int n = static_cast<int>(sites.size());
    gaussian::ThermalGaussianState state;
    state.sites = sites;
    state.m.resize(n, n);
    std::map<Site, double> memo;
    for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b) {
            const Site d = canonical_displacement(spec, wrap_displacement(spec, sites[a], sites[b]));
            auto it = memo.find(d);
            if (it == memo.end())
                it = memo.emplace(d, kernel.displacement_sum(params.mu, d)).first;
            state.m(a, b) = state.m(b, a) = it->second;
        }
    return state;
}

namespace detail {
inline std::mutex& fftw_plan_mutex() {
    static std::mutex m;
    return m;
}
} // namespace detail

// Real-space kernel g(d) for all L^3 displacement vectors, from one 3D FFT of
// the occupation grid. Storage is the r2c half-spectrum (the kernel is real
// and even), expanded on lookup.
class DisplacementKernel {
public:
    DisplacementKernel(const LatticeSpec& spec, const ThermalParams& params)
        : spec_(spec), params_(params) {
        const int L = spec.side;
        const std::size_t nin = static_cast<std::size_t>(spec.volume());
        const std::size_t nout = std::size_t(L) * L * (L / 2 + 1);

        const BoseKernel bk(spec, params.beta);
        check_thermal(params.beta, params.mu);

        std::vector<double> grid(nin);
        {
            // occupation over the unfolded grid; per-axis factors cached
            const int half = L / 2;
            std::vector<double> w(L), eps(L);
            for (int m = 0; m < L; ++m) {
                const int f = m <= half ? m : L - m;
                eps[m] = 2.0 * (1.0 - std::cos(2.0 * std::numbers::pi * f / L));
                w[m] = std::exp(-params.beta * eps[m]);
            }
            const double u = std::exp(-params.mu);
            std::size_t idx = 0;
            for (int a = 0; a < L; ++a) {
                const double pa = u * w[a];
                for (int b = 0; b < L; ++b) {
                    const double pab = pa * w[b];
                    for (int c = 0; c < L; ++c) {
                        const double t = pab * w[c];
                        grid[idx++] =
                            t > 0.99
                                ? 1.0 / std::expm1(params.beta * (eps[a] + eps[b] + eps[c]) + params.mu)
                                : t / (1.0 - t);
                    }
                }
            }
        }

        std::vector<fftw_complex> out(nout);
        {
            std::unique_lock<std::mutex> lock(detail::fftw_plan_mutex());
            fftw_plan plan = fftw_plan_dft_r2c_3d(L, L, L, grid.data(), out.data(), FFTW_ESTIMATE);
            lock.unlock();
            fftw_execute(plan);
            lock.lock();
            fftw_destroy_plan(plan);
        }

        data_.resize(nout);
        const double inv_v = 1.0 / static_cast<double>(spec.volume());
        for (std::size_t i = 0; i < nout; ++i) data_[i] = out[i][0] * inv_v;
    }

    const LatticeSpec& spec() const { return spec_; }
    const ThermalParams& params() const { return params_; }

    double at(int dx, int dy, int dz) const {
        const int L = spec_.side;
        dx = fold(dx, L);
        dy = fold(dy, L);
        dz = fold(dz, L);
        if (dz > L / 2) {
            dx = (L - dx) % L;
            dy = (L - dy) % L;
            dz = L - dz;
        }
        return data_[(std::size_t(dx) * L + dy) * (L / 2 + 1) + dz];
    }

    double at(const Site& a, const Site& b) const {
        const Site d = wrap_displacement(spec_, a, b);
        return at(d[0], d[1], d[2]);
    }

    double density() const { return at(0, 0, 0); }

private:
    static int fold(int d, int L) {
        int v = d % L;
        if (v < 0) v += L;
        return v;
    }

    LatticeSpec spec_;
    ThermalParams params_;
    std::vector<double> data_;
};

inline DisplacementKernel covariance_kernel_fft(const LatticeSpec& spec,
                                                const ThermalParams& params) {
    return DisplacementKernel(spec, params);
}

inline gaussian::ThermalGaussianState covariance_from_kernel(const DisplacementKernel& kernel,
                                                             const std::vector<Site>& sites) {
    check_sites(kernel.spec(), sites);
    const int n = static_cast<int>(sites.size());
    gaussian::ThermalGaussianState state;
    state.sites = sites;
    state.m.resize(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b)
            state.m(a, b) = state.m(b, a) = kernel.at(sites[a], sites[b]);
    return state;
}

// g((d,0,0)) for d = 0..d_max without materializing the 3D kernel: collapse
// (k_y, k_z) into h(m_x) in one folded O(L^3/8) pass, then transform the one
// remaining axis. Same Fourier sum as DisplacementKernel, O(L) memory.
inline std::vector<double> axis_kernel(const LatticeSpec& spec, const ThermalParams& params,
                                       int d_max) {
    if (d_max < 0 || d_max > spec.side / 2)
        throw NumericError("axis_kernel: d_max must be in [0, L/2], got " + std::to_string(d_max));
    check_thermal(params.beta, params.mu);
    const int L = spec.side;
    const int half = L / 2;

    std::vector<double> w(half + 1), eps(half + 1), mult(half + 1);
    for (int m = 0; m <= half; ++m) {
        eps[m] = 2.0 * (1.0 - std::cos(2.0 * std::numbers::pi * m / L));
        w[m] = std::exp(-params.beta * eps[m]);
        mult[m] = (m == 0 || m == half) ? 1.0 : 2.0;
    }
    const double u = std::exp(-params.mu);

    // h[a] = sum over (k_y, k_z) of the occupation at fixed m_x = a
    std::vector<long double> h(half + 1, 0.0L);
    for (int a = 0; a <= half; ++a) {
        long double acc = 0.0L;
        const double pa = u * w[a];
        for (int b = 0; b <= half; ++b) {
            const double pab = pa * w[b];
            double s = 0.0;
            if (pab * w[0] > 0.99) {
                for (int c = 0; c <= half; ++c) {
                    const double t = pab * w[c];
                    const double o =
                        t > 0.99 ? 1.0 / std::expm1(params.beta * (eps[a] + eps[b] + eps[c]) + params.mu)
                                 : t / (1.0 - t);
                    s += mult[c] * o;
                }
            } else {
                for (int c = 0; c <= half; ++c) {
                    const double t = pab * w[c];
                    s += mult[c] * (t / (1.0 - t));
                }
            }
            acc += static_cast<long double>(mult[b]) * s;
        }
        h[a] = acc;
    }

    std::vector<double> g(d_max + 1);
    const long double inv_v = 1.0L / static_cast<long double>(spec.volume());
    for (int d = 0; d <= d_max; ++d) {
        long double acc = h[0];
        for (int m = 1; m < half; ++m)
            acc += 2.0L * std::cos(2.0 * std::numbers::pi * m * d / L) * h[m];
        acc += (d % 2 == 0 ? 1.0L : -1.0L) * h[half];
        g[d] = static_cast<double>(acc * inv_v);
    }
    return g;
}

} // namespace bosegas::model

#endif
