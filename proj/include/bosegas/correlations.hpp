#ifndef BOSEGAS_CORRELATIONS_HPP
#define BOSEGAS_CORRELATIONS_HPP

#include <cmath>
#include <vector>

#include "bosegas/covariance.hpp"
#include "bosegas/errors.hpp"
#include "bosegas/thermo.hpp"

namespace bosegas::correlations {

using model::LatticeSpec;
using model::Site;
using model::ThermalParams;

// Ground-state density n0 = (1/V) <b0^dag b0> = (1/V) / (e^mu - 1).
inline double ground_state_density(const LatticeSpec& spec, const ThermalParams& params) {
    model::check_thermal(params.beta, params.mu);
    return 1.0 / (std::expm1(params.mu) * static_cast<double>(spec.volume()));
}

// corr(n_i, n_j) = <b_i^dag b_j><b_i b_j^dag> - <b_i^dag b_j^dag><b_i b_j>.
// Anomalous moments vanish, so for i != j this is |M_ij|^2; on coincident
// sites Wick gives M_ii (M_ii + 1).
inline double density_density(const LatticeSpec& spec, const ThermalParams& params,
                              const Site& i, const Site& j) {
    model::check_sites(spec, {i});
    model::check_sites(spec, {j});
    const model::BoseKernel kernel(spec, params.beta);
    if (i == j) {
        const double m = kernel.density(params.mu);
        return m * (m + 1.0);
    }
    const Site d = model::canonical_displacement(spec, model::wrap_displacement(spec, i, j));
    const double g = kernel.displacement_sum(params.mu, d);
    return g * g;
}

// Axis correlation profile corr(d) between sites (i,1,1) and (i+d,1,1),
// with the d -> infinity asymptote corr_inf = n0^2.
struct CorrelationCurve {
    std::vector<int> distance;   // 1..d_max
    std::vector<double> corr;
    double corr_inf = 0.0;
    double n0 = 0.0;
    int side = 0;
    ThermalParams params;
};

inline CorrelationCurve correlation_curve(const LatticeSpec& spec, const ThermalParams& params,
                                          int d_max) {
    if (d_max < 1 || d_max > spec.side / 2)
        throw NumericError("correlation_curve: d_max must be in [1, L/2], got " +
                           std::to_string(d_max));
    CorrelationCurve curve;
    curve.side = spec.side;
    curve.params = params;
    curve.n0 = ground_state_density(spec, params);
    curve.corr_inf = curve.n0 * curve.n0;
    const std::vector<double> g = model::axis_kernel(spec, params, d_max);
    curve.distance.reserve(d_max);
    curve.corr.reserve(d_max);
    for (int d = 1; d <= d_max; ++d) {
        curve.distance.push_back(d);
        curve.corr.push_back(g[d] * g[d]);
    }
    return curve;
}

} // namespace bosegas::correlations

#endif
