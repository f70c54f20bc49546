#ifndef BOSEGAS_GAUSSIAN_HPP
#define BOSEGAS_GAUSSIAN_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "bosegas/errors.hpp"
#include "bosegas/state.hpp"

namespace bosegas::gaussian {

using MatrixXld = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using VectorXld = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

// Eigenvalues of m below this are numerical noise on near-pure modes; clamp
// to zero before logs.
inline constexpr double kSpectrumFloor = 1e-14;

inline ThermalGaussianState reduce(const ThermalGaussianState& state,
                                   const std::vector<model::Site>& subset) {
    std::vector<int> idx;
    idx.reserve(subset.size());
    for (const auto& s : subset) {
        auto it = std::find(state.sites.begin(), state.sites.end(), s);
        if (it == state.sites.end())
            throw NumericError("reduce: site (" + std::to_string(s[0]) + "," +
                               std::to_string(s[1]) + "," + std::to_string(s[2]) +
                               ") not in state");
        idx.push_back(static_cast<int>(it - state.sites.begin()));
    }
    ThermalGaussianState out;
    out.sites = subset;
    const int n = static_cast<int>(subset.size());
    out.m.resize(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) out.m(a, b) = state.m(idx[a], idx[b]);
    return out;
}

// Symmetrized quadrature second moments, x = (b+b^dag)/sqrt(2),
// p = (b-b^dag)/(i sqrt(2)), vacuum normalized to sigma = I/2. Ordering is
// (x_1..x_N, p_1..p_N). For real symmetric m: sigma = (I/2 + m) + (I/2 + m).
struct QuadratureCM {
    Eigen::MatrixXd sigma;
    int modes() const { return static_cast<int>(sigma.rows()) / 2; }
};

inline QuadratureCM to_quadrature(const ThermalGaussianState& state) {
    const int n = state.size();
    const Eigen::MatrixXd c = 0.5 * Eigen::MatrixXd::Identity(n, n) + state.m;
    QuadratureCM q;
    q.sigma = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    q.sigma.topLeftCorner(n, n) = c;
    q.sigma.bottomRightCorner(n, n) = c;
    return q;
}

inline Eigen::VectorXd mode_occupations(const ThermalGaussianState& state) {
    state.check_valid();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(state.m);
    Eigen::VectorXd v = es.eigenvalues();
    for (int i = 0; i < v.size(); ++i)
        if (v(i) < kSpectrumFloor) v(i) = 0.0;
    return v;
}

// nu_k = m_k + 1/2 for thermal-like states (equal to |eig(i Omega sigma)|).
inline Eigen::VectorXd symplectic_eigenvalues(const ThermalGaussianState& state) {
    return mode_occupations(state).array() + 0.5;
}

// Symplectic spectrum straight from a quadrature CM through |eig(i Omega sigma)|,
// for cross-checking the thermal-like shortcut.
inline Eigen::VectorXd symplectic_eigenvalues(const QuadratureCM& q) {
    const int n = q.modes();
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    omega.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
    omega.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
    Eigen::EigenSolver<Eigen::MatrixXd> es(omega * q.sigma);
    Eigen::VectorXd nu(2 * n);
    for (int i = 0; i < 2 * n; ++i) nu(i) = std::abs(es.eigenvalues()(i));
    std::sort(nu.data(), nu.data() + 2 * n);
    // pairs (nu, nu); keep one of each
    Eigen::VectorXd out(n);
    for (int i = 0; i < n; ++i) out(i) = 0.5 * (nu(2 * i) + nu(2 * i + 1));
    std::sort(out.data(), out.data() + n);
    return out;
}

// P = 1/sqrt(det(2 sigma)) = prod_k 1/(2 m_k + 1), vacuum -> 1.
inline double purity(const ThermalGaussianState& state) {
    const Eigen::VectorXd m = mode_occupations(state);
    double log_p = 0.0;
    for (int i = 0; i < m.size(); ++i) log_p -= std::log1p(2.0 * m(i));
    return std::exp(log_p);
}

inline double purity(const QuadratureCM& q) {
    const Eigen::MatrixXd two_sigma = 2.0 * q.sigma;
    return 1.0 / std::sqrt(two_sigma.determinant());
}

// S = sum_k (m_k+1) ln(m_k+1) - m_k ln m_k  (nu = m + 1/2 form of the
// symplectic-eigenvalue entropy; the nu = 1/2 term contributes 0).
inline double entropy(const ThermalGaussianState& state) {
    const Eigen::VectorXd m = mode_occupations(state);
    double s = 0.0;
    for (int i = 0; i < m.size(); ++i) {
        const double mi = m(i);
        if (mi > 0.0) s += (mi + 1.0) * std::log1p(mi) - mi * std::log(mi);
    }
    return s;
}

namespace detail {

// T = m (I + m)^{-1}: its square root and ln det(I + m), shared eigenbasis.
struct TFactor {
    MatrixXld t;
    MatrixXld t_sqrt;
    long double log_det_one_plus_m = 0.0L;
};

inline TFactor t_factor(const Eigen::MatrixXd& m_in) {
    TFactor f;
    Eigen::SelfAdjointEigenSolver<MatrixXld> es(m_in.cast<long double>());
    const VectorXld& d = es.eigenvalues();
    VectorXld td(d.size()), tsd(d.size());
    for (int i = 0; i < d.size(); ++i) {
        const long double v = d(i) < (long double)kSpectrumFloor ? 0.0L : d(i);
        td(i) = v / (1.0L + v);
        tsd(i) = std::sqrt(td(i));
        f.log_det_one_plus_m += std::log1p(v);
    }
    const MatrixXld& u = es.eigenvectors();
    f.t = u * td.asDiagonal() * u.transpose();
    f.t_sqrt = u * tsd.asDiagonal() * u.transpose();
    return f;
}

} // namespace detail

// ln F for two zero-mean, number-conserving Gaussian states:
//   F = det(I-T1) det(I-T2) / det(I - sqrt(sqrt(T1) T2 sqrt(T1)))^2,
//   T_i = m_i (I + m_i)^{-1},  det(I-T_i) = 1/det(I+m_i).
// Evaluated in long double; 1-F stays resolvable down to ~1e-17, which the
// boundary-size cutoff rule (1-F < 1e-14) and high-temperature fits probe.
inline long double log_fidelity(const ThermalGaussianState& s1, const ThermalGaussianState& s2) {
    if (s1.size() != s2.size())
        throw NumericError("fidelity: states have different mode counts (" +
                           std::to_string(s1.size()) + " vs " + std::to_string(s2.size()) + ")");
    s1.check_valid();
    s2.check_valid();

    const detail::TFactor f1 = detail::t_factor(s1.m);
    const detail::TFactor f2 = detail::t_factor(s2.m);

    MatrixXld a = f1.t_sqrt * f2.t * f1.t_sqrt;
    a = ((a + a.transpose()) * 0.5L).eval();
    Eigen::SelfAdjointEigenSolver<MatrixXld> es(a);

    long double ln_f = -f1.log_det_one_plus_m - f2.log_det_one_plus_m;
    for (int i = 0; i < a.rows(); ++i) {
        long double p = es.eigenvalues()(i);
        p = std::clamp(p, 0.0L, 1.0L - 1e-18L);
        ln_f -= 2.0L * std::log(1.0L - std::sqrt(p));
    }
    if (ln_f > 0.0L && ln_f < 1e-12L) ln_f = 0.0L; // roundoff residue at m1 == m2
    if (ln_f > 0.0L)
        throw NumericError("fidelity: computed F > 1 beyond tolerance");
    return ln_f;
}

inline double fidelity(const ThermalGaussianState& s1, const ThermalGaussianState& s2) {
    return static_cast<double>(std::exp(log_fidelity(s1, s2)));
}

// 1 - F without cancellation, usable down to the long-double floor.
inline double fidelity_error(const ThermalGaussianState& s1, const ThermalGaussianState& s2) {
    return static_cast<double>(-std::expm1(log_fidelity(s1, s2)));
}

} // namespace bosegas::gaussian

#endif
