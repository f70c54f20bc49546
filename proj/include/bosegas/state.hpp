#ifndef BOSEGAS_STATE_HPP
#define BOSEGAS_STATE_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "bosegas/errors.hpp"
#include "bosegas/lattice.hpp"

namespace bosegas::gaussian {

// Zero-mean, zero-anomalous-moment bosonic Gaussian state over an ordered
// site list, stored through its one-body matrix m[a][b] = <b^dag_a b_b>.
// For this model eps(k) = eps(-k) makes m real symmetric; <b b> and <b> vanish
// identically, so m fully determines the state.
struct ThermalGaussianState {
    std::vector<model::Site> sites;
    Eigen::MatrixXd m;

    int size() const { return static_cast<int>(sites.size()); }

    void check_valid(double sym_tol = 1e-12) const {
        if (m.rows() != m.cols() || m.rows() != size())
            throw NumericError("ThermalGaussianState: matrix/site-list size mismatch");
        const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
        if (!(asym <= sym_tol))
            throw NumericError("ThermalGaussianState: matrix not symmetric, max asymmetry " +
                               std::to_string(asym));
    }
};

} // namespace bosegas::gaussian

#endif
