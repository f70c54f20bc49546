#ifndef BOSEGAS_ORACLE_HPP
#define BOSEGAS_ORACLE_HPP

#include <lapacke.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "bosegas/errors.hpp"
#include "bosegas/lattice.hpp"
#include "bosegas/thermo.hpp"

namespace bosegas::oracle {

// Brute-force reference: the grand-canonical state assembled in a Fock basis
// truncated by total particle number. H conserves N, so the state is
// block-diagonal over N-sectors and each block is exp(-beta H_N - mu N)/Z.

using Occupation = std::vector<std::uint8_t>;

// Truncated-space definition: single-particle hopping matrix h (the second-
// quantized Hamiltonian is sum_ij h_ij b^dag_i b_j), total-N cutoff, and the
// dimension/tail guards.
struct FockSpec {
    Eigen::MatrixXd single_particle;
    int n_max = 4;
    std::int64_t dim_ceiling = 50000;
    double tail_weight_tol = 1e-10;

    int modes() const { return static_cast<int>(single_particle.rows()); }

    // h = 6 I - W on the periodic lattice, W counting directed neighbour
    // links (axis wrap at L = 2 doubles the link weight).
    static FockSpec from_lattice(const model::LatticeSpec& spec, int n_max,
                                 std::int64_t dim_ceiling = 50000,
                                 double tail_weight_tol = 1e-10) {
        const std::vector<model::Site> sites = lattice_sites(spec);
        const int v = static_cast<int>(sites.size());
        Eigen::MatrixXd h = 6.0 * Eigen::MatrixXd::Identity(v, v);
        std::unordered_map<std::int64_t, int> index;
        for (int i = 0; i < v; ++i) index[site_key(spec, sites[i])] = i;
        for (int i = 0; i < v; ++i)
            for (int axis = 0; axis < 3; ++axis)
                for (int dir : {-1, 1}) {
                    model::Site nb = sites[i];
                    nb[axis] += dir;
                    if (nb[axis] > spec.coord_max()) nb[axis] -= spec.side;
                    if (nb[axis] < spec.coord_min()) nb[axis] += spec.side;
                    h(i, index.at(site_key(spec, nb))) -= 1.0;
                }
        FockSpec f;
        f.single_particle = h;
        f.n_max = n_max;
        f.dim_ceiling = dim_ceiling;
        f.tail_weight_tol = tail_weight_tol;
        return f;
    }

    static FockSpec from_single_particle(Eigen::MatrixXd h, int n_max,
                                         std::int64_t dim_ceiling = 50000,
                                         double tail_weight_tol = 1e-10) {
        FockSpec f;
        f.single_particle = std::move(h);
        f.n_max = n_max;
        f.dim_ceiling = dim_ceiling;
        f.tail_weight_tol = tail_weight_tol;
        return f;
    }

    // Fixed site enumeration shared with the Gaussian-path comparisons.
    static std::vector<model::Site> lattice_sites(const model::LatticeSpec& spec) {
        std::vector<model::Site> sites;
        sites.reserve(static_cast<std::size_t>(spec.volume()));
        for (int x = spec.coord_min(); x <= spec.coord_max(); ++x)
            for (int y = spec.coord_min(); y <= spec.coord_max(); ++y)
                for (int z = spec.coord_min(); z <= spec.coord_max(); ++z)
                    sites.push_back({x, y, z});
        return sites;
    }

private:
    static std::int64_t site_key(const model::LatticeSpec& spec, const model::Site& s) {
        const std::int64_t L = spec.side;
        return ((s[0] - spec.coord_min()) * L + (s[1] - spec.coord_min())) * L +
               (s[2] - spec.coord_min());
    }
};

namespace detail {

inline std::uint64_t pack(const Occupation& occ) {
    std::uint64_t k = 0;
    for (std::uint8_t n : occ) k = (k << 8) | n;
    return k;
}

inline void enumerate_sector(int modes, int total, Occupation& scratch, int pos,
                             std::vector<Occupation>& out) {
    if (pos == modes - 1) {
        scratch[pos] = static_cast<std::uint8_t>(total);
        out.push_back(scratch);
        return;
    }
    for (int n = total; n >= 0; --n) {
        scratch[pos] = static_cast<std::uint8_t>(n);
        enumerate_sector(modes, total - n, scratch, pos + 1, out);
    }
}

inline void dense_symmetric_eig(Eigen::MatrixXd& h, Eigen::VectorXd& evals) {
    const int n = static_cast<int>(h.rows());
    evals.resize(n);
    if (n >= 256) {
        const int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, h.data(), n, evals.data());
        if (info != 0)
            throw NumericError("dsyevd failed with info = " + std::to_string(info));
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
        evals = es.eigenvalues();
        h = es.eigenvectors();
    }
}

} // namespace detail

struct SectorBasis {
    int n_particles = 0;
    std::vector<Occupation> states;
    std::unordered_map<std::uint64_t, int> index;

    SectorBasis() = default;
    SectorBasis(int modes, int total) : n_particles(total) {
        Occupation scratch(modes, 0);
        detail::enumerate_sector(modes, total, scratch, 0, states);
        index.reserve(states.size());
        for (int i = 0; i < static_cast<int>(states.size()); ++i)
            index[detail::pack(states[i])] = i;
    }

    int dim() const { return static_cast<int>(states.size()); }
};

// Per-sector eigendecompositions of H_N plus eigenstate coefficient tables
// for the one- and two-body observables. beta- and mu-independent, so one
// decomposition serves a whole (beta, mu) grid.
class SectorDecomposition {
public:
    explicit SectorDecomposition(FockSpec spec) : spec_(std::move(spec)) {
        const int v = spec_.modes();
        std::int64_t total_dim = 0;
        for (int n = 0; n <= spec_.n_max; ++n) {
            // sector dimension C(n + v - 1, v - 1)
            std::int64_t dim = 1;
            for (int i = 1; i <= v - 1; ++i) dim = dim * (n + i) / i;
            total_dim += dim;
        }
        if (total_dim > spec_.dim_ceiling)
            throw NumericError("Fock dimension " + std::to_string(total_dim) +
                               " exceeds ceiling " + std::to_string(spec_.dim_ceiling) +
                               "; lower n_max or raise the ceiling");
        dimension_ = total_dim;
        for (int n = 0; n <= spec_.n_max; ++n) bases_.emplace_back(v, n);

        pairs_.clear();
        for (int i = 0; i < v; ++i)
            for (int j = i; j < v; ++j) pairs_.emplace_back(i, j);

        evals_.resize(bases_.size());
        evecs_.resize(bases_.size());
        cov_coeff_.resize(bases_.size());
        nn_coeff_.resize(bases_.size());
        for (std::size_t n = 0; n < bases_.size(); ++n) {
            build_sector(static_cast<int>(n));
        }
    }

    const FockSpec& spec() const { return spec_; }
    std::int64_t dimension() const { return dimension_; }
    int sectors() const { return static_cast<int>(bases_.size()); }
    const SectorBasis& basis(int n) const { return bases_[n]; }
    const Eigen::VectorXd& eigenvalues(int n) const { return evals_[n]; }
    const Eigen::MatrixXd& eigenvectors(int n) const { return evecs_[n]; }
    const Eigen::MatrixXd& cov_coeff(int n) const { return cov_coeff_[n]; }
    const Eigen::MatrixXd& nn_coeff(int n) const { return nn_coeff_[n]; }
    int pair_index(int i, int j) const {
        if (i > j) std::swap(i, j);
        const int v = spec_.modes();
        return i * v - i * (i - 1) / 2 + (j - i);
    }

private:
    void build_sector(int n) {
        const SectorBasis& basis = bases_[n];
        const int dim = basis.dim();
        const int v = spec_.modes();
        const Eigen::MatrixXd& h = spec_.single_particle;

        Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(dim, dim);
        for (int s = 0; s < dim; ++s) {
            const Occupation& occ = basis.states[s];
            double diag = 0.0;
            for (int i = 0; i < v; ++i) diag += h(i, i) * occ[i];
            mat(s, s) = diag;
            for (int j = 0; j < v; ++j) {
                if (occ[j] == 0) continue;
                for (int i = 0; i < v; ++i) {
                    if (i == j || h(i, j) == 0.0) continue;
                    Occupation target = occ;
                    --target[j];
                    ++target[i];
                    const int t = basis.index.at(detail::pack(target));
                    mat(t, s) += h(i, j) * std::sqrt(double(occ[j]) * double(occ[i] + 1));
                }
            }
        }
        detail::dense_symmetric_eig(mat, evals_[n]);
        evecs_[n] = std::move(mat);

        // <a| b_i^dag b_j |a> via lowered vectors in sector n-1
        const int npairs = static_cast<int>(pairs_.size());
        cov_coeff_[n] = Eigen::MatrixXd::Zero(npairs, dim);
        if (n > 0) {
            const SectorBasis& lower = bases_[n - 1];
            Eigen::MatrixXd lowered(lower.dim(), v);
            for (int a = 0; a < dim; ++a) {
                lowered.setZero();
                for (int s = 0; s < dim; ++s) {
                    const double amp = evecs_[n](s, a);
                    if (amp == 0.0) continue;
                    const Occupation& occ = basis.states[s];
                    for (int i = 0; i < v; ++i) {
                        if (occ[i] == 0) continue;
                        Occupation target = occ;
                        --target[i];
                        lowered(lower.index.at(detail::pack(target)), i) +=
                            amp * std::sqrt(double(occ[i]));
                    }
                }
                for (int p = 0; p < npairs; ++p)
                    cov_coeff_[n](p, a) =
                        lowered.col(pairs_[p].first).dot(lowered.col(pairs_[p].second));
            }
        }

        // <a| n_i n_j |a>: diagonal operators, one GEMM against squared
        // eigenvector amplitudes
        Eigen::MatrixXd occ_products(dim, npairs);
        for (int s = 0; s < dim; ++s) {
            const Occupation& occ = basis.states[s];
            for (int p = 0; p < npairs; ++p)
                occ_products(s, p) =
                    double(occ[pairs_[p].first]) * double(occ[pairs_[p].second]);
        }
        nn_coeff_[n] = occ_products.transpose() * evecs_[n].cwiseProduct(evecs_[n]);
    }

    FockSpec spec_;
    std::int64_t dimension_ = 0;
    std::vector<SectorBasis> bases_;
    std::vector<Eigen::VectorXd> evals_;
    std::vector<Eigen::MatrixXd> evecs_;
    std::vector<Eigen::MatrixXd> cov_coeff_;
    std::vector<Eigen::MatrixXd> nn_coeff_;
    std::vector<std::pair<int, int>> pairs_;
};

// Dense Hermitian density matrix over an explicit occupation basis; the
// common currency for reduced states and definitional checks.
struct DensityMatrix {
    std::vector<Occupation> basis;
    Eigen::MatrixXd rho;

    int dim() const { return static_cast<int>(basis.size()); }
    int modes() const { return basis.empty() ? 0 : static_cast<int>(basis[0].size()); }
    double trace() const { return rho.trace(); }
    double purity() const { return (rho * rho).trace(); }

    double entropy() const {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rho);
        double s = 0.0;
        for (int i = 0; i < es.eigenvalues().size(); ++i) {
            const double p = es.eigenvalues()(i);
            if (p > 1e-300) s -= p * std::log(p);
        }
        return s;
    }

    // tr(rho b_i^dag b_j) evaluated directly on the occupation basis.
    double one_body(int i, int j) const {
        std::unordered_map<std::uint64_t, int> index;
        index.reserve(basis.size());
        for (int s = 0; s < dim(); ++s) index[detail::pack(basis[s])] = s;
        double sum = 0.0;
        for (int s = 0; s < dim(); ++s) {
            const Occupation& occ = basis[s];
            if (occ[j] == 0) continue;
            if (i == j) {
                sum += rho(s, s) * occ[i];
                continue;
            }
            Occupation target = occ;
            --target[j];
            ++target[i];
            const auto it = index.find(detail::pack(target));
            if (it == index.end()) continue;
            sum += rho(s, it->second) * std::sqrt(double(occ[j]) * double(occ[i] + 1));
        }
        return sum;
    }

    Eigen::MatrixXd covariance() const {
        const int v = modes();
        Eigen::MatrixXd m(v, v);
        for (int i = 0; i < v; ++i)
            for (int j = i; j < v; ++j) m(i, j) = m(j, i) = one_body(i, j);
        return m;
    }
};

class FockState {
public:
    FockState(std::shared_ptr<const SectorDecomposition> sd, double beta, double mu,
              int depth = -1)
        : sd_(std::move(sd)), beta_(beta), mu_(mu) {
        model::check_thermal(beta, mu);
        depth_ = depth < 0 ? sd_->sectors() - 1 : depth;
        if (depth_ >= sd_->sectors())
            throw NumericError("FockState: depth exceeds decomposition n_max");

        // weights e^{-beta E - mu N}, max-shifted before exponentiation
        double shift = -std::numeric_limits<double>::infinity();
        for (int n = 0; n <= depth_; ++n)
            for (int a = 0; a < sd_->basis(n).dim(); ++a)
                shift = std::max(shift, -beta * sd_->eigenvalues(n)(a) - mu * n);
        long double z = 0.0L;
        weights_.resize(depth_ + 1);
        for (int n = 0; n <= depth_; ++n) {
            weights_[n].resize(sd_->basis(n).dim());
            for (int a = 0; a < sd_->basis(n).dim(); ++a) {
                weights_[n](a) = std::exp(-beta * sd_->eigenvalues(n)(a) - mu * n - shift);
                z += weights_[n](a);
            }
        }
        for (int n = 0; n <= depth_; ++n) weights_[n] /= static_cast<double>(z);

        const double top = weights_[depth_].sum();
        if (top > sd_->spec().tail_weight_tol)
            throw NumericError(
                "fock_state: top-sector weight " + std::to_string(top) +
                " exceeds truncation tolerance " + std::to_string(sd_->spec().tail_weight_tol) +
                "; increase n_max or mu");
    }

    const SectorDecomposition& decomposition() const { return *sd_; }
    double beta() const { return beta_; }
    double mu() const { return mu_; }
    int depth() const { return depth_; }
    double trace() const {
        long double t = 0.0L;
        for (const auto& w : weights_) t += w.sum();
        return static_cast<double>(t);
    }

    Eigen::MatrixXd covariance() const {
        const int v = sd_->spec().modes();
        Eigen::MatrixXd m(v, v);
        for (int i = 0; i < v; ++i)
            for (int j = i; j < v; ++j) {
                const int p = sd_->pair_index(i, j);
                long double sum = 0.0L;
                for (int n = 1; n <= depth_; ++n)
                    sum += sd_->cov_coeff(n).row(p).dot(weights_[n]);
                m(i, j) = m(j, i) = static_cast<double>(sum);
            }
        return m;
    }

    double mean_occupation(int i) const {
        const int p = sd_->pair_index(i, i);
        long double sum = 0.0L;
        for (int n = 1; n <= depth_; ++n) sum += sd_->cov_coeff(n).row(p).dot(weights_[n]);
        return static_cast<double>(sum);
    }

    double mean_nn(int i, int j) const {
        const int p = sd_->pair_index(i, j);
        long double sum = 0.0L;
        for (int n = 1; n <= depth_; ++n) sum += sd_->nn_coeff(n).row(p).dot(weights_[n]);
        return static_cast<double>(sum);
    }

    double density_density(int i, int j) const {
        return mean_nn(i, j) - mean_occupation(i) * mean_occupation(j);
    }

    double purity() const {
        long double s = 0.0L;
        for (const auto& w : weights_) s += w.squaredNorm();
        return static_cast<double>(s);
    }

    double entropy() const {
        long double s = 0.0L;
        for (const auto& w : weights_)
            for (int a = 0; a < w.size(); ++a)
                if (w(a) > 1e-300) s -= w(a) * std::log((long double)w(a));
        return static_cast<double>(s);
    }

    // Partial trace onto the given mode subset.
    DensityMatrix reduce(const std::vector<int>& subset) const {
        const int vs = static_cast<int>(subset.size());
        DensityMatrix out;
        std::unordered_map<std::uint64_t, int> sub_index;
        for (int n = 0; n <= depth_; ++n) {
            SectorBasis sb(vs, n);
            for (const auto& occ : sb.states) {
                sub_index[detail::pack(occ)] = static_cast<int>(out.basis.size());
                out.basis.push_back(occ);
            }
        }
        out.rho = Eigen::MatrixXd::Zero(out.dim(), out.dim());

        const int v = sd_->spec().modes();
        std::vector<bool> in_subset(v, false);
        for (int i : subset) in_subset[i] = true;

        for (int n = 0; n <= depth_; ++n) {
            const SectorBasis& basis = sd_->basis(n);
            // group rows by environment occupation
            std::unordered_map<std::uint64_t, std::vector<std::pair<int, int>>> groups;
            for (int s = 0; s < basis.dim(); ++s) {
                Occupation sub(vs), env;
                env.reserve(v - vs);
                for (int i = 0; i < vs; ++i) sub[i] = basis.states[s][subset[i]];
                for (int i = 0; i < v; ++i)
                    if (!in_subset[i]) env.push_back(basis.states[s][i]);
                groups[detail::pack(env)].emplace_back(s, sub_index.at(detail::pack(sub)));
            }
            const Eigen::MatrixXd& u = sd_->eigenvectors(n);
            for (const auto& [key, members] : groups) {
                const int g = static_cast<int>(members.size());
                Eigen::MatrixXd rows(g, basis.dim());
                for (int i = 0; i < g; ++i) rows.row(i) = u.row(members[i].first);
                const Eigen::MatrixXd block =
                    rows * weights_[n].asDiagonal() * rows.transpose();
                for (int i = 0; i < g; ++i)
                    for (int j = 0; j < g; ++j)
                        out.rho(members[i].second, members[j].second) += block(i, j);
            }
        }
        return out;
    }

    // Full density matrix as one dense block-diagonal matrix; small systems
    // only (sector-independence checks, definitional fidelity).
    DensityMatrix dense(int dim_guard = 4096) const {
        DensityMatrix out;
        std::int64_t total = 0;
        for (int n = 0; n <= depth_; ++n) total += sd_->basis(n).dim();
        if (total > dim_guard)
            throw NumericError("FockState::dense: dimension " + std::to_string(total) +
                               " above guard " + std::to_string(dim_guard));
        out.rho = Eigen::MatrixXd::Zero(total, total);
        int offset = 0;
        for (int n = 0; n <= depth_; ++n) {
            const SectorBasis& basis = sd_->basis(n);
            for (const auto& occ : basis.states) out.basis.push_back(occ);
            const Eigen::MatrixXd& u = sd_->eigenvectors(n);
            out.rho.block(offset, offset, basis.dim(), basis.dim()) =
                u * weights_[n].asDiagonal() * u.transpose();
            offset += basis.dim();
        }
        return out;
    }

private:
    std::shared_ptr<const SectorDecomposition> sd_;
    double beta_;
    double mu_;
    int depth_;
    std::vector<Eigen::VectorXd> weights_;
};

inline FockState fock_state(const FockSpec& spec, double beta, double mu) {
    return FockState(std::make_shared<SectorDecomposition>(spec), beta, mu);
}

inline Eigen::MatrixXd oracle_covariance(const FockState& state) {
    return state.covariance();
}
inline double oracle_purity(const FockState& state) {
    return state.purity();
}
inline double oracle_entropy(const FockState& state) {
    return state.entropy();
}
inline double oracle_correlation(const FockState& state, int i, int j) {
    return state.density_density(i, j);
}

// F(rho, sigma) = [tr sqrt(rho^{1/2} sigma rho^{1/2})]^2 by Hermitian
// eigendecomposition, straight from the definition.
inline double oracle_fidelity(const DensityMatrix& r1, const DensityMatrix& r2) {
    if (r1.dim() != r2.dim())
        throw NumericError("oracle_fidelity: dimension mismatch");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es1(r1.rho);
    Eigen::VectorXd d = es1.eigenvalues();
    for (int i = 0; i < d.size(); ++i) {
        if (d(i) < -1e-10)
            throw NumericError("oracle_fidelity: input not positive semidefinite");
        d(i) = std::sqrt(std::max(d(i), 0.0));
    }
    const Eigen::MatrixXd sqrt1 =
        es1.eigenvectors() * d.asDiagonal() * es1.eigenvectors().transpose();
    Eigen::MatrixXd inner = sqrt1 * r2.rho * sqrt1;
    inner = 0.5 * (inner + inner.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es2(inner);
    double tr = 0.0;
    for (int i = 0; i < es2.eigenvalues().size(); ++i)
        tr += std::sqrt(std::max(es2.eigenvalues()(i), 0.0));
    return tr * tr;
}

} // namespace bosegas::oracle

#endif
