#include <catch2/catch_amalgamated.hpp>

#include <memory>

#include "bosegas/correlations.hpp"
#include "bosegas/covariance.hpp"
#include "bosegas/gaussian.hpp"
#include "bosegas/oracle.hpp"

using namespace bosegas;
using model::LatticeSpec;
using model::Site;
using model::ThermalParams;
using oracle::FockSpec;
using oracle::FockState;
using oracle::SectorDecomposition;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// shared L = 2 decomposition, depth 7 (largest feasible inside the dimension
// ceiling at test-scale runtime); built once for the whole binary
std::shared_ptr<const SectorDecomposition> l2() {
    static auto sd = [] {
        FockSpec spec = FockSpec::from_lattice(LatticeSpec::cubic(2), 7);
        spec.tail_weight_tol = 1.0; // cross-checks assert convergence explicitly
        return std::make_shared<const SectorDecomposition>(spec);
    }();
    return sd;
}

gaussian::ThermalGaussianState l2_gaussian(double beta, double mu) {
    return model::covariance(LatticeSpec::cubic(2), {beta, mu},
                             FockSpec::lattice_sites(LatticeSpec::cubic(2)));
}

} // namespace

TEST_CASE("single decoupled site matches the geometric closed form") {
    const double beta = 0.3, mu = 0.2;
    const auto spec = FockSpec::from_single_particle(Eigen::MatrixXd::Constant(1, 1, 6.0), 40);
    const FockState state = oracle::fock_state(spec, beta, mu);
    const double expected = 1.0 / std::expm1(6.0 * beta + mu);
    CHECK_THAT(state.covariance()(0, 0), WithinRel(expected, 1e-12));
    CHECK_THAT(state.trace(), WithinAbs(1.0, 1e-12));
    // Bose number variance n(n+1)
    CHECK_THAT(state.density_density(0, 0), WithinRel(expected * (expected + 1.0), 1e-10));
}

TEST_CASE("truncation weight check") {
    FockSpec spec = FockSpec::from_lattice(LatticeSpec::cubic(2), 4);
    CHECK_THROWS_AS(oracle::fock_state(spec, 1.0, 1.0), NumericError); // tail 1e-10 breached
    spec.tail_weight_tol = 1.0;
    CHECK_NOTHROW(oracle::fock_state(spec, 1.0, 1.0));
}

TEST_CASE("dimension ceiling check") {
    const FockSpec spec = FockSpec::from_lattice(LatticeSpec::cubic(2), 20);
    CHECK_THROWS_AS(std::make_shared<SectorDecomposition>(spec), NumericError);
}

TEST_CASE("sector assembly equals full-space exponentiation") {
    // 3-site open chain, independent full-space construction
    Eigen::MatrixXd h = 6.0 * Eigen::MatrixXd::Identity(3, 3);
    h(0, 1) = h(1, 0) = -1.0;
    h(1, 2) = h(2, 1) = -1.0;
    const int n_max = 3;
    const double beta = 0.7, mu = 0.9;

    std::vector<std::array<int, 3>> basis;
    for (int total = 0; total <= n_max; ++total)
        for (int a = total; a >= 0; --a)
            for (int b = total - a; b >= 0; --b) basis.push_back({a, b, total - a - b});

    const int dim = static_cast<int>(basis.size());
    auto find = [&](const std::array<int, 3>& occ) {
        for (int i = 0; i < dim; ++i)
            if (basis[i] == occ) return i;
        return -1;
    };
    Eigen::MatrixXd op = Eigen::MatrixXd::Zero(dim, dim); // beta H + mu N
    for (int s = 0; s < dim; ++s) {
        const auto& occ = basis[s];
        const int total = occ[0] + occ[1] + occ[2];
        op(s, s) += beta * 6.0 * total + mu * total;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                if (i == j || h(i, j) == 0.0 || occ[j] == 0) continue;
                auto target = occ;
                --target[j];
                ++target[i];
                const int t = find(target);
                REQUIRE(t >= 0);
                op(t, s) += beta * h(i, j) * std::sqrt(double(occ[j]) * double(occ[i] + 1));
            }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op);
    Eigen::VectorXd w = (-es.eigenvalues().array()).exp();
    Eigen::MatrixXd rho_full =
        es.eigenvectors() * w.asDiagonal() * es.eigenvectors().transpose();
    rho_full /= rho_full.trace();

    FockSpec spec = FockSpec::from_single_particle(h, n_max);
    spec.tail_weight_tol = 1.0;
    const auto dm = oracle::fock_state(spec, beta, mu).dense();
    REQUIRE(dm.dim() == dim);
    // same lexicographic basis order by construction
    for (int i = 0; i < dim; ++i)
        for (int c = 0; c < 3; ++c) REQUIRE(int(dm.basis[i][c]) == basis[i][c]);
    CHECK((dm.rho - rho_full).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("near-vacuum limit at large beta and large mu") {
    FockSpec spec = FockSpec::from_lattice(LatticeSpec::cubic(2), 5);
    const FockState state = oracle::fock_state(spec, 50.0, 12.0);
    CHECK_THAT(state.trace(), WithinAbs(1.0, 1e-12));
    CHECK(state.purity() > 1.0 - 1e-4);
    CHECK(state.entropy() < 1e-3);
    CHECK(state.covariance().cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("convergence ladder: depth 6 vs depth 7") {
    for (double beta : {0.5, 1.0}) {
        const double mu = 4.0;
        const FockState shallow(l2(), beta, mu, 6);
        const FockState deep(l2(), beta, mu, 7);
        CHECK((shallow.covariance() - deep.covariance()).cwiseAbs().maxCoeff() < 1e-8);
        CHECK(std::abs(shallow.purity() - deep.purity()) < 1e-8);
        CHECK(std::abs(shallow.entropy() - deep.entropy()) < 1e-8);
        CHECK(std::abs(shallow.density_density(0, 1) - deep.density_density(0, 1)) < 1e-8);
        const auto r6 = shallow.reduce({0, 1});
        const auto r7 = deep.reduce({0, 1});
        CHECK(std::abs(r6.purity() - r7.purity()) < 1e-8);
    }
}

TEST_CASE("full-state purity equals the mode product") {
    const double beta = 1.0, mu = 3.0;
    const FockState state(l2(), beta, mu);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(l2()->spec().single_particle);
    double log_p = 0.0;
    for (int k = 0; k < 8; ++k)
        log_p -= std::log1p(2.0 / std::expm1(beta * es.eigenvalues()(k) + mu));
    CHECK_THAT(state.purity(), WithinAbs(std::exp(log_p), 1e-9));
}

TEST_CASE("partial trace is internally consistent") {
    const FockState state(l2(), 1.0, 2.0);
    const auto reduced = state.reduce({0, 3, 5});
    CHECK_THAT(reduced.trace(), WithinAbs(1.0, 1e-12));
    const Eigen::MatrixXd full_cov = state.covariance();
    const Eigen::MatrixXd red_cov = reduced.covariance();
    const int idx[3] = {0, 3, 5};
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            CHECK_THAT(red_cov(a, b), WithinAbs(full_cov(idx[a], idx[b]), 1e-10));
}

TEST_CASE("cross-path: covariance") {
    // tight where the truncation converges
    const FockState state(l2(), 1.0, 2.0);
    const auto gauss = l2_gaussian(1.0, 2.0);
    CHECK((state.covariance() - gauss.m).cwiseAbs().maxCoeff() < 1e-6);

    const FockState cold(l2(), 0.5, 3.0);
    const auto gauss3 = l2_gaussian(0.5, 3.0);
    CHECK((cold.covariance() - gauss3.m).cwiseAbs().maxCoeff() < 1e-8);

    // mu = 1: the k = 0 geometric tail converges too slowly for 1e-6 inside
    // the dimension ceiling; still pins the 1/V normalization to ~5e-4
    const FockState warm(l2(), 1.0, 1.0);
    const auto gauss1 = l2_gaussian(1.0, 1.0);
    CHECK((warm.covariance() - gauss1.m).cwiseAbs().maxCoeff() < 5e-4);
}

TEST_CASE("cross-path: purity and entropy") {
    const FockState state(l2(), 1.0, 2.0);
    const auto gauss = l2_gaussian(1.0, 2.0);
    CHECK_THAT(oracle::oracle_purity(state), WithinAbs(gaussian::purity(gauss), 1e-6));
    CHECK_THAT(oracle::oracle_entropy(state), WithinAbs(gaussian::entropy(gauss), 5e-6));

    const FockState cold(l2(), 0.5, 3.0);
    const auto gauss3 = l2_gaussian(0.5, 3.0);
    CHECK_THAT(oracle::oracle_purity(cold), WithinAbs(gaussian::purity(gauss3), 1e-6));
    CHECK_THAT(oracle::oracle_entropy(cold), WithinAbs(gaussian::entropy(gauss3), 1e-6));
}

TEST_CASE("cross-path: reduced states") {
    const FockState state(l2(), 1.0, 2.0);
    const auto gauss = l2_gaussian(1.0, 2.0);
    const auto sites = FockSpec::lattice_sites(LatticeSpec::cubic(2));

    const auto red_oracle = state.reduce({0, 1});
    const auto red_gauss = gaussian::reduce(gauss, {sites[0], sites[1]});
    CHECK((red_oracle.covariance() - red_gauss.m).cwiseAbs().maxCoeff() < 1e-6);
    CHECK_THAT(red_oracle.purity(), WithinAbs(gaussian::purity(red_gauss), 1e-6));
    CHECK_THAT(red_oracle.entropy(), WithinAbs(gaussian::entropy(red_gauss), 5e-6));

    // quadrature moments: sigma_xx = I/2 + M against the oracle M
    const auto q = gaussian::to_quadrature(red_gauss);
    const Eigen::MatrixXd sigma_xx_oracle =
        0.5 * Eigen::MatrixXd::Identity(2, 2) + red_oracle.covariance();
    CHECK((q.sigma.topLeftCorner(2, 2) - sigma_xx_oracle).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("cross-path: fidelity") {
    const double beta = 1.0;
    const FockState f1(l2(), beta, 2.0);
    const FockState f2(l2(), beta, 2.2);
    const auto g1 = l2_gaussian(beta, 2.0);
    const auto g2 = l2_gaussian(beta, 2.2);
    const auto sites = FockSpec::lattice_sites(LatticeSpec::cubic(2));

    const double f_oracle = oracle::oracle_fidelity(f1.reduce({0, 1}), f2.reduce({0, 1}));
    const double f_gauss = gaussian::fidelity(gaussian::reduce(g1, {sites[0], sites[1]}),
                                              gaussian::reduce(g2, {sites[0], sites[1]}));
    CHECK_THAT(f_oracle, WithinAbs(f_gauss, 1e-6));
    CHECK_THAT(oracle::oracle_fidelity(f1.reduce({0, 1}), f1.reduce({0, 1})),
               WithinAbs(1.0, 1e-10));

    // single-mode thermal pair (n1 ~ 0, n2 = 1) reproduces F = 1/2; fidelity
    // is square-root sensitive, so n1 must be ~1e-29 for 1e-9 agreement
    const auto h1 = Eigen::MatrixXd::Constant(1, 1, 6.0);
    FockSpec tiny = FockSpec::from_single_particle(h1, 45);
    tiny.tail_weight_tol = 1.0;
    const auto sd_tiny = std::make_shared<const SectorDecomposition>(tiny);
    const FockState nearly_empty(sd_tiny, 1.0, 60.0);
    const FockState one_boson(sd_tiny, 0.01, std::log(2.0) - 0.06); // 6 beta + mu = ln 2
    CHECK_THAT(one_boson.covariance()(0, 0), WithinRel(1.0, 1e-10));
    CHECK_THAT(oracle::oracle_fidelity(nearly_empty.dense(), one_boson.dense()),
               WithinAbs(0.5, 1e-9));
    // and at a resolvable occupation pair, against the closed single-mode law
    const FockState small_n(sd_tiny, 1.0, 20.0); // n1 = 1/(e^26 - 1)
    const double n1 = small_n.covariance()(0, 0);
    const double law = 1.0 / std::pow(std::sqrt((n1 + 1.0) * 2.0) - std::sqrt(n1), 2.0);
    CHECK_THAT(oracle::oracle_fidelity(small_n.dense(), one_boson.dense()),
               WithinAbs(law, 1e-9));
}

TEST_CASE("cross-path: density-density correlations") {
    const auto spec2 = LatticeSpec::cubic(2);
    const auto sites = FockSpec::lattice_sites(spec2);
    const FockState state(l2(), 1.0, 2.0);
    const double g = correlations::density_density(spec2, {1.0, 2.0}, sites[0], sites[1]);
    CHECK_THAT(state.density_density(0, 1), WithinAbs(g, 1e-6));

    const FockState warm(l2(), 1.0, 1.0);
    const double g1 = correlations::density_density(spec2, {1.0, 1.0}, sites[0], sites[1]);
    CHECK_THAT(warm.density_density(0, 1), WithinAbs(g1, 5e-4));
}

TEST_CASE("entropy subadditivity on reductions") {
    const FockState state(l2(), 1.0, 2.0);
    const auto gauss = l2_gaussian(1.0, 2.0);
    const auto sites = FockSpec::lattice_sites(LatticeSpec::cubic(2));

    const double s_pair_oracle = state.reduce({0, 1}).entropy();
    const double s_a = state.reduce({0}).entropy();
    const double s_b = state.reduce({1}).entropy();
    CHECK(s_pair_oracle <= s_a + s_b + 1e-10);

    const double s_pair_gauss = gaussian::entropy(gaussian::reduce(gauss, {sites[0], sites[1]}));
    const double s_ga = gaussian::entropy(gaussian::reduce(gauss, {sites[0]}));
    const double s_gb = gaussian::entropy(gaussian::reduce(gauss, {sites[1]}));
    CHECK(s_pair_gauss <= s_ga + s_gb + 1e-10);
    CHECK_THAT(s_pair_oracle, WithinAbs(s_pair_gauss, 5e-6));
}
