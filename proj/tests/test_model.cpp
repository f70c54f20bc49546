#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "bosegas/lattice.hpp"
#include "bosegas/thermo.hpp"

using namespace bosegas;
using model::LatticeSpec;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
constexpr double kPi = std::numbers::pi;

// independent scalar Bose factor for the oracle arithmetic below
double bose(double x) { return 1.0 / (std::exp(x) - 1.0); }

// L = 2 grid has eps in {0, 4, 8, 12} with multiplicities {1, 3, 3, 1}
double density_l2(double beta, double mu) {
    return (bose(mu) + 3.0 * bose(4.0 * beta + mu) + 3.0 * bose(8.0 * beta + mu) +
            bose(12.0 * beta + mu)) /
           8.0;
}
} // namespace

TEST_CASE("lattice spec validation") {
    CHECK_THROWS_AS(LatticeSpec::cubic(1), ConfigError);
    CHECK_THROWS_AS(LatticeSpec::cubic(7), ConfigError);
    const auto spec = LatticeSpec::cubic(4);
    CHECK(spec.volume() == 64);
    CHECK(spec.coord_min() == -2);
    CHECK(spec.coord_max() == 1);
    CHECK(spec.contains({-2, 0, 1}));
    CHECK_FALSE(spec.contains({2, 0, 0}));
}

TEST_CASE("dispersion endpoints") {
    CHECK(model::dispersion(0.0, 0.0, 0.0) == 0.0);
    CHECK_THAT(model::dispersion(kPi, kPi, kPi), WithinAbs(12.0, 1e-12));
    CHECK_THAT(model::dispersion(kPi, 0.0, 0.0), WithinAbs(4.0, 1e-12));
}

TEST_CASE("momentum grid invariants") {
    for (int side : {2, 4, 6}) {
        const auto spec = LatticeSpec::cubic(side);
        const auto grid = model::momentum_grid(spec);
        REQUIRE(static_cast<std::int64_t>(grid.k.size()) == spec.volume());
        int zeros = 0, maxima = 0;
        for (std::size_t i = 0; i < grid.eps.size(); ++i) {
            CHECK(grid.eps[i] >= 0.0);
            CHECK(grid.eps[i] <= 12.0 + 1e-12);
            if (grid.eps[i] < 1e-12) ++zeros;
            if (grid.eps[i] > 12.0 - 1e-12) ++maxima;
            // eps(-k) = eps(k)
            CHECK_THAT(model::dispersion(-grid.k[i][0], -grid.k[i][1], -grid.k[i][2]),
                       WithinAbs(grid.eps[i], 1e-12));
        }
        CHECK(zeros == 1);
        CHECK(maxima == 1);
    }
}

TEST_CASE("occupation values and preconditions") {
    // beta eps + mu = ln 2 -> exactly one boson
    CHECK_THAT(model::occupation(1.0, std::log(2.0), 0.0), WithinRel(1.0, 1e-14));
    CHECK_THAT(model::occupation(0.5, std::log(2.0) - 0.5, 1.0), WithinRel(1.0, 1e-12));
    // Boltzmann tail
    CHECK(model::occupation(1.0, 50.0, 0.0) < 1e-21);
    CHECK(model::occupation(1.0, 50.0, 5.0) < 1e-21);
    // direct scalar evaluation
    CHECK_THAT(model::occupation(1.0, 0.1, 0.0), WithinRel(1.0 / (std::exp(0.1) - 1.0), 1e-13));
    CHECK_THAT(model::occupation(1.0, 0.1, 0.0), WithinAbs(9.5083, 5e-5));

    CHECK_THROWS_AS(model::occupation(0.0, 1.0, 1.0), NumericError);
    CHECK_THROWS_AS(model::occupation(1.0, 0.0, 1.0), NumericError);
    CHECK_THROWS_AS(model::occupation(1.0, -0.5, 1.0), NumericError);
    CHECK_THROWS_AS(model::occupation(1.0, 1.0, -1.0), NumericError);
}

TEST_CASE("density against hand-enumerated L = 2 momenta") {
    const auto spec = LatticeSpec::cubic(2);
    CHECK_THAT(model::density(spec, 1.0, 1.0), WithinRel(density_l2(1.0, 1.0), 1e-13));
    CHECK_THAT(model::density(spec, 0.5, 2.0), WithinRel(density_l2(0.5, 2.0), 1e-13));
}

TEST_CASE("density against unfolded grid sum") {
    // validates the per-axis folding on a lattice with nontrivial multiplicities
    const auto spec = LatticeSpec::cubic(6);
    const auto grid = model::momentum_grid(spec);
    const double beta = 0.7, mu = 0.3;
    long double direct = 0.0L;
    for (double eps : grid.eps) direct += 1.0 / std::expm1(beta * eps + mu);
    direct /= static_cast<long double>(spec.volume());
    CHECK_THAT(model::density(spec, beta, mu), WithinRel(static_cast<double>(direct), 1e-13));
}

TEST_CASE("density vanishes at large mu") {
    CHECK(model::density(LatticeSpec::cubic(4), 1.0, 60.0) < 1e-20);
}

TEST_CASE("density decreases in mu") {
    const model::BoseKernel kernel(LatticeSpec::cubic(8), 0.8);
    double prev = kernel.density(0.05);
    for (double mu : {0.1, 0.5, 1.0, 2.0, 5.0}) {
        const double cur = kernel.density(mu);
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("solve_mu meets its density contract") {
    const auto spec = LatticeSpec::cubic(100);
    const double beta = 1.0 / 5.6;
    const model::BoseKernel kernel(spec, beta);
    const double mu = model::solve_mu(kernel, 1.0);
    CHECK(mu > 0.0);
    CHECK_THAT(kernel.density(mu), WithinAbs(1.0, 1e-10));
    // deterministic
    CHECK(model::solve_mu(kernel, 1.0) == mu);
}

TEST_CASE("solve_mu against an independent bisection") {
    // plain linear bisection over the 8-term scalar sum, 1e-12 tolerance
    const double beta = 1.0;
    double lo = 1e-12, hi = 100.0;
    for (int i = 0; i < 500 && hi - lo > 1e-15; ++i) {
        const double mid = 0.5 * (lo + hi);
        (density_l2(beta, mid) > 1.0 ? lo : hi) = mid;
    }
    const double reference = 0.5 * (lo + hi);
    REQUIRE(std::abs(density_l2(beta, reference) - 1.0) < 1e-10);
    CHECK_THAT(model::solve_mu(LatticeSpec::cubic(2), beta, 1.0), WithinRel(reference, 1e-9));
}

TEST_CASE("solve_mu decreases with system size below T_c") {
    const double beta = 1.0 / 2.6;
    double prev = model::solve_mu(LatticeSpec::cubic(20), beta, 1.0);
    for (int side : {40, 80}) {
        const double mu = model::solve_mu(LatticeSpec::cubic(side), beta, 1.0);
        CHECK(mu < prev);
        prev = mu;
    }
}

TEST_CASE("solve_mu rejects unreachable targets") {
    CHECK_THROWS_AS(model::solve_mu(LatticeSpec::cubic(2), 1.0, 1e18), NumericError);
}

TEST_CASE("condensate fraction limits") {
    // empty-lattice limit: ratio of Boltzmann weights
    const double beta = 1.0;
    const double expected = 1.0 / (1.0 + 3.0 * std::exp(-4.0 * beta) +
                                   3.0 * std::exp(-8.0 * beta) + std::exp(-12.0 * beta));
    CHECK_THAT(model::condensate_fraction(LatticeSpec::cubic(2), beta, 60.0),
               WithinRel(expected, 1e-8));

    const auto frac = model::condensate_fraction(LatticeSpec::cubic(4), 1.0, 0.5);
    CHECK(frac > 0.0);
    CHECK(frac < 1.0);
}

TEST_CASE("condensate fraction decreases with temperature at fixed density") {
    const auto spec = LatticeSpec::cubic(50);
    double prev = 2.0;
    for (double t = 1.0; t <= 8.0; t += 0.5) {
        const model::BoseKernel kernel(spec, 1.0 / t);
        const double frac = kernel.condensate_fraction(model::solve_mu(kernel, 1.0));
        CHECK(frac < prev);
        prev = frac;
    }
}
