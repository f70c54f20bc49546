#ifndef BOSEGAS_LATTICE_HPP
#define BOSEGAS_LATTICE_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "bosegas/errors.hpp"

namespace bosegas::model {

using Site = std::array<int, 3>;

// Cubic lattice with periodic boundaries, side L, V = L^3 sites.
// Site coordinates live in [-L/2, L/2-1] per axis; L must be even and >= 2.
struct LatticeSpec {
    int side = 0;

    static LatticeSpec cubic(int side) {
        if (side < 2)
            throw ConfigError("lattice side must be >= 2, got " + std::to_string(side));
        if (side % 2 != 0)
            throw ConfigError("lattice side must be even, got " + std::to_string(side));
        return LatticeSpec{side};
    }

    std::int64_t volume() const {
        return std::int64_t(side) * side * side;
    }

    int coord_min() const { return -side / 2; }
    int coord_max() const { return side / 2 - 1; }

    bool contains(const Site& n) const {
        for (int c : n)
            if (c < coord_min() || c > coord_max()) return false;
        return true;
    }
};

// Single-particle dispersion of the nearest-neighbour hopping Hamiltonian,
// eps(k) = 2 (3 - cos kx - cos ky - cos kz), in [0, 12].
inline double dispersion(double kx, double ky, double kz) {
    return 2.0 * (3.0 - std::cos(kx) - std::cos(ky) - std::cos(kz));
}

inline double dispersion(const std::array<double, 3>& k) {
    return dispersion(k[0], k[1], k[2]);
}

// Allowed momenta k = 2 pi m / L with m_i in [-L/2, L/2-1], and eps(k).
// Explicit enumeration; meant for small lattices and tests. Production sums
// run over the same grid implicitly.
struct MomentumGrid {
    std::vector<std::array<double, 3>> k;
    std::vector<double> eps;
};

inline MomentumGrid momentum_grid(const LatticeSpec& spec) {
    MomentumGrid g;
    const int L = spec.side;
    g.k.reserve(static_cast<std::size_t>(spec.volume()));
    g.eps.reserve(g.k.capacity());
    const double step = 2.0 * std::numbers::pi / L;
    for (int mx = -L / 2; mx < L / 2; ++mx)
        for (int my = -L / 2; my < L / 2; ++my)
            for (int mz = -L / 2; mz < L / 2; ++mz) {
                std::array<double, 3> kv{step * mx, step * my, step * mz};
                g.k.push_back(kv);
                g.eps.push_back(dispersion(kv));
            }
    return g;
}

// Displacement folded into [0, L) per axis.
inline Site wrap_displacement(const LatticeSpec& spec, const Site& a, const Site& b) {
    Site d;
    for (int i = 0; i < 3; ++i) {
        int v = (a[i] - b[i]) % spec.side;
        if (v < 0) v += spec.side;
        d[i] = v;
    }
    return d;
}

// g(d) is even per axis and symmetric under axis permutation (eps is), so
// every displacement folds to a canonical sorted triple in [0, L/2].
inline Site canonical_displacement(const LatticeSpec& spec, Site d) {
    for (int i = 0; i < 3; ++i) {
        int v = d[i] % spec.side;
        if (v < 0) v += spec.side;
        if (v > spec.side / 2) v = spec.side - v;
        d[i] = v;
    }
    if (d[0] > d[1]) std::swap(d[0], d[1]);
    if (d[1] > d[2]) std::swap(d[1], d[2]);
    if (d[0] > d[1]) std::swap(d[0], d[1]);
    return d;
}

} // namespace bosegas::model

#endif
