#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <unordered_map>
#include <vector>

#include "starkwp/basis.hpp"
#include "starkwp/errors.hpp"
#include "starkwp/util.hpp"

namespace starkwp {

/// Uniform mesh in x = sqrt(r). Equidistant-in-x sampling keeps the number
/// of points per radial oscillation roughly constant across the basis, so a
/// single global grid serves every state up to n_max.
struct RadialGrid {
    double h = 0.01;
    double x_min = 0.01;
    int n_points = 0;

    double x(int i) const { return x_min + h * i; }
    double r(int i) const { const double xi = x(i); return xi * xi; }
    double x_max() const { return x(n_points - 1); }

    bool operator==(const RadialGrid&) const = default;

    /// Grid spanning `turning_multiple` times the classical turning point
    /// 2 n (n+1) of the largest basis state.
    static RadialGrid for_basis(int n_max, double h = 0.01, double r_inner = 1e-4,
                                double turning_multiple = 2.0) {
        if (n_max < 1 || h <= 0.0 || r_inner <= 0.0 || turning_multiple <= 1.0)
            throw ConfigError("invalid radial grid parameters");
        RadialGrid g;
        g.h = h;
        g.x_min = std::max(std::sqrt(r_inner), h);
        const double x_max =
            std::sqrt(turning_multiple * 2.0 * n_max * (n_max + 1.0));
        g.n_points = static_cast<int>(std::ceil((x_max - g.x_min) / h)) + 1;
        if (g.n_points < 16) throw ConfigError("radial grid has too few points");
        return g;
    }
};

/// Scaled radial solution w(x) = u(r)/sqrt(x) with u = r R(r), sampled on
/// the full grid; zero below `first` (core truncation).
struct RadialWavefunction {
    BasisState state;
    double energy_au = 0.0;
    int first = 0;
    std::vector<double> w;
};

namespace detail {

inline double trapezoid(const std::vector<double>& f, double h) {
    if (f.size() < 2) return 0.0;
    double s = 0.5 * (f.front() + f.back());
    for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
    return s * h;
}

} // namespace detail

/// <u_a| r |u_b> on the common grid (deterministic trapezoid quadrature).
inline double radial_integral(const RadialWavefunction& a,
                              const RadialWavefunction& b,
                              const RadialGrid& grid) {
    if (a.w.size() != b.w.size() ||
        a.w.size() != static_cast<std::size_t>(grid.n_points))
        throw InternalError("radial_integral: grid mismatch");
    const int lo = std::max(a.first, b.first);
    double s = 0.0;
    for (int i = lo; i < grid.n_points; ++i) {
        const double x = grid.x(i);
        const double x2 = x * x;
        double f = x2 * x2 * a.w[i] * b.w[i];
        if (i == lo || i == grid.n_points - 1) f *= 0.5;
        s += f;
    }
    return 2.0 * s * grid.h;
}

inline double norm_integral(const RadialWavefunction& a, const RadialGrid& grid) {
    double s = 0.0;
    for (int i = a.first; i < grid.n_points; ++i) {
        double f = grid.r(i) * a.w[i] * a.w[i];
        if (i == a.first || i == grid.n_points - 1) f *= 0.5;
        s += f;
    }
    return 2.0 * s * grid.h;
}

/// u(r) = sqrt(x) w(x) at grid index i.
inline double u_value(const RadialWavefunction& a, const RadialGrid& grid, int i) {
    return std::sqrt(grid.x(i)) * a.w[i];
}

inline int node_count(const RadialWavefunction& a) {
    double peak = 0.0;
    for (double v : a.w) peak = std::max(peak, std::abs(v));
    if (peak == 0.0) return 0;
    // well above the core-truncation dribble, well below any real antinode
    const double floor = 1e-6 * peak;
    int nodes = 0, last_sign = 0;
    for (double v : a.w) {
        if (std::abs(v) < floor) continue;
        const int s = v > 0.0 ? 1 : -1;
        if (last_sign != 0 && s != last_sign) ++nodes;
        last_sign = s;
    }
    return nodes;
}

/// <l',0|cos(theta)|l,0>. Returns 0 unless |l-l'| = 1 (selection rule).
inline double angular_factor(int l, int lp, int m = 0) {
    if (m != 0) throw ConfigError("angular_factor: only m=0 supported");
    if (l < 0 || lp < 0) throw ConfigError("angular_factor: negative l");
    if (std::abs(l - lp) != 1) return 0.0;
    const double big = std::max(l, lp);
    return big / std::sqrt((2.0 * big - 1.0) * (2.0 * big + 1.0));
}

/// Inward Numerov integration of the transformed radial equation
///   w'' = G w,  G(x) = (2l+1/2)(2l+3/2)/x^2 - 8 - 8 E x^2,
/// from the outer forbidden region down to the mesh bottom. Inside the inner
/// classical turning point the solution is truncated where it turns around
/// and grows toward the core: for a non-hydrogenic energy the inward run
/// picks up the irregular Coulomb component there. Hydrogenic states
/// integrate cleanly to the mesh bottom.
inline RadialWavefunction integrate(const BasisState& state,
                                    const QuantumDefectTable& defects,
                                    const RadialGrid& grid) {
    validate_state(state);
    const double e = energy(state, defects);
    if (e >= 0.0)
        throw NumericalError("state " + state_label(state) + " is not bound");

    // classical turning points of -1/r + l(l+1)/2r^2 at this energy
    const double cent = static_cast<double>(state.l) * (state.l + 1);
    const double disc = 1.0 - 2.0 * std::abs(e) * cent;
    if (disc <= 0.0)
        throw NumericalError("energy of " + state_label(state) +
                             " lies below the centrifugal barrier minimum");
    const double r_turn_inner = (1.0 - std::sqrt(disc)) / (2.0 * std::abs(e));
    const double r_turn_outer = (1.0 + std::sqrt(disc)) / (2.0 * std::abs(e));

    const int n_pts = grid.n_points;
    const double h = grid.h;
    if (grid.r(n_pts - 1) <= r_turn_outer)
        throw NumericalError("radial grid does not span the outer turning point of " +
                             state_label(state));

    const double cl = (2.0 * state.l + 0.5) * (2.0 * state.l + 1.5);
    std::vector<double> g(n_pts);
    for (int i = 0; i < n_pts; ++i) {
        const double x = grid.x(i);
        const double x2 = x * x;
        g[i] = cl / x2 - 8.0 - 8.0 * e * x2;
    }

    RadialWavefunction wf;
    wf.state = state;
    wf.energy_au = e;
    wf.w.assign(n_pts, 0.0);

    auto fac = [&](int i) { return 1.0 - h * h * g[i] / 12.0; };

    std::vector<double>& w = wf.w;
    w[n_pts - 1] = 1e-12;
    w[n_pts - 2] = 1e-12 * (1.0 + h * std::sqrt(std::max(g[n_pts - 1], 0.0)));

    bool inner = false;
    double min_abs = std::numeric_limits<double>::infinity();
    int min_idx = 0;
    int first = 0;

    for (int i = n_pts - 3; i >= 0; --i) {
        const double num =
            (2.0 + 5.0 * h * h * g[i + 1] / 6.0) * w[i + 1] - fac(i + 2) * w[i + 2];
        w[i] = num / fac(i);

        if (!std::isfinite(w[i])) {
            first = inner ? min_idx : i + 1;
            break;
        }
        // keep headroom so w^2 stays finite in the quadratures
        if (std::abs(w[i]) > 1e100) {
            for (int j = i; j < n_pts; ++j) w[j] *= 1e-100;
            if (inner) min_abs *= 1e-100;
        }

        // |w| is node-free below the inner turning point, so a sample-level
        // minimum marks the onset of the irregular component.
        if (grid.r(i) < r_turn_inner) {
            const double a = std::abs(w[i]);
            if (!inner || a < min_abs) {
                inner = true;
                min_abs = a;
                min_idx = i;
            } else if (min_abs == 0.0 || a > 10.0 * min_abs) {
                first = min_idx;
                break;
            }
        }
    }

    wf.first = first;
    for (int i = 0; i < first; ++i) w[i] = 0.0;

    const double nrm = norm_integral(wf, grid);
    if (!(nrm > 0.0) || !std::isfinite(nrm))
        throw NumericalError("radial normalization failed for " + state_label(state));
    const double inv = 1.0 / std::sqrt(nrm);
    for (double& v : w) v *= inv;
    return wf;
}

/// Write-once store of radial solutions on one shared grid. Values are
/// deterministic regardless of how the build is scheduled.
class RadialCache {
  public:
    RadialCache(std::vector<BasisState> states, const QuantumDefectTable& defects,
                const RadialGrid& grid, int workers = 1)
        : grid_(grid), states_(std::move(states)), wfs_(states_.size()) {
        for (std::size_t i = 0; i < states_.size(); ++i) {
            auto [it, fresh] = index_.emplace(key(states_[i].n, states_[i].l), i);
            if (!fresh) throw InternalError("duplicate state in radial cache");
        }
        parallel_for(states_.size(), workers, [&](std::size_t i) {
            wfs_[i] = integrate(states_[i], defects, grid_);
        });
    }

    const RadialGrid& grid() const { return grid_; }

    bool has(int n, int l) const { return index_.count(key(n, l)) != 0; }

    const RadialWavefunction& get(int n, int l) const {
        auto it = index_.find(key(n, l));
        if (it == index_.end())
            throw InternalError("radial cache miss for state (" + std::to_string(n) +
                                "," + std::to_string(l) + ")");
        return wfs_[it->second];
    }

    double dipole_radial(const BasisState& a, const BasisState& b) const {
        return radial_integral(get(a.n, a.l), get(b.n, b.l), grid_);
    }

  private:
    static long key(int n, int l) { return static_cast<long>(n) * 1000 + l; }

    RadialGrid grid_;
    std::vector<BasisState> states_;
    std::vector<RadialWavefunction> wfs_;
    std::unordered_map<long, std::size_t> index_;
};

} // namespace starkwp
