#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracle.hpp"
#include "starkwp/radial.hpp"

using namespace starkwp;
using Catch::Approx;

namespace {
const QuantumDefectTable kHyd = QuantumDefectTable::hydrogen();
const QuantumDefectTable kCs = QuantumDefectTable::cesium();
}

TEST_CASE("hydrogen 1s matches 2 r exp(-r) pointwise") {
    // n = 1 needs extra headroom beyond the turning point: the barrier is so
    // short that the default 2x start leaves the seed error visible at 1e-5.
    const auto grid = RadialGrid::for_basis(1, 0.01, 1e-4, 4.0);
    const auto wf = integrate({1, 0, 0}, kHyd, grid);
    double rms = 0.0;
    for (int i = 0; i < grid.n_points; ++i) {
        const double r = grid.r(i);
        const double d = u_value(wf, grid, i) - 2.0 * r * std::exp(-r);
        rms += d * d;
    }
    rms = std::sqrt(rms / grid.n_points);
    CHECK(rms < 1e-6);
}

TEST_CASE("node counts follow n - l - 1 for hydrogen") {
    const auto grid = RadialGrid::for_basis(26);
    CHECK(node_count(integrate({26, 25, 0}, kHyd, grid)) == 0);
    CHECK(node_count(integrate({26, 0, 0}, kHyd, grid)) == 25);
    CHECK(node_count(integrate({26, 12, 0}, kHyd, grid)) == 13);
}

TEST_CASE("normalization holds to 1e-8") {
    const auto grid = RadialGrid::for_basis(26);
    for (const BasisState s : {BasisState{26, 0, 0}, {26, 12, 0}, {20, 3, 0}}) {
        const auto wf = integrate(s, kHyd, grid);
        CHECK(norm_integral(wf, grid) == Approx(1.0).epsilon(1e-8));
        const auto wfc = integrate(s, kCs, grid);
        CHECK(norm_integral(wfc, grid) == Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("<1s|r|2p> reproduces the closed form") {
    const auto grid = RadialGrid::for_basis(2);
    RadialCache cache({{1, 0, 0}, {2, 1, 0}}, kHyd, grid);
    const double v = std::abs(cache.dipole_radial({1, 0, 0}, {2, 1, 0}));
    CHECK(v == Approx(oracle::hydrogen_1s2p()).epsilon(1e-4));
    CHECK(v == Approx(1.2902).margin(2e-4));
}

TEST_CASE("same-n circular dipole matches (3/2) n sqrt(n^2 - l^2)") {
    const auto grid = RadialGrid::for_basis(26);
    RadialCache cache({{26, 25, 0}, {26, 24, 0}}, kHyd, grid);
    const double v = std::abs(cache.dipole_radial({26, 25, 0}, {26, 24, 0}));
    CHECK(v == Approx(oracle::hydrogen_same_n(26, 25)).epsilon(1e-4));
}

TEST_CASE("radial integral is symmetric in its arguments") {
    const auto grid = RadialGrid::for_basis(12);
    const auto a = integrate({11, 2, 0}, kCs, grid);
    const auto b = integrate({12, 3, 0}, kCs, grid);
    CHECK(radial_integral(a, b, grid) == Approx(radial_integral(b, a, grid)).epsilon(1e-14));
}

TEST_CASE("hydrogen dipole battery against the analytic oracle, n <= 12") {
    const int n_max = 12;
    const auto grid = RadialGrid::for_basis(n_max);
    RadialCache cache(enumerate_basis(1, n_max), kHyd, grid);
    oracle::HydrogenTable table(n_max);
    int checked = 0;
    for (int n1 = 1; n1 <= n_max; ++n1)
        for (int l1 = 0; l1 < n1; ++l1)
            for (int n2 = n1; n2 <= n_max; ++n2)
                for (int l2 = 0; l2 < n2; ++l2) {
                    if (std::abs(l1 - l2) != 1) continue;
                    const double ours =
                        std::abs(cache.dipole_radial({n1, l1, 0}, {n2, l2, 0}));
                    const double ref = std::abs(table.radial_integral(n1, l1, n2, l2));
                    REQUIRE_THAT(ours, Catch::Matchers::WithinRel(ref, 1e-4));
                    ++checked;
                }
    CHECK(checked > 200);
}

TEST_CASE("oracle self-check: analytic wavefunctions are normalized") {
    oracle::HydrogenTable table(12);
    for (int n : {1, 5, 12})
        for (int l : {0, n / 2, n - 1})
            CHECK(table.norm(n, l) == Approx(1.0).epsilon(1e-8));
}

TEST_CASE("angular factors") {
    CHECK(angular_factor(0, 1) == Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
    CHECK(angular_factor(1, 1) == 0.0);
    CHECK(angular_factor(3, 0) == 0.0);
    CHECK(angular_factor(24, 25) == Approx(0.50010).margin(1e-5));
    CHECK(angular_factor(25, 24) == angular_factor(24, 25));
    CHECK_THROWS_AS(angular_factor(1, 2, 1), ConfigError);
}

TEST_CASE("radial error paths") {
    const auto small = RadialGrid::for_basis(5);
    CHECK_THROWS_AS(integrate({30, 0, 0}, kHyd, small), NumericalError);

    const auto grid = RadialGrid::for_basis(12);
    const auto a = integrate({10, 1, 0}, kHyd, grid);
    auto b = integrate({10, 2, 0}, kHyd, grid);
    b.w.resize(b.w.size() - 1);
    CHECK_THROWS_AS(radial_integral(a, b, grid), InternalError);

    RadialCache cache({{10, 1, 0}}, kHyd, grid);
    CHECK_THROWS_AS(cache.get(9, 0), InternalError);
    CHECK_THROWS_AS(RadialGrid::for_basis(0), ConfigError);
}

TEST_CASE("quantum-defect states truncate at the core, hydrogenic ones do not") {
    const auto grid = RadialGrid::for_basis(26);
    const auto p_cs = integrate({26, 1, 0}, kCs, grid);
    CHECK(p_cs.first > 0);  // irregular component stops the inward run
    CHECK(grid.r(p_cs.first) < 5.0);
    const auto circ = integrate({26, 25, 0}, kHyd, grid);
    CHECK(norm_integral(circ, grid) == Approx(1.0).epsilon(1e-8));
}

TEST_CASE("radial cache is deterministic across worker counts") {
    const auto grid = RadialGrid::for_basis(10);
    const auto states = enumerate_basis(8, 10);
    RadialCache serial(states, kCs, grid, 1);
    RadialCache parallel(states, kCs, grid, 4);
    for (const auto& s : states) {
        const auto& a = serial.get(s.n, s.l).w;
        const auto& b = parallel.get(s.n, s.l).w;
        REQUIRE(a == b);
    }
}
