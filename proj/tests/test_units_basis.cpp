#include <catch2/catch_amalgamated.hpp>

#include "starkwp/basis.hpp"
#include "starkwp/units.hpp"

using namespace starkwp;
using namespace starkwp::units;
using Catch::Approx;

TEST_CASE("unit conversions match the pinned constants") {
    CHECK(convert(160.0, Unit::VoltPerCm, Unit::Au) == Approx(3.1115e-8).epsilon(1e-4));
    CHECK(convert(5.3774e-5, Unit::Au, Unit::InverseCm) == Approx(11.80).margin(0.01));
    CHECK(convert(0.0, Unit::Picosecond, Unit::Au) == 0.0);
    CHECK(convert(1.0, Unit::KiloVoltPerCm, Unit::VoltPerCm) == Approx(1000.0));
    CHECK(convert(1.0, Unit::Picosecond, Unit::Femtosecond) == Approx(1000.0));
    CHECK(convert(2.5, Unit::Au, Unit::Au) == 2.5);
}

TEST_CASE("conversions invert to 1e-12 relative") {
    const Unit all[] = {Unit::Au, Unit::VoltPerCm, Unit::KiloVoltPerCm,
                        Unit::Picosecond, Unit::Femtosecond, Unit::InverseCm};
    for (Unit a : all) {
        for (Unit b : all) {
            const Dimension da = dimension(a), db = dimension(b);
            if (da != Dimension::Any && db != Dimension::Any && da != db) continue;
            for (double v : {1e-8, 0.37, 42.0, 8.5e6}) {
                const double back = convert(convert(v, a, b), b, a);
                CHECK(back == Approx(v).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("incompatible unit pairs are rejected") {
    CHECK_THROWS_AS(convert(1.0, Unit::Picosecond, Unit::VoltPerCm), ConfigError);
    CHECK_THROWS_AS(convert(1.0, Unit::InverseCm, Unit::Femtosecond), ConfigError);
    CHECK_THROWS_AS(parse_unit("furlong"), ConfigError);
}

TEST_CASE("basis enumeration sizes and order") {
    CHECK(enumerate_basis(1, 1) == std::vector<BasisState>{{1, 0, 0}});
    CHECK(enumerate_basis(10, 40).size() == 775);
    CHECK(enumerate_basis(24, 28).size() == 130);
    CHECK(basis_size(10, 40) == 775);

    const auto b = enumerate_basis(5, 9);
    for (std::size_t i = 1; i < b.size(); ++i) {
        const bool ascending = b[i - 1].n < b[i].n ||
                               (b[i - 1].n == b[i].n && b[i - 1].l < b[i].l);
        REQUIRE(ascending);
    }
}

TEST_CASE("basis index round-trips") {
    const auto b = enumerate_basis(10, 40);
    for (std::size_t i = 0; i < b.size(); ++i)
        REQUIRE(basis_index(10, b[i]) == i);
}

TEST_CASE("invalid basis ranges are configuration errors") {
    CHECK_THROWS_AS(enumerate_basis(0, 5), ConfigError);
    CHECK_THROWS_AS(enumerate_basis(7, 3), ConfigError);
}

TEST_CASE("quantum-defect energies") {
    const auto hyd = QuantumDefectTable::hydrogen();
    CHECK(energy({1, 0, 0}, hyd) == Approx(-0.5).epsilon(1e-14));
    CHECK(energy({26, 5, 0}, hyd) == Approx(-7.39645e-4).epsilon(1e-5));

    // Splitting between adjacent effective quantum numbers around 26.
    const double de = energy({27, 0, 0}, hyd) - energy({26, 0, 0}, hyd);
    CHECK(units::au_to_cm1(de) == Approx(11.80).margin(0.01));

    const auto cs = QuantumDefectTable::cesium();
    CHECK(effective_n({26, 0, 0}, cs) == Approx(26.0 - 4.049));
    CHECK(energy({26, 4, 0}, cs) == energy({26, 4, 0}, hyd));  // defect 0 above f
}

TEST_CASE("energy rejects unphysical inputs") {
    const auto cs = QuantumDefectTable::cesium();
    CHECK_THROWS_AS(energy({3, 0, 0}, cs), ConfigError);   // n <= defect
    CHECK_THROWS_AS(energy({5, 5, 0}, cs), ConfigError);   // l >= n
    CHECK_THROWS_AS(energy({26, 1, 1}, cs), ConfigError);  // m != 0
    CHECK_THROWS_AS(QuantumDefectTable({0.5, -0.1}), ConfigError);
}

TEST_CASE("energy is monotone in n and in l for the cesium table") {
    const auto cs = QuantumDefectTable::cesium();
    for (int n = 6; n < 40; ++n)
        REQUIRE(energy({n + 1, 0, 0}, cs) > energy({n, 0, 0}, cs));
    // strictly increasing while the defect strictly decreases, equal beyond
    for (int l = 0; l < 25; ++l) {
        if (cs.defect(l + 1) < cs.defect(l))
            REQUIRE(energy({26, l + 1, 0}, cs) > energy({26, l, 0}, cs));
        else
            REQUIRE(energy({26, l + 1, 0}, cs) == energy({26, l, 0}, cs));
    }
}

TEST_CASE("effective n of an energy inverts the energy formula") {
    for (double ns : {2.951, 10.0, 26.431, 39.9}) {
        const double e = -0.5 / (ns * ns);
        CHECK(effective_n_of_energy(e) == Approx(ns).epsilon(1e-14));
    }
    CHECK_THROWS_AS(effective_n_of_energy(0.1), ConfigError);
}

TEST_CASE("cesium preset values") {
    const auto cs = QuantumDefectTable::cesium();
    CHECK(cs.defect(0) == 4.049);
    CHECK(cs.defect(1) == 3.569);
    CHECK(cs.defect(2) == 2.466);
    CHECK(cs.defect(3) == 0.0334);
    CHECK(cs.defect(4) == 0.0);
    CHECK(cs.l_cutoff() == 4);
    CHECK_FALSE(cs.is_hydrogenic());
    CHECK(QuantumDefectTable::hydrogen().is_hydrogenic());
}
