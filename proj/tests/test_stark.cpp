#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracle.hpp"
#include "starkwp/stark.hpp"
#include "starkwp/units.hpp"

using namespace starkwp;
using Catch::Approx;

namespace {

const QuantumDefectTable kHyd = QuantumDefectTable::hydrogen();
const QuantumDefectTable kCs = QuantumDefectTable::cesium();

struct Fixture {
    std::vector<BasisState> basis;
    RadialGrid grid;
    RadialCache cache;
    Eigen::MatrixXd z;

    Fixture(int n_min, int n_max, const QuantumDefectTable& defects,
            std::vector<BasisState> extra = {})
        : basis(enumerate_basis(n_min, n_max)),
          grid(RadialGrid::for_basis(n_max)),
          cache(
              [&] {
                  auto states = basis;
                  for (const auto& s : extra) states.push_back(s);
                  return states;
              }(),
              defects, grid),
          z(build_z_matrix(basis, cache)) {}
};

} // namespace

TEST_CASE("zero field: Hamiltonian is diagonal and reduces to the field-free basis") {
    Fixture fx(5, 8, kCs);
    const auto h = build_hamiltonian(fx.basis, kCs, 0.0, fx.z);
    for (Eigen::Index a = 0; a < h.rows(); ++a)
        for (Eigen::Index b = 0; b < h.cols(); ++b)
            if (a != b) REQUIRE(h(a, b) == 0.0);

    const auto sb = diagonalize(h, fx.basis, 0.0);
    for (Eigen::Index k = 1; k < sb->size(); ++k)
        REQUIRE(sb->energies[k] >= sb->energies[k - 1]);
    // permutation-signed identity: exactly one unit entry per column
    for (Eigen::Index k = 0; k < sb->size(); ++k) {
        int ones = 0;
        for (Eigen::Index a = 0; a < sb->size(); ++a) {
            if (sb->u(a, k) == 1.0) ++ones;
            else REQUIRE(sb->u(a, k) == 0.0);
        }
        REQUIRE(ones == 1);
    }
}

TEST_CASE("z matrix is symmetric and sparse in l") {
    Fixture fx(8, 11, kCs);
    CHECK((fx.z - fx.z.transpose()).cwiseAbs().maxCoeff() < 1e-10);
    for (std::size_t a = 0; a < fx.basis.size(); ++a)
        for (std::size_t b = 0; b < fx.basis.size(); ++b)
            if (std::abs(fx.basis[a].l - fx.basis[b].l) != 1)
                REQUIRE(fx.z(a, b) == 0.0);
}

TEST_CASE("hydrogen n=2 block shows the linear Stark pair -1/8 +- 3F") {
    Fixture fx(2, 2, kHyd);
    CHECK(std::abs(fx.z(0, 1)) == Approx(3.0).epsilon(1e-5));
    const double f = 1e-6;
    const auto sb = diagonalize(build_hamiltonian(fx.basis, kHyd, f, fx.z), fx.basis, f);
    CHECK(sb->energies[0] == Approx(-0.125 - 3.0 * f).epsilon(1e-7));
    CHECK(sb->energies[1] == Approx(-0.125 + 3.0 * f).epsilon(1e-7));
}

TEST_CASE("hydrogen n=10 manifold fans out as (3/2) n k F") {
    Fixture fx(10, 10, kHyd);
    const double f_au = units::vcm_to_au(10.0);
    const auto sb =
        diagonalize(build_hamiltonian(fx.basis, kHyd, f_au, fx.z), fx.basis, f_au);
    auto ks = oracle::stark_fan_k(10);
    std::sort(ks.begin(), ks.end());
    REQUIRE(sb->size() == static_cast<Eigen::Index>(ks.size()));
    for (Eigen::Index i = 0; i < sb->size(); ++i) {
        const double shift = sb->energies[i] - (-1.0 / 200.0);
        const double expected = 1.5 * 10.0 * ks[i] * f_au;
        REQUIRE_THAT(shift, Catch::Matchers::WithinRel(expected, 1e-3));
    }
}

TEST_CASE("manifold width grows linearly with field") {
    Fixture fx(10, 10, kHyd);
    auto width = [&](double f_vcm) {
        const double f = units::vcm_to_au(f_vcm);
        const auto sb =
            diagonalize(build_hamiltonian(fx.basis, kHyd, f, fx.z), fx.basis, f);
        return sb->energies[sb->size() - 1] - sb->energies[0];
    };
    CHECK(width(20.0) / width(10.0) == Approx(2.0).epsilon(0.01));
}

TEST_CASE("eigendecomposition invariants") {
    Fixture fx(12, 16, kCs);
    const double f_au = units::vcm_to_au(160.0);
    const auto h = build_hamiltonian(fx.basis, kCs, f_au, fx.z);
    const auto sb = diagonalize(h, fx.basis, f_au);
    const Eigen::Index n = sb->size();

    const double ortho =
        (sb->u.transpose() * sb->u - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
    CHECK(ortho < 1e-10);

    const double resid = (h * sb->u - sb->u * sb->energies.asDiagonal()).norm() / h.norm();
    CHECK(resid < 1e-10);

    // deterministic sign convention
    for (Eigen::Index k = 0; k < n; ++k) {
        Eigen::Index imax = 0;
        sb->u.col(k).cwiseAbs().maxCoeff(&imax);
        REQUIRE(sb->u(imax, k) > 0.0);
    }
}

TEST_CASE("Hellmann-Feynman: d(energy)/dF equals <k|z|k> for an isolated level") {
    Fixture fx(4, 8, kHyd);
    const double f_au = units::vcm_to_au(5.0);
    const double df = units::vcm_to_au(0.05);
    auto top_energy = [&](double f) {
        const auto sb =
            diagonalize(build_hamiltonian(fx.basis, kHyd, f, fx.z), fx.basis, f);
        return sb->energies[sb->size() - 1];
    };
    const double slope = (top_energy(f_au + df) - top_energy(f_au - df)) / (2.0 * df);

    const auto sb =
        diagonalize(build_hamiltonian(fx.basis, kHyd, f_au, fx.z), fx.basis, f_au);
    const Eigen::VectorXd topvec = sb->u.col(sb->size() - 1);
    const double zkk = topvec.dot(fx.z * topvec);
    CHECK_THAT(slope, Catch::Matchers::WithinRel(zkk, 1e-3));
}

TEST_CASE("1x1 Hamiltonian is its own Stark basis") {
    std::vector<BasisState> basis{{1, 0, 0}};
    Eigen::MatrixXd h(1, 1);
    h(0, 0) = -0.5;
    const auto sb = diagonalize(h, basis, 0.0);
    CHECK(sb->energies[0] == -0.5);
    CHECK(sb->u(0, 0) == 1.0);
}

TEST_CASE("excitation from 7s populates only p states at zero field") {
    Fixture fx(20, 32, kCs, {{7, 0, 0}});
    const auto sb = diagonalize(build_hamiltonian(fx.basis, kCs, 0.0, fx.z), fx.basis, 0.0);
    ExcitationSpec spec{{7, 0, 0}, -0.5 / (26.0 * 26.0), 1.4e-4};
    const WavePacket wp = excitation_amplitudes(sb, spec, kCs, fx.cache);

    CHECK(wp.c.norm() == Approx(1.0).epsilon(1e-12));
    const Eigen::VectorXd pl = l_populations(fx.basis, to_field_free(*sb, wp.c));
    CHECK(pl[1] == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("default envelope keeps the packet inside 23 <= n* <= 29") {
    Fixture fx(15, 36, kCs, {{7, 0, 0}});
    const double f_au = units::vcm_to_au(160.0);
    const auto sb = diagonalize(build_hamiltonian(fx.basis, kCs, f_au, fx.z), fx.basis, f_au);
    ExcitationSpec spec;
    spec.center_au = -0.5 * (1.0 / 625.0 + 1.0 / 729.0) / 2.0;
    spec.fwhm_au = 1.4e-4;
    const WavePacket wp = excitation_amplitudes(sb, spec, kCs, fx.cache);

    double inside = 0.0, total = 0.0;
    for (Eigen::Index k = 0; k < sb->size(); ++k) {
        const double pop = std::norm(wp.c[k]);
        const double ns = sb->effective_n(k);
        total += pop;
        if (ns >= 23.0 && ns <= 29.0) inside += pop;
    }
    CHECK(total == Approx(1.0).epsilon(1e-9));
    CHECK(inside >= 0.99);
}

TEST_CASE("packet is p-dominated immediately after excitation at 160 V/cm") {
    Fixture fx(15, 36, kCs, {{7, 0, 0}});
    const double f_au = units::vcm_to_au(160.0);
    const auto sb = diagonalize(build_hamiltonian(fx.basis, kCs, f_au, fx.z), fx.basis, f_au);
    ExcitationSpec spec;
    spec.center_au = -0.5 * (1.0 / 625.0 + 1.0 / 729.0) / 2.0;
    spec.fwhm_au = 1.4e-4;
    const WavePacket wp = excitation_amplitudes(sb, spec, kCs, fx.cache);
    const Eigen::VectorXd pl = l_populations(fx.basis, to_field_free(*sb, wp.c));
    CHECK(pl[1] >= 0.85);
    for (Eigen::Index l = 0; l < pl.size(); ++l)
        if (l != 1) REQUIRE(pl[l] < pl[1] / 5.0);
}

TEST_CASE("excitation error paths") {
    Fixture fx(20, 24, kCs, {{7, 0, 0}});
    const auto sb = diagonalize(build_hamiltonian(fx.basis, kCs, 0.0, fx.z), fx.basis, 0.0);

    ExcitationSpec far{{7, 0, 0}, -0.5, 1e-6};  // envelope far below the window
    CHECK_THROWS_AS(excitation_amplitudes(sb, far, kCs, fx.cache), ConfigError);

    ExcitationSpec bad_width{{7, 0, 0}, -4e-4, 0.0};
    CHECK_THROWS_AS(excitation_amplitudes(sb, bad_width, kCs, fx.cache), ConfigError);

    ExcitationSpec high_launch{{21, 0, 0}, -4e-4, 1e-4};
    CHECK_THROWS_AS(excitation_amplitudes(sb, high_launch, kCs, fx.cache), ConfigError);
}

TEST_CASE("stark map emits one probability-weighted level list per field") {
    Fixture fx(10, 12, kCs, {{7, 0, 0}});
    ExcitationSpec spec{{7, 0, 0}, energy({11, 1, 0}, kCs), 2e-3};
    const auto rows = stark_map(fx.basis, kCs, fx.cache, fx.z, {0.0, 100.0, 200.0}, spec);
    REQUIRE(rows.size() == 3 * fx.basis.size());
    for (int b = 0; b < 3; ++b) {
        double psum = 0.0;
        for (std::size_t k = 0; k < fx.basis.size(); ++k) {
            const auto& pt = rows[b * fx.basis.size() + k];
            psum += pt.probability;
            if (k > 0) REQUIRE(pt.energy_cm1 >= rows[b * fx.basis.size() + k - 1].energy_cm1);
        }
        CHECK(psum == Approx(1.0).epsilon(1e-9));
    }
}
