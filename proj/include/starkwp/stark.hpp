#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <numeric>
#include <vector>

#include "starkwp/basis.hpp"
#include "starkwp/errors.hpp"
#include "starkwp/radial.hpp"
#include "starkwp/units.hpp"
#include "starkwp/util.hpp"

namespace starkwp {

/// z operator in the field-free basis: z_ab = <a|r|b> <l_a 0|cos|l_b 0>.
/// Symmetric, nonzero only for |l_a - l_b| = 1.
inline Eigen::MatrixXd build_z_matrix(const std::vector<BasisState>& basis,
                                      const RadialCache& cache, int workers = 1) {
    const std::size_t n = basis.size();
    Eigen::MatrixXd z = Eigen::MatrixXd::Zero(n, n);
    parallel_for(n, workers, [&](std::size_t a) {
        for (std::size_t b = 0; b < a; ++b) {
            const double ang = angular_factor(basis[a].l, basis[b].l);
            if (ang == 0.0) continue;
            const double v = cache.dipole_radial(basis[a], basis[b]) * ang;
            z(a, b) = v;
            z(b, a) = v;
        }
    });
    return z;
}

/// H = diag(E_nl) + F z, both in a.u.
inline Eigen::MatrixXd build_hamiltonian(const std::vector<BasisState>& basis,
                                         const QuantumDefectTable& defects,
                                         double field_au, const Eigen::MatrixXd& z) {
    if (field_au < 0.0) throw ConfigError("static field must be >= 0");
    if (z.rows() != static_cast<Eigen::Index>(basis.size()) || z.rows() != z.cols())
        throw InternalError("z matrix does not match basis");
    Eigen::MatrixXd h = field_au * z;
    for (std::size_t a = 0; a < basis.size(); ++a)
        h(a, a) += energy(basis[a], defects);
    return h;
}

/// Eigen-decomposition of the Stark Hamiltonian. Columns of `u` are the
/// Stark states over the field-free basis order; energies ascend.
struct StarkBasis {
    double field_au = 0.0;
    std::vector<BasisState> basis;
    Eigen::VectorXd energies;
    Eigen::MatrixXd u;

    Eigen::Index size() const { return energies.size(); }
    double effective_n(Eigen::Index k) const {
        return effective_n_of_energy(energies[k]);
    }
};

namespace detail {

// Deterministic sign convention: largest-magnitude component positive.
inline void fix_eigenvector_signs(Eigen::MatrixXd& u) {
    for (Eigen::Index k = 0; k < u.cols(); ++k) {
        Eigen::Index imax = 0;
        double best = -1.0;
        for (Eigen::Index i = 0; i < u.rows(); ++i) {
            const double a = std::abs(u(i, k));
            if (a > best) {
                best = a;
                imax = i;
            }
        }
        if (u(imax, k) < 0.0) u.col(k) = -u.col(k);
    }
}

} // namespace detail

inline std::shared_ptr<StarkBasis> diagonalize(const Eigen::MatrixXd& h,
                                               std::vector<BasisState> basis,
                                               double field_au) {
    const Eigen::Index n = h.rows();
    if (h.cols() != n || n != static_cast<Eigen::Index>(basis.size()))
        throw InternalError("hamiltonian does not match basis");
    auto sb = std::make_shared<StarkBasis>();
    sb->field_au = field_au;
    sb->basis = std::move(basis);

    if (field_au == 0.0) {
        // Zero field: exact reduction to the field-free basis. A stable sort
        // keeps degenerate (hydrogenic) levels in basis order.
        std::vector<Eigen::Index> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](Eigen::Index a, Eigen::Index b) { return h(a, a) < h(b, b); });
        sb->energies.resize(n);
        sb->u = Eigen::MatrixXd::Zero(n, n);
        for (Eigen::Index k = 0; k < n; ++k) {
            sb->energies[k] = h(order[k], order[k]);
            sb->u(order[k], k) = 1.0;
        }
        return sb;
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
    if (solver.info() != Eigen::Success)
        throw NumericalError("Stark Hamiltonian diagonalization did not converge");
    sb->energies = solver.eigenvalues();
    sb->u = solver.eigenvectors();
    detail::fix_eigenvector_signs(sb->u);
    return sb;
}

/// Gaussian spectral envelope of the exciting pulse. `fwhm_au` is the full
/// width at half maximum of the excitation probability (amplitude enters
/// squared), centered on `center_au`.
struct ExcitationSpec {
    BasisState launch{7, 0, 0};
    double center_au = 0.0;
    double fwhm_au = 0.0;

    double amplitude(double e_au) const {
        const double t = (e_au - center_au) / fwhm_au;
        return std::exp(-2.0 * M_LN2 * t * t);
    }
};

/// Complex amplitudes over the Stark eigenbasis at t = 0.
struct WavePacket {
    std::shared_ptr<const StarkBasis> sb;
    Eigen::VectorXcd c;

    Eigen::VectorXd populations() const { return c.cwiseAbs2(); }
};

/// c_k ~ <k|z|launch> g(w_k), normalized. The launch state lives below the
/// basis window and enters only through its dipole overlap.
inline WavePacket excitation_amplitudes(std::shared_ptr<const StarkBasis> sb,
                                        const ExcitationSpec& spec,
                                        const QuantumDefectTable& defects,
                                        const RadialCache& cache) {
    validate_state(spec.launch);
    if (spec.fwhm_au <= 0.0) throw ConfigError("spectral width must be > 0");
    if (spec.launch.n >= sb->basis.front().n)
        throw ConfigError("launch state must lie below the basis window");

    const Eigen::Index n = sb->size();
    Eigen::VectorXd dip = Eigen::VectorXd::Zero(n);
    for (Eigen::Index a = 0; a < n; ++a) {
        const double ang = angular_factor(spec.launch.l, sb->basis[a].l);
        if (ang != 0.0)
            dip[a] = cache.dipole_radial(spec.launch, sb->basis[a]) * ang;
    }
    Eigen::VectorXd v = sb->u.transpose() * dip;
    for (Eigen::Index k = 0; k < n; ++k) v[k] *= spec.amplitude(sb->energies[k]);

    if (v.cwiseAbs().maxCoeff() < 1e-15)
        throw ConfigError("spectral envelope excludes all basis states");
    v /= v.norm();
    WavePacket wp;
    wp.sb = std::move(sb);
    wp.c = v.cast<std::complex<double>>();
    return wp;
}

/// Field-free amplitudes of a Stark-basis amplitude vector.
inline Eigen::VectorXcd to_field_free(const StarkBasis& sb, const Eigen::VectorXcd& c) {
    return sb.u * c;
}

/// Population per angular momentum l of a field-free amplitude vector.
inline Eigen::VectorXd l_populations(const std::vector<BasisState>& basis,
                                     const Eigen::VectorXcd& free_amps) {
    int lmax = 0;
    for (const auto& s : basis) lmax = std::max(lmax, s.l);
    Eigen::VectorXd p = Eigen::VectorXd::Zero(lmax + 1);
    for (std::size_t a = 0; a < basis.size(); ++a)
        p[basis[a].l] += std::norm(free_amps[static_cast<Eigen::Index>(a)]);
    return p;
}

struct StarkMapPoint {
    double f_vcm = 0.0;
    double energy_cm1 = 0.0;
    double probability = 0.0;
};

/// Level diagram with per-level excitation probability, one diagonalization
/// per field value. Levels are labeled by sorted index only.
inline std::vector<StarkMapPoint> stark_map(const std::vector<BasisState>& basis,
                                            const QuantumDefectTable& defects,
                                            const RadialCache& cache,
                                            const Eigen::MatrixXd& z,
                                            const std::vector<double>& fields_vcm,
                                            const ExcitationSpec& spec,
                                            int workers = 1) {
    const Eigen::Index n = static_cast<Eigen::Index>(basis.size());
    std::vector<StarkMapPoint> out(fields_vcm.size() * basis.size());
    parallel_for(fields_vcm.size(), workers, [&](std::size_t fi) {
        const double f_vcm = fields_vcm[fi];
        const double f_au = units::vcm_to_au(f_vcm);
        auto sb = diagonalize(build_hamiltonian(basis, defects, f_au, z), basis, f_au);
        WavePacket wp = excitation_amplitudes(sb, spec, defects, cache);
        for (Eigen::Index k = 0; k < n; ++k) {
            StarkMapPoint& pt = out[fi * basis.size() + k];
            pt.f_vcm = f_vcm;
            pt.energy_cm1 = units::au_to_cm1(sb->energies[k]);
            pt.probability = std::norm(wp.c[k]);
        }
    });
    return out;
}

} // namespace starkwp
