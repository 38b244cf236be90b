#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <memory>
#include <string>

#include "starkwp/errors.hpp"
#include "starkwp/stark.hpp"
#include "starkwp/units.hpp"

namespace starkwp {

/// Spectral decomposition of the truncated z matrix, reused for every
/// impulse strength on the same basis.
struct ZSpectrum {
    Eigen::MatrixXd vectors;
    Eigen::VectorXd values;
};

inline ZSpectrum z_spectrum(const Eigen::MatrixXd& z) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(z);
    if (solver.info() != Eigen::Success)
        throw NumericalError("z-matrix diagonalization did not converge");
    return {solver.eigenvectors(), solver.eigenvalues()};
}

/// exp(i Q z) over the Stark eigenbasis. Built by spectral calculus on the
/// truncated z matrix, so it is exactly unitary in the subspace; Q z spans
/// several radians at the default basis size and a Taylor series would not
/// be perturbative.
struct KickOperator {
    std::shared_ptr<const StarkBasis> sb;
    double q_au = 0.0;
    Eigen::MatrixXcd m;
};

inline KickOperator build_kick(std::shared_ptr<const StarkBasis> sb,
                               const ZSpectrum& zs, double q_au) {
    if (std::abs(q_au) >= 0.1)
        throw ConfigError("impulse guardrail: |Q| must be < 0.1 a.u.");
    const Eigen::Index n = sb->size();
    if (zs.values.size() != n || zs.vectors.rows() != n)
        throw InternalError("z spectrum does not match Stark basis");

    KickOperator ko;
    ko.q_au = q_au;
    if (q_au == 0.0) {
        ko.m = Eigen::MatrixXcd::Identity(n, n);
        ko.sb = std::move(sb);
        return ko;
    }
    // M = U^T V exp(iQD) V^T U with one real product W = V^T U.
    Eigen::MatrixXd w = zs.vectors.transpose() * sb->u;
    Eigen::ArrayXd phase = q_au * zs.values.array();
    Eigen::MatrixXd re = w.transpose() * (phase.cos().matrix().asDiagonal() * w);
    Eigen::MatrixXd im = w.transpose() * (phase.sin().matrix().asDiagonal() * w);
    ko.m = re.cast<std::complex<double>>();
    ko.m.imag() = im;
    ko.sb = std::move(sb);
    return ko;
}

enum class HcpShape { Rect, HalfSine };

inline HcpShape parse_hcp_shape(const std::string& s) {
    if (s == "rect") return HcpShape::Rect;
    if (s == "halfsine") return HcpShape::HalfSine;
    throw ConfigError("unknown HCP shape: " + s);
}

/// Q = -integral of the modeled field envelope, in a.u.
inline double impulse_from_pulse(double peak_vcm, double duration_fs, HcpShape shape) {
    if (peak_vcm <= 0.0) throw ConfigError("HCP peak field must be > 0");
    if (duration_fs < 0.0) throw ConfigError("HCP duration must be >= 0");
    if (duration_fs == 0.0) return 0.0;
    const double area =
        units::vcm_to_au(peak_vcm) * units::fs_to_au(duration_fs);
    switch (shape) {
        case HcpShape::Rect: return -area;
        case HcpShape::HalfSine: return -area * 2.0 / M_PI;
    }
    throw ConfigError("unknown HCP shape");
}

} // namespace starkwp
