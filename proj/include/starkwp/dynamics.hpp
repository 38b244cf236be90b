#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "starkwp/errors.hpp"
#include "starkwp/kick.hpp"
#include "starkwp/stark.hpp"
#include "starkwp/units.hpp"
#include "starkwp/util.hpp"

namespace starkwp {

/// Free evolution: phases only, populations untouched.
inline Eigen::VectorXcd free_phases(const StarkBasis& sb, double t_ps) {
    const double t_au = units::ps_to_au(t_ps);
    Eigen::VectorXcd ph(sb.size());
    for (Eigen::Index k = 0; k < sb.size(); ++k)
        ph[k] = std::polar(1.0, -sb.energies[k] * t_au);
    return ph;
}

inline WavePacket free_evolve(const WavePacket& wp, double t_ps) {
    WavePacket out;
    out.sb = wp.sb;
    out.c = wp.c.cwiseProduct(free_phases(*wp.sb, t_ps));
    return out;
}

/// Evolve freely to the HCP delay, then apply the impulse operator. The
/// populations after the kick are what SSFI detects; the later free flight
/// to the ramp only adds phases.
inline WavePacket evolve_and_kick(const WavePacket& wp, const KickOperator& ko,
                                  double t_delay_ps) {
    if (wp.sb.get() != ko.sb.get())
        throw InternalError("wave packet and kick operator use different Stark bases");
    WavePacket out;
    out.sb = wp.sb;
    out.c = ko.m * wp.c.cwiseProduct(free_phases(*wp.sb, t_delay_ps));
    return out;
}

/// Uniform SSFI bins over expected ionization field F_i = E^2/4 (V/cm).
struct SsfiBins {
    int count = 64;
    double fi_min_vcm = 0.0;
    double fi_max_vcm = 0.0;
    double smear_bins = 1.0;

    double width() const { return (fi_max_vcm - fi_min_vcm) / count; }
    double center(int i) const { return fi_min_vcm + width() * (i + 0.5); }

    void validate() const {
        if (count < 1 || !(fi_max_vcm > fi_min_vcm) || fi_min_vcm < 0.0)
            throw ConfigError("invalid SSFI bin specification");
    }
};

inline double ionization_field_vcm(double energy_au) {
    return units::au_to_vcm(energy_au * energy_au / 4.0);
}

/// Per-eigenstate deposit weights into the SSFI bins, built once per
/// (basis, bins) pair. Gaussian smearing of sigma = smear_bins emulates
/// detector resolution; the kernel is renormalized where it is clipped at
/// the range ends so in-range states never lose mass.
class SsfiProjector {
  public:
    SsfiProjector(const StarkBasis& sb, const SsfiBins& bins) : bins_(bins) {
        bins_.validate();
        deposits_.resize(sb.size());
        const double w = bins_.width();
        const double sigma = bins_.smear_bins;
        for (Eigen::Index k = 0; k < sb.size(); ++k) {
            Deposit& d = deposits_[k];
            const double fi = ionization_field_vcm(sb.energies[k]);
            const double p = (fi - bins_.fi_min_vcm) / w;
            if (p < 0.0 || p >= bins_.count) {
                d.out_of_range = true;
                continue;
            }
            if (sigma <= 0.0) {
                d.start = static_cast<int>(p);
                d.weights = {1.0};
                continue;
            }
            const int lo = std::max(0, static_cast<int>(std::floor(p - 4.0 * sigma)));
            const int hi =
                std::min(bins_.count - 1, static_cast<int>(std::ceil(p + 4.0 * sigma)));
            d.start = lo;
            d.weights.resize(hi - lo + 1);
            double sum = 0.0;
            for (int j = lo; j <= hi; ++j) {
                const double t = (j + 0.5 - p) / sigma;
                sum += d.weights[j - lo] = std::exp(-0.5 * t * t);
            }
            for (double& v : d.weights) v /= sum;
        }
    }

    const SsfiBins& bins() const { return bins_; }

    /// Deposits |c_k|^2 into `row` (size count, caller-zeroed); population of
    /// states outside the bin range accumulates into `out_of_range`.
    void project(const Eigen::VectorXd& populations, double* row,
                 double& out_of_range) const {
        for (std::size_t k = 0; k < deposits_.size(); ++k) {
            const double pop = populations[static_cast<Eigen::Index>(k)];
            const Deposit& d = deposits_[k];
            if (d.out_of_range) {
                out_of_range += pop;
                continue;
            }
            for (std::size_t j = 0; j < d.weights.size(); ++j)
                row[d.start + j] += pop * d.weights[j];
        }
    }

  private:
    struct Deposit {
        int start = 0;
        bool out_of_range = false;
        std::vector<double> weights;
    };

    SsfiBins bins_;
    std::vector<Deposit> deposits_;
};

/// Simulated SSFI signal over (HCP delay, ionization-field bin).
struct Carpet {
    std::vector<double> delays_ps;
    SsfiBins bins;
    std::vector<double> bin_centers_vcm;
    Eigen::MatrixXd signal;             // rows = delays, cols = bins
    std::vector<double> out_of_range;   // per-row population outside bins
    double max_row_sum_error = 0.0;

    // run metadata, filled by the pipeline for file headers
    double f_vcm = 0.0;
    double q_au = 0.0;
    int n_min = 0, n_max = 0;
    std::string config_text;
    std::uint64_t config_fnv = 0;
};

inline std::vector<double> delay_grid_ps(double t_max_ps, double dt_ps) {
    if (!(t_max_ps > 0.0) || !(dt_ps > 0.0))
        throw ConfigError("invalid delay grid");
    const int n = static_cast<int>(std::ceil(t_max_ps / dt_ps - 1e-9));
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = i * dt_ps;
    return out;
}

/// Mean effective quantum number of the packet (population-weighted).
inline double packet_nstar(const WavePacket& wp) {
    const Eigen::VectorXd pops = wp.populations();
    const double mean_e = pops.dot(wp.sb->energies);
    return effective_n_of_energy(mean_e);
}

/// Delay sweep. Rows are independent given immutable inputs; the worker
/// count never changes the result bytes.
inline Carpet carpet(const WavePacket& wp0, const KickOperator& ko,
                     const std::vector<double>& delays_ps, const SsfiBins& bins,
                     int workers = 1) {
    if (wp0.sb.get() != ko.sb.get())
        throw InternalError("wave packet and kick operator use different Stark bases");
    if (delays_ps.empty()) throw ConfigError("empty delay grid");

    if (ko.q_au == 0.0)
        warn("zero impulse: carpet will be delay-independent");
    const double tau_kepler_ps =
        units::au_to_ps(2.0 * M_PI * std::pow(packet_nstar(wp0), 3));
    if (delays_ps.size() > 1) {
        const double dt = delays_ps[1] - delays_ps[0];
        if (dt > tau_kepler_ps / 10.0)
            warn("delay step " + format_double(dt) +
                 " ps under-resolves the Kepler beat (" +
                 format_double(tau_kepler_ps) + " ps)");
    }

    SsfiProjector proj(*wp0.sb, bins);
    Carpet c;
    c.delays_ps = delays_ps;
    c.bins = proj.bins();
    c.bin_centers_vcm.resize(bins.count);
    for (int i = 0; i < bins.count; ++i) c.bin_centers_vcm[i] = proj.bins().center(i);
    c.signal = Eigen::MatrixXd::Zero(delays_ps.size(), bins.count);
    c.out_of_range.assign(delays_ps.size(), 0.0);

    std::vector<double> row_err(delays_ps.size(), 0.0);
    parallel_for(delays_ps.size(), workers, [&](std::size_t i) {
        const WavePacket kicked = evolve_and_kick(wp0, ko, delays_ps[i]);
        const Eigen::VectorXd pops = kicked.populations();
        std::vector<double> row(bins.count, 0.0);
        proj.project(pops, row.data(), c.out_of_range[i]);
        for (int j = 0; j < bins.count; ++j) c.signal(i, j) = row[j];
        row_err[i] = std::abs(c.signal.row(i).sum() + c.out_of_range[i] - 1.0);
    });
    c.max_row_sum_error = *std::max_element(row_err.begin(), row_err.end());
    if (c.max_row_sum_error > 1e-9)
        warn("carpet row sum deviates from 1 by " + format_double(c.max_row_sum_error));
    const double oor = *std::max_element(c.out_of_range.begin(), c.out_of_range.end());
    if (oor > 1e-9)
        warn("population outside the SSFI bin range (max " + format_double(oor) + ")");
    return c;
}

struct Lineout {
    int bin = 0;
    double bin_center_vcm = 0.0;
    std::vector<double> delays_ps;
    std::vector<double> values;
};

/// One carpet column: signal in the bin containing `fi_vcm` versus delay.
inline Lineout lineout(const Carpet& c, double fi_vcm) {
    const double w = c.bins.width();
    const int bin = static_cast<int>(std::floor((fi_vcm - c.bins.fi_min_vcm) / w));
    if (bin < 0 || bin >= c.bins.count)
        throw ConfigError("requested F_i is outside the carpet bin range");
    Lineout out;
    out.bin = bin;
    out.bin_center_vcm = c.bins.center(bin);
    out.delays_ps = c.delays_ps;
    out.values.resize(c.delays_ps.size());
    for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] = c.signal(i, bin);
    return out;
}

/// Restrict the l-decomposition to field-free states near one manifold.
struct ManifoldFilter {
    double nstar_center = 0.0;
    double halfwidth = 0.5;
};

/// Population per angular momentum versus time (no kick), normalized within
/// the filtered subspace at every time step.
struct LComposition {
    std::vector<double> times_ps;
    Eigen::MatrixXd p;  // rows = times, cols = l
};

inline LComposition l_composition(const WavePacket& wp0,
                                  const std::vector<double>& times_ps,
                                  const QuantumDefectTable& defects,
                                  std::optional<ManifoldFilter> filter = {},
                                  int workers = 1) {
    if (times_ps.empty()) throw ConfigError("empty time grid");
    const StarkBasis& sb = *wp0.sb;
    const std::size_t n = sb.basis.size();
    int lmax = 0;
    std::vector<char> mask(n, 1);
    for (std::size_t a = 0; a < n; ++a) {
        lmax = std::max(lmax, sb.basis[a].l);
        if (filter) {
            const double ns = starkwp::effective_n(sb.basis[a], defects);
            mask[a] = std::abs(ns - filter->nstar_center) <= filter->halfwidth;
        }
    }

    LComposition lc;
    lc.times_ps = times_ps;
    lc.p = Eigen::MatrixXd::Zero(times_ps.size(), lmax + 1);
    std::vector<char> empty_row(times_ps.size(), 0);
    parallel_for(times_ps.size(), workers, [&](std::size_t i) {
        const Eigen::VectorXcd amps =
            to_field_free(sb, wp0.c.cwiseProduct(free_phases(sb, times_ps[i])));
        double total = 0.0;
        for (std::size_t a = 0; a < n; ++a) {
            if (!mask[a]) continue;
            const double pop = std::norm(amps[static_cast<Eigen::Index>(a)]);
            lc.p(i, sb.basis[a].l) += pop;
            total += pop;
        }
        if (total < 1e-12)
            empty_row[i] = 1;
        else
            lc.p.row(i) /= total;
    });
    if (std::find(empty_row.begin(), empty_row.end(), 1) != empty_row.end())
        throw ConfigError("manifold filter covers no population");
    return lc;
}

} // namespace starkwp
