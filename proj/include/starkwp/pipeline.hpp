#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <vector>

#include "starkwp/config.hpp"
#include "starkwp/dynamics.hpp"
#include "starkwp/kick.hpp"
#include "starkwp/radial.hpp"
#include "starkwp/stark.hpp"

namespace starkwp {

/// Shared state of one simulation run: basis, radial solutions, z matrix,
/// and lazily built field-dependent pieces. Everything here is immutable
/// once constructed except the lazy caches.
struct SimContext {
    RunConfig cfg;
    QuantumDefectTable defects;
    std::vector<BasisState> basis;
    RadialGrid grid;
    std::shared_ptr<RadialCache> cache;
    Eigen::MatrixXd z;

    std::shared_ptr<StarkBasis> sb;      // for cfg.f_vcm
    std::optional<WavePacket> wp;
    std::optional<ZSpectrum> zs;
    std::optional<KickOperator> ko;

    ExcitationSpec excitation() const {
        return {{cfg.launch_n, cfg.launch_l, 0}, cfg.exc_center_au, cfg.exc_fwhm_au};
    }
};

inline SimContext make_context(RunConfig cfg) {
    cfg.resolve();
    SimContext ctx;
    ctx.cfg = cfg;
    ctx.defects = cfg.defect_table();
    ctx.basis = enumerate_basis(cfg.n_min, cfg.n_max);
    ctx.grid = RadialGrid::for_basis(cfg.n_max, cfg.grid_h, cfg.r_inner_au,
                                     cfg.turning_multiple);
    std::vector<BasisState> states = ctx.basis;
    const BasisState launch{cfg.launch_n, cfg.launch_l, 0};
    validate_state(launch);
    if (launch.n >= cfg.n_min)
        throw ConfigError("launch state must lie below the basis window");
    states.push_back(launch);
    ctx.cache = std::make_shared<RadialCache>(states, ctx.defects, ctx.grid,
                                              cfg.workers);
    ctx.z = build_z_matrix(ctx.basis, *ctx.cache, cfg.workers);
    return ctx;
}

inline const std::shared_ptr<StarkBasis>& ensure_stark(SimContext& ctx) {
    if (!ctx.sb) {
        const double f_au = units::vcm_to_au(ctx.cfg.f_vcm);
        ctx.sb = diagonalize(build_hamiltonian(ctx.basis, ctx.defects, f_au, ctx.z),
                             ctx.basis, f_au);
    }
    return ctx.sb;
}

inline const WavePacket& ensure_packet(SimContext& ctx) {
    if (!ctx.wp)
        ctx.wp = excitation_amplitudes(ensure_stark(ctx), ctx.excitation(),
                                       ctx.defects, *ctx.cache);
    return *ctx.wp;
}

inline const ZSpectrum& ensure_zspec(SimContext& ctx) {
    if (!ctx.zs) ctx.zs = z_spectrum(ctx.z);
    return *ctx.zs;
}

inline const KickOperator& ensure_kick(SimContext& ctx) {
    if (!ctx.ko)
        ctx.ko = build_kick(ensure_stark(ctx), ensure_zspec(ctx), ctx.cfg.q_au);
    return *ctx.ko;
}

/// Resolve the SSFI bin range from the populated packet (padded by 3 in
/// effective quantum number on both sides) unless the config pins it. The
/// resolved numbers are written back so output headers reproduce the run.
inline SsfiBins resolve_bins(SimContext& ctx) {
    const WavePacket& wp = ensure_packet(ctx);
    if (std::isnan(ctx.cfg.fi_min_vcm) || std::isnan(ctx.cfg.fi_max_vcm)) {
        double ns_lo = 1e9, ns_hi = 0.0;
        const Eigen::VectorXd pops = wp.populations();
        for (Eigen::Index k = 0; k < wp.sb->size(); ++k) {
            if (pops[k] < 1e-9) continue;
            const double ns = wp.sb->effective_n(k);
            ns_lo = std::min(ns_lo, ns);
            ns_hi = std::max(ns_hi, ns);
        }
        ns_lo = std::max(2.0, ns_lo - 3.0);
        ns_hi = ns_hi + 3.0;
        ctx.cfg.fi_min_vcm = ionization_field_vcm(-0.5 / (ns_hi * ns_hi));
        ctx.cfg.fi_max_vcm = ionization_field_vcm(-0.5 / (ns_lo * ns_lo));
    }
    SsfiBins bins;
    bins.count = ctx.cfg.bins;
    bins.fi_min_vcm = ctx.cfg.fi_min_vcm;
    bins.fi_max_vcm = ctx.cfg.fi_max_vcm;
    bins.smear_bins = ctx.cfg.smear_bins;
    bins.validate();
    return bins;
}

inline Carpet run_carpet(SimContext& ctx) {
    const SsfiBins bins = resolve_bins(ctx);
    const KickOperator& ko = ensure_kick(ctx);
    Carpet c = carpet(ensure_packet(ctx), ko,
                      delay_grid_ps(ctx.cfg.t_max_ps, ctx.cfg.dt_ps), bins,
                      ctx.cfg.workers);
    c.f_vcm = ctx.cfg.f_vcm;
    c.q_au = ctx.cfg.q_au;
    c.n_min = ctx.cfg.n_min;
    c.n_max = ctx.cfg.n_max;
    c.config_text = ctx.cfg.serialize();
    c.config_fnv = fnv1a64(c.config_text);
    return c;
}

inline LComposition run_lcomp(SimContext& ctx) {
    std::optional<ManifoldFilter> filter;
    if (!std::isnan(ctx.cfg.nstar_center))
        filter = ManifoldFilter{ctx.cfg.nstar_center, ctx.cfg.nstar_halfwidth};
    return l_composition(ensure_packet(ctx),
                         delay_grid_ps(ctx.cfg.t_max_ps, ctx.cfg.dt_ps), ctx.defects,
                         filter, ctx.cfg.workers);
}

inline std::vector<StarkMapPoint> run_starkmap(SimContext& ctx, double f_min_vcm,
                                               double f_max_vcm, int steps) {
    if (steps < 1 || f_min_vcm < 0.0 || f_max_vcm < f_min_vcm)
        throw ConfigError("invalid stark map field grid");
    std::vector<double> fields(steps);
    for (int i = 0; i < steps; ++i)
        fields[i] = steps == 1 ? f_min_vcm
                               : f_min_vcm + (f_max_vcm - f_min_vcm) * i / (steps - 1);
    return stark_map(ctx.basis, ctx.defects, *ctx.cache, ctx.z, fields,
                     ctx.excitation(), ctx.cfg.workers);
}

} // namespace starkwp
