// starkwp — Rydberg Stark wave packets probed by a weak half-cycle pulse:
// Stark maps, SSFI quantum carpets, line-outs, beat spectra and
// characteristic revival times, from one reproducible config.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "starkwp/analysis.hpp"
#include "starkwp/config.hpp"
#include "starkwp/dynamics.hpp"
#include "starkwp/io.hpp"
#include "starkwp/pipeline.hpp"

namespace sw = starkwp;

namespace {

struct Overrides {
    std::optional<std::string> config_path;
    std::optional<int> n_min, n_max;
    std::optional<std::string> preset;
    std::optional<double> field_vcm, q_au, hcp_peak_kvcm, hcp_fs;
    std::optional<std::string> hcp_shape;
    std::optional<double> t_max_ps, dt_ps;
    std::optional<int> bins;
    std::optional<double> smear_bins, fi_min_vcm, fi_max_vcm;
    std::optional<double> exc_center_au, exc_fwhm_au;
    std::optional<double> nstar_center, nstar_halfwidth;
    std::optional<int> workers;
    bool deterministic = false;

    sw::RunConfig build() const {
        sw::RunConfig cfg;
        if (config_path) cfg = sw::parse_config_file(*config_path);
        if (n_min) cfg.n_min = *n_min;
        if (n_max) cfg.n_max = *n_max;
        if (preset) cfg.preset = *preset;
        if (field_vcm) cfg.f_vcm = *field_vcm;
        if (q_au) cfg.q_au = *q_au;
        if (hcp_peak_kvcm) cfg.hcp_peak_kvcm = *hcp_peak_kvcm;
        if (hcp_fs) cfg.hcp_fs = *hcp_fs;
        if (hcp_shape) cfg.hcp_shape = *hcp_shape;
        if (t_max_ps) cfg.t_max_ps = *t_max_ps;
        if (dt_ps) cfg.dt_ps = *dt_ps;
        if (bins) cfg.bins = *bins;
        if (smear_bins) cfg.smear_bins = *smear_bins;
        if (fi_min_vcm) cfg.fi_min_vcm = *fi_min_vcm;
        if (fi_max_vcm) cfg.fi_max_vcm = *fi_max_vcm;
        if (exc_center_au) cfg.exc_center_au = *exc_center_au;
        if (exc_fwhm_au) cfg.exc_fwhm_au = *exc_fwhm_au;
        if (nstar_center) cfg.nstar_center = *nstar_center;
        if (nstar_halfwidth) cfg.nstar_halfwidth = *nstar_halfwidth;
        if (workers) cfg.workers = *workers;
        if (deterministic) cfg.deterministic = true;
        return cfg;
    }
};

void add_common(CLI::App* sub, Overrides& o) {
    sub->add_option("--config", o.config_path, "config file (flags override it)");
    sub->add_option("--n-min", o.n_min, "lowest principal quantum number");
    sub->add_option("--n-max", o.n_max, "highest principal quantum number");
    sub->add_option("--preset", o.preset, "quantum-defect preset (cesium, hydrogen)");
    sub->add_option("--exc-center-au", o.exc_center_au, "excitation center energy (a.u.)");
    sub->add_option("--exc-fwhm-au", o.exc_fwhm_au, "excitation intensity FWHM (a.u.)");
    sub->add_option("--workers", o.workers,
                    "worker threads (never changes output bytes)");
    sub->add_flag("--deterministic", o.deterministic,
                  "omit timestamps from output headers");
}

void add_hcp(CLI::App* sub, Overrides& o) {
    sub->add_option("--q-au", o.q_au, "impulse Q (a.u.)");
    sub->add_option("--hcp-peak-kvcm", o.hcp_peak_kvcm, "HCP peak field (kV/cm)");
    sub->add_option("--hcp-fs", o.hcp_fs, "HCP duration (fs)");
    sub->add_option("--hcp-shape", o.hcp_shape, "HCP envelope: rect, halfsine");
}

std::ofstream open_output(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw sw::ConfigError("cannot write: " + path);
    return f;
}

void write_carpet_csv(const std::string& path, const sw::Carpet& c,
                      bool deterministic) {
    sw::CsvWriter w;
    w.kind = "carpet";
    w.config_text = c.config_text;
    w.deterministic = deterministic;
    w.meta = {{"f_vcm", sw::format_double(c.f_vcm)},
              {"q_au", sw::format_double(c.q_au)},
              {"fi_min_vcm", sw::format_double(c.bins.fi_min_vcm)},
              {"fi_max_vcm", sw::format_double(c.bins.fi_max_vcm)},
              {"max_row_sum_error", sw::format_double(c.max_row_sum_error)}};
    w.columns = {"delay_ps"};
    for (int j = 0; j < c.bins.count; ++j) w.columns.push_back("bin" + std::to_string(j));
    w.columns.push_back("out_of_range");

    auto f = open_output(path);
    w.write_header(f);
    std::vector<double> row(c.bins.count + 2);
    for (std::size_t i = 0; i < c.delays_ps.size(); ++i) {
        row[0] = c.delays_ps[i];
        for (int j = 0; j < c.bins.count; ++j) row[1 + j] = c.signal(i, j);
        row.back() = c.out_of_range[i];
        w.write_row(f, row);
    }
}

void write_line_csv(const std::string& path, const sw::Lineout& lo,
                    const std::string& config_text, double fi_vcm,
                    bool deterministic) {
    sw::CsvWriter w;
    w.kind = "lineout";
    w.config_text = config_text;
    w.deterministic = deterministic;
    w.meta = {{"fi_vcm", sw::format_double(fi_vcm)},
              {"bin_index", std::to_string(lo.bin)},
              {"bin_center_vcm", sw::format_double(lo.bin_center_vcm)}};
    w.columns = {"delay_ps", "signal"};
    auto f = open_output(path);
    w.write_header(f);
    for (std::size_t i = 0; i < lo.values.size(); ++i)
        w.write_row(f, {lo.delays_ps[i], lo.values[i]});
}

int cmd_starkmap(const Overrides& o, double f_min, double f_max, int steps,
                 const std::string& out) {
    sw::SimContext ctx = sw::make_context(o.build());
    const auto rows = sw::run_starkmap(ctx, f_min, f_max, steps);
    sw::CsvWriter w;
    w.kind = "starkmap";
    w.config_text = ctx.cfg.serialize();
    w.deterministic = ctx.cfg.deterministic;
    w.meta = {{"f_min_vcm", sw::format_double(f_min)},
              {"f_max_vcm", sw::format_double(f_max)},
              {"f_steps", std::to_string(steps)}};
    w.columns = {"f_vcm", "energy_cm1", "probability"};
    auto f = open_output(out);
    w.write_header(f);
    for (const auto& p : rows) w.write_row(f, {p.f_vcm, p.energy_cm1, p.probability});
    return 0;
}

void dump_radial(const sw::SimContext& ctx, const std::string& spec_str,
                 bool deterministic) {
    // --dump-radial n,l,path
    const auto c1 = spec_str.find(',');
    const auto c2 = spec_str.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw sw::ConfigError("--dump-radial expects n,l,path");
    const int n = sw::detail::parse_int(spec_str.substr(0, c1));
    const int l = sw::detail::parse_int(spec_str.substr(c1 + 1, c2 - c1 - 1));
    const std::string path = spec_str.substr(c2 + 1);
    if (!ctx.cache->has(n, l))
        throw sw::ConfigError("state not in the radial cache: " + std::to_string(n) +
                              "," + std::to_string(l));
    const auto& wf = ctx.cache->get(n, l);
    sw::CsvWriter w;
    w.kind = "radial";
    w.deterministic = deterministic;
    w.meta = {{"n", std::to_string(n)}, {"l", std::to_string(l)}};
    w.columns = {"r_au", "u"};
    auto f = open_output(path);
    w.write_header(f);
    for (int i = wf.first; i < ctx.grid.n_points; ++i)
        w.write_row(f, {ctx.grid.r(i), sw::u_value(wf, ctx.grid, i)});
}

int cmd_carpet(const Overrides& o, const std::string& out, const std::string& ppm,
               const std::string& radial_dump) {
    sw::SimContext ctx = sw::make_context(o.build());
    if (!radial_dump.empty()) dump_radial(ctx, radial_dump, ctx.cfg.deterministic);
    const sw::Carpet c = sw::run_carpet(ctx);
    write_carpet_csv(out, c, ctx.cfg.deterministic);
    if (!ppm.empty()) {
        auto f = open_output(ppm);
        sw::write_ppm(f, c.signal);
    }
    return 0;
}

/// Rebuild the bin layout from a carpet file's embedded config.
sw::SsfiBins bins_from_config(const sw::RunConfig& cfg) {
    sw::SsfiBins bins;
    bins.count = cfg.bins;
    bins.fi_min_vcm = cfg.fi_min_vcm;
    bins.fi_max_vcm = cfg.fi_max_vcm;
    bins.smear_bins = cfg.smear_bins;
    bins.validate();
    return bins;
}

int cmd_lineout(const std::string& carpet_path, double fi_vcm,
                const std::string& out, bool deterministic) {
    const sw::CsvFile file = sw::read_csv_file(carpet_path);
    if (file.kind != "carpet") throw sw::ConfigError("not a carpet file: " + carpet_path);
    if (file.config_text.empty())
        throw sw::ConfigError("carpet file carries no config header");
    const sw::RunConfig cfg = sw::parse_config_text(file.config_text);
    const sw::SsfiBins bins = bins_from_config(cfg);

    const double w = bins.width();
    const int bin = static_cast<int>(std::floor((fi_vcm - bins.fi_min_vcm) / w));
    if (bin < 0 || bin >= bins.count)
        throw sw::ConfigError("requested F_i is outside the carpet bin range");

    sw::Lineout lo;
    lo.bin = bin;
    lo.bin_center_vcm = bins.center(bin);
    lo.delays_ps = file.column("delay_ps");
    lo.values = file.column("bin" + std::to_string(bin));
    write_line_csv(out, lo, file.config_text, fi_vcm, deterministic);
    return 0;
}

int cmd_spectrum(const std::string& in, const std::string& window_name,
                 const std::string& out, std::size_t n_peaks, double label_tol_cm1,
                 bool no_labels, bool deterministic) {
    const sw::CsvFile file = sw::read_csv_file(in);
    const std::vector<double> t = file.column("delay_ps");
    const std::vector<double> v = file.column("signal");
    const double dt = sw::require_uniform_dt(t);
    const sw::SpectralWindow window = sw::parse_window(window_name);

    sw::SpectrumPeaks peaks = sw::fourier_peaks(v, dt, window, n_peaks);
    if (!no_labels && !file.config_text.empty()) {
        sw::SimContext ctx = sw::make_context(sw::parse_config_text(file.config_text));
        const sw::WavePacket& wp = sw::ensure_packet(ctx);
        sw::label_peaks(peaks, *wp.sb, wp.populations(), label_tol_cm1);
    }

    sw::CsvWriter w;
    w.kind = "spectrum";
    w.config_text = file.config_text;
    w.deterministic = deterministic;
    w.meta = {{"window", window_name},
              {"df_cm1", sw::format_double(peaks.df_cm1)},
              {"source", in}};
    w.columns = {"freq_cm1", "amplitude", "n", "nprime"};
    auto f = open_output(out);
    w.write_header(f);
    for (const auto& p : peaks.peaks)
        w.write_row(f, {p.freq_cm1, p.amplitude, static_cast<double>(p.label_n),
                        static_cast<double>(p.label_np)});
    return 0;
}

int cmd_lcomp(const Overrides& o, const std::string& out) {
    sw::SimContext ctx = sw::make_context(o.build());
    const sw::LComposition lc = sw::run_lcomp(ctx);
    sw::CsvWriter w;
    w.kind = "lcomp";
    w.config_text = ctx.cfg.serialize();
    w.deterministic = ctx.cfg.deterministic;
    w.columns = {"time_ps"};
    for (Eigen::Index l = 0; l < lc.p.cols(); ++l)
        w.columns.push_back("P_l" + std::to_string(l));
    auto f = open_output(out);
    w.write_header(f);
    std::vector<double> row(1 + lc.p.cols());
    for (std::size_t i = 0; i < lc.times_ps.size(); ++i) {
        row[0] = lc.times_ps[i];
        for (Eigen::Index l = 0; l < lc.p.cols(); ++l) row[1 + l] = lc.p(i, l);
        w.write_row(f, row);
    }
    return 0;
}

int cmd_times(double n, double field_vcm) {
    const sw::CharacteristicTimes t = sw::characteristic_times(n, field_vcm);
    std::printf("n*               %.6g\n", t.n_star);
    std::printf("F (V/cm)         %.6g\n", t.f_vcm);
    std::printf("tau_Kepler (ps)  %.6g\n", t.tau_kepler_ps);
    if (t.tau_stark_ps)
        std::printf("tau_Stark (ps)   %.6g\n", *t.tau_stark_ps);
    else
        std::printf("tau_Stark (ps)   -\n");
    std::printf("tau_frac (ps)    %.6g\n", t.tau_frac_ps);
    return 0;
}

int cmd_selfcheck() {
    int failures = 0;
    auto report = [&](const char* name, bool ok, const std::string& detail) {
        std::printf("selfcheck %-24s %s%s\n", name, ok ? "ok" : "FAIL",
                    detail.empty() ? "" : ("  (" + detail + ")").c_str());
        if (!ok) ++failures;
    };

    {  // unit round trips
        using namespace sw::units;
        const double v = 160.0;
        const double back = convert(convert(v, Unit::VoltPerCm, Unit::Au),
                                    Unit::Au, Unit::VoltPerCm);
        report("unit-roundtrip", std::abs(back - v) < 1e-12 * v,
               "160 V/cm -> a.u. -> " + sw::format_double(back));
    }
    {  // hydrogen ground state against the closed form 2 r e^-r
        const auto defects = sw::QuantumDefectTable::hydrogen();
        const auto grid = sw::RadialGrid::for_basis(1, 0.01, 1e-4, 4.0);
        const auto wf = sw::integrate({1, 0, 0}, defects, grid);
        double rms = 0.0;
        for (int i = 0; i < grid.n_points; ++i) {
            const double r = grid.r(i);
            const double d = sw::u_value(wf, grid, i) - 2.0 * r * std::exp(-r);
            rms += d * d;
        }
        rms = std::sqrt(rms / grid.n_points);
        report("hydrogen-1s", rms < 1e-6, "rms " + sw::format_double(rms));
    }
    {  // frozen analytic value 128 sqrt(6) / 243
        const auto defects = sw::QuantumDefectTable::hydrogen();
        const auto grid = sw::RadialGrid::for_basis(2);
        sw::RadialCache cache({{1, 0, 0}, {2, 1, 0}}, defects, grid);
        const double v = std::abs(cache.dipole_radial({1, 0, 0}, {2, 1, 0}));
        report("hydrogen-1s2p-dipole", std::abs(v - 1.2902666) < 1.3e-4,
               sw::format_double(v) + " vs 1.2902666");
    }
    {  // node counts
        const auto defects = sw::QuantumDefectTable::hydrogen();
        const auto grid = sw::RadialGrid::for_basis(12);
        const int n0 = sw::node_count(sw::integrate({12, 0, 0}, defects, grid));
        const int n11 = sw::node_count(sw::integrate({12, 11, 0}, defects, grid));
        report("node-counts", n0 == 11 && n11 == 0,
               "12s: " + std::to_string(n0) + ", circular: " + std::to_string(n11));
    }
    {  // kick unitarity on a small hydrogen basis
        sw::RunConfig cfg;
        cfg.n_min = 8;
        cfg.n_max = 12;
        cfg.preset = "hydrogen";
        cfg.f_vcm = 100.0;
        cfg.exc_center_au = -0.5 / 100.0;
        cfg.exc_fwhm_au = 1e-3;
        sw::SimContext ctx = sw::make_context(cfg);
        const auto& sb = sw::ensure_stark(ctx);
        const auto& zs = sw::ensure_zspec(ctx);
        const auto plus = sw::build_kick(sb, zs, 0.002);
        const auto minus = sw::build_kick(sb, zs, -0.002);
        const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(sb->size(), sb->size());
        const double uerr = (plus.m.adjoint() * plus.m - eye).cwiseAbs().maxCoeff();
        const double cerr = (plus.m * minus.m - eye).cwiseAbs().maxCoeff();
        report("kick-unitarity", uerr < 1e-10 && cerr < 1e-10,
               "|M'M-I| " + sw::format_double(uerr) + ", |M(Q)M(-Q)-I| " +
                   sw::format_double(cerr));
    }
    {  // two-level beat frequency recovery
        const double split = 5.3774e-5;  // a.u.
        const double dt_ps = 0.3;
        std::vector<double> s(256);
        for (std::size_t i = 0; i < s.size(); ++i)
            s[i] = 0.4 + 0.2 * std::cos(split * sw::units::ps_to_au(dt_ps * i) + 0.8);
        const double fitted = sw::fit_single_tone_au(s, dt_ps);
        report("two-level-beat", std::abs(fitted - split) < 1e-6 * split,
               sw::format_double(fitted) + " vs " + sw::format_double(split));
    }
    if (failures) std::printf("selfcheck: %d failure(s)\n", failures);
    return failures ? 2 : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stark wave packet / half-cycle-pulse SSFI simulator"};
    app.require_subcommand(1);

    Overrides o_map, o_carpet, o_lcomp;

    auto* map_cmd = app.add_subcommand("starkmap", "Stark level map with excitation weights");
    double f_min = 0.0, f_max = 300.0;
    int f_steps = 31;
    std::string map_out;
    map_cmd->add_option("--f-min", f_min, "lowest field (V/cm)")->required();
    map_cmd->add_option("--f-max", f_max, "highest field (V/cm)")->required();
    map_cmd->add_option("--f-steps", f_steps, "number of field values")->required();
    map_cmd->add_option("--out", map_out, "output CSV")->required();
    add_common(map_cmd, o_map);

    auto* carpet_cmd = app.add_subcommand("carpet", "SSFI signal vs HCP delay");
    std::string carpet_out, carpet_ppm, carpet_dump;
    carpet_cmd->add_option("--field", o_carpet.field_vcm, "static field (V/cm)");
    carpet_cmd->add_option("--t-max-ps", o_carpet.t_max_ps, "delay span (ps)");
    carpet_cmd->add_option("--dt-ps", o_carpet.dt_ps, "delay step (ps)");
    carpet_cmd->add_option("--bins", o_carpet.bins, "number of SSFI bins");
    carpet_cmd->add_option("--smear-bins", o_carpet.smear_bins,
                           "detector smearing sigma in bins");
    carpet_cmd->add_option("--fi-min-vcm", o_carpet.fi_min_vcm, "lowest bin edge (V/cm)");
    carpet_cmd->add_option("--fi-max-vcm", o_carpet.fi_max_vcm, "highest bin edge (V/cm)");
    carpet_cmd->add_option("--out", carpet_out, "output CSV")->required();
    carpet_cmd->add_option("--ppm", carpet_ppm, "also write a grayscale PPM");
    carpet_cmd->add_option("--dump-radial", carpet_dump,
                           "debug dump of one radial solution: n,l,path");
    add_hcp(carpet_cmd, o_carpet);
    add_common(carpet_cmd, o_carpet);

    auto* line_cmd = app.add_subcommand("lineout", "one carpet column vs delay");
    std::string line_carpet, line_out;
    double line_fi = 0.0;
    bool line_det = false;
    line_cmd->add_option("--carpet", line_carpet, "carpet CSV")->required();
    line_cmd->add_option("--fi-vcm", line_fi, "ionization field to select (V/cm)")
        ->required();
    line_cmd->add_option("--out", line_out, "output CSV")->required();
    line_cmd->add_flag("--deterministic", line_det, "omit timestamps");

    auto* spec_cmd = app.add_subcommand("spectrum", "beat spectrum of a line-out");
    std::string spec_in, spec_out, spec_window = "hann";
    std::size_t spec_npeaks = 16;
    double spec_tol = 0.5;
    bool spec_nolabels = false, spec_det = false;
    spec_cmd->add_option("--in", spec_in, "line-out CSV")->required();
    spec_cmd->add_option("--window", spec_window, "hann or rect");
    spec_cmd->add_option("--out", spec_out, "output CSV")->required();
    spec_cmd->add_option("--n-peaks", spec_npeaks, "maximum peaks reported");
    spec_cmd->add_option("--label-tolerance-cm1", spec_tol,
                         "level-difference matching tolerance");
    spec_cmd->add_flag("--no-labels", spec_nolabels, "skip level-difference labels");
    spec_cmd->add_flag("--deterministic", spec_det, "omit timestamps");

    auto* lcomp_cmd = app.add_subcommand("lcomp", "angular-momentum composition vs time");
    std::string lcomp_out;
    lcomp_cmd->add_option("--field", o_lcomp.field_vcm, "static field (V/cm)");
    lcomp_cmd->add_option("--t-max-ps", o_lcomp.t_max_ps, "time span (ps)");
    lcomp_cmd->add_option("--dt-ps", o_lcomp.dt_ps, "time step (ps)");
    lcomp_cmd->add_option("--nstar-center", o_lcomp.nstar_center,
                          "restrict to one manifold (effective n)");
    lcomp_cmd->add_option("--nstar-halfwidth", o_lcomp.nstar_halfwidth,
                          "manifold filter half-width");
    lcomp_cmd->add_option("--out", lcomp_out, "output CSV")->required();
    add_common(lcomp_cmd, o_lcomp);

    auto* times_cmd = app.add_subcommand("times", "characteristic times for n, F");
    double times_n = 26.0, times_f = 0.0;
    times_cmd->add_option("--n", times_n, "effective quantum number")->required();
    times_cmd->add_option("--field-vcm", times_f, "static field (V/cm)");

    auto* check_cmd = app.add_subcommand("selfcheck", "run the built-in oracle suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    std::vector<std::string> outputs;
    auto cleanup = [&outputs]() {
        for (const auto& p : outputs) {
            std::error_code ec;
            std::filesystem::remove(p, ec);
        }
    };

    try {
        if (map_cmd->parsed()) {
            outputs = {map_out};
            return cmd_starkmap(o_map, f_min, f_max, f_steps, map_out);
        }
        if (carpet_cmd->parsed()) {
            outputs = {carpet_out};
            if (!carpet_ppm.empty()) outputs.push_back(carpet_ppm);
            return cmd_carpet(o_carpet, carpet_out, carpet_ppm, carpet_dump);
        }
        if (line_cmd->parsed()) {
            outputs = {line_out};
            return cmd_lineout(line_carpet, line_fi, line_out, line_det);
        }
        if (spec_cmd->parsed()) {
            outputs = {spec_out};
            return cmd_spectrum(spec_in, spec_window, spec_out, spec_npeaks, spec_tol,
                                spec_nolabels, spec_det);
        }
        if (lcomp_cmd->parsed()) {
            outputs = {lcomp_out};
            return cmd_lcomp(o_lcomp, lcomp_out);
        }
        if (times_cmd->parsed()) return cmd_times(times_n, times_f);
        if (check_cmd->parsed()) return cmd_selfcheck();
        return 1;
    } catch (const sw::ConfigError& e) {
        cleanup();
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const sw::InputError& e) {
        cleanup();
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        cleanup();
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
