#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "starkwp/basis.hpp"
#include "starkwp/errors.hpp"
#include "starkwp/kick.hpp"
#include "starkwp/util.hpp"

namespace starkwp {

namespace detail {

inline const std::string kLLabels = "spdfghik";

inline int parse_l_label(const std::string& s) {
    if (s.size() == 1) {
        const auto pos = kLLabels.find(s[0]);
        if (pos != std::string::npos) return static_cast<int>(pos);
    }
    try {
        std::size_t used = 0;
        const int l = std::stoi(s, &used);
        if (used == s.size() && l >= 0) return l;
    } catch (...) {
    }
    throw ConfigError("unknown l label: " + s);
}

inline std::string l_label(int l) {
    if (l < static_cast<int>(kLLabels.size())) return std::string(1, kLLabels[l]);
    return std::to_string(l);
}

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline double parse_double(const std::string& s) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size()) return v;
    } catch (...) {
    }
    throw ConfigError("not a number: " + s);
}

inline int parse_int(const std::string& s) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(s, &used);
        if (used == s.size()) return v;
    } catch (...) {
    }
    throw ConfigError("not an integer: " + s);
}

} // namespace detail

/// Full description of a run. Serialized verbatim into every output header;
/// a run is reproducible from its header alone once the derived defaults
/// (excitation window, bin range) have been resolved.
struct RunConfig {
    // [basis]
    int n_min = 10;
    int n_max = 40;
    // [defects]
    std::string preset = "cesium";  // cesium | hydrogen
    std::vector<std::pair<int, double>> defect_overrides;
    // [field]
    double f_vcm = 160.0;
    // [excitation]
    int launch_n = 7;
    int launch_l = 0;
    double exc_center_au = NAN;  // default: midpoint of E(n*=25), E(n*=27)
    double exc_fwhm_au = NAN;    // default: 1.4e-4 a.u. (intensity FWHM)
    // [hcp]
    double q_au = NAN;  // default 0.002, or derived from the pulse below
    double hcp_peak_kvcm = NAN;
    double hcp_fs = NAN;
    std::string hcp_shape = "rect";
    // [delays]
    double t_max_ps = 140.0;
    double dt_ps = 0.2;
    // [ssfi]
    int bins = 64;
    double smear_bins = 1.0;
    double fi_min_vcm = NAN;  // resolved from the packet when NaN
    double fi_max_vcm = NAN;
    // [lcomp]
    double nstar_center = NAN;  // NaN: no manifold filter
    double nstar_halfwidth = 0.5;
    // [radial]
    double grid_h = 0.01;
    double r_inner_au = 1e-4;
    double turning_multiple = 2.0;
    // [run]
    int workers = 1;
    bool deterministic = false;
    std::uint64_t seed = 0;  // reserved; the physics draws no random numbers

    QuantumDefectTable defect_table() const {
        QuantumDefectTable base;
        if (preset == "cesium")
            base = QuantumDefectTable::cesium();
        else if (preset == "hydrogen")
            base = QuantumDefectTable::hydrogen();
        else
            throw ConfigError("unknown defects preset: " + preset);
        if (defect_overrides.empty()) return base;
        std::vector<double> values = base.values();
        for (const auto& [l, v] : defect_overrides) {
            if (l >= static_cast<int>(values.size())) values.resize(l + 1, 0.0);
            values[l] = v;
        }
        return QuantumDefectTable(values);
    }

    /// Fill derived defaults. Bin-range resolution needs the packet and is
    /// done by the pipeline.
    void resolve() {
        if (n_min < 1 || n_min > n_max) throw ConfigError("invalid basis window");
        if (std::isnan(exc_center_au))
            exc_center_au = -0.5 * (1.0 / (25.0 * 25.0) + 1.0 / (27.0 * 27.0)) / 2.0;
        if (std::isnan(exc_fwhm_au)) exc_fwhm_au = 1.4e-4;
        if (std::isnan(q_au)) {
            if (!std::isnan(hcp_peak_kvcm) && !std::isnan(hcp_fs))
                q_au = impulse_from_pulse(hcp_peak_kvcm * 1000.0, hcp_fs,
                                          parse_hcp_shape(hcp_shape));
            else
                q_au = 0.002;
        }
        if (!(t_max_ps > 0.0) || !(dt_ps > 0.0)) throw ConfigError("invalid delay grid");
        if (bins < 1) throw ConfigError("bins must be >= 1");
        if (f_vcm < 0.0) throw ConfigError("field must be >= 0");
    }

    std::string serialize() const {
        std::ostringstream os;
        auto kv = [&os](const char* key, const std::string& v) {
            os << key << " = " << v << "\n";
        };
        auto kvd = [&](const char* key, double v) {
            if (!std::isnan(v)) kv(key, format_double(v));
        };
        os << "[basis]\n";
        kv("n_min", std::to_string(n_min));
        kv("n_max", std::to_string(n_max));
        os << "[defects]\n";
        kv("preset", preset);
        {
            const auto table = defect_table().values();
            for (std::size_t l = 0; l < table.size(); ++l)
                kvd(detail::l_label(static_cast<int>(l)).c_str(), table[l]);
        }
        os << "[field]\n";
        kvd("f_vcm", f_vcm);
        os << "[excitation]\n";
        kv("launch_n", std::to_string(launch_n));
        kv("launch_l", std::to_string(launch_l));
        kvd("center_au", exc_center_au);
        kvd("fwhm_au", exc_fwhm_au);
        os << "[hcp]\n";
        kvd("q_au", q_au);
        kvd("peak_kvcm", hcp_peak_kvcm);
        kvd("duration_fs", hcp_fs);
        kv("shape", hcp_shape);
        os << "[delays]\n";
        kvd("t_max_ps", t_max_ps);
        kvd("dt_ps", dt_ps);
        os << "[ssfi]\n";
        kv("bins", std::to_string(bins));
        kvd("smear_bins", smear_bins);
        kvd("fi_min_vcm", fi_min_vcm);
        kvd("fi_max_vcm", fi_max_vcm);
        os << "[lcomp]\n";
        kvd("nstar_center", nstar_center);
        kvd("nstar_halfwidth", nstar_halfwidth);
        os << "[radial]\n";
        kvd("grid_h", grid_h);
        kvd("r_inner_au", r_inner_au);
        kvd("turning_multiple", turning_multiple);
        os << "[run]\n";
        kv("workers", std::to_string(workers));
        kv("deterministic", deterministic ? "true" : "false");
        kv("seed", std::to_string(seed));
        return os.str();
    }

    std::uint64_t hash() const { return fnv1a64(serialize()); }
};

/// Strict INI-style parser for config files and output-header round trips.
inline RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    // Defect values listed in the file override the preset; "preset" must
    // come first in the section, which serialize() guarantees.
    std::istringstream is(text);
    std::string line, section;
    while (std::getline(is, line)) {
        line = detail::trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("malformed section: " + line);
            section = line.substr(1, line.size() - 2);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("malformed line: " + line);
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));
        using detail::parse_double;
        using detail::parse_int;

        if (section == "basis") {
            if (key == "n_min") cfg.n_min = parse_int(val);
            else if (key == "n_max") cfg.n_max = parse_int(val);
            else throw ConfigError("unknown key [basis] " + key);
        } else if (section == "defects") {
            if (key == "preset") cfg.preset = val;
            else cfg.defect_overrides.emplace_back(detail::parse_l_label(key),
                                                   parse_double(val));
        } else if (section == "field") {
            if (key == "f_vcm") cfg.f_vcm = parse_double(val);
            else throw ConfigError("unknown key [field] " + key);
        } else if (section == "excitation") {
            if (key == "launch_n") cfg.launch_n = parse_int(val);
            else if (key == "launch_l") cfg.launch_l = parse_int(val);
            else if (key == "center_au") cfg.exc_center_au = parse_double(val);
            else if (key == "fwhm_au") cfg.exc_fwhm_au = parse_double(val);
            else throw ConfigError("unknown key [excitation] " + key);
        } else if (section == "hcp") {
            if (key == "q_au") cfg.q_au = parse_double(val);
            else if (key == "peak_kvcm") cfg.hcp_peak_kvcm = parse_double(val);
            else if (key == "duration_fs") cfg.hcp_fs = parse_double(val);
            else if (key == "shape") cfg.hcp_shape = val;
            else throw ConfigError("unknown key [hcp] " + key);
        } else if (section == "delays") {
            if (key == "t_max_ps") cfg.t_max_ps = parse_double(val);
            else if (key == "dt_ps") cfg.dt_ps = parse_double(val);
            else throw ConfigError("unknown key [delays] " + key);
        } else if (section == "ssfi") {
            if (key == "bins") cfg.bins = parse_int(val);
            else if (key == "smear_bins") cfg.smear_bins = parse_double(val);
            else if (key == "fi_min_vcm") cfg.fi_min_vcm = parse_double(val);
            else if (key == "fi_max_vcm") cfg.fi_max_vcm = parse_double(val);
            else throw ConfigError("unknown key [ssfi] " + key);
        } else if (section == "lcomp") {
            if (key == "nstar_center") cfg.nstar_center = parse_double(val);
            else if (key == "nstar_halfwidth") cfg.nstar_halfwidth = parse_double(val);
            else throw ConfigError("unknown key [lcomp] " + key);
        } else if (section == "radial") {
            if (key == "grid_h") cfg.grid_h = parse_double(val);
            else if (key == "r_inner_au") cfg.r_inner_au = parse_double(val);
            else if (key == "turning_multiple") cfg.turning_multiple = parse_double(val);
            else throw ConfigError("unknown key [radial] " + key);
        } else if (section == "run") {
            if (key == "workers") cfg.workers = parse_int(val);
            else if (key == "deterministic") cfg.deterministic = (val == "true" || val == "1");
            else if (key == "seed") cfg.seed = std::stoull(val);
            else throw ConfigError("unknown key [run] " + key);
        } else {
            throw ConfigError("unknown section: [" + section + "]");
        }
    }
    // Overrides that merely restate the preset keep the text canonical.
    if (!cfg.defect_overrides.empty()) {
        const auto table = cfg.defect_table();
        RunConfig probe = cfg;
        probe.defect_overrides.clear();
        if (probe.defect_table().values() == table.values())
            cfg.defect_overrides.clear();
    }
    return cfg;
}

inline RunConfig parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str());
}

} // namespace starkwp
