#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "starkwp/errors.hpp"
#include "starkwp/util.hpp"

namespace starkwp {

/// Field-free |n l m> label. Only m = 0 is supported; the field is carried
/// so the data model stays extensible, but every operation rejects m != 0.
struct BasisState {
    int n = 1;
    int l = 0;
    int m = 0;

    bool operator==(const BasisState&) const = default;
};

inline void validate_state(const BasisState& s) {
    if (s.n < 1 || s.l < 0 || s.l > s.n - 1)
        throw ConfigError("invalid quantum numbers n=" + std::to_string(s.n) +
                          " l=" + std::to_string(s.l));
    if (s.m != 0)
        throw ConfigError("only m=0 states are supported");
}

inline std::string state_label(const BasisState& s) {
    static const char* letters = "spdfghiklmnoq";
    std::string out = std::to_string(s.n);
    out += (s.l < 13) ? std::string(1, letters[s.l]) : ("(l=" + std::to_string(s.l) + ")");
    return out;
}

/// l-resolved quantum defects; energies follow E = -1/(2 (n - delta_l)^2).
class QuantumDefectTable {
  public:
    QuantumDefectTable() = default;

    explicit QuantumDefectTable(std::vector<double> defects)
        : defects_(std::move(defects)) {
        for (double d : defects_)
            if (d < 0.0) throw ConfigError("quantum defects must be >= 0");
        for (std::size_t l = 1; l + 1 < defects_.size(); ++l)
            if (defects_[l + 1] > defects_[l] + 1e-12) {
                warn("quantum-defect table is not non-increasing beyond l=0");
                break;
            }
    }

    double defect(int l) const {
        return (l >= 0 && static_cast<std::size_t>(l) < defects_.size())
                   ? defects_[l]
                   : 0.0;
    }

    /// First l at and beyond which all defects are zero.
    int l_cutoff() const {
        int cut = static_cast<int>(defects_.size());
        while (cut > 0 && defects_[cut - 1] == 0.0) --cut;
        return cut;
    }

    bool is_hydrogenic() const { return l_cutoff() == 0; }

    // Literature single-channel values for Cs (m=0, j-averaged); external to
    // any particular measurement, override via config as needed.
    static QuantumDefectTable cesium() {
        return QuantumDefectTable({4.049, 3.569, 2.466, 0.0334});
    }

    static QuantumDefectTable hydrogen() { return QuantumDefectTable(); }

    const std::vector<double>& values() const { return defects_; }

  private:
    std::vector<double> defects_;
};

/// All (n, l, 0) with n_min <= n <= n_max, l < n; ascending n, then l.
inline std::vector<BasisState> enumerate_basis(int n_min, int n_max) {
    if (n_min < 1 || n_min > n_max)
        throw ConfigError("invalid basis range [" + std::to_string(n_min) +
                          ", " + std::to_string(n_max) + "]");
    std::vector<BasisState> out;
    out.reserve(static_cast<std::size_t>(n_max + n_min) * (n_max - n_min + 1) / 2);
    for (int n = n_min; n <= n_max; ++n)
        for (int l = 0; l < n; ++l)
            out.push_back({n, l, 0});
    return out;
}

inline std::size_t basis_size(int n_min, int n_max) {
    return static_cast<std::size_t>(n_max + n_min) * (n_max - n_min + 1) / 2;
}

/// Index of `s` in enumerate_basis(n_min, .) order.
inline std::size_t basis_index(int n_min, const BasisState& s) {
    const std::size_t before =
        static_cast<std::size_t>(s.n - 1 + n_min) * (s.n - n_min) / 2;
    return before + static_cast<std::size_t>(s.l);
}

inline double effective_n(const BasisState& s, const QuantumDefectTable& defects) {
    return s.n - defects.defect(s.l);
}

/// Rydberg-Ritz binding energy in a.u.
inline double energy(const BasisState& s, const QuantumDefectTable& defects) {
    validate_state(s);
    const double nstar = effective_n(s, defects);
    if (nstar <= 0.0)
        throw ConfigError("n <= defect for state " + state_label(s));
    return -0.5 / (nstar * nstar);
}

/// Effective quantum number of a bound energy (a.u., negative).
inline double effective_n_of_energy(double e_au) {
    if (e_au >= 0.0) throw ConfigError("not a bound-state energy");
    return std::sqrt(-0.5 / e_au);
}

} // namespace starkwp
