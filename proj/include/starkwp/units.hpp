#pragma once

#include <cmath>
#include <string>

#include "starkwp/errors.hpp"

namespace starkwp::units {

// Atomic units (e = m_e = hbar = 1) are used throughout the library; these
// constants are the only place unit conversions live.
inline constexpr double kVcmPerAuField = 5.14220674e9;  // a.u. field in V/cm
inline constexpr double kAuPerPs = 4.134137e4;          // 1 ps in a.u. of time
inline constexpr double kCm1PerAu = 219474.63;          // 1 hartree in cm^-1

inline constexpr double vcm_to_au(double f) { return f / kVcmPerAuField; }
inline constexpr double au_to_vcm(double f) { return f * kVcmPerAuField; }
inline constexpr double ps_to_au(double t) { return t * kAuPerPs; }
inline constexpr double au_to_ps(double t) { return t / kAuPerPs; }
inline constexpr double fs_to_au(double t) { return t * (kAuPerPs / 1000.0); }
inline constexpr double au_to_cm1(double e) { return e * kCm1PerAu; }
inline constexpr double cm1_to_au(double e) { return e / kCm1PerAu; }

// Beat at energy splitting dE (a.u.) appears at dE/2pi cycles per a.u. of
// time; this converts a frequency in cycles/ps to the splitting in cm^-1.
// Numerically it equals 1/c with c in cm/ps.
inline constexpr double kCm1PerCyclePerPs =
    2.0 * M_PI / kAuPerPs * kCm1PerAu;

enum class Unit { Au, VoltPerCm, KiloVoltPerCm, Picosecond, Femtosecond, InverseCm };

enum class Dimension { Any, Field, Time, Energy };

inline Dimension dimension(Unit u) {
    switch (u) {
        case Unit::Au: return Dimension::Any;
        case Unit::VoltPerCm:
        case Unit::KiloVoltPerCm: return Dimension::Field;
        case Unit::Picosecond:
        case Unit::Femtosecond: return Dimension::Time;
        case Unit::InverseCm: return Dimension::Energy;
    }
    return Dimension::Any;
}

inline double to_au_factor(Unit u) {
    switch (u) {
        case Unit::Au: return 1.0;
        case Unit::VoltPerCm: return 1.0 / kVcmPerAuField;
        case Unit::KiloVoltPerCm: return 1000.0 / kVcmPerAuField;
        case Unit::Picosecond: return kAuPerPs;
        case Unit::Femtosecond: return kAuPerPs / 1000.0;
        case Unit::InverseCm: return 1.0 / kCm1PerAu;
    }
    return 1.0;
}

inline Unit parse_unit(const std::string& s) {
    if (s == "au" || s == "a.u." || s == "a.u") return Unit::Au;
    if (s == "V/cm") return Unit::VoltPerCm;
    if (s == "kV/cm") return Unit::KiloVoltPerCm;
    if (s == "ps") return Unit::Picosecond;
    if (s == "fs") return Unit::Femtosecond;
    if (s == "cm^-1" || s == "cm-1" || s == "1/cm") return Unit::InverseCm;
    throw ConfigError("unknown unit: " + s);
}

/// Exact linear conversion between compatible units. Both units non-a.u.
/// must share a dimension; "au" converts with anything.
inline double convert(double value, Unit from, Unit to) {
    const Dimension df = dimension(from), dt = dimension(to);
    if (df != Dimension::Any && dt != Dimension::Any && df != dt)
        throw ConfigError("incompatible unit pair");
    return value * to_au_factor(from) / to_au_factor(to);
}

} // namespace starkwp::units
