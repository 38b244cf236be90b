#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "starkwp/errors.hpp"
#include "starkwp/stark.hpp"
#include "starkwp/units.hpp"

namespace starkwp {

enum class SpectralWindow { Hann, Rect };

inline SpectralWindow parse_window(const std::string& s) {
    if (s == "hann") return SpectralWindow::Hann;
    if (s == "rect") return SpectralWindow::Rect;
    throw ConfigError("unknown window: " + s);
}

/// Magnitude spectrum of a uniformly sampled series. Frequencies are
/// reported as energy splittings in cm^-1; `amplitude` is scaled so a pure
/// cosine of amplitude A shows a peak of height ~A.
struct Spectrum {
    double df_cm1 = 0.0;
    std::vector<double> freq_cm1;    // j = 0 .. N/2
    std::vector<double> amplitude;
    double series_energy = 0.0;      // sum of squared windowed samples
    double spectrum_energy = 0.0;    // (1/N) sum |X_k|^2 (Parseval partner)
};

inline std::vector<double> window_values(SpectralWindow w, std::size_t n) {
    std::vector<double> out(n, 1.0);
    if (w == SpectralWindow::Hann)
        for (std::size_t i = 0; i < n; ++i)
            out[i] = 0.5 * (1.0 - std::cos(2.0 * M_PI * i / (n - 1)));
    return out;
}

inline Spectrum spectrum(const std::vector<double>& values, double dt_ps,
                         SpectralWindow window = SpectralWindow::Hann) {
    const std::size_t n = values.size();
    if (n < 8) throw InputError("series too short for spectral analysis");
    if (!(dt_ps > 0.0)) throw InputError("sampling step must be > 0");

    const double mean =
        std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
    const std::vector<double> win = window_values(window, n);
    double win_sum = 0.0;
    std::vector<std::complex<double>> y(n);
    Spectrum sp;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = (values[i] - mean) * win[i];
        y[i] = v;
        sp.series_energy += v * v;
        win_sum += win[i];
    }

    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> coeffs;
    fft.fwd(coeffs, y);

    for (const auto& c : coeffs) sp.spectrum_energy += std::norm(c);
    sp.spectrum_energy /= static_cast<double>(n);

    sp.df_cm1 = units::kCm1PerCyclePerPs / (static_cast<double>(n) * dt_ps);
    const std::size_t half = n / 2;
    sp.freq_cm1.resize(half + 1);
    sp.amplitude.resize(half + 1);
    for (std::size_t j = 0; j <= half; ++j) {
        sp.freq_cm1[j] = sp.df_cm1 * static_cast<double>(j);
        sp.amplitude[j] = (j == 0 ? 1.0 : 2.0) * std::abs(coeffs[j]) / win_sum;
    }
    return sp;
}

struct Peak {
    double freq_cm1 = 0.0;
    double amplitude = 0.0;
    bool labeled = false;
    int label_n = 0;       // smaller effective quantum number of the pair
    int label_np = 0;
};

struct SpectrumPeaks {
    std::vector<Peak> peaks;  // sorted by descending amplitude
    double df_cm1 = 0.0;
};

inline double require_uniform_dt(const std::vector<double>& t) {
    if (t.size() < 2) throw InputError("need at least two samples");
    const double dt = t[1] - t[0];
    if (!(dt > 0.0)) throw InputError("samples must be strictly increasing");
    for (std::size_t i = 1; i < t.size(); ++i)
        if (std::abs(t[i] - t[0] - dt * static_cast<double>(i)) > 1e-9 * dt * t.size())
            throw InputError("non-uniform sampling");
    return dt;
}

/// Local maxima of the windowed magnitude spectrum, refined by three-point
/// parabolic interpolation. Peaks below `threshold` of the strongest one
/// are dropped (default keeps the weak next-neighbor doublet while
/// rejecting the leakage floor).
inline SpectrumPeaks fourier_peaks(const std::vector<double>& values, double dt_ps,
                                   SpectralWindow window = SpectralWindow::Hann,
                                   std::size_t max_peaks = 16,
                                   double threshold = 0.05) {
    if (values.size() < 64) throw InputError("need at least 64 samples");
    const Spectrum sp = spectrum(values, dt_ps, window);

    double top = 0.0;
    for (std::size_t j = 1; j < sp.amplitude.size(); ++j)
        top = std::max(top, sp.amplitude[j]);

    SpectrumPeaks out;
    out.df_cm1 = sp.df_cm1;
    // rounding noise on a flat series must not surface as peaks
    double rms = 0.0;
    for (double v : values) rms += v * v;
    rms = std::sqrt(rms / values.size());
    if (top < 1e-12 * std::max(rms, 1e-300)) return out;
    for (std::size_t j = 1; j + 1 < sp.amplitude.size(); ++j) {
        const double a = sp.amplitude[j];
        if (!(a >= sp.amplitude[j - 1] && a > sp.amplitude[j + 1])) continue;
        if (a < threshold * top) continue;
        const double am = sp.amplitude[j - 1], ap = sp.amplitude[j + 1];
        const double denom = am - 2.0 * a + ap;
        const double shift = denom != 0.0 ? 0.5 * (am - ap) / denom : 0.0;
        Peak p;
        p.freq_cm1 = sp.df_cm1 * (static_cast<double>(j) + shift);
        p.amplitude = a - 0.25 * (am - ap) * shift;
        out.peaks.push_back(p);
    }
    std::stable_sort(out.peaks.begin(), out.peaks.end(),
                     [](const Peak& a, const Peak& b) { return a.amplitude > b.amplitude; });
    if (out.peaks.size() > max_peaks) out.peaks.resize(max_peaks);
    return out;
}

/// Match each peak against level differences |w_a - w_b| of populated Stark
/// states; labels carry the rounded effective quantum numbers of the pair.
inline void label_peaks(SpectrumPeaks& peaks, const StarkBasis& sb,
                        const Eigen::VectorXd& populations, double tolerance_cm1,
                        double population_threshold = 1e-3) {
    if (!(tolerance_cm1 > 0.0)) throw ConfigError("label tolerance must be > 0");
    std::vector<Eigen::Index> pop;
    for (Eigen::Index k = 0; k < sb.size(); ++k)
        if (populations[k] >= population_threshold) pop.push_back(k);

    for (Peak& p : peaks.peaks) {
        double best = tolerance_cm1;
        for (std::size_t i = 0; i < pop.size(); ++i) {
            for (std::size_t j = i + 1; j < pop.size(); ++j) {
                const double d = units::au_to_cm1(
                    std::abs(sb.energies[pop[i]] - sb.energies[pop[j]]));
                const double err = std::abs(d - p.freq_cm1);
                if (err <= best) {
                    best = err;
                    const int n1 = static_cast<int>(std::lround(sb.effective_n(pop[i])));
                    const int n2 = static_cast<int>(std::lround(sb.effective_n(pop[j])));
                    p.labeled = true;
                    p.label_n = std::min(n1, n2);
                    p.label_np = std::max(n1, n2);
                }
            }
        }
    }
}

/// Closed-form characteristic times of a packet around effective quantum
/// number n at static field F: Kepler period 2 pi n^3, Stark (angular
/// momentum) period 2 pi / (3 F n), fractional revival 2 pi n^4 / 3.
struct CharacteristicTimes {
    double n_star = 0.0;
    double f_vcm = 0.0;
    double tau_kepler_ps = 0.0;
    std::optional<double> tau_stark_ps;
    double tau_frac_ps = 0.0;
};

inline CharacteristicTimes characteristic_times(double n_star, double f_vcm) {
    if (!(n_star > 0.0)) throw ConfigError("n must be > 0");
    if (f_vcm < 0.0) throw ConfigError("field must be >= 0");
    CharacteristicTimes t;
    t.n_star = n_star;
    t.f_vcm = f_vcm;
    t.tau_kepler_ps = units::au_to_ps(2.0 * M_PI * std::pow(n_star, 3));
    t.tau_frac_ps = units::au_to_ps(2.0 * M_PI * std::pow(n_star, 4) / 3.0);
    if (f_vcm > 0.0)
        t.tau_stark_ps =
            units::au_to_ps(2.0 * M_PI / (3.0 * units::vcm_to_au(f_vcm) * n_star));
    return t;
}

/// Sliding-RMS envelope of the mean-subtracted series (window in ps).
inline std::vector<double> envelope(const std::vector<double>& values, double dt_ps,
                                    double window_ps) {
    if (values.empty()) throw InputError("empty series");
    if (!(dt_ps > 0.0) || !(window_ps > 0.0)) throw InputError("bad envelope window");
    const double mean =
        std::accumulate(values.begin(), values.end(), 0.0) / values.size();
    const int half = std::max(1, static_cast<int>(std::lround(window_ps / 2.0 / dt_ps)));
    const int n = static_cast<int>(values.size());
    std::vector<double> out(values.size());
    for (int i = 0; i < n; ++i) {
        const int lo = std::max(0, i - half), hi = std::min(n - 1, i + half);
        double s = 0.0;
        for (int j = lo; j <= hi; ++j) {
            const double v = values[j] - mean;
            s += v * v;
        }
        out[i] = std::sqrt(s / (hi - lo + 1));
    }
    return out;
}

/// Lag (ps) of the maximum of the autocorrelation within [lag_min, lag_max],
/// parabolic-refined. Used to detect envelope recurrences.
inline double autocorrelation_peak_lag(const std::vector<double>& values, double dt_ps,
                                       double lag_min_ps, double lag_max_ps) {
    const int n = static_cast<int>(values.size());
    const int lmin = std::max(1, static_cast<int>(std::lround(lag_min_ps / dt_ps)));
    const int lmax = std::min(n - 2, static_cast<int>(std::lround(lag_max_ps / dt_ps)));
    if (lmin >= lmax) throw InputError("autocorrelation lag range too narrow");
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;

    auto corr = [&](int lag) {
        double s = 0.0;
        for (int i = 0; i + lag < n; ++i)
            s += (values[i] - mean) * (values[i + lag] - mean);
        return s / (n - lag);
    };
    int best = lmin;
    double best_v = corr(lmin);
    for (int lag = lmin + 1; lag <= lmax; ++lag) {
        const double v = corr(lag);
        if (v > best_v) {
            best_v = v;
            best = lag;
        }
    }
    double shift = 0.0;
    if (best > lmin && best < lmax) {
        const double am = corr(best - 1), ap = corr(best + 1);
        const double denom = am - 2.0 * best_v + ap;
        if (denom != 0.0) shift = 0.5 * (am - ap) / denom;
    }
    return (best + shift) * dt_ps;
}

/// Strongest non-DC spectral component of a (possibly short) segment.
inline double dominant_frequency_cm1(const std::vector<double>& values, double dt_ps,
                                     SpectralWindow window = SpectralWindow::Hann) {
    const Spectrum sp = spectrum(values, dt_ps, window);
    std::size_t jbest = 1;
    for (std::size_t j = 2; j + 1 < sp.amplitude.size(); ++j)
        if (sp.amplitude[j] > sp.amplitude[jbest]) jbest = j;
    double shift = 0.0;
    if (jbest + 1 < sp.amplitude.size() && jbest >= 1) {
        const double am = sp.amplitude[jbest - 1], a = sp.amplitude[jbest],
                     ap = sp.amplitude[jbest + 1];
        const double denom = am - 2.0 * a + ap;
        if (denom != 0.0) shift = 0.5 * (am - ap) / denom;
    }
    return sp.df_cm1 * (static_cast<double>(jbest) + shift);
}

/// Exact frequency extraction for a noiseless A + B cos(w t + phi) series:
/// first differences remove the offset, then the three-term sinusoid
/// recurrence gives cos(w dt) in closed (least-squares) form.
inline double fit_single_tone_au(const std::vector<double>& values, double dt_ps) {
    if (values.size() < 5) throw InputError("need at least 5 samples");
    std::vector<double> d(values.size() - 1);
    for (std::size_t i = 0; i + 1 < values.size(); ++i) d[i] = values[i + 1] - values[i];
    double num = 0.0, den = 0.0;
    for (std::size_t k = 1; k + 1 < d.size(); ++k) {
        num += d[k] * (d[k - 1] + d[k + 1]);
        den += 2.0 * d[k] * d[k];
    }
    if (den == 0.0) throw InputError("series carries no oscillation");
    const double c = std::clamp(num / den, -1.0, 1.0);
    return std::acos(c) / units::ps_to_au(dt_ps);
}

} // namespace starkwp
