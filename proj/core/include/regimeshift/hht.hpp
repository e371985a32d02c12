#pragma once

#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "regimeshift/daily_series.hpp"

namespace regimeshift::hht {

struct EmdConfig {
  std::size_t max_imfs = 10;
  double sift_sd_threshold = 0.2;
  std::size_t max_sift_iters = 100;
};

/// Signal has fewer than two maxima or two minima; decomposition stops here.
class TooFewExtrema : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SiftStop { ImfConditions, SdCriterion, IterationCap, ExtremaExhausted };

[[nodiscard]] std::string_view to_string(SiftStop s);

struct Imf {
  std::vector<double> values;
  std::size_t index = 0;
  std::size_t sift_iterations = 0;
  SiftStop stop_reason = SiftStop::ImfConditions;
};

struct Extrema {
  std::vector<std::size_t> maxima;
  std::vector<std::size_t> minima;
};

/// Interior local extrema; a flat run counts once, at its middle sample.
[[nodiscard]] Extrema find_extrema(std::span<const double> x);

/// Sign changes, skipping exact zeros.
[[nodiscard]] std::size_t count_zero_crossings(std::span<const double> x);

/// Natural cubic spline through (knots, values), evaluated at 0, 1, .., n-1.
/// Knots must be strictly increasing.
[[nodiscard]] std::vector<double> natural_cubic_spline(std::span<const double> knots,
                                                       std::span<const double> values, std::size_t n);

struct Envelopes {
  std::vector<double> upper;
  std::vector<double> lower;
  std::vector<double> mean;
};

/// Spline envelopes through the extrema, with the two extrema nearest each
/// end mirrored about that end. Throws TooFewExtrema.
[[nodiscard]] Envelopes envelopes(std::span<const double> x, const Extrema& ext);

struct ImfCheck {
  std::size_t extrema = 0;
  std::size_t zero_crossings = 0;
  double envelope_mean_abs = 0.0;  ///< mean |(upper + lower) / 2|
  double rms = 0.0;
  bool counts_ok = false;          ///< |extrema - zero crossings| <= 1
  bool envelope_ok = false;        ///< envelope_mean_abs <= 0.1 rms
  [[nodiscard]] bool satisfied() const { return counts_ok && envelope_ok; }
};

[[nodiscard]] ImfCheck check_imf(std::span<const double> x);

struct SiftResult {
  Imf imf;
  std::vector<double> residual;  ///< signal - imf
};

[[nodiscard]] SiftResult sift(std::span<const double> signal, const EmdConfig& cfg = {});

struct Decomposition {
  std::vector<Imf> imfs;
  std::vector<double> residue;
};

/// Requires at least 16 samples. Throws TooFewExtrema when not even one IMF
/// can be extracted.
[[nodiscard]] Decomposition emd(std::span<const double> signal, const EmdConfig& cfg = {});
[[nodiscard]] Decomposition emd(const DailySeries& signal, const EmdConfig& cfg = {});

/// Instantaneous amplitude, unwrapped phase and frequency (radians per sample).
struct AnalyticSignal {
  std::vector<double> amplitude;
  std::vector<double> phase;
  std::vector<double> frequency;
};

/// FFT construction of the analytic signal. Requires at least 8 samples.
[[nodiscard]] AnalyticSignal analytic_signal(std::span<const double> imf);

/// Uniform bins over (0, max_omega].
struct FrequencyGrid {
  std::size_t bins = 64;
  double max_omega = std::numbers::pi;

  [[nodiscard]] double width() const { return max_omega / static_cast<double>(bins); }
  [[nodiscard]] double center(std::size_t bin) const { return (static_cast<double>(bin) + 0.5) * width(); }
  /// Bin holding omega, or nothing when omega is outside (0, max_omega].
  [[nodiscard]] std::optional<std::size_t> bin_of(double omega) const;
};

/// Amplitude H(t, omega) on a time x frequency grid, stored row-major by time.
struct HilbertSpectrum {
  std::size_t times = 0;
  FrequencyGrid grid;
  std::vector<double> cells;

  [[nodiscard]] double at(std::size_t t, std::size_t bin) const { return cells[t * grid.bins + bin]; }
};

/// Every component deposits K_i(t) into the bin of omega_i(t), with equal
/// weight. Throws std::invalid_argument on an empty list.
[[nodiscard]] HilbertSpectrum hilbert_spectrum(std::span<const AnalyticSignal> components,
                                               const FrequencyGrid& grid = {});
[[nodiscard]] HilbertSpectrum hilbert_spectrum(std::span<const Imf> imfs, const FrequencyGrid& grid = {});

/// A run of consecutive samples above the threshold.
struct ExtremeEvent {
  std::size_t first = 0;
  std::size_t last = 0;
  std::size_t peak = 0;
  double peak_ie_norm = 0.0;
};

struct EnergyProfile {
  std::vector<double> ie;
  std::vector<double> ie_norm;
  double e_mean = 0.0;
  double e_std = 0.0;  ///< population standard deviation of ie
  double e_th = 0.0;   ///< e_mean + B e_std
  double max_ie = 0.0;
  double b = 4.0;
  std::vector<ExtremeEvent> events;

  /// (ie[t] - e_mean) / e_std, the threshold multiple reached at t; 0 when e_std is 0.
  [[nodiscard]] double exceedance(std::size_t t) const;
};

/// IE(t) = sum over bins of H^2 * d_omega, thresholded at mean + B std.
/// A profile whose std is below 1e-12 of its mean is flat: std is reported
/// as 0 and there are no events.
[[nodiscard]] EnergyProfile instantaneous_energy(const HilbertSpectrum& spectrum, double b = 4.0);

struct HilbertProfile {
  Date start;
  Decomposition decomposition;
  std::vector<AnalyticSignal> components;
  HilbertSpectrum spectrum;
  EnergyProfile energy;
};

/// EMD, per-IMF Hilbert analysis, spectrum and energy in one pass.
[[nodiscard]] HilbertProfile analyze(std::span<const double> signal, const EmdConfig& cfg = {},
                                     const FrequencyGrid& grid = {}, double b = 4.0);
[[nodiscard]] HilbertProfile analyze(const DailySeries& signal, const EmdConfig& cfg = {},
                                     const FrequencyGrid& grid = {}, double b = 4.0);

}  // namespace regimeshift::hht
