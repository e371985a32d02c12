#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "regimeshift/breaks.hpp"
#include "regimeshift/daily_series.hpp"
#include "regimeshift/hht.hpp"
#include "regimeshift/rng.hpp"

namespace regimeshift::surrogate {

enum class Method { FT, AAFT };

[[nodiscard]] std::string_view to_string(Method m);
[[nodiscard]] Method parse_method(std::string_view s);

struct SurrogateConfig {
  Method method = Method::AAFT;
  std::size_t n_surrogates = 1000;
  std::uint64_t seed = 20241105;
  std::size_t match_window_days = 3;
  unsigned threads = 1;
};

/// Periodogram |X_k|^2 for k = 0 .. floor(N/2).
[[nodiscard]] std::vector<double> periodogram(std::span<const double> x);

/// Phase-randomised replica with the amplitude spectrum of x. Requires N >= 8.
[[nodiscard]] std::vector<double> ft_surrogate(std::span<const double> x, Rng& rng);

/// Amplitude-adjusted FT surrogate; the result is a permutation of x.
/// Ties in x are ranked by position. Requires N >= 8.
[[nodiscard]] std::vector<double> aaft_surrogate(std::span<const double> x, Rng& rng);

[[nodiscard]] std::vector<double> make_surrogate(std::span<const double> x, Method method, Rng& rng);

/// Summary of the per-surrogate statistic.
struct NullSummary {
  std::size_t count = 0;            ///< surrogates evaluated without error
  std::size_t count_exceeding = 0;  ///< statistic >= observed
  double mean = 0.0;
  double q05 = 0.0;
  double q50 = 0.0;
  double q95 = 0.0;
  double q99 = 0.0;
};

/// A secondary match rule evaluated on the same surrogates.
struct AlternativeCriterion {
  std::string name;
  std::size_t matches = 0;
  double p_value = 1.0;
};

struct SurrogateVerdict {
  std::string criterion;
  std::size_t target_index = 0;  ///< position the verdict refers to (0-based)
  double observed_stat = 0.0;
  NullSummary null_stats;
  std::size_t n_surrogates = 0;
  std::size_t failures = 0;
  std::size_t matches = 0;
  double p_value = 1.0;          ///< (1 + matches) / (1 + evaluated surrogates)
  bool at_resolution_floor = false;  ///< no surrogate matched
  std::vector<double> significant_at;
  std::vector<AlternativeCriterion> alternatives;

  /// "< 1/(n+1)" style text when no surrogate matched, else the p-value.
  [[nodiscard]] std::string p_value_text() const;
};

/// Runs the break detector on one series; the default is breaks::supf_test.
using BreakDetector = std::function<breaks::SupFResult(std::span<const double>)>;

[[nodiscard]] BreakDetector supf_detector(const breaks::BreakConfig& cfg);

/**
 * @brief Surrogate test of one observed break.
 *
 * The observed statistic is F(k_obs), the single-break F statistic at the
 * observed break. A surrogate matches when its F profile reaches at least that
 * value at some k within the match window of k_obs. Two further rules are
 * reported as alternatives: "joint" (surrogate SupF significant at 5% with its
 * argmax inside the window) and "supf_exceedance" (surrogate SupF >= observed
 * SupF anywhere).
 *
 * @param break_index 1-based last observation of the regime before the break.
 * @throws std::runtime_error when the detector fails on more than 1% of surrogates.
 */
[[nodiscard]] SurrogateVerdict break_significance(std::span<const double> y, std::size_t break_index,
                                                  const SurrogateConfig& cfg, const BreakDetector& detector);

/// One verdict per break of `observed`. Throws std::invalid_argument when the
/// model has no break.
[[nodiscard]] std::vector<SurrogateVerdict> break_significance(const DailySeries& y,
                                                               const breaks::BreakModel& observed,
                                                               const SurrogateConfig& cfg,
                                                               const BreakDetector& detector);

/// Runs the HHT pipeline on one series and returns its energy profile.
using EnergyRunner = std::function<hht::EnergyProfile(std::span<const double>)>;

[[nodiscard]] EnergyRunner hht_runner(const hht::EmdConfig& emd_cfg = {}, const hht::FrequencyGrid& grid = {},
                                      double b = 4.0);

/**
 * @brief Surrogate test of observed energy events.
 *
 * Energies are compared as exceedances z(t) = (IE(t) - mean) / std. Each
 * observed event i has z_i at its index; a surrogate matches when, for some i,
 * its maximum z within the window around that index is at least z_i.
 * The per-surrogate statistic is max_i (window max z - z_i), so the observed
 * value is 0 and a match is a non-negative statistic.
 * Alternatives: "joint" (a surrogate event peak inside any window) and
 * "global_exceedance" (surrogate max z >= largest observed z).
 *
 * @param event_indices 0-based positions of the observed events (e.g. peaks).
 * @throws std::invalid_argument when no event is given.
 */
[[nodiscard]] SurrogateVerdict energy_significance(std::span<const double> series,
                                                   std::span<const std::size_t> event_indices,
                                                   const SurrogateConfig& cfg, const EnergyRunner& runner);

}  // namespace regimeshift::surrogate
