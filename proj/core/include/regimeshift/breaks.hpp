#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "regimeshift/daily_series.hpp"

namespace regimeshift::breaks {

enum class Selection { FixedM, BicMin, SequentialSupF };

[[nodiscard]] std::string_view to_string(Selection s);
[[nodiscard]] Selection parse_selection(std::string_view s);

struct BreakConfig {
  std::size_t max_breaks = 5;
  double trim = 0.15;  ///< minimum regime length as a fraction of T, in (0, 0.25]
  Selection selection = Selection::BicMin;
  std::size_t fixed_m = 1;  ///< used by Selection::FixedM
  std::size_t null_replications = 2000;
  std::uint64_t seed = 20241105;
  unsigned threads = 1;
};

/// h = ceil(trim * T). Throws std::invalid_argument when trim is out of
/// range or h < 2.
[[nodiscard]] std::size_t min_segment_length(double trim, std::size_t T);

/**
 * @brief Sum of squared deviations from the segment mean for every segment.
 *
 * Built in O(T^2) with one running (Welford) update per cell; memory is
 * T(T+1)/2 doubles. Indices are 0-based and inclusive.
 */
class SsrTable {
 public:
  explicit SsrTable(std::span<const double> y);

  [[nodiscard]] double operator()(std::size_t first, std::size_t last) const {
    return cells_[offset(first) + (last - first)];
  }
  [[nodiscard]] std::size_t size() const { return n_; }

 private:
  [[nodiscard]] std::size_t offset(std::size_t i) const { return i * n_ - (i * (i - 1)) / 2; }

  std::size_t n_;
  std::vector<double> cells_;
};

/// Requires T >= 4.
[[nodiscard]] SsrTable segment_ssr_table(std::span<const double> y);

/// Mean-shift model y_t = mu_j + u_t with m breaks.
struct BreakModel {
  std::size_t m = 0;
  /// T_1 < .. < T_m: 1-based index of the last observation of each regime
  /// but the final one.
  std::vector<std::size_t> break_indices;
  /// Date of observation T_j, i.e. the last day of regime j. Empty when the
  /// model was fitted to a bare span.
  std::vector<Date> break_dates;
  std::vector<double> regime_means;
  std::vector<double> regime_ssr;
  double global_ssr = 0.0;
  std::size_t min_segment = 0;
  double bic = 0.0;  ///< T ln(SSR/T) + (2m+1) ln T
};

/// Exact global SSR minimiser over all partitions with m breaks and regimes
/// of at least `min_segment` observations; ties go to the lexicographically
/// earliest break vector. Throws std::invalid_argument when (m+1)h > T.
[[nodiscard]] BreakModel estimate_breaks(std::span<const double> y, std::size_t min_segment, std::size_t m);
[[nodiscard]] BreakModel estimate_breaks(std::span<const double> y, const SsrTable& table,
                                         std::size_t min_segment, std::size_t m);
[[nodiscard]] BreakModel estimate_breaks(const DailySeries& y, const BreakConfig& cfg, std::size_t m);

/// Chooses the number of breaks per cfg.selection.
[[nodiscard]] BreakModel select_num_breaks(std::span<const double> y, const BreakConfig& cfg);
[[nodiscard]] BreakModel select_num_breaks(const DailySeries& y, const BreakConfig& cfg);

/// F(k) for a single break after observation k (1-based), k in [h, T-h].
/// Entry i of the result corresponds to k = h + i.
[[nodiscard]] std::vector<double> f_profile(std::span<const double> y, std::size_t min_segment);

struct SupFResult {
  double sup_f = 0.0;
  std::size_t q = 1;
  std::size_t lambda_first = 0;  ///< smallest admissible k (= h)
  std::size_t lambda_last = 0;   ///< largest admissible k (= T - h)
  std::size_t argmax_index = 0;  ///< 1-based k attaining sup_f (earliest on ties)
  double p_value = 1.0;
  double crit_5 = 0.0;  ///< 95% quantile of the simulated null
  bool reject_at_5pct = false;
  bool degenerate = false;  ///< zero-variance input
  std::size_t null_replications = 0;
  std::vector<double> f;  ///< f_profile(y, h)

  [[nodiscard]] double f_at(std::size_t k) const { return f[k - lambda_first]; }
};

/// Sorted sup-F statistics of i.i.d. Gaussian samples of one length and trim.
class SupFNull {
 public:
  SupFNull(std::size_t T, std::size_t min_segment, std::size_t replications, std::uint64_t seed,
           unsigned threads);

  /// (1 + #{null >= stat}) / (1 + replications)
  [[nodiscard]] double p_value(double stat) const;
  [[nodiscard]] double quantile(double level) const;
  [[nodiscard]] std::size_t replications() const { return stats_.size(); }

 private:
  std::vector<double> stats_;
};

/// Shared, memoised null distribution; the F statistic is scale free, so
/// unit-variance draws serve every input variance.
[[nodiscard]] std::shared_ptr<const SupFNull> supf_null(std::size_t T, std::size_t min_segment,
                                                        std::size_t replications, std::uint64_t seed,
                                                        unsigned threads);

/// Requires T >= 2h + 2.
[[nodiscard]] SupFResult supf_test(std::span<const double> y, const BreakConfig& cfg);
[[nodiscard]] SupFResult supf_test(const DailySeries& y, const BreakConfig& cfg);

}  // namespace regimeshift::breaks
