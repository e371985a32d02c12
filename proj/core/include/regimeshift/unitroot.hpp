#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

#include <Eigen/Dense>

#include "regimeshift/daily_series.hpp"

namespace regimeshift::unitroot {

/// Deterministic terms of the test regression.
enum class Deterministic { None, ConstantOnly, ConstantAndTrend };

enum class LagSelection { FixedLag, AicMin };

[[nodiscard]] std::string_view to_string(Deterministic d);
[[nodiscard]] Deterministic parse_deterministic(std::string_view s);

struct AdfSpec {
  Deterministic deterministic = Deterministic::ConstantOnly;
  /// Upper lag bound; defaults to floor(12 (T/100)^(1/4)).
  std::optional<std::size_t> max_lag;
  LagSelection lag_selection = LagSelection::AicMin;
  /// Lag used when lag_selection is FixedLag.
  std::size_t fixed_lag = 0;
};

/// floor(12 (T/100)^(1/4)), capped so that max_lag < (T - 10) / 2.
[[nodiscard]] std::size_t default_max_lag(std::size_t T);

/**
 * @brief OLS summary of Δy_t on y_{t-1}, `lag` lagged differences and the
 * deterministic terms.
 *
 * Coefficient order: y_{t-1}, Δy_{t-1} .. Δy_{t-lag}, then constant and trend
 * when present. The y_{t-1} coefficient is rho = alpha - 1, and
 * t_stat = rho / SE(rho).
 */
struct AdfRegression {
  Eigen::VectorXd coefficients;
  double rho = 0.0;
  double se_rho = 0.0;
  double t_stat = 0.0;
  double sigma2 = 0.0;  ///< SSR / (nobs - k)
  double ssr = 0.0;
  double aic = 0.0;     ///< -2 log L + 2k under Gaussian errors
  std::size_t nobs = 0;
  std::size_t lag = 0;
};

/// Throws NumericalError on a singular design, std::invalid_argument when
/// the sample is too short for the regression.
[[nodiscard]] AdfRegression adf_regression(std::span<const double> y, Deterministic deterministic,
                                           std::size_t lag);

struct AdfResult {
  double t_stat = 0.0;
  double p_value = 1.0;
  double crit_1 = 0.0;
  double crit_5 = 0.0;
  double crit_10 = 0.0;
  std::size_t chosen_lag = 0;
  std::size_t nobs = 0;
  double alpha_hat = 0.0;  ///< 1 + rho
  bool stationary_at_5pct = false;
  bool p_value_clamped = false;
  Deterministic deterministic = Deterministic::ConstantOnly;
};

/// Augmented Dickey-Fuller test. Requires T >= 30.
[[nodiscard]] AdfResult adf_test(std::span<const double> y, const AdfSpec& spec = {});
[[nodiscard]] AdfResult adf_test(const DailySeries& y, const AdfSpec& spec = {});

/// MacKinnon (1994) approximate asymptotic p-value for a single-series tau
/// statistic, without clamping (0 or 1 outside the fitted range).
[[nodiscard]] double mackinnon_p_value(double tau, Deterministic deterministic);

/// MacKinnon (2010) finite-sample 1%, 5%, 10% critical values.
[[nodiscard]] std::array<double, 3> mackinnon_critical_values(Deterministic deterministic, std::size_t nobs);

}  // namespace regimeshift::unitroot
