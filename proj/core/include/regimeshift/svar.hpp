#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "regimeshift/daily_series.hpp"
#include "regimeshift/date.hpp"
#include "regimeshift/unitroot.hpp"

namespace regimeshift::svar {

/// Aligned two-column stationary panel.
struct Panel {
  Date start;  ///< date of the first row
  std::array<std::string, 2> labels{"y1", "y2"};
  Eigen::MatrixXd data;  ///< T x 2
  /// ADF results for each transformed column; empty for panels built from raw matrices.
  std::vector<unitroot::AdfResult> adf;
  std::vector<std::string> warnings;

  [[nodiscard]] std::size_t rows() const { return static_cast<std::size_t>(data.rows()); }
  [[nodiscard]] bool stationary() const;
};

/// Wraps an already stationary T x 2 matrix.
[[nodiscard]] Panel make_panel(Eigen::MatrixXd data, std::array<std::string, 2> labels = {"y1", "y2"},
                               Date start = Date{});

/**
 * @brief Intersects dates, applies log1p and a first difference to each series
 * and runs a constant-only ADF test on both columns.
 *
 * Non-stationary columns are recorded in `warnings` and are not fatal.
 * @throws DataError when the overlap is shorter than `min_overlap_days` or a
 *         transformed column has no variation.
 */
[[nodiscard]] Panel prepare_pair(const DailySeries& a, const DailySeries& b, std::size_t min_overlap_days = 60);

/// Reduced-form VAR(p): Y_t = c + sum_i Phi_i Y_{t-i} + u_t.
struct VarModel {
  std::size_t p = 0;
  Eigen::Vector2d c = Eigen::Vector2d::Zero();
  std::vector<Eigen::Matrix2d> phi;
  Eigen::Matrix2d sigma_u = Eigen::Matrix2d::Zero();  ///< E'E / T_eff
  std::size_t t_eff = 0;
  double aic = 0.0;  ///< ln det Sigma_u + 2 * 2(1 + 2p) / T_eff

  /// Regressor layout [1, Y_{t-1}', .., Y_{t-p}']; column j holds equation j.
  Eigen::MatrixXd beta;
  Eigen::MatrixXd xtx_inverse;
  Eigen::MatrixXd residuals;  ///< T_eff x 2
  /// AIC for p = 1 .. p_max on the common sample; filled by select_lag only.
  std::vector<double> lag_aic;
};

/// Minimum number of rows for a VAR(p) fit.
[[nodiscard]] std::size_t min_rows(std::size_t p);

/// Fits on rows [first_row, T) with lags reaching back to row first_row - p.
/// Requires first_row >= p and T - first_row > 4p + 7.
/// @throws NumericalError for a singular regressor matrix.
[[nodiscard]] VarModel fit_var(const Eigen::MatrixXd& y, std::size_t p, std::size_t first_row);
[[nodiscard]] VarModel fit_var(const Panel& panel, std::size_t p);

/// AIC lag selection over 1..p_max on a common sample; ties go to the smaller
/// lag. The winner is refit on the full panel.
[[nodiscard]] VarModel select_lag(const Panel& panel, std::size_t p_max = 14);

enum class Ordering { FirstVarLeads, SecondVarLeads };

[[nodiscard]] std::string_view to_string(Ordering o);

/**
 * @brief Recursive (Cholesky) identification.
 *
 * `P` is the lower-triangular factor of Sigma_u permuted into the ordering,
 * so P(0,0) is the leading variable's own impact, P(1,0) its impact on the
 * follower and P(1,1) the follower's own impact.
 */
struct ImpactMatrix {
  Ordering ordering = Ordering::FirstVarLeads;
  Eigen::Matrix2d P = Eigen::Matrix2d::Zero();
  std::array<std::size_t, 2> order{0, 1};  ///< original column of each ordered position

  /// Impact of the structural shock of original variable j on original variable i.
  [[nodiscard]] Eigen::Matrix2d in_original_order() const;
  /// P P' mapped back to the original variable order.
  [[nodiscard]] Eigen::Matrix2d implied_covariance() const;
};

/// @throws NumericalError when Sigma_u is not positive definite.
[[nodiscard]] ImpactMatrix impact_matrix(const Eigen::Matrix2d& sigma_u, Ordering ordering);
[[nodiscard]] ImpactMatrix impact_matrix(const VarModel& model, Ordering ordering);

struct WaldReport {
  Eigen::VectorXd theta_pre;
  Eigen::VectorXd theta_post;
  Eigen::MatrixXd cov_pre;
  Eigen::MatrixXd cov_post;
  double W = 0.0;
  std::size_t df = 0;
  double p_value = 1.0;
  bool regularized = false;
  bool includes_intercepts = false;
  /// Coefficients with |post| > |pre|.
  std::size_t larger_in_post = 0;
};

/// Stacked coefficients of both equations with covariance Sigma_u (x) (X'X)^-1.
[[nodiscard]] Eigen::VectorXd stacked_coefficients(const VarModel& m, bool include_intercepts);
[[nodiscard]] Eigen::MatrixXd coefficient_covariance(const VarModel& m, bool include_intercepts);

/// Requires equal lag orders.
[[nodiscard]] WaldReport wald_test(const VarModel& pre, const VarModel& post, bool include_intercepts = false);

struct SvarConfig {
  std::size_t p_max = 14;
  std::size_t min_overlap_days = 60;
  bool include_intercepts = false;
};

struct ImpactEntries {
  Ordering ordering = Ordering::FirstVarLeads;
  std::string leader;
  std::string follower;
  double leader_own = 0.0;      ///< P(0,0)
  double leader_to_follower = 0.0;  ///< P(1,0)
  double follower_own = 0.0;    ///< P(1,1)
};

struct WindowFit {
  std::string name;  ///< "full", "pre" or "post"
  Date first;
  Date last;
  Panel panel;
  VarModel model;
  std::array<ImpactMatrix, 2> impacts;
  std::array<ImpactEntries, 2> entries;
};

struct ImpactChange {
  Ordering ordering = Ordering::FirstVarLeads;
  std::string entry;
  double pre = 0.0;
  double post = 0.0;
  double percent_change = 0.0;
};

struct SvarRegimeReport {
  std::array<std::string, 2> labels;
  Date split_date;
  std::size_t p = 0;  ///< full-sample AIC lag, used for every window
  std::vector<WindowFit> windows;  ///< full, pre, post
  /// One per ordering. The reduced form does not depend on the ordering, so
  /// both carry the same statistic.
  std::array<WaldReport, 2> wald;
  std::vector<ImpactChange> changes;
};

/// Full, pre (< split_date) and post (>= split_date) windows, both orderings.
[[nodiscard]] SvarRegimeReport regime_analysis(const DailySeries& a, const DailySeries& b, Date split_date,
                                               const SvarConfig& cfg = {});

}  // namespace regimeshift::svar
