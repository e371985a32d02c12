#pragma once

#include <cstddef>

#include <Eigen/Dense>

namespace regimeshift {

/// Least-squares fit of y on the columns of X.
struct OlsFit {
  Eigen::VectorXd beta;
  Eigen::VectorXd residuals;
  Eigen::MatrixXd xtx_inverse;  ///< (X'X)^-1
  double ssr = 0.0;
  std::size_t nobs = 0;
};

/// Solves via column-pivoted QR. Throws NumericalError when X is rank deficient.
[[nodiscard]] OlsFit ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

/// Fit sharing one factorisation of X across several right-hand sides.
struct MultiOlsFit {
  Eigen::MatrixXd beta;       ///< k x r
  Eigen::MatrixXd residuals;  ///< n x r
  Eigen::MatrixXd xtx_inverse;
};

[[nodiscard]] MultiOlsFit ols_multi(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y);

}  // namespace regimeshift
