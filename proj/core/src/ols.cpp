#include "regimeshift/ols.hpp"

#include <string>

#include "regimeshift/errors.hpp"

namespace regimeshift {

namespace {

constexpr double kRankTolerance = 1e-10;

Eigen::ColPivHouseholderQR<Eigen::MatrixXd> factorize(const Eigen::MatrixXd& X) {
  if (X.rows() < X.cols()) {
    throw NumericalError("least squares needs at least as many rows (" + std::to_string(X.rows()) +
                         ") as regressors (" + std::to_string(X.cols()) + ")");
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(kRankTolerance);
  if (qr.rank() < X.cols()) {
    throw NumericalError("singular design matrix: rank " + std::to_string(qr.rank()) + " < " +
                         std::to_string(X.cols()) + " regressors");
  }
  return qr;
}

Eigen::MatrixXd xtx_inverse(const Eigen::ColPivHouseholderQR<Eigen::MatrixXd>& qr) {
  const auto k = qr.cols();
  const Eigen::MatrixXd R = qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd r_inv =
      R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
  const Eigen::MatrixXd permuted = r_inv * r_inv.transpose();
  const auto& P = qr.colsPermutation();
  return P * permuted * P.transpose();
}

}  // namespace

OlsFit ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  const auto qr = factorize(X);
  OlsFit fit;
  fit.beta = qr.solve(y);
  fit.residuals = y - X * fit.beta;
  fit.ssr = fit.residuals.squaredNorm();
  fit.xtx_inverse = xtx_inverse(qr);
  fit.nobs = static_cast<std::size_t>(X.rows());
  return fit;
}

MultiOlsFit ols_multi(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y) {
  const auto qr = factorize(X);
  MultiOlsFit fit;
  fit.beta = qr.solve(Y);
  fit.residuals = Y - X * fit.beta;
  fit.xtx_inverse = xtx_inverse(qr);
  return fit;
}

}  // namespace regimeshift
