#include "regimeshift/unitroot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "regimeshift/errors.hpp"
#include "regimeshift/numeric.hpp"
#include "regimeshift/ols.hpp"

namespace regimeshift::unitroot {

namespace {

// Response-surface coefficients for one I(1) series, indexed None,
// ConstantOnly, ConstantAndTrend.
struct PValueSurface {
  double tau_max;
  double tau_min;
  double tau_star;
  std::array<double, 3> small;  // polynomial in tau, ascending powers
  std::array<double, 4> large;
};

constexpr std::array<PValueSurface, 3> kPValueSurfaces{{
    {std::numeric_limits<double>::infinity(), -19.04, -1.04,
     {0.6344, 1.2378, 0.032496},
     {0.4797, 0.93557, -0.06999, 0.033066}},
    {2.74, -18.83, -1.61,
     {2.1659, 1.4412, 0.038269},
     {1.7339, 0.93202, -0.12745, -0.010368}},
    {0.7, -16.18, -2.89,
     {3.2512, 1.6047, 0.049588},
     {2.5261, 0.61654, -0.37956, -0.060285}},
}};

// crit = b0 + b1/T + b2/T^2 + b3/T^3 for the 1%, 5%, 10% levels.
constexpr std::array<std::array<std::array<double, 4>, 3>, 3> kCriticalSurfaces{{
    {{{-2.56574, -2.2358, -3.627, 0.0}, {-1.941, -0.2686, -3.365, 31.223}, {-1.61682, 0.2656, -2.714, 25.364}}},
    {{{-3.43035, -6.5393, -16.786, -79.433},
      {-2.86154, -2.8903, -4.234, -40.04},
      {-2.56677, -1.5384, -2.809, 0.0}}},
    {{{-3.95877, -9.0531, -28.428, -134.155},
      {-3.41049, -4.3904, -9.036, -45.374},
      {-3.12705, -2.5856, -3.925, -22.38}}},
}};

constexpr double kPMin = 1e-4;
constexpr double kPMax = 0.9999;
constexpr std::size_t kMinSample = 30;

std::size_t index_of(Deterministic d) { return static_cast<std::size_t>(d); }

std::size_t deterministic_terms(Deterministic d) {
  switch (d) {
    case Deterministic::None: return 0;
    case Deterministic::ConstantOnly: return 1;
    case Deterministic::ConstantAndTrend: return 2;
  }
  return 0;
}

template <std::size_t N>
double polyval(const std::array<double, N>& c, double x) {
  double acc = 0.0;
  for (std::size_t i = N; i-- > 0;) acc = acc * x + c[i];
  return acc;
}

// Regression of Δy_t for t in [first_t, T) with `lag` lagged differences.
// Rows start at t = first_t, which lets AIC comparisons share one sample.
AdfRegression regress(std::span<const double> y, Deterministic deterministic, std::size_t lag,
                      std::size_t first_t) {
  const std::size_t T = y.size();
  const std::size_t n = T - first_t;
  const std::size_t k = 1 + lag + deterministic_terms(deterministic);
  if (first_t < lag + 1 || first_t >= T || n <= k + 5) {
    throw std::invalid_argument("ADF regression with lag " + std::to_string(lag) + " needs more than " +
                                std::to_string(k + 5) + " usable observations");
  }
  Eigen::MatrixXd X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
  Eigen::VectorXd dy(static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t t = first_t + r;
    const auto row = static_cast<Eigen::Index>(r);
    dy(row) = y[t] - y[t - 1];
    X(row, 0) = y[t - 1];
    for (std::size_t j = 1; j <= lag; ++j) X(row, static_cast<Eigen::Index>(j)) = y[t - j] - y[t - j - 1];
    std::size_t col = 1 + lag;
    if (deterministic != Deterministic::None) X(row, static_cast<Eigen::Index>(col++)) = 1.0;
    // The trend's origin is absorbed by the constant.
    if (deterministic == Deterministic::ConstantAndTrend) {
      X(row, static_cast<Eigen::Index>(col)) = static_cast<double>(t);
    }
  }

  const OlsFit fit = ols(X, dy);
  AdfRegression r;
  r.coefficients = fit.beta;
  r.nobs = n;
  r.lag = lag;
  r.ssr = fit.ssr;
  r.sigma2 = fit.ssr / static_cast<double>(n - k);
  r.rho = fit.beta(0);
  r.se_rho = std::sqrt(r.sigma2 * fit.xtx_inverse(0, 0));
  r.t_stat = r.se_rho > 0.0 ? r.rho / r.se_rho : -std::numeric_limits<double>::infinity();
  const double nd = static_cast<double>(n);
  const double llf = -0.5 * nd * (std::log(2.0 * std::numbers::pi) + std::log(fit.ssr / nd) + 1.0);
  r.aic = -2.0 * llf + 2.0 * static_cast<double>(k);
  return r;
}

}  // namespace

std::string_view to_string(Deterministic d) {
  switch (d) {
    case Deterministic::None: return "none";
    case Deterministic::ConstantOnly: return "constant";
    case Deterministic::ConstantAndTrend: return "constant_trend";
  }
  return "unknown";
}

Deterministic parse_deterministic(std::string_view s) {
  if (s == "none" || s == "n") return Deterministic::None;
  if (s == "constant" || s == "c") return Deterministic::ConstantOnly;
  if (s == "constant_trend" || s == "ct") return Deterministic::ConstantAndTrend;
  throw std::invalid_argument("unknown ADF deterministic specification '" + std::string(s) + "'");
}

std::size_t default_max_lag(std::size_t T) {
  auto lag = static_cast<std::size_t>(std::floor(12.0 * std::pow(static_cast<double>(T) / 100.0, 0.25)));
  // keep max_lag < (T - 10) / 2
  const double bound = (static_cast<double>(T) - 10.0) / 2.0;
  while (lag > 0 && static_cast<double>(lag) >= bound) --lag;
  return lag;
}

AdfRegression adf_regression(std::span<const double> y, Deterministic deterministic, std::size_t lag) {
  return regress(y, deterministic, lag, lag + 1);
}

double mackinnon_p_value(double tau, Deterministic deterministic) {
  const auto& s = kPValueSurfaces[index_of(deterministic)];
  if (tau > s.tau_max) return 1.0;
  if (tau < s.tau_min) return 0.0;
  const double z = tau <= s.tau_star ? polyval(s.small, tau) : polyval(s.large, tau);
  return numeric::normal_cdf(z);
}

std::array<double, 3> mackinnon_critical_values(Deterministic deterministic, std::size_t nobs) {
  const auto& table = kCriticalSurfaces[index_of(deterministic)];
  const double inv = 1.0 / static_cast<double>(nobs);
  std::array<double, 3> out{};
  for (std::size_t level = 0; level < 3; ++level) {
    const auto& b = table[level];
    out[level] = b[0] + inv * (b[1] + inv * (b[2] + inv * b[3]));
  }
  return out;
}

AdfResult adf_test(std::span<const double> y, const AdfSpec& spec) {
  const std::size_t T = y.size();
  if (T < kMinSample) {
    throw std::invalid_argument("ADF test needs at least " + std::to_string(kMinSample) + " observations, got " +
                                std::to_string(T));
  }
  for (double v : y) {
    if (!std::isfinite(v)) throw DataError("ADF input contains a non-finite value");
  }
  const std::size_t max_lag = spec.max_lag.value_or(default_max_lag(T));
  if (static_cast<double>(max_lag) >= (static_cast<double>(T) - 10.0) / 2.0) {
    throw std::invalid_argument("ADF max_lag " + std::to_string(max_lag) + " too large for T=" + std::to_string(T));
  }

  std::size_t lag = spec.fixed_lag;
  if (spec.lag_selection == LagSelection::AicMin) {
    double best = std::numeric_limits<double>::infinity();
    lag = 0;
    for (std::size_t candidate = 0; candidate <= max_lag; ++candidate) {
      const double aic = regress(y, spec.deterministic, candidate, max_lag + 1).aic;
      if (aic < best) {
        best = aic;
        lag = candidate;
      }
    }
  }

  const AdfRegression reg = adf_regression(y, spec.deterministic, lag);
  if (!(reg.se_rho > 0.0) || !std::isfinite(reg.t_stat)) {
    throw NumericalError("ADF regression has zero residual variance; the statistic is undefined");
  }

  AdfResult out;
  out.deterministic = spec.deterministic;
  out.t_stat = reg.t_stat;
  out.chosen_lag = lag;
  out.nobs = reg.nobs;
  out.alpha_hat = 1.0 + reg.rho;
  const auto crit = mackinnon_critical_values(spec.deterministic, reg.nobs);
  out.crit_1 = crit[0];
  out.crit_5 = crit[1];
  out.crit_10 = crit[2];
  out.stationary_at_5pct = out.t_stat < out.crit_5;
  const double p = mackinnon_p_value(out.t_stat, spec.deterministic);
  out.p_value = std::clamp(p, kPMin, kPMax);
  out.p_value_clamped = out.p_value != p;
  return out;
}

AdfResult adf_test(const DailySeries& y, const AdfSpec& spec) { return adf_test(std::span<const double>(y.values), spec); }

}  // namespace regimeshift::unitroot
