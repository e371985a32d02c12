#pragma once

// Reference implementations written for clarity rather than speed. They
// share no code with the library and serve as independent test oracles.

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <vector>

namespace oracle {

/// Two-pass sum of squared deviations of y[first..last] (inclusive).
inline double segment_ssr(std::span<const double> y, std::size_t first, std::size_t last) {
  long double mean = 0.0L;
  for (std::size_t i = first; i <= last; ++i) mean += y[i];
  mean /= static_cast<long double>(last - first + 1);
  long double ss = 0.0L;
  for (std::size_t i = first; i <= last; ++i) ss += (y[i] - mean) * (y[i] - mean);
  return static_cast<double>(ss);
}

struct Partition {
  double ssr = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> breaks;  // 1-based last index of each regime
};

/// Exhaustive search over all m-break partitions with regimes of >= h points.
/// `cost(first, last)` is 0-based inclusive. Sums run left to right and ties
/// keep the first partition found in lexicographic order.
inline Partition brute_force_breaks(std::size_t T, std::size_t m, std::size_t h,
                                    const std::function<double(std::size_t, std::size_t)>& cost) {
  Partition best;
  std::vector<std::size_t> b;
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t start, std::size_t left) {
    if (left == 0) {
      if (T - start < h) return;
      double total = 0.0;
      std::size_t s = 0;
      for (std::size_t k : b) {
        total += cost(s, k - 1);
        s = k;
      }
      total += cost(s, T - 1);
      if (total < best.ssr) {
        best.ssr = total;
        best.breaks = b;
      }
      return;
    }
    for (std::size_t k = start + h; k + left * h <= T; ++k) {
      b.push_back(k);
      rec(k, left - 1);
      b.pop_back();
    }
  };
  rec(0, m);
  return best;
}

/// O(N^2) DFT.
inline std::vector<std::complex<double>> naive_dft(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> X(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<long double> acc = 0.0L;
    for (std::size_t t = 0; t < n; ++t) {
      const long double ang = -2.0L * std::numbers::pi_v<long double> * static_cast<long double>((k * t) % n) /
                              static_cast<long double>(n);
      acc += static_cast<long double>(x[t]) * std::complex<long double>(std::cos(ang), std::sin(ang));
    }
    X[k] = std::complex<double>(static_cast<double>(acc.real()), static_cast<double>(acc.imag()));
  }
  return X;
}

/// Sample autocorrelation at `lag` (biased, divide by n).
inline double autocorrelation(std::span<const double> x, std::size_t lag) {
  const std::size_t n = x.size();
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  double c0 = 0.0;
  double ck = 0.0;
  for (std::size_t t = 0; t < n; ++t) c0 += (x[t] - mean) * (x[t] - mean);
  for (std::size_t t = lag; t < n; ++t) ck += (x[t] - mean) * (x[t - lag] - mean);
  return ck / c0;
}

/// Least squares through Gaussian elimination on the normal equations in
/// long double; adequate for the small well-conditioned designs in tests.
inline std::vector<double> normal_equations(const std::vector<std::vector<double>>& X, std::span<const double> y) {
  const std::size_t k = X.front().size();
  std::vector<std::vector<long double>> A(k, std::vector<long double>(k + 1, 0.0L));
  for (std::size_t r = 0; r < X.size(); ++r) {
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) A[i][j] += static_cast<long double>(X[r][i]) * X[r][j];
      A[i][k] += static_cast<long double>(X[r][i]) * y[r];
    }
  }
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < k; ++r) {
      if (std::fabs(A[r][c]) > std::fabs(A[piv][c])) piv = r;
    }
    std::swap(A[c], A[piv]);
    for (std::size_t r = 0; r < k; ++r) {
      if (r == c) continue;
      const long double f = A[r][c] / A[c][c];
      for (std::size_t j = c; j <= k; ++j) A[r][j] -= f * A[c][j];
    }
  }
  std::vector<double> beta(k);
  for (std::size_t i = 0; i < k; ++i) beta[i] = static_cast<double>(A[i][k] / A[i][i]);
  return beta;
}

inline std::vector<double> gaussian(std::size_t n, std::mt19937_64& rng, double sd = 1.0) {
  std::normal_distribution<double> d(0.0, sd);
  std::vector<double> x(n);
  for (auto& v : x) v = d(rng);
  return x;
}

inline std::vector<double> random_walk(std::size_t n, std::mt19937_64& rng) {
  auto x = gaussian(n, rng);
  for (std::size_t t = 1; t < n; ++t) x[t] += x[t - 1];
  return x;
}

inline std::vector<double> ar1(std::size_t n, double phi, std::mt19937_64& rng) {
  auto x = gaussian(n, rng);
  for (std::size_t t = 1; t < n; ++t) x[t] += phi * x[t - 1];
  return x;
}

/// Step of `size` standard deviations after the first `at` points.
inline std::vector<double> step_series(std::size_t n, std::size_t at, double size, std::mt19937_64& rng) {
  auto x = gaussian(n, rng);
  for (std::size_t t = at; t < n; ++t) x[t] += size;
  return x;
}

inline std::vector<double> tone(std::size_t n, double period, double amplitude = 1.0, double phase = 0.0) {
  std::vector<double> x(n);
  for (std::size_t t = 0; t < n; ++t) {
    x[t] = amplitude * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / period + phase);
  }
  return x;
}

/// Pearson correlation of x[first..last) and y[first..last).
inline double correlation(std::span<const double> x, std::span<const double> y, std::size_t first, std::size_t last) {
  const double n = static_cast<double>(last - first);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = first; i < last; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = first; i < last; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace oracle
