#pragma once

#include <cstddef>
#include <span>

namespace regimeshift::numeric {

[[nodiscard]] double mean(std::span<const double> x);

/// Population (divide-by-n) standard deviation.
[[nodiscard]] double population_std(std::span<const double> x);

[[nodiscard]] double pearson_correlation(std::span<const double> a, std::span<const double> b);

[[nodiscard]] double normal_cdf(double z);

/// Upper tail P(X >= x) of a chi-square variable with `df` degrees of freedom.
[[nodiscard]] double chi_square_sf(double x, std::size_t df);

}  // namespace regimeshift::numeric
