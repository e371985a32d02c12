#pragma once

#include <complex>
#include <vector>

namespace regimeshift::detail {

/// Unnormalised forward DFT of an arbitrary-length sequence.
std::vector<std::complex<double>> dft(const std::vector<std::complex<double>>& x);

/// Inverse DFT including the 1/N factor.
std::vector<std::complex<double>> idft(const std::vector<std::complex<double>>& X);

}  // namespace regimeshift::detail
