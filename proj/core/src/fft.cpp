#include "fft.hpp"

#include <unsupported/Eigen/FFT>

namespace regimeshift::detail {

std::vector<std::complex<double>> dft(const std::vector<std::complex<double>>& x) {
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> out;
  fft.fwd(out, x);
  return out;
}

std::vector<std::complex<double>> idft(const std::vector<std::complex<double>>& X) {
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> out;
  fft.inv(out, X);
  return out;
}

}  // namespace regimeshift::detail
