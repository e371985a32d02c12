#include "regimeshift/hht.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "fft.hpp"

namespace regimeshift::hht {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kEnvelopeTolerance = 0.1;
constexpr std::size_t kMinEmdLength = 16;
constexpr std::size_t kMinHilbertLength = 8;

double rms(std::span<const double> x) {
  double ss = 0.0;
  for (double v : x) ss += v * v;
  return std::sqrt(ss / static_cast<double>(x.size()));
}

// Envelope through the given extrema plus the two nearest each end, mirrored
// about that end.
std::vector<double> envelope_through(std::span<const double> x, const std::vector<std::size_t>& idx) {
  const auto n = x.size();
  const double last = static_cast<double>(n - 1);
  std::vector<double> knots;
  std::vector<double> values;
  knots.reserve(idx.size() + 4);
  values.reserve(idx.size() + 4);
  for (std::size_t k = 2; k-- > 0;) {
    knots.push_back(-static_cast<double>(idx[k]));
    values.push_back(x[idx[k]]);
  }
  for (auto i : idx) {
    knots.push_back(static_cast<double>(i));
    values.push_back(x[i]);
  }
  const auto m = idx.size();
  for (std::size_t k = 0; k < 2; ++k) {
    const auto i = idx[m - 1 - k];
    knots.push_back(2.0 * last - static_cast<double>(i));
    values.push_back(x[i]);
  }
  return natural_cubic_spline(knots, values, n);
}

}  // namespace

std::string_view to_string(SiftStop s) {
  switch (s) {
    case SiftStop::ImfConditions: return "imf_conditions";
    case SiftStop::SdCriterion: return "sd_criterion";
    case SiftStop::IterationCap: return "iteration_cap";
    case SiftStop::ExtremaExhausted: return "extrema_exhausted";
  }
  return "unknown";
}

Extrema find_extrema(std::span<const double> x) {
  Extrema out;
  const auto n = x.size();
  std::size_t i = 1;
  while (i + 1 < n) {
    // Extend over a flat run starting at i.
    std::size_t j = i;
    while (j + 1 < n && x[j + 1] == x[i]) ++j;
    if (j + 1 >= n) break;
    const double before = x[i - 1];
    const double after = x[j + 1];
    const std::size_t mid = i + (j - i) / 2;
    if (x[i] > before && x[i] > after) out.maxima.push_back(mid);
    if (x[i] < before && x[i] < after) out.minima.push_back(mid);
    i = j + 1;
  }
  return out;
}

std::size_t count_zero_crossings(std::span<const double> x) {
  std::size_t count = 0;
  int previous = 0;
  for (double v : x) {
    const int sign = (v > 0.0) - (v < 0.0);
    if (sign == 0) continue;
    if (previous != 0 && sign != previous) ++count;
    previous = sign;
  }
  return count;
}

std::vector<double> natural_cubic_spline(std::span<const double> knots, std::span<const double> values,
                                         std::size_t n) {
  const std::size_t k = knots.size();
  if (k < 2 || values.size() != k) throw std::invalid_argument("spline needs at least two knots");
  for (std::size_t i = 1; i < k; ++i) {
    if (!(knots[i] > knots[i - 1])) throw std::invalid_argument("spline knots must be strictly increasing");
  }

  // Second derivatives M with M_0 = M_{k-1} = 0 (Thomas algorithm).
  std::vector<double> M(k, 0.0);
  if (k > 2) {
    const std::size_t inner = k - 2;
    std::vector<double> diag(inner);
    std::vector<double> upper(inner);
    std::vector<double> rhs(inner);
    for (std::size_t r = 0; r < inner; ++r) {
      const std::size_t i = r + 1;
      const double h0 = knots[i] - knots[i - 1];
      const double h1 = knots[i + 1] - knots[i];
      diag[r] = 2.0 * (h0 + h1);
      upper[r] = h1;
      rhs[r] = 6.0 * ((values[i + 1] - values[i]) / h1 - (values[i] - values[i - 1]) / h0);
      if (r > 0) {
        const double w = h0 / diag[r - 1];
        diag[r] -= w * upper[r - 1];
        rhs[r] -= w * rhs[r - 1];
      }
    }
    for (std::size_t r = inner; r-- > 0;) {
      const double next = r + 1 < inner ? M[r + 2] : 0.0;
      M[r + 1] = (rhs[r] - upper[r] * next) / diag[r];
    }
  }

  std::vector<double> out(n);
  std::size_t seg = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double x = static_cast<double>(t);
    while (seg + 2 < k && x > knots[seg + 1]) ++seg;
    const double h = knots[seg + 1] - knots[seg];
    const double a = (knots[seg + 1] - x) / h;
    const double b = (x - knots[seg]) / h;
    out[t] = a * values[seg] + b * values[seg + 1] +
             ((a * a * a - a) * M[seg] + (b * b * b - b) * M[seg + 1]) * h * h / 6.0;
  }
  return out;
}

Envelopes envelopes(std::span<const double> x, const Extrema& ext) {
  if (ext.maxima.size() < 2 || ext.minima.size() < 2) {
    throw TooFewExtrema("envelopes need at least two maxima and two minima");
  }
  Envelopes env;
  env.upper = envelope_through(x, ext.maxima);
  env.lower = envelope_through(x, ext.minima);
  env.mean.resize(x.size());
  for (std::size_t t = 0; t < x.size(); ++t) env.mean[t] = 0.5 * (env.upper[t] + env.lower[t]);
  return env;
}

ImfCheck check_imf(std::span<const double> x) {
  ImfCheck c;
  const Extrema ext = find_extrema(x);
  c.extrema = ext.maxima.size() + ext.minima.size();
  c.zero_crossings = count_zero_crossings(x);
  c.counts_ok = (c.extrema > c.zero_crossings ? c.extrema - c.zero_crossings : c.zero_crossings - c.extrema) <= 1;
  c.rms = rms(x);
  if (ext.maxima.size() >= 2 && ext.minima.size() >= 2) {
    const Envelopes env = envelopes(x, ext);
    double s = 0.0;
    for (double v : env.mean) s += std::abs(v);
    c.envelope_mean_abs = s / static_cast<double>(x.size());
    c.envelope_ok = c.envelope_mean_abs <= kEnvelopeTolerance * c.rms;
  }
  return c;
}

SiftResult sift(std::span<const double> signal, const EmdConfig& cfg) {
  if (!(cfg.sift_sd_threshold > 0.0 && cfg.sift_sd_threshold < 1.0)) {
    throw std::invalid_argument("sift SD threshold must lie in (0, 1)");
  }
  if (cfg.max_sift_iters < 1) throw std::invalid_argument("at least one sifting iteration is required");

  std::vector<double> h(signal.begin(), signal.end());
  SiftResult out;
  out.imf.stop_reason = SiftStop::IterationCap;
  std::size_t iter = 0;
  while (iter < cfg.max_sift_iters) {
    const Extrema ext = find_extrema(h);
    if (ext.maxima.size() < 2 || ext.minima.size() < 2) {
      if (iter == 0) throw TooFewExtrema("signal has too few extrema to sift");
      out.imf.stop_reason = SiftStop::ExtremaExhausted;
      break;
    }
    const Envelopes env = envelopes(h, ext);

    const std::size_t extrema = ext.maxima.size() + ext.minima.size();
    const std::size_t crossings = count_zero_crossings(h);
    const bool counts_ok = (extrema > crossings ? extrema - crossings : crossings - extrema) <= 1;
    double mean_abs = 0.0;
    for (double v : env.mean) mean_abs += std::abs(v);
    mean_abs /= static_cast<double>(h.size());
    if (counts_ok && mean_abs <= kEnvelopeTolerance * rms(h)) {
      out.imf.stop_reason = SiftStop::ImfConditions;
      break;
    }

    double change = 0.0;
    double energy = 0.0;
    for (std::size_t t = 0; t < h.size(); ++t) {
      change += env.mean[t] * env.mean[t];
      energy += h[t] * h[t];
      h[t] -= env.mean[t];
    }
    ++iter;
    if (energy > 0.0 && change / energy < cfg.sift_sd_threshold && counts_ok) {
      out.imf.stop_reason = SiftStop::SdCriterion;
      break;
    }
  }

  out.imf.sift_iterations = iter;
  out.residual.resize(signal.size());
  for (std::size_t t = 0; t < signal.size(); ++t) out.residual[t] = signal[t] - h[t];
  out.imf.values = std::move(h);
  return out;
}

Decomposition emd(std::span<const double> signal, const EmdConfig& cfg) {
  if (signal.size() < kMinEmdLength) {
    throw std::invalid_argument("EMD needs at least " + std::to_string(kMinEmdLength) + " samples");
  }
  if (cfg.max_imfs < 1) throw std::invalid_argument("max_imfs must be positive");
  Decomposition out;
  out.residue.assign(signal.begin(), signal.end());
  while (out.imfs.size() < cfg.max_imfs) {
    const Extrema ext = find_extrema(out.residue);
    // Residue counts as monotone with up to two extrema of numerical ripple.
    if (ext.maxima.size() + ext.minima.size() <= 2 || ext.maxima.size() < 2 || ext.minima.size() < 2) break;
    SiftResult step = sift(out.residue, cfg);
    step.imf.index = out.imfs.size();
    out.imfs.push_back(std::move(step.imf));
    out.residue = std::move(step.residual);
  }
  if (out.imfs.empty()) throw TooFewExtrema("signal has no oscillatory component to decompose");
  return out;
}

Decomposition emd(const DailySeries& signal, const EmdConfig& cfg) {
  return emd(std::span<const double>(signal.values), cfg);
}

AnalyticSignal analytic_signal(std::span<const double> imf) {
  const std::size_t n = imf.size();
  if (n < kMinHilbertLength) {
    throw std::invalid_argument("analytic signal needs at least " + std::to_string(kMinHilbertLength) + " samples");
  }
  std::vector<std::complex<double>> x(imf.begin(), imf.end());
  auto spectrum = detail::dft(x);
  // Keep DC (and Nyquist), double positive frequencies, drop negative ones.
  const std::size_t half = n / 2;
  for (std::size_t k = 1; k < n; ++k) {
    if (k < (n + 1) / 2) {
      spectrum[k] *= 2.0;
    } else if (!(n % 2 == 0 && k == half)) {
      spectrum[k] = 0.0;
    }
  }
  const auto z = detail::idft(spectrum);

  AnalyticSignal out;
  out.amplitude.resize(n);
  out.phase.resize(n);
  out.frequency.resize(n);
  double offset = 0.0;
  double previous = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    out.amplitude[t] = std::abs(z[t]);
    const double raw = std::atan2(z[t].imag(), z[t].real());
    if (t > 0) {
      const double step = raw + offset - previous;
      if (step > std::numbers::pi) offset -= kTwoPi;
      else if (step < -std::numbers::pi) offset += kTwoPi;
    }
    out.phase[t] = raw + offset;
    previous = out.phase[t];
  }
  out.frequency[0] = out.phase[1] - out.phase[0];
  out.frequency[n - 1] = out.phase[n - 1] - out.phase[n - 2];
  for (std::size_t t = 1; t + 1 < n; ++t) out.frequency[t] = 0.5 * (out.phase[t + 1] - out.phase[t - 1]);
  return out;
}

std::optional<std::size_t> FrequencyGrid::bin_of(double omega) const {
  if (!(omega > 0.0) || omega > max_omega) return std::nullopt;
  auto bin = static_cast<std::size_t>(std::ceil(omega / width())) - 1;
  return std::min(bin, bins - 1);
}

HilbertSpectrum hilbert_spectrum(std::span<const AnalyticSignal> components, const FrequencyGrid& grid) {
  if (components.empty()) throw std::invalid_argument("Hilbert spectrum needs at least one component");
  if (grid.bins == 0 || !(grid.max_omega > 0.0)) throw std::invalid_argument("invalid frequency grid");
  HilbertSpectrum out;
  out.times = components.front().amplitude.size();
  out.grid = grid;
  out.cells.assign(out.times * grid.bins, 0.0);
  for (const auto& c : components) {
    if (c.amplitude.size() != out.times) throw std::invalid_argument("components differ in length");
    for (std::size_t t = 0; t < out.times; ++t) {
      if (const auto bin = grid.bin_of(c.frequency[t])) out.cells[t * grid.bins + *bin] += c.amplitude[t];
    }
  }
  return out;
}

HilbertSpectrum hilbert_spectrum(std::span<const Imf> imfs, const FrequencyGrid& grid) {
  std::vector<AnalyticSignal> components;
  components.reserve(imfs.size());
  for (const auto& imf : imfs) components.push_back(analytic_signal(imf.values));
  return hilbert_spectrum(components, grid);
}

double EnergyProfile::exceedance(std::size_t t) const { return e_std > 0.0 ? (ie[t] - e_mean) / e_std : 0.0; }

namespace {
constexpr double kFlatEnergyTolerance = 1e-12;
}  // namespace

EnergyProfile instantaneous_energy(const HilbertSpectrum& spectrum, double b) {
  if (spectrum.times == 0) throw std::invalid_argument("empty Hilbert spectrum");
  EnergyProfile out;
  out.b = b;
  const double d_omega = spectrum.grid.width();
  out.ie.resize(spectrum.times);
  for (std::size_t t = 0; t < spectrum.times; ++t) {
    double s = 0.0;
    for (std::size_t bin = 0; bin < spectrum.grid.bins; ++bin) {
      const double h = spectrum.at(t, bin);
      s += h * h;
    }
    out.ie[t] = s * d_omega;
  }
  out.max_ie = *std::max_element(out.ie.begin(), out.ie.end());
  out.ie_norm.resize(out.ie.size());
  for (std::size_t t = 0; t < out.ie.size(); ++t) out.ie_norm[t] = out.max_ie > 0.0 ? out.ie[t] / out.max_ie : 0.0;

  double sum = 0.0;
  for (double v : out.ie) sum += v;
  out.e_mean = sum / static_cast<double>(out.ie.size());
  double ss = 0.0;
  for (double v : out.ie) ss += (v - out.e_mean) * (v - out.e_mean);
  out.e_std = std::sqrt(ss / static_cast<double>(out.ie.size()));
  const bool flat = out.e_std <= kFlatEnergyTolerance * std::abs(out.e_mean);
  if (flat) out.e_std = 0.0;
  out.e_th = out.e_mean + b * out.e_std;

  for (std::size_t t = 0; !flat && t < out.ie.size();) {
    if (!(out.ie[t] > out.e_th)) {
      ++t;
      continue;
    }
    ExtremeEvent ev;
    ev.first = t;
    ev.peak = t;
    while (t < out.ie.size() && out.ie[t] > out.e_th) {
      if (out.ie[t] > out.ie[ev.peak]) ev.peak = t;
      ++t;
    }
    ev.last = t - 1;
    ev.peak_ie_norm = out.ie_norm[ev.peak];
    out.events.push_back(ev);
  }
  return out;
}

HilbertProfile analyze(std::span<const double> signal, const EmdConfig& cfg, const FrequencyGrid& grid, double b) {
  HilbertProfile out;
  out.decomposition = emd(signal, cfg);
  out.components.reserve(out.decomposition.imfs.size());
  for (const auto& imf : out.decomposition.imfs) out.components.push_back(analytic_signal(imf.values));
  out.spectrum = hilbert_spectrum(out.components, grid);
  out.energy = instantaneous_energy(out.spectrum, b);
  return out;
}

HilbertProfile analyze(const DailySeries& signal, const EmdConfig& cfg, const FrequencyGrid& grid, double b) {
  HilbertProfile out = analyze(std::span<const double>(signal.values), cfg, grid, b);
  out.start = signal.start;
  return out;
}

}  // namespace regimeshift::hht
