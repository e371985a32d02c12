#include "regimeshift/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "fft.hpp"
#include "regimeshift/parallel.hpp"

namespace regimeshift::surrogate {

namespace {

constexpr std::size_t kMinLength = 8;
constexpr double kMaxFailureFraction = 0.01;
constexpr double kThresholds[] = {0.10, 0.05, 0.01, 0.001};

void require_length(std::span<const double> x) {
  if (x.size() < kMinLength) throw std::invalid_argument("surrogates need at least 8 samples");
}

// Positions of x in ascending order, ties by position.
std::vector<std::size_t> stable_order(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  return order;
}

double quantile_sorted(const std::vector<double>& sorted, double level) {
  if (sorted.empty()) return 0.0;
  const double pos = level * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double add_one_p(std::size_t matches, std::size_t evaluated) {
  return static_cast<double>(1 + matches) / static_cast<double>(1 + evaluated);
}

// Outcome of one surrogate; nullopt marks a detector failure.
struct Outcome {
  double stat = 0.0;
  bool match = false;
  std::vector<bool> alternative_matches;
};

SurrogateVerdict aggregate(std::string criterion, double observed, const SurrogateConfig& cfg,
                           const std::vector<std::optional<Outcome>>& outcomes,
                           const std::vector<std::string>& alternative_names) {
  SurrogateVerdict v;
  v.criterion = std::move(criterion);
  v.observed_stat = observed;
  v.n_surrogates = cfg.n_surrogates;

  std::vector<double> stats;
  stats.reserve(outcomes.size());
  std::vector<std::size_t> alt_matches(alternative_names.size(), 0);
  for (const auto& o : outcomes) {
    if (!o) {
      ++v.failures;
      continue;
    }
    stats.push_back(o->stat);
    if (o->match) ++v.matches;
    for (std::size_t a = 0; a < alt_matches.size(); ++a) alt_matches[a] += o->alternative_matches[a] ? 1 : 0;
  }
  if (static_cast<double>(v.failures) > kMaxFailureFraction * static_cast<double>(cfg.n_surrogates)) {
    std::ostringstream msg;
    msg << "detector failed on " << v.failures << " of " << cfg.n_surrogates << " surrogates";
    throw std::runtime_error(msg.str());
  }

  const std::size_t evaluated = stats.size();
  v.p_value = add_one_p(v.matches, evaluated);
  v.at_resolution_floor = v.matches == 0;
  for (double t : kThresholds) {
    if (v.p_value <= t) v.significant_at.push_back(t);
  }
  for (std::size_t a = 0; a < alt_matches.size(); ++a) {
    v.alternatives.push_back({alternative_names[a], alt_matches[a], add_one_p(alt_matches[a], evaluated)});
  }

  std::sort(stats.begin(), stats.end());
  v.null_stats.count = evaluated;
  v.null_stats.count_exceeding = static_cast<std::size_t>(
      stats.end() - std::lower_bound(stats.begin(), stats.end(), observed));
  double sum = 0.0;
  for (double s : stats) sum += s;
  v.null_stats.mean = evaluated ? sum / static_cast<double>(evaluated) : 0.0;
  v.null_stats.q05 = quantile_sorted(stats, 0.05);
  v.null_stats.q50 = quantile_sorted(stats, 0.50);
  v.null_stats.q95 = quantile_sorted(stats, 0.95);
  v.null_stats.q99 = quantile_sorted(stats, 0.99);
  return v;
}

void validate(const SurrogateConfig& cfg) {
  if (cfg.n_surrogates == 0) throw std::invalid_argument("n_surrogates must be positive");
}

template <typename Evaluate>
std::vector<std::optional<Outcome>> run_surrogates(std::span<const double> x, const SurrogateConfig& cfg,
                                                   const Evaluate& evaluate) {
  std::vector<std::optional<Outcome>> outcomes(cfg.n_surrogates);
  parallel_for(cfg.n_surrogates, cfg.threads, [&](std::size_t i) {
    Rng rng = substream(cfg.seed, i);
    const auto s = make_surrogate(x, cfg.method, rng);
    try {
      outcomes[i] = evaluate(std::span<const double>(s));
    } catch (const std::exception&) {
      outcomes[i] = std::nullopt;
    }
  });
  return outcomes;
}

std::size_t window_begin(std::size_t center, std::size_t w) { return center > w ? center - w : 0; }

}  // namespace

std::string_view to_string(Method m) { return m == Method::FT ? "ft" : "aaft"; }

Method parse_method(std::string_view s) {
  if (s == "ft" || s == "FT") return Method::FT;
  if (s == "aaft" || s == "AAFT") return Method::AAFT;
  throw std::invalid_argument("unknown surrogate method: " + std::string(s));
}

std::vector<double> periodogram(std::span<const double> x) {
  std::vector<std::complex<double>> z(x.begin(), x.end());
  const auto X = detail::dft(z);
  std::vector<double> out(x.size() / 2 + 1);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::norm(X[k]);
  return out;
}

std::vector<double> ft_surrogate(std::span<const double> x, Rng& rng) {
  require_length(x);
  const std::size_t n = x.size();
  std::vector<std::complex<double>> z(x.begin(), x.end());
  auto X = detail::dft(z);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  X[0] = std::complex<double>(X[0].real(), 0.0);
  const std::size_t upper = (n % 2 == 0) ? n / 2 : n / 2 + 1;
  for (std::size_t k = 1; k < upper; ++k) {
    X[k] = std::polar(std::abs(X[k]), phase(rng));
    X[n - k] = std::conj(X[k]);
  }
  if (n % 2 == 0) X[n / 2] = std::complex<double>(X[n / 2].real(), 0.0);
  const auto out = detail::idft(X);
  std::vector<double> s(n);
  for (std::size_t t = 0; t < n; ++t) s[t] = out[t].real();
  return s;
}

std::vector<double> aaft_surrogate(std::span<const double> x, Rng& rng) {
  require_length(x);
  const std::size_t n = x.size();
  const auto order_x = stable_order(x);

  std::normal_distribution<double> normal;
  std::vector<double> gauss(n);
  for (auto& g : gauss) g = normal(rng);
  std::sort(gauss.begin(), gauss.end());
  // Gaussian values carrying the rank structure of x.
  std::vector<double> shaped(n);
  for (std::size_t r = 0; r < n; ++r) shaped[order_x[r]] = gauss[r];

  const auto phased = ft_surrogate(shaped, rng);
  const auto order_s = stable_order(phased);
  std::vector<double> sorted_x(x.begin(), x.end());
  std::sort(sorted_x.begin(), sorted_x.end());
  std::vector<double> out(n);
  for (std::size_t r = 0; r < n; ++r) out[order_s[r]] = sorted_x[r];
  return out;
}

std::vector<double> make_surrogate(std::span<const double> x, Method method, Rng& rng) {
  return method == Method::FT ? ft_surrogate(x, rng) : aaft_surrogate(x, rng);
}

std::string SurrogateVerdict::p_value_text() const {
  std::ostringstream os;
  if (at_resolution_floor) {
    os << "< " << 1.0 / static_cast<double>(1 + null_stats.count);
  } else {
    os << p_value;
  }
  return os.str();
}

BreakDetector supf_detector(const breaks::BreakConfig& cfg) {
  return [cfg](std::span<const double> y) { return breaks::supf_test(y, cfg); };
}

SurrogateVerdict break_significance(std::span<const double> y, std::size_t break_index,
                                    const SurrogateConfig& cfg, const BreakDetector& detector) {
  validate(cfg);
  require_length(y);
  const breaks::SupFResult observed = detector(y);
  if (break_index < observed.lambda_first || break_index > observed.lambda_last) {
    throw std::invalid_argument("observed break lies outside the trimmed range of the detector");
  }
  const double f_obs = observed.f_at(break_index);
  const std::size_t w = cfg.match_window_days;
  const std::size_t lo = std::max(observed.lambda_first, window_begin(break_index, w));
  const std::size_t hi = std::min(observed.lambda_last, break_index + w);

  const auto outcomes = run_surrogates(y, cfg, [&](std::span<const double> s) {
    const breaks::SupFResult r = detector(s);
    Outcome o;
    o.stat = 0.0;
    for (std::size_t k = lo; k <= hi; ++k) o.stat = std::max(o.stat, r.f_at(k));
    o.match = o.stat >= f_obs;
    const std::size_t dist = r.argmax_index > break_index ? r.argmax_index - break_index
                                                          : break_index - r.argmax_index;
    o.alternative_matches = {r.reject_at_5pct && dist <= w, r.sup_f >= observed.sup_f};
    return o;
  });

  SurrogateVerdict v = aggregate("local_f_exceedance", f_obs, cfg, outcomes, {"joint", "supf_exceedance"});
  v.target_index = break_index - 1;
  return v;
}

std::vector<SurrogateVerdict> break_significance(const DailySeries& y, const breaks::BreakModel& observed,
                                                 const SurrogateConfig& cfg, const BreakDetector& detector) {
  if (observed.break_indices.empty()) throw std::invalid_argument("surrogate test needs an observed break");
  std::vector<SurrogateVerdict> out;
  out.reserve(observed.break_indices.size());
  for (std::size_t k : observed.break_indices) out.push_back(break_significance(y.values, k, cfg, detector));
  return out;
}

EnergyRunner hht_runner(const hht::EmdConfig& emd_cfg, const hht::FrequencyGrid& grid, double b) {
  return [emd_cfg, grid, b](std::span<const double> x) { return hht::analyze(x, emd_cfg, grid, b).energy; };
}

SurrogateVerdict energy_significance(std::span<const double> series, std::span<const std::size_t> event_indices,
                                     const SurrogateConfig& cfg, const EnergyRunner& runner) {
  validate(cfg);
  require_length(series);
  if (event_indices.empty()) throw std::invalid_argument("energy surrogate test needs at least one observed event");
  for (std::size_t i : event_indices) {
    if (i >= series.size()) throw std::invalid_argument("observed event index outside the series");
  }
  const hht::EnergyProfile observed = runner(series);
  std::vector<double> z_obs;
  z_obs.reserve(event_indices.size());
  for (std::size_t i : event_indices) z_obs.push_back(observed.exceedance(i));
  const double z_max = *std::max_element(z_obs.begin(), z_obs.end());
  const std::size_t w = cfg.match_window_days;
  const std::size_t n = series.size();

  const auto outcomes = run_surrogates(series, cfg, [&](std::span<const double> s) {
    const hht::EnergyProfile e = runner(s);
    Outcome o;
    o.stat = -std::numeric_limits<double>::infinity();
    bool local = false;
    for (std::size_t j = 0; j < event_indices.size(); ++j) {
      const std::size_t c = event_indices[j];
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t t = window_begin(c, w); t <= std::min(n - 1, c + w); ++t) best = std::max(best, e.exceedance(t));
      o.stat = std::max(o.stat, best - z_obs[j]);
      local = local || best >= z_obs[j];
    }
    o.match = local;
    bool joint = false;
    for (const auto& ev : e.events) {
      for (std::size_t c : event_indices) {
        const std::size_t dist = ev.peak > c ? ev.peak - c : c - ev.peak;
        joint = joint || dist <= w;
      }
    }
    double z_sur = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) z_sur = std::max(z_sur, e.exceedance(t));
    o.alternative_matches = {joint, z_sur >= z_max};
    return o;
  });

  SurrogateVerdict v = aggregate("local_energy_exceedance", 0.0, cfg, outcomes, {"joint", "global_exceedance"});
  v.target_index = event_indices.front();
  return v;
}

}  // namespace regimeshift::surrogate
