#include "regimeshift/breaks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <random>
#include <stdexcept>
#include <string>
#include <tuple>

#include "regimeshift/errors.hpp"
#include "regimeshift/parallel.hpp"
#include "regimeshift/rng.hpp"

namespace regimeshift::breaks {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool zero_variance(std::span<const double> y) {
  return std::all_of(y.begin(), y.end(), [&](double v) { return v == y.front(); });
}

double bic_of(double ssr, std::size_t T, std::size_t m) {
  const double Td = static_cast<double>(T);
  const double fit = ssr > 0.0 ? Td * std::log(ssr / Td) : -kInf;
  return fit + static_cast<double>(2 * m + 1) * std::log(Td);
}

void attach_dates(BreakModel& model, const DailySeries& y) {
  model.break_dates.clear();
  for (auto idx : model.break_indices) model.break_dates.push_back(y.date_at(idx - 1));
}

// Prefix and suffix SSR by running updates: fwd[k] covers y[0, k), bwd[k] covers y[k, T).
void running_ssr(std::span<const double> y, std::vector<double>& fwd, std::vector<double>& bwd) {
  const std::size_t T = y.size();
  fwd.assign(T + 1, 0.0);
  bwd.assign(T + 1, 0.0);
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t k = 0; k < T; ++k) {
    const double delta = y[k] - mean;
    mean += delta / static_cast<double>(k + 1);
    m2 += delta * (y[k] - mean);
    fwd[k + 1] = m2;
  }
  mean = 0.0;
  m2 = 0.0;
  for (std::size_t k = T; k-- > 0;) {
    const double delta = y[k] - mean;
    mean += delta / static_cast<double>(T - k);
    m2 += delta * (y[k] - mean);
    bwd[k] = m2;
  }
}

double sup_of(std::span<const double> y, std::size_t h, std::vector<double>& fwd, std::vector<double>& bwd) {
  running_ssr(y, fwd, bwd);
  const std::size_t T = y.size();
  const double ssr0 = fwd[T];
  double best = 0.0;
  for (std::size_t k = h; k <= T - h; ++k) {
    const double ssr1 = fwd[k] + bwd[k];
    const double f = ssr1 > 0.0 ? std::max(0.0, ssr0 - ssr1) / (ssr1 / static_cast<double>(T - 2)) : kInf;
    best = std::max(best, f);
  }
  return best;
}

}  // namespace

std::string_view to_string(Selection s) {
  switch (s) {
    case Selection::FixedM: return "fixed";
    case Selection::BicMin: return "bic";
    case Selection::SequentialSupF: return "sequential";
  }
  return "unknown";
}

Selection parse_selection(std::string_view s) {
  if (s == "fixed") return Selection::FixedM;
  if (s == "bic") return Selection::BicMin;
  if (s == "sequential") return Selection::SequentialSupF;
  throw std::invalid_argument("unknown break selection '" + std::string(s) + "' (fixed, bic, sequential)");
}

std::size_t min_segment_length(double trim, std::size_t T) {
  if (!(trim > 0.0 && trim <= 0.25)) throw std::invalid_argument("trim must lie in (0, 0.25]");
  const auto h = static_cast<std::size_t>(std::ceil(trim * static_cast<double>(T) - 1e-9));
  if (h < 2) {
    throw std::invalid_argument("trim " + std::to_string(trim) + " gives a minimum segment below 2 at T=" +
                                std::to_string(T));
  }
  return h;
}

SsrTable::SsrTable(std::span<const double> y) : n_(y.size()) {
  cells_.resize(n_ * (n_ + 1) / 2);
  for (std::size_t i = 0; i < n_; ++i) {
    double mean = 0.0;
    double m2 = 0.0;
    double* row = cells_.data() + offset(i);
    for (std::size_t j = i; j < n_; ++j) {
      const double delta = y[j] - mean;
      mean += delta / static_cast<double>(j - i + 1);
      m2 += delta * (y[j] - mean);
      row[j - i] = m2;
    }
  }
}

SsrTable segment_ssr_table(std::span<const double> y) {
  if (y.size() < 4) throw std::invalid_argument("segment SSR table needs at least 4 observations");
  return SsrTable(y);
}

BreakModel estimate_breaks(std::span<const double> y, const SsrTable& table, std::size_t h, std::size_t m) {
  const std::size_t T = y.size();
  if (table.size() != T) throw std::invalid_argument("SSR table does not match the series");
  if (h < 1 || (m + 1) * h > T) {
    throw std::invalid_argument(std::to_string(m) + " breaks with minimum regime " + std::to_string(h) +
                                " do not fit in " + std::to_string(T) + " observations");
  }

  // suffix[b][i]: least SSR of y[i, T) split into b + 1 admissible regimes.
  std::vector<std::vector<double>> suffix(m + 1, std::vector<double>(T + 1, kInf));
  for (std::size_t i = 0; i + h <= T; ++i) suffix[0][i] = table(i, T - 1);
  for (std::size_t b = 1; b <= m; ++b) {
    for (std::size_t i = 0; i + (b + 1) * h <= T; ++i) {
      double best = kInf;
      for (std::size_t j = i + h - 1; j + 1 + b * h <= T; ++j) {
        const double c = table(i, j) + suffix[b - 1][j + 1];
        if (c < best) best = c;
      }
      suffix[b][i] = best;
    }
  }

  BreakModel model;
  model.m = m;
  model.min_segment = h;
  std::size_t start = 0;
  for (std::size_t b = m; b >= 1; --b) {
    const double target = suffix[b][start];
    std::size_t chosen = T;
    for (std::size_t j = start + h - 1; j + 1 + b * h <= T; ++j) {
      if (table(start, j) + suffix[b - 1][j + 1] == target) {
        chosen = j;
        break;
      }
    }
    if (chosen == T) throw NumericalError("break search failed to retrace its optimum");
    model.break_indices.push_back(chosen + 1);
    start = chosen + 1;
  }

  std::size_t first = 0;
  for (std::size_t r = 0; r <= m; ++r) {
    const std::size_t last = r < m ? model.break_indices[r] - 1 : T - 1;
    double sum = 0.0;
    for (std::size_t t = first; t <= last; ++t) sum += y[t];
    model.regime_means.push_back(sum / static_cast<double>(last - first + 1));
    model.regime_ssr.push_back(table(first, last));
    model.global_ssr += model.regime_ssr.back();
    first = last + 1;
  }
  model.bic = bic_of(model.global_ssr, T, m);
  return model;
}

BreakModel estimate_breaks(std::span<const double> y, std::size_t h, std::size_t m) {
  const SsrTable table(y);
  return estimate_breaks(y, table, h, m);
}

BreakModel estimate_breaks(const DailySeries& y, const BreakConfig& cfg, std::size_t m) {
  const std::size_t h = min_segment_length(cfg.trim, y.size());
  BreakModel model = estimate_breaks(std::span<const double>(y.values), h, m);
  attach_dates(model, y);
  return model;
}

std::vector<double> f_profile(std::span<const double> y, std::size_t h) {
  const std::size_t T = y.size();
  if (h < 1 || T < 2 * h) throw std::invalid_argument("series too short for the trimmed break range");
  std::vector<double> fwd;
  std::vector<double> bwd;
  running_ssr(y, fwd, bwd);
  const double ssr0 = fwd[T];
  std::vector<double> f;
  f.reserve(T - 2 * h + 1);
  for (std::size_t k = h; k <= T - h; ++k) {
    if (ssr0 == 0.0) {
      f.push_back(0.0);
      continue;
    }
    const double ssr1 = fwd[k] + bwd[k];
    // q = 1 restriction, T - 2q residual degrees of freedom
    f.push_back(ssr1 > 0.0 ? std::max(0.0, ssr0 - ssr1) / (ssr1 / static_cast<double>(T - 2)) : kInf);
  }
  return f;
}

SupFNull::SupFNull(std::size_t T, std::size_t h, std::size_t replications, std::uint64_t seed, unsigned threads) {
  if (replications == 0) throw std::invalid_argument("null simulation needs at least one replication");
  if (T < 2 * h) throw std::invalid_argument("series too short for the trimmed break range");
  stats_.resize(replications);
  parallel_for(replications, threads, [&](std::size_t r) {
    Rng rng = substream(seed, r);
    std::normal_distribution<double> normal;
    std::vector<double> draw(T);
    for (auto& v : draw) v = normal(rng);
    std::vector<double> fwd;
    std::vector<double> bwd;
    stats_[r] = sup_of(draw, h, fwd, bwd);
  });
  std::sort(stats_.begin(), stats_.end());
}

double SupFNull::p_value(double stat) const {
  const auto at_least = static_cast<std::size_t>(stats_.end() - std::lower_bound(stats_.begin(), stats_.end(), stat));
  return static_cast<double>(1 + at_least) / static_cast<double>(1 + stats_.size());
}

double SupFNull::quantile(double level) const {
  const auto n = stats_.size();
  auto rank = static_cast<std::size_t>(std::ceil(level * static_cast<double>(n)));
  rank = std::clamp<std::size_t>(rank, 1, n);
  return stats_[rank - 1];
}

std::shared_ptr<const SupFNull> supf_null(std::size_t T, std::size_t h, std::size_t replications,
                                          std::uint64_t seed, unsigned threads) {
  using Key = std::tuple<std::size_t, std::size_t, std::size_t, std::uint64_t>;
  static std::mutex mutex;
  static std::map<Key, std::shared_ptr<const SupFNull>> cache;
  const Key key{T, h, replications, seed};
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto null = std::make_shared<const SupFNull>(T, h, replications, seed, threads);
  std::lock_guard lock(mutex);
  return cache.emplace(key, std::move(null)).first->second;
}

SupFResult supf_test(std::span<const double> y, const BreakConfig& cfg) {
  const std::size_t T = y.size();
  const std::size_t h = min_segment_length(cfg.trim, T);
  if (T < 2 * h + 2) throw std::invalid_argument("SupF test needs T >= 2h + 2");

  SupFResult out;
  out.lambda_first = h;
  out.lambda_last = T - h;
  out.f = f_profile(y, h);
  out.argmax_index = h;
  if (zero_variance(y)) {
    out.degenerate = true;
    out.p_value = 1.0;
    return out;
  }
  for (std::size_t i = 0; i < out.f.size(); ++i) {
    if (out.f[i] > out.sup_f) {
      out.sup_f = out.f[i];
      out.argmax_index = h + i;
    }
  }
  const auto null = supf_null(T, h, cfg.null_replications, cfg.seed, cfg.threads);
  out.null_replications = null->replications();
  out.p_value = null->p_value(out.sup_f);
  out.crit_5 = null->quantile(0.95);
  out.reject_at_5pct = out.p_value < 0.05;
  return out;
}

SupFResult supf_test(const DailySeries& y, const BreakConfig& cfg) {
  return supf_test(std::span<const double>(y.values), cfg);
}

BreakModel select_num_breaks(std::span<const double> y, const BreakConfig& cfg) {
  const std::size_t T = y.size();
  const std::size_t h = min_segment_length(cfg.trim, T);
  const SsrTable table(y);
  if (zero_variance(y)) return estimate_breaks(y, table, h, 0);

  std::size_t feasible = 0;
  while (feasible < cfg.max_breaks && (feasible + 2) * h <= T) ++feasible;

  switch (cfg.selection) {
    case Selection::FixedM:
      return estimate_breaks(y, table, h, cfg.fixed_m);

    case Selection::BicMin: {
      BreakModel best = estimate_breaks(y, table, h, 0);
      for (std::size_t m = 1; m <= feasible; ++m) {
        BreakModel candidate = estimate_breaks(y, table, h, m);
        if (candidate.bic < best.bic) best = std::move(candidate);
      }
      return best;
    }

    case Selection::SequentialSupF: {
      BreakModel model = estimate_breaks(y, table, h, 0);
      if (T < 2 * h + 2 || !supf_test(y, cfg).reject_at_5pct) return model;
      model = estimate_breaks(y, table, h, 1);
      while (model.m < feasible) {
        // Largest single-break improvement within any current regime,
        // Sidak-adjusted over the m + 1 regimes.
        double min_p = 1.0;
        std::size_t first = 0;
        for (std::size_t r = 0; r <= model.m; ++r) {
          const std::size_t last = r < model.m ? model.break_indices[r] - 1 : T - 1;
          const std::size_t len = last - first + 1;
          if (len >= 2 * h + 2) {
            const auto segment = y.subspan(first, len);
            if (!zero_variance(segment)) {
              const auto f = f_profile(segment, h);
              const double sup = *std::max_element(f.begin(), f.end());
              const auto null = supf_null(len, h, cfg.null_replications, cfg.seed, cfg.threads);
              min_p = std::min(min_p, null->p_value(sup));
            }
          }
          first = last + 1;
        }
        const double adjusted = 1.0 - std::pow(1.0 - min_p, static_cast<double>(model.m + 1));
        if (!(adjusted < 0.05)) break;
        model = estimate_breaks(y, table, h, model.m + 1);
      }
      return model;
    }
  }
  throw std::logic_error("unhandled break selection");
}

BreakModel select_num_breaks(const DailySeries& y, const BreakConfig& cfg) {
  BreakModel model = select_num_breaks(std::span<const double>(y.values), cfg);
  attach_dates(model, y);
  return model;
}

}  // namespace regimeshift::breaks
