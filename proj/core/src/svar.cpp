#include "regimeshift/svar.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "regimeshift/errors.hpp"
#include "regimeshift/numeric.hpp"
#include "regimeshift/ols.hpp"
#include "regimeshift/series.hpp"

namespace regimeshift::svar {

namespace {

constexpr double kPdTolerance = 1e-12;
constexpr double kRidge = 1e-10;

Eigen::MatrixXd design(const Eigen::MatrixXd& y, std::size_t p, std::size_t first_row) {
  const auto n = static_cast<Eigen::Index>(y.rows()) - static_cast<Eigen::Index>(first_row);
  Eigen::MatrixXd X(n, static_cast<Eigen::Index>(1 + 2 * p));
  X.col(0).setOnes();
  for (std::size_t lag = 1; lag <= p; ++lag) {
    const auto from = static_cast<Eigen::Index>(first_row - lag);
    X.middleCols(static_cast<Eigen::Index>(1 + 2 * (lag - 1)), 2) = y.middleRows(from, n);
  }
  return X;
}

Eigen::VectorXi selected_rows(const VarModel& m, bool include_intercepts) {
  const auto k = static_cast<int>(m.beta.rows());
  const int per_eq = include_intercepts ? k : k - 1;
  Eigen::VectorXi idx(2 * per_eq);
  int pos = 0;
  for (int eq = 0; eq < 2; ++eq) {
    for (int r = include_intercepts ? 0 : 1; r < k; ++r) idx(pos++) = eq * k + r;
  }
  return idx;
}

Eigen::Matrix2d permutation(const std::array<std::size_t, 2>& order) {
  Eigen::Matrix2d Q = Eigen::Matrix2d::Zero();
  Q(0, static_cast<Eigen::Index>(order[0])) = 1.0;
  Q(1, static_cast<Eigen::Index>(order[1])) = 1.0;
  return Q;
}

ImpactEntries entries_of(const ImpactMatrix& im, const std::array<std::string, 2>& labels) {
  ImpactEntries e;
  e.ordering = im.ordering;
  e.leader = labels[im.order[0]];
  e.follower = labels[im.order[1]];
  e.leader_own = im.P(0, 0);
  e.leader_to_follower = im.P(1, 0);
  e.follower_own = im.P(1, 1);
  return e;
}

WindowFit fit_window(std::string name, Panel panel, std::size_t p) {
  if (panel.rows() < p + min_rows(p)) {
    throw std::invalid_argument("window '" + name + "' is too short for a VAR(" + std::to_string(p) + ")");
  }
  WindowFit w;
  w.name = std::move(name);
  w.first = panel.start;
  w.last = panel.start + static_cast<std::int64_t>(panel.rows()) - 1;
  w.model = fit_var(panel, p);
  for (Ordering o : {Ordering::FirstVarLeads, Ordering::SecondVarLeads}) {
    const auto i = static_cast<std::size_t>(o);
    w.impacts[i] = impact_matrix(w.model, o);
    w.entries[i] = entries_of(w.impacts[i], panel.labels);
  }
  w.panel = std::move(panel);
  return w;
}

}  // namespace

bool Panel::stationary() const {
  return std::all_of(adf.begin(), adf.end(), [](const auto& r) { return r.stationary_at_5pct; });
}

Panel make_panel(Eigen::MatrixXd data, std::array<std::string, 2> labels, Date start) {
  if (data.cols() != 2) throw std::invalid_argument("a panel has exactly two columns");
  Panel p;
  p.start = start;
  p.labels = std::move(labels);
  p.data = std::move(data);
  return p;
}

Panel prepare_pair(const DailySeries& a, const DailySeries& b, std::size_t min_overlap_days) {
  const auto [xa, xb] = series::intersect(a, b);
  if (xa.size() < min_overlap_days) {
    throw DataError("series '" + a.label + "' and '" + b.label + "' overlap on " + std::to_string(xa.size()) +
                    " days; at least " + std::to_string(min_overlap_days) + " are required");
  }
  const DailySeries da = series::first_difference(series::log_transform(xa, true));
  const DailySeries db = series::first_difference(series::log_transform(xb, true));

  Panel p;
  p.start = da.start;
  p.labels = {a.label, b.label};
  p.data.resize(static_cast<Eigen::Index>(da.size()), 2);
  for (std::size_t t = 0; t < da.size(); ++t) {
    p.data(static_cast<Eigen::Index>(t), 0) = da.values[t];
    p.data(static_cast<Eigen::Index>(t), 1) = db.values[t];
  }
  for (const DailySeries* s : {&da, &db}) {
    if (numeric::population_std(s->values) == 0.0) {
      throw DataError("degenerate panel: transformed series '" + s->label + "' is constant");
    }
  }
  unitroot::AdfSpec spec;
  spec.deterministic = unitroot::Deterministic::ConstantOnly;
  for (const DailySeries* s : {&da, &db}) {
    p.adf.push_back(unitroot::adf_test(*s, spec));
    if (!p.adf.back().stationary_at_5pct) {
      p.warnings.push_back("transformed series '" + s->label + "' is not stationary at 5%");
    }
  }
  return p;
}

std::size_t min_rows(std::size_t p) { return 4 * p + 8; }

VarModel fit_var(const Eigen::MatrixXd& y, std::size_t p, std::size_t first_row) {
  if (p == 0) throw std::invalid_argument("VAR lag order must be positive");
  if (y.cols() != 2) throw std::invalid_argument("VAR panel must have two columns");
  if (first_row < p) throw std::invalid_argument("first_row must leave room for p lags");
  const auto T = static_cast<std::size_t>(y.rows());
  if (T < first_row || T - first_row < min_rows(p)) {
    throw std::invalid_argument("too few observations for a VAR(" + std::to_string(p) + ")");
  }
  const Eigen::MatrixXd X = design(y, p, first_row);
  const Eigen::MatrixXd Y = y.bottomRows(static_cast<Eigen::Index>(T - first_row));
  const MultiOlsFit fit = ols_multi(X, Y);

  VarModel m;
  m.p = p;
  m.t_eff = T - first_row;
  m.beta = fit.beta;
  m.xtx_inverse = fit.xtx_inverse;
  m.residuals = fit.residuals;
  m.c = fit.beta.row(0).transpose();
  m.phi.resize(p);
  for (std::size_t i = 0; i < p; ++i) {
    // Phi_i(eq, var) = beta(1 + 2i + var, eq)
    m.phi[i] = fit.beta.middleRows(static_cast<Eigen::Index>(1 + 2 * i), 2).transpose();
  }
  m.sigma_u = (fit.residuals.transpose() * fit.residuals) / static_cast<double>(m.t_eff);
  m.sigma_u = 0.5 * (m.sigma_u + m.sigma_u.transpose()).eval();
  const double det = m.sigma_u.determinant();
  if (!(det > 0.0)) throw NumericalError("residual covariance is singular");
  const double k = 2.0 * static_cast<double>(1 + 2 * p);
  m.aic = std::log(det) + 2.0 * k / static_cast<double>(m.t_eff);
  return m;
}

VarModel fit_var(const Panel& panel, std::size_t p) { return fit_var(panel.data, p, p); }

VarModel select_lag(const Panel& panel, std::size_t p_max) {
  if (p_max == 0) throw std::invalid_argument("p_max must be positive");
  if (panel.rows() < p_max + min_rows(p_max)) {
    throw std::invalid_argument("panel of " + std::to_string(panel.rows()) + " rows is too short for p_max = " +
                                std::to_string(p_max));
  }
  std::vector<double> aic(p_max);
  std::size_t best = 1;
  for (std::size_t p = 1; p <= p_max; ++p) {
    aic[p - 1] = fit_var(panel.data, p, p_max).aic;
    if (aic[p - 1] < aic[best - 1]) best = p;
  }
  VarModel m = fit_var(panel, best);
  m.lag_aic = std::move(aic);
  return m;
}

std::string_view to_string(Ordering o) {
  return o == Ordering::FirstVarLeads ? "first_leads" : "second_leads";
}

Eigen::Matrix2d ImpactMatrix::in_original_order() const {
  const Eigen::Matrix2d Q = permutation(order);
  return Q.transpose() * P * Q;
}

Eigen::Matrix2d ImpactMatrix::implied_covariance() const {
  const Eigen::Matrix2d Q = permutation(order);
  return Q.transpose() * P * P.transpose() * Q;
}

ImpactMatrix impact_matrix(const Eigen::Matrix2d& sigma_u, Ordering ordering) {
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(sigma_u);
  const double trace = sigma_u.trace();
  if (!(trace > 0.0) || !(eig.eigenvalues().minCoeff() > kPdTolerance * trace)) {
    throw NumericalError("residual covariance is not positive definite");
  }
  ImpactMatrix im;
  im.ordering = ordering;
  im.order = ordering == Ordering::FirstVarLeads ? std::array<std::size_t, 2>{0, 1} : std::array<std::size_t, 2>{1, 0};
  const Eigen::Matrix2d Q = permutation(im.order);
  const Eigen::Matrix2d S = Q * sigma_u * Q.transpose();
  const double l00 = std::sqrt(S(0, 0));
  const double l10 = S(1, 0) / l00;
  const double l11 = std::sqrt(S(1, 1) - l10 * l10);
  im.P << l00, 0.0, l10, l11;
  return im;
}

ImpactMatrix impact_matrix(const VarModel& model, Ordering ordering) { return impact_matrix(model.sigma_u, ordering); }

Eigen::VectorXd stacked_coefficients(const VarModel& m, bool include_intercepts) {
  const Eigen::VectorXi idx = selected_rows(m, include_intercepts);
  const Eigen::Map<const Eigen::VectorXd> all(m.beta.data(), m.beta.size());
  Eigen::VectorXd out(idx.size());
  for (Eigen::Index i = 0; i < idx.size(); ++i) out(i) = all(idx(i));
  return out;
}

Eigen::MatrixXd coefficient_covariance(const VarModel& m, bool include_intercepts) {
  const auto k = m.xtx_inverse.rows();
  Eigen::MatrixXd full(2 * k, 2 * k);
  for (Eigen::Index a = 0; a < 2; ++a) {
    for (Eigen::Index b = 0; b < 2; ++b) full.block(a * k, b * k, k, k) = m.sigma_u(a, b) * m.xtx_inverse;
  }
  const Eigen::VectorXi idx = selected_rows(m, include_intercepts);
  Eigen::MatrixXd out(idx.size(), idx.size());
  for (Eigen::Index i = 0; i < idx.size(); ++i) {
    for (Eigen::Index j = 0; j < idx.size(); ++j) out(i, j) = full(idx(i), idx(j));
  }
  return out;
}

WaldReport wald_test(const VarModel& pre, const VarModel& post, bool include_intercepts) {
  if (pre.p != post.p || pre.p == 0) throw std::invalid_argument("Wald test needs two fitted models with equal lag order");
  WaldReport r;
  r.includes_intercepts = include_intercepts;
  r.theta_pre = stacked_coefficients(pre, include_intercepts);
  r.theta_post = stacked_coefficients(post, include_intercepts);
  r.cov_pre = coefficient_covariance(pre, include_intercepts);
  r.cov_post = coefficient_covariance(post, include_intercepts);
  r.df = static_cast<std::size_t>(r.theta_pre.size());

  const Eigen::VectorXd delta = r.theta_post - r.theta_pre;
  Eigen::MatrixXd V = r.cov_pre + r.cov_post;
  V = 0.5 * (V + V.transpose()).eval();
  const double trace = V.trace();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(V);
  if (!(eig.eigenvalues().minCoeff() > kPdTolerance * trace)) {
    V.diagonal().array() += kRidge * trace;
    r.regularized = true;
  }
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(V);
  r.W = std::max(0.0, delta.dot(ldlt.solve(delta)));
  r.p_value = numeric::chi_square_sf(r.W, r.df);
  for (Eigen::Index i = 0; i < delta.size(); ++i) {
    if (std::abs(r.theta_post(i)) > std::abs(r.theta_pre(i))) ++r.larger_in_post;
  }
  return r;
}

SvarRegimeReport regime_analysis(const DailySeries& a, const DailySeries& b, Date split_date, const SvarConfig& cfg) {
  SvarRegimeReport rep;
  rep.labels = {a.label, b.label};
  rep.split_date = split_date;

  Panel full = prepare_pair(a, b, cfg.min_overlap_days);
  const std::size_t p_max = std::min(cfg.p_max, std::max<std::size_t>(1, (full.rows() - 8) / 5));
  rep.p = select_lag(full, p_max).p;

  const auto [xa, xb] = series::intersect(a, b);
  const series::SeriesSplit sa = series::split_at(xa, split_date);
  const series::SeriesSplit sb = series::split_at(xb, split_date);
  const std::size_t window_overlap = min_rows(rep.p) + rep.p + 1;
  Panel pre = prepare_pair(sa.pre, sb.pre, window_overlap);
  Panel post = prepare_pair(sa.post, sb.post, window_overlap);

  rep.windows.push_back(fit_window("full", std::move(full), rep.p));
  rep.windows.push_back(fit_window("pre", std::move(pre), rep.p));
  rep.windows.push_back(fit_window("post", std::move(post), rep.p));

  const WindowFit& wpre = rep.windows[1];
  const WindowFit& wpost = rep.windows[2];
  const WaldReport wald = wald_test(wpre.model, wpost.model, cfg.include_intercepts);
  rep.wald = {wald, wald};

  auto pct = [](double before, double after) {
    return before != 0.0 ? 100.0 * (after - before) / std::abs(before) : 0.0;
  };
  for (std::size_t o = 0; o < 2; ++o) {
    const ImpactEntries& e0 = wpre.entries[o];
    const ImpactEntries& e1 = wpost.entries[o];
    const auto ord = static_cast<Ordering>(o);
    rep.changes.push_back({ord, e0.leader + "->" + e0.leader, e0.leader_own, e1.leader_own,
                           pct(e0.leader_own, e1.leader_own)});
    rep.changes.push_back({ord, e0.leader + "->" + e0.follower, e0.leader_to_follower, e1.leader_to_follower,
                           pct(e0.leader_to_follower, e1.leader_to_follower)});
    rep.changes.push_back({ord, e0.follower + "->" + e0.follower, e0.follower_own, e1.follower_own,
                           pct(e0.follower_own, e1.follower_own)});
  }
  return rep;
}

}  // namespace regimeshift::svar
