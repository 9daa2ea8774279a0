#include "netinf/ebayes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "netinf/error.hpp"
#include "netinf/normal.hpp"
#include "netinf/parallel.hpp"

namespace netinf::ebayes {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kInvPhi = 0.61803398874989484820;  // 1 / golden ratio

double log_add_exp(double x, double y) {
  if (x == kNegInf) return y;
  if (y == kNegInf) return x;
  const double hi = std::max(x, y);
  return hi + std::log1p(std::exp(-std::abs(x - y)));
}

void check_spread(double a) {
  require(a > 0.0 && std::isfinite(a), ErrorKind::InvalidParameter,
          "Laplace spread must be positive, got " + std::to_string(a));
}

void check_weight(double w, bool allow_zero) {
  const bool ok = allow_zero ? (w >= 0.0 && w <= 1.0) : (w > 0.0 && w <= 1.0);
  require(ok, ErrorKind::InvalidParameter, "mixture weight out of range: " + std::to_string(w));
}

// log of g(z) / phi(z) = (a/2) [R(a - z) + R(a + z)], R the Mills ratio.
double log_signal_ratio(double z, double a) {
  return std::log(0.5 * a) + log_add_exp(normal::log_mills(a - z), normal::log_mills(a + z));
}

// Posterior masses for z >= 0, in log space, unnormalized by the common phi(z):
// spike at zero, Laplace part on mu < 0, Laplace part on mu > 0.
struct LogMasses {
  double spike;
  double negative;
  double positive;
};

LogMasses log_masses(double abs_z, double w, double a) {
  const double log_w = std::log(w) + std::log(0.5 * a);
  return {w < 1.0 ? std::log1p(-w) : kNegInf, log_w + normal::log_mills(a + abs_z),
          log_w + normal::log_mills(a - abs_z)};
}

// Posterior mass at or below zero is below one half.
bool nonzero_from_masses(const LogMasses& lm) {
  return lm.positive > log_add_exp(lm.spike, lm.negative);
}

template <typename F>
double golden_maximize(F&& f, double lo, double hi, double tol) {
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  while (hi - lo > tol) {
    if (f1 >= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = f(x2);
    }
  }
  return 0.5 * (lo + hi);
}

// Row log-likelihood as a function of w with a fixed.
class WeightObjective {
 public:
  WeightObjective(std::span<const double> row, double a) : log_ratio_(row.size()) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      null_sum_ += normal::log_pdf(row[j]);
      log_ratio_[j] = log_signal_ratio(row[j], a);
    }
  }

  double operator()(double w) const {
    const double log_null = w < 1.0 ? std::log1p(-w) : kNegInf;
    const double log_w = w > 0.0 ? std::log(w) : kNegInf;
    double sum = null_sum_;
    for (const double lr : log_ratio_) sum += log_add_exp(log_null, log_w + lr);
    return sum;
  }

 private:
  double null_sum_ = 0.0;
  std::vector<double> log_ratio_;
};

struct WeightOptimum {
  double w;
  double loglik;
};

WeightOptimum maximize_weight(const WeightObjective& objective, double w_min) {
  // The objective is concave in w; the bracket endpoints catch boundary optima.
  const double interior = golden_maximize(objective, w_min, 1.0, kWeightTolerance);
  WeightOptimum best{interior, objective(interior)};
  for (const double edge : {w_min, 1.0}) {
    const double v = objective(edge);
    if (v > best.loglik) best = {edge, v};
  }
  return best;
}

}  // namespace

double log_laplace_normal_density(double z, double a) {
  check_spread(a);
  return normal::log_pdf(z) + log_signal_ratio(z, a);
}

double laplace_normal_density(double z, double a) { return std::exp(log_laplace_normal_density(z, a)); }

double marginal_loglik(std::span<const double> row, double w, double a) {
  check_spread(a);
  check_weight(w, true);
  return WeightObjective(row, a)(w);
}

double threshold(double w, double a) {
  check_spread(a);
  check_weight(w, false);
  if (w >= 1.0) return 0.0;
  auto nonzero = [&](double t) { return nonzero_from_masses(log_masses(t, w, a)); };
  double hi = 1.0;
  while (!nonzero(hi)) {
    hi *= 2.0;
    require(hi < 1e6, ErrorKind::Convergence, "threshold search diverged");
  }
  double lo = 0.0;
  while (hi - lo > 1e-12 * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    (nonzero(mid) ? hi : lo) = mid;
  }
  return hi;
}

double weight_lower_bound(std::size_t row_length, double a) {
  check_spread(a);
  if (row_length <= 1) return 1.0;
  const double t = std::sqrt(2.0 * std::log(static_cast<double>(row_length)));
  // At the threshold, (1 - w) / w = (a/2) [R(a - t) - R(a + t)].
  const double lr_minus = normal::log_mills(a - t);
  const double lr_plus = normal::log_mills(a + t);
  const double log_gap = std::log(0.5 * a) + lr_minus + std::log1p(-std::exp(lr_plus - lr_minus));
  return 1.0 / (1.0 + std::exp(log_gap));
}

RowFit fit_row(std::span<const double> row, bool estimate_a) {
  require(row.size() >= 2, ErrorKind::InvalidInput, "row must hold at least 2 off-diagonal scores");
  RowFit fit;
  fit.a = kDefaultSpread;
  fit.w_min = weight_lower_bound(row.size(), fit.a);

  const bool constant = std::all_of(row.begin(), row.end(), [&](double z) { return z == row[0]; });
  if (constant) {
    fit.w = fit.w_min;
    fit.degenerate = true;
    fit.loglik = marginal_loglik(row, fit.w, fit.a);
    return fit;
  }

  auto best = maximize_weight(WeightObjective(row, fit.a), fit.w_min);
  fit.w = best.w;
  fit.loglik = best.loglik;
  if (!estimate_a) return fit;

  for (int iter = 0; iter < 200; ++iter) {
    const double w = fit.w;
    const double a = golden_maximize(
        [&](double s) { return WeightObjective(row, s)(std::max(w, weight_lower_bound(row.size(), s))); },
        kMinSpread, kMaxSpread, kWeightTolerance);
    const double w_min = weight_lower_bound(row.size(), a);
    const auto next = maximize_weight(WeightObjective(row, a), w_min);
    const double gain = next.loglik - fit.loglik;
    if (gain <= 0.0) break;
    fit.a = a;
    fit.w = next.w;
    fit.w_min = w_min;
    fit.loglik = next.loglik;
    if (gain < kLoglikTolerance) break;
  }
  return fit;
}

bool median_is_nonzero(double z, double w, double a) {
  return nonzero_from_masses(log_masses(std::abs(z), w, a));
}

PosteriorSummary posterior_median(double z, double w, double a) {
  check_spread(a);
  check_weight(w, false);
  PosteriorSummary out{z, w, a, 0.0, false};
  const double abs_z = std::abs(z);
  const LogMasses lm = log_masses(abs_z, w, a);
  if (!nonzero_from_masses(lm)) return out;

  // Posterior probability of mu > 0, then solve P(mu > t) = 1/2. On mu > 0
  // the posterior is N(|z| - a, 1) truncated to the positive half line.
  const double log_total = log_add_exp(log_add_exp(lm.spike, lm.negative), lm.positive);
  const double log_pos = lm.positive - log_total;
  const double c = abs_z - a;
  const double log_target = std::log(0.5) - log_pos;
  const double log_norm = normal::log_sf(-c);
  auto excess = [&](double t) { return normal::log_sf(t - c) - log_norm - log_target; };

  double lo = 0.0;
  double hi = std::max(1.0, c + 1.0);
  while (excess(hi) > 0.0) hi *= 2.0;
  while (hi - lo > 1e-12 * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) > 0.0 ? lo : hi) = mid;
  }
  const double median = 0.5 * (lo + hi);
  out.median = z < 0.0 ? -median : median;
  out.nonzero = true;
  return out;
}

std::vector<std::uint8_t> threshold_row(std::span<const double> row, double w, double a,
                                        std::optional<std::size_t> diagonal) {
  check_spread(a);
  check_weight(w, false);
  std::vector<std::uint8_t> out(row.size(), 0);
  for (std::size_t j = 0; j < row.size(); ++j) out[j] = median_is_nonzero(row[j], w, a) ? 1 : 0;
  if (diagonal && *diagonal < out.size()) out[*diagonal] = 0;
  return out;
}

std::vector<double> off_diagonal_row(const AssocMatrix& assoc, Eigen::Index i) {
  const auto m = assoc.size();
  std::vector<double> row;
  row.reserve(static_cast<std::size_t>(m - 1));
  for (Eigen::Index j = 0; j < m; ++j)
    if (j != i) row.push_back(assoc.z(i, j));
  return row;
}

Inference infer_adjacency(const AssocMatrix& assoc, bool estimate_a) {
  const auto m = assoc.size();
  require(m >= 2 && assoc.z.cols() == m, ErrorKind::InvalidInput,
          "association matrix must be square with at least 2 nodes");
  require(assoc.z == assoc.z.transpose(), ErrorKind::InvalidInput,
          "association matrix is not symmetric");

  Inference result;
  auto& fit = result.fit;
  fit.estimated_a = estimate_a;
  fit.w.resize(m);
  fit.a.resize(m);
  fit.loglik.resize(m);
  fit.w_min.resize(m);
  fit.degenerate.resize(m);

  // Row-wise decisions: detect(i, j) is row i's verdict on pair (i, j).
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> detect(m, m);
  parallel_for(m, [&](std::int64_t i) {
    const auto row = off_diagonal_row(assoc, i);
    const RowFit rf = fit_row(row, estimate_a);
    fit.w[i] = rf.w;
    fit.a[i] = rf.a;
    fit.loglik[i] = rf.loglik;
    fit.w_min[i] = rf.w_min;
    fit.degenerate[i] = rf.degenerate ? 1 : 0;
    for (Eigen::Index j = 0; j < m; ++j) {
      detect(i, j) = (j != i && !rf.degenerate && median_is_nonzero(assoc.z(i, j), rf.w, rf.a)) ? 1 : 0;
    }
  });

  std::vector<Edge> edges;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const bool row_i = detect(i, j) != 0;
      const bool row_j = detect(j, i) != 0;
      result.row_detections += static_cast<std::int64_t>(row_i) + static_cast<std::int64_t>(row_j);
      if (row_i || row_j) ++result.union_edges;
      if (row_i && row_j) edges.emplace_back(static_cast<std::int32_t>(i), static_cast<std::int32_t>(j));
    }
  }
  result.adjacency = SparseAdjacency(static_cast<std::int32_t>(m), std::move(edges));
  return result;
}

}  // namespace netinf::ebayes
