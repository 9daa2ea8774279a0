#include "netinf/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "netinf/error.hpp"
#include "netinf/parallel.hpp"
#include "netinf/rng.hpp"

namespace netinf::simgen {

namespace {

double log_bounded_pareto_quantile(double u, double low, double high, double exponent) {
  // x = low * (1 - u (1 - (low/high)^e))^(-1/e)
  const double mass = -std::expm1(exponent * std::log(low / high));
  return std::log(low) - std::log1p(-u * mass) / exponent;
}

constexpr int kCalibrationGrid = 600;

}  // namespace

void validate(const SimConfig& c) {
  auto check = [](bool ok, const std::string& msg) { require(ok, ErrorKind::InvalidParameter, msg); };
  check(c.m >= 2, "m must be >= 2");
  check(c.k >= 1, "k must be >= 1");
  check(c.community_size >= 1, "community_size must be >= 1");
  check(static_cast<std::int64_t>(c.k) * c.community_size <= c.m,
        "k * community_size = " + std::to_string(static_cast<std::int64_t>(c.k) * c.community_size) +
            " exceeds m = " + std::to_string(c.m));
  check(c.r_gen > 0.0 && c.r_gen <= 1.0, "r_gen must lie in (0, 1]");
  check(c.nu >= 4.0, "nu must be >= 4");
  check(c.pareto_low > 0.0 && c.pareto_low < c.pareto_high, "need 0 < pareto_low < pareto_high");
  check(c.pareto_exponent > 0.0, "pareto_exponent must be positive");
  check(std::isfinite(c.theta_in) && std::isfinite(c.theta_out), "theta values must be finite");
  check(c.alpha_offset.has_value() || (c.target_rho_out > 0.0 && c.target_rho_out < 1.0),
        "target_rho_out must lie in (0, 1)");
}

double bounded_pareto_quantile(double u, double low, double high, double exponent) {
  require(low > 0.0 && low < high && exponent > 0.0, ErrorKind::InvalidParameter,
          "invalid bounded Pareto parameters");
  return std::exp(log_bounded_pareto_quantile(u, low, high, exponent));
}

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double calibrate_alpha_offset(const SimConfig& config) {
  validate(config);
  std::vector<double> grid(kCalibrationGrid);
  for (int q = 0; q < kCalibrationGrid; ++q) {
    grid[q] = log_bounded_pareto_quantile((q + 0.5) / kCalibrationGrid, config.pareto_low,
                                          config.pareto_high, config.pareto_exponent);
  }
  auto density = [&](double offset) {
    double sum = 0.0;
    for (const double x : grid)
      for (const double y : grid) sum += logistic(x + y + 2.0 * offset + config.theta_out);
    return sum / (static_cast<double>(kCalibrationGrid) * kCalibrationGrid);
  };
  double lo = -1000.0;
  double hi = 1000.0;
  for (int iter = 0; iter < 200 && hi - lo > 1e-12; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (density(mid) < config.target_rho_out ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double resolve_alpha_offset(const SimConfig& config) {
  return config.alpha_offset ? *config.alpha_offset : calibrate_alpha_offset(config);
}

Vector sample_alpha(const SimConfig& config) {
  validate(config);
  const double offset = resolve_alpha_offset(config);
  Vector alpha(config.m);
  for (std::int32_t i = 0; i < config.m; ++i) {
    const double u = config.deterministic_alpha ? (i + 0.5) / config.m
                                                : StreamEngine(config.seed, kStreamAlpha, i).uniform();
    alpha(i) = log_bounded_pareto_quantile(u, config.pareto_low, config.pareto_high,
                                           config.pareto_exponent) +
               offset;
  }
  return alpha;
}

Partition plant_communities(const SimConfig& config) {
  validate(config);
  std::vector<std::int32_t> order(static_cast<std::size_t>(config.m));
  std::iota(order.begin(), order.end(), 0);
  StreamEngine rng(config.seed, kStreamPlant);
  for (std::int32_t i = config.m - 1; i > 0; --i) {
    const auto j = static_cast<std::int32_t>(rng() % static_cast<std::uint64_t>(i + 1));
    std::swap(order[i], order[j]);
  }
  Partition p;
  p.communities = config.k;
  p.labels.assign(static_cast<std::size_t>(config.m), 0);
  for (std::int32_t g = 0; g < config.k; ++g)
    for (std::int32_t s = 0; s < config.community_size; ++s)
      p.labels[order[static_cast<std::size_t>(g) * config.community_size + s]] = g + 1;
  return p;
}

SparseAdjacency generate_network(const Vector& alpha, const Partition& planted, double theta_in,
                                 double theta_out, std::uint64_t seed) {
  const auto m = static_cast<std::int32_t>(alpha.size());
  require(planted.nodes() == m, ErrorKind::DimensionMismatch, "alpha and partition sizes differ");
  std::vector<std::vector<Edge>> per_row(static_cast<std::size_t>(m));
  parallel_for(m, [&](std::int64_t i) {
    for (std::int32_t j = static_cast<std::int32_t>(i) + 1; j < m; ++j) {
      const bool same = planted.labels[i] != 0 && planted.labels[i] == planted.labels[j];
      const double p = logistic(alpha(i) + alpha(j) + (same ? theta_in : theta_out));
      if (StreamEngine(seed, kStreamNetwork, i, j).uniform() < p)
        per_row[i].emplace_back(static_cast<std::int32_t>(i), j);
    }
  });
  std::vector<Edge> edges;
  for (auto& row : per_row) edges.insert(edges.end(), row.begin(), row.end());
  return SparseAdjacency(m, std::move(edges));
}

Eigen::Matrix2d wishart_2x2(double r, double nu, std::uint64_t key) {
  StreamEngine rng(key);
  std::chi_squared_distribution<double> chi_first(nu);
  std::chi_squared_distribution<double> chi_second(nu - 1.0);
  std::normal_distribution<double> gauss;
  const double c1 = std::sqrt(chi_first(rng));
  const double c2 = std::sqrt(chi_second(rng));
  const double n21 = gauss(rng);
  // W = L B B^T L^T, B lower-triangular Bartlett factor, L = chol(S).
  const double s = std::sqrt(std::max(0.0, 1.0 - r * r));
  Eigen::Matrix2d lb;
  lb << c1, 0.0, r * c1 + s * n21, s * c2;
  return lb * lb.transpose();
}

SymmetricMatrix generate_correlations(const SparseAdjacency& adj, double r_gen, double nu,
                                      std::uint64_t seed) {
  require(nu >= 4.0, ErrorKind::InvalidParameter, "nu must be >= 4");
  require(r_gen > 0.0 && r_gen <= 1.0, ErrorKind::InvalidParameter, "r_gen must lie in (0, 1]");
  const std::int32_t m = adj.nodes();
  Matrix r = Matrix::Zero(m, m);
  parallel_for(m, [&](std::int64_t i) {
    for (std::int32_t j = static_cast<std::int32_t>(i) + 1; j < m; ++j) {
      const double rho = adj.has_edge(static_cast<std::int32_t>(i), j) ? r_gen : 0.0;
      const Eigen::Matrix2d w = wishart_2x2(rho, nu, stream_key(seed, kStreamWishart, i, j));
      r(j, i) = std::clamp(w(0, 1) / std::sqrt(w(0, 0) * w(1, 1)), -1.0, 1.0);
    }
  });
  for (std::int32_t j = 0; j < m; ++j) {
    r(j, j) = 1.0;
    for (std::int32_t i = j + 1; i < m; ++i) r(j, i) = r(i, j);
  }
  return {std::move(r), SymmetricKind::Correlation};
}

GroundTruth generate_truth(const SimConfig& config) {
  validate(config);
  GroundTruth truth;
  truth.alpha_offset = resolve_alpha_offset(config);
  SimConfig resolved = config;
  resolved.alpha_offset = truth.alpha_offset;
  truth.alpha = sample_alpha(resolved);
  truth.partition = plant_communities(resolved);
  truth.adjacency =
      generate_network(truth.alpha, truth.partition, config.theta_in, config.theta_out, config.seed);
  return truth;
}

}  // namespace netinf::simgen
