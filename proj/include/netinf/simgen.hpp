#pragma once

#include <cstdint>
#include <optional>

#include "netinf/graph.hpp"
#include "netinf/matrix.hpp"

namespace netinf::simgen {

struct SimConfig {
  std::int32_t m = 3000;
  std::int32_t k = 20;
  std::int32_t community_size = 150;
  double theta_in = 50.0;
  double theta_out = 1.0;
  // log(X) with X bounded-Pareto on [low, high] gives the degree parameters.
  double pareto_low = 1.0;
  double pareto_high = 4.311231547115195e15;  // e^36
  double pareto_exponent = 0.001;
  // nullopt: calibrate so the expected between-community density is target_rho_out.
  std::optional<double> alpha_offset;
  double target_rho_out = 0.0013;
  double r_gen = 0.8;
  double nu = 200.0;
  std::uint64_t seed = 1;
  // Quantile-spaced alpha instead of i.i.d. draws (inhomogeneous random graph).
  bool deterministic_alpha = false;
};

/// Throws InvalidParameter on any violated invariant.
void validate(const SimConfig& config);

/// Inverse CDF of the bounded Pareto distribution.
double bounded_pareto_quantile(double u, double low, double high, double exponent);

/// Offset c such that E[logistic(alpha_i + alpha_j + theta_out)] equals
/// target_rho_out, with the expectation over independent Pareto draws
/// evaluated on a fixed quantile grid.
double calibrate_alpha_offset(const SimConfig& config);

/// Offset in use: the configured one or the calibrated one.
double resolve_alpha_offset(const SimConfig& config);

Vector sample_alpha(const SimConfig& config);

/// k disjoint random groups labeled 1..k; everything else is background 0.
Partition plant_communities(const SimConfig& config);

/// Numerically stable 1 / (1 + exp(-x)).
double logistic(double x);

SparseAdjacency generate_network(const Vector& alpha, const Partition& planted, double theta_in,
                                 double theta_out, std::uint64_t seed);

/// One 2x2 Wishart(S, nu) draw per pair by Bartlett decomposition, with
/// S = [[1, r_gen], [r_gen, 1]] on edges and the identity elsewhere.
SymmetricMatrix generate_correlations(const SparseAdjacency& adj, double r_gen, double nu,
                                      std::uint64_t seed);

/// Bartlett draw for a single 2x2 Wishart(S, nu) with unit-diagonal S.
Eigen::Matrix2d wishart_2x2(double r, double nu, std::uint64_t key);

struct GroundTruth {
  SparseAdjacency adjacency;
  Partition partition;
  Vector alpha;
  double alpha_offset = 0.0;
};

GroundTruth generate_truth(const SimConfig& config);

}  // namespace netinf::simgen
