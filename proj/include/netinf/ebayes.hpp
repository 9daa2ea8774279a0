#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "netinf/graph.hpp"
#include "netinf/matrix.hpp"

// Spike-and-Laplace empirical Bayes thresholding of standardized association
// scores. Scores are assumed to have unit noise variance.
namespace netinf::ebayes {

inline constexpr double kDefaultSpread = 0.5;
inline constexpr double kMinSpread = 0.05;
inline constexpr double kMaxSpread = 4.0;
inline constexpr double kWeightTolerance = 1e-6;
inline constexpr double kLoglikTolerance = 1e-8;

/// Density of Laplace(a) convolved with N(0, 1), evaluated at z.
double laplace_normal_density(double z, double a);
double log_laplace_normal_density(double z, double a);

/// Sum over the row of log((1 - w) phi(z) + w g(z)). The row must not contain
/// the diagonal entry.
double marginal_loglik(std::span<const double> row, double w, double a);

/// Smallest |z| at or below which the posterior median is zero.
double threshold(double w, double a);

/// Weight whose threshold equals sqrt(2 log n) for a row of n scores.
double weight_lower_bound(std::size_t row_length, double a);

struct RowFit {
  double w = 0.0;
  double a = kDefaultSpread;
  double loglik = 0.0;
  double w_min = 0.0;
  bool degenerate = false;  // all scores equal: no evidence, no edges
};

/// Marginal maximum likelihood for w (and optionally a) on one row of
/// off-diagonal scores.
RowFit fit_row(std::span<const double> row, bool estimate_a);

struct PosteriorSummary {
  double z = 0.0;
  double w = 0.0;
  double a = 0.0;
  double median = 0.0;
  bool nonzero = false;
};

PosteriorSummary posterior_median(double z, double w, double a);

/// True iff the posterior median at z is nonzero. Same decision as
/// posterior_median(z, w, a).nonzero without locating the median.
bool median_is_nonzero(double z, double w, double a);

/// Per-entry indicator |median| > 0. The optional diagonal index is forced to 0.
std::vector<std::uint8_t> threshold_row(std::span<const double> row, double w, double a,
                                        std::optional<std::size_t> diagonal = std::nullopt);

struct MixtureFit {
  std::vector<double> w;
  std::vector<double> a;
  std::vector<double> loglik;
  std::vector<double> w_min;
  std::vector<std::uint8_t> degenerate;
  bool estimated_a = false;
};

struct Inference {
  SparseAdjacency adjacency;  // conservative AND of both row decisions
  MixtureFit fit;
  std::int64_t union_edges = 0;       // pairs detected by at least one row
  std::int64_t row_detections = 0;    // ordered (i, j) detections summed over rows
};

/// Row i's scores with the diagonal removed.
std::vector<double> off_diagonal_row(const AssocMatrix& assoc, Eigen::Index i);

Inference infer_adjacency(const AssocMatrix& assoc, bool estimate_a);

}  // namespace netinf::ebayes
