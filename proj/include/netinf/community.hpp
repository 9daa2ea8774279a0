#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "netinf/graph.hpp"
#include "netinf/matrix.hpp"

namespace netinf::community {

struct SpectralConfig {
  int communities = 2;
  std::optional<double> tau;  // nullopt: mean degree
  int restarts = 10;
  std::uint64_t seed = 1;
  bool row_normalize = true;
  int max_iterations = 300;
};

struct Embedding {
  Matrix vectors;  // m x K
  Vector eigenvalues;
  double tau = 0.0;
  std::vector<std::int32_t> isolated;  // zero-degree nodes, rows left at zero
  int restarts = 0;
  std::int64_t matvecs = 0;
};

/// Leading K eigenvectors (by |lambda|) of D_tau^{-1/2} A D_tau^{-1/2}.
Embedding regularized_embedding(const SparseAdjacency& adj, const SpectralConfig& config);

struct KMeansResult {
  Partition partition;
  double wcss = 0.0;
  std::vector<double> restart_wcss;
  int iterations = 0;  // of the winning restart
  std::int32_t empty_clusters = 0;
};

/// Lloyd's algorithm with k-means++ seeding; best of `restarts` by WCSS.
/// Labels are 1..K in order of first appearance by row index.
KMeansResult kmeans(const Matrix& points, int k, int restarts, std::uint64_t seed,
                    int max_iterations = 300);

/// Override when given; otherwise the largest gap among the leading
/// eigenvalues of the regularized adjacency, K in [2, min(m / 10, 150)].
int select_num_communities(const SparseAdjacency& adj, std::optional<int> override_count,
                           std::optional<double> tau = std::nullopt);

struct CommunityResult {
  Partition partition;
  Embedding embedding;
  double wcss = 0.0;
  std::vector<double> restart_wcss;
  std::int32_t empty_clusters = 0;
};

/// Degree-corrected blockmodel fit by regularized spectral clustering.
CommunityResult detect_communities(const SparseAdjacency& adj, const SpectralConfig& config);

/// Baseline: the same pipeline on the dense weights |r| with zero diagonal.
CommunityResult spectral_on_continuous(const SymmetricMatrix& corr, const SpectralConfig& config);

}  // namespace netinf::community
