#include "netinf/community.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "netinf/error.hpp"
#include "netinf/lanczos.hpp"
#include "netinf/parallel.hpp"

namespace netinf::community {

namespace {

void validate(const SpectralConfig& config, Eigen::Index m) {
  require(config.communities >= 1, ErrorKind::InvalidParameter, "community count must be >= 1");
  require(config.communities <= m, ErrorKind::InvalidParameter,
          "community count " + std::to_string(config.communities) + " exceeds node count " +
              std::to_string(m));
  require(config.restarts >= 1, ErrorKind::InvalidParameter, "k-means restarts must be >= 1");
  require(!config.tau || *config.tau >= 0.0, ErrorKind::InvalidParameter, "tau must be >= 0");
}

// inv_sqrt(i) = (d_i + tau)^{-1/2}, or 0 where d_i + tau == 0.
Vector inverse_sqrt_degrees(const Vector& degrees, double tau) {
  Vector out(degrees.size());
  for (Eigen::Index i = 0; i < degrees.size(); ++i) {
    const double d = degrees(i) + tau;
    out(i) = d > 0.0 ? 1.0 / std::sqrt(d) : 0.0;
  }
  return out;
}

template <typename Weights>
Embedding embed(const Weights& weights, const Vector& degrees, int count, std::optional<double> tau_opt,
                bool row_normalize, EigenOrder order, std::uint64_t seed) {
  const Eigen::Index m = degrees.size();
  Embedding out;
  out.tau = tau_opt ? *tau_opt : (m > 0 ? degrees.mean() : 0.0);
  const Vector scale = inverse_sqrt_degrees(degrees, out.tau);

  Vector scratch(m);
  SymmetricOperator op = [&](const Vector& x, Vector& y) {
    scratch = scale.cwiseProduct(x);
    y.noalias() = weights * scratch;
    y = y.cwiseProduct(scale);
  };
  LanczosOptions options;
  options.seed = seed;
  EigenPairs pairs = lanczos_eigs(m, op, count, order, options);
  out.eigenvalues = pairs.values;
  out.vectors = std::move(pairs.vectors);
  out.restarts = pairs.restarts;
  out.matvecs = pairs.matvecs;

  for (Eigen::Index i = 0; i < m; ++i) {
    if (degrees(i) == 0.0) {
      out.isolated.push_back(static_cast<std::int32_t>(i));
      out.vectors.row(i).setZero();
    } else if (row_normalize) {
      const double norm = out.vectors.row(i).norm();
      if (norm > 0.0) out.vectors.row(i) /= norm;
    }
  }
  return out;
}

Vector degree_vector(const SparseAdjacency& adj) {
  Vector d(adj.nodes());
  for (std::int32_t i = 0; i < adj.nodes(); ++i) d(i) = adj.degree(i);
  return d;
}

double squared_distance(const Matrix& points, Eigen::Index i, const Matrix& centers, Eigen::Index c) {
  return (points.row(i) - centers.row(c)).squaredNorm();
}

struct LloydRun {
  std::vector<std::int32_t> assign;
  double wcss = 0.0;
  int iterations = 0;
  std::int32_t empty_clusters = 0;
};

LloydRun lloyd(const Matrix& points, int k, std::mt19937_64& rng, int max_iterations) {
  const Eigen::Index n = points.rows();
  const Eigen::Index dim = points.cols();
  Matrix centers(k, dim);

  // k-means++ seeding.
  std::vector<double> nearest(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
  centers.row(0) = points.row(first(rng));
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], squared_distance(points, i, centers, c - 1));
      total += nearest[i];
    }
    Eigen::Index pick = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double target = u(rng);
      pick = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        target -= nearest[i];
        if (target < 0.0 && nearest[i] > 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = first(rng);
    }
    centers.row(c) = points.row(pick);
  }

  LloydRun run;
  run.assign.assign(static_cast<std::size_t>(n), -1);
  std::vector<double> dist(static_cast<std::size_t>(n), 0.0);
  for (int iter = 1; iter <= max_iterations; ++iter) {
    run.iterations = iter;
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      std::int32_t best = 0;
      double best_d = squared_distance(points, i, centers, 0);
      for (int c = 1; c < k; ++c) {
        const double d = squared_distance(points, i, centers, c);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      dist[i] = best_d;
      if (run.assign[i] != best) {
        run.assign[i] = best;
        changed = true;
      }
    }

    std::vector<Eigen::Index> sizes(static_cast<std::size_t>(k), 0);
    centers.setZero();
    for (Eigen::Index i = 0; i < n; ++i) {
      centers.row(run.assign[i]) += points.row(i);
      ++sizes[run.assign[i]];
    }
    for (int c = 0; c < k; ++c) {
      if (sizes[c] > 0) {
        centers.row(c) /= static_cast<double>(sizes[c]);
        continue;
      }
      // Re-seed an empty cluster from the point farthest from its center.
      ++run.empty_clusters;
      Eigen::Index far = 0;
      for (Eigen::Index i = 1; i < n; ++i)
        if (dist[i] > dist[far]) far = i;
      centers.row(c) = points.row(far);
      dist[far] = 0.0;
      changed = true;
    }
    if (!changed) break;
  }

  run.wcss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) run.wcss += squared_distance(points, i, centers, run.assign[i]);
  return run;
}

// Relabels to 1..K in order of first appearance.
std::vector<std::int32_t> canonical_labels(const std::vector<std::int32_t>& assign, int k) {
  std::vector<std::int32_t> map(static_cast<std::size_t>(k), 0);
  std::int32_t next = 0;
  std::vector<std::int32_t> out(assign.size());
  for (std::size_t i = 0; i < assign.size(); ++i) {
    auto& slot = map[assign[i]];
    if (slot == 0) slot = ++next;
    out[i] = slot;
  }
  return out;
}

CommunityResult cluster_embedding(Embedding embedding, const SpectralConfig& config) {
  const Eigen::Index m = embedding.vectors.rows();
  const int k = config.communities;
  CommunityResult result;
  result.partition.communities = k;
  result.partition.labels.assign(static_cast<std::size_t>(m), 1);

  std::vector<Eigen::Index> active;
  {
    std::size_t iso = 0;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (iso < embedding.isolated.size() && embedding.isolated[iso] == i) {
        ++iso;
        continue;
      }
      active.push_back(i);
    }
  }

  if (!active.empty()) {
    Matrix points(static_cast<Eigen::Index>(active.size()), embedding.vectors.cols());
    for (std::size_t r = 0; r < active.size(); ++r) points.row(r) = embedding.vectors.row(active[r]);
    const int k_eff = std::min<int>(k, static_cast<int>(active.size()));
    KMeansResult km = kmeans(points, k_eff, config.restarts, config.seed, config.max_iterations);
    result.wcss = km.wcss;
    result.restart_wcss = std::move(km.restart_wcss);
    result.empty_clusters = km.empty_clusters;
    for (std::size_t r = 0; r < active.size(); ++r) result.partition.labels[active[r]] = km.partition.labels[r];

    // Zero-degree nodes join the largest cluster (lowest label on ties).
    std::vector<std::int64_t> sizes(static_cast<std::size_t>(k) + 1, 0);
    for (const auto l : km.partition.labels) ++sizes[l];
    const auto largest = static_cast<std::int32_t>(
        std::distance(sizes.begin(), std::max_element(sizes.begin() + 1, sizes.end())));
    for (const auto i : embedding.isolated) result.partition.labels[i] = largest;
  }
  result.embedding = std::move(embedding);
  return result;
}

}  // namespace

Embedding regularized_embedding(const SparseAdjacency& adj, const SpectralConfig& config) {
  validate(config, adj.nodes());
  const Eigen::SparseMatrix<double> a = adj.to_sparse_matrix();
  return embed(a, degree_vector(adj), config.communities, config.tau, config.row_normalize,
               EigenOrder::LargestMagnitude, config.seed);
}

KMeansResult kmeans(const Matrix& points, int k, int restarts, std::uint64_t seed, int max_iterations) {
  const Eigen::Index n = points.rows();
  require(k >= 1 && k <= n, ErrorKind::InvalidParameter,
          "k-means needs 1 <= K <= points, got K=" + std::to_string(k) + " for " + std::to_string(n) +
              " points");
  require(restarts >= 1, ErrorKind::InvalidParameter, "k-means restarts must be >= 1");

  std::vector<LloydRun> runs(static_cast<std::size_t>(restarts));
  parallel_for(restarts, [&](std::int64_t r) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(r)};
    std::mt19937_64 rng(seq);
    runs[r] = lloyd(points, k, rng, max_iterations);
  });

  KMeansResult out;
  std::size_t best = 0;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    out.restart_wcss.push_back(runs[r].wcss);
    if (runs[r].wcss < runs[best].wcss) best = r;
  }
  out.wcss = runs[best].wcss;
  out.iterations = runs[best].iterations;
  out.empty_clusters = runs[best].empty_clusters;
  out.partition.communities = k;
  out.partition.labels = canonical_labels(runs[best].assign, k);
  return out;
}

int select_num_communities(const SparseAdjacency& adj, std::optional<int> override_count,
                           std::optional<double> tau) {
  if (override_count) {
    require(*override_count >= 1, ErrorKind::InvalidParameter, "community count must be >= 1");
    return *override_count;
  }
  const std::int32_t m = adj.nodes();
  require(m >= 3, ErrorKind::InvalidParameter, "eigengap selection needs at least 3 nodes");
  const int k_max = std::clamp(std::min(m / 10, 150), 2, m - 1);
  const Eigen::SparseMatrix<double> a = adj.to_sparse_matrix();
  const Embedding e = embed(a, degree_vector(adj), k_max + 1, tau, false, EigenOrder::LargestAlgebraic, 1);
  int best = 2;
  double best_gap = -std::numeric_limits<double>::infinity();
  for (int k = 2; k <= k_max; ++k) {
    const double gap = e.eigenvalues(k - 1) - e.eigenvalues(k);
    if (gap > best_gap + 1e-12) {
      best_gap = gap;
      best = k;
    }
  }
  return best;
}

CommunityResult detect_communities(const SparseAdjacency& adj, const SpectralConfig& config) {
  return cluster_embedding(regularized_embedding(adj, config), config);
}

CommunityResult spectral_on_continuous(const SymmetricMatrix& corr, const SpectralConfig& config) {
  const Eigen::Index m = corr.size();
  require(corr.values.cols() == m, ErrorKind::InvalidInput, "correlation matrix must be square");
  validate(config, m);
  Matrix weights = corr.values.cwiseAbs();
  weights.diagonal().setZero();
  const Vector degrees = weights.rowwise().sum();
  return cluster_embedding(embed(weights, degrees, config.communities, config.tau, config.row_normalize,
                                 EigenOrder::LargestMagnitude, config.seed),
                           config);
}

}  // namespace netinf::community
