#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "netinf/graph.hpp"

namespace netinf::metrics {

/// Normalized mutual information 2 I(P;Q) / (H(P) + H(Q)), natural logs.
/// Both partitions single-cluster gives 1; exactly one zero-entropy gives 0.
double nmi(const Partition& p, const Partition& q);

struct ConfusionCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t tn = 0;
  std::int64_t fn = 0;

  /// 0 when there are no true edges; see tpr_defined().
  double tpr() const;
  double fpr() const;
  bool tpr_defined() const { return tp + fn > 0; }
  bool fpr_defined() const { return fp + tn > 0; }
};

/// Counts over unordered node pairs.
ConfusionCounts edge_confusion(const SparseAdjacency& inferred, const SparseAdjacency& truth);

struct Densities {
  double overall = 0.0;
  // Present only when a partition is supplied. Within covers pairs sharing a
  // non-background label; between covers all other pairs.
  std::optional<double> within;
  std::optional<double> between;
  std::int64_t within_pairs = 0;
  std::int64_t between_pairs = 0;
};

Densities edge_density(const SparseAdjacency& adj, const Partition* partition = nullptr);

struct DegreeHistogram {
  std::vector<std::int64_t> degrees;  // per node
  std::vector<std::int64_t> counts;   // counts[d] = nodes with degree d
};

DegreeHistogram degree_histogram(const SparseAdjacency& adj);

}  // namespace netinf::metrics
