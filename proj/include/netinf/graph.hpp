#pragma once

#include <Eigen/SparseCore>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace netinf {

using Edge = std::pair<std::int32_t, std::int32_t>;

/// Undirected simple graph on nodes 0..m-1 in compressed adjacency form.
/// Symmetric with an empty diagonal by construction.
class SparseAdjacency {
 public:
  SparseAdjacency() = default;
  /// Edges may be given in either orientation and may repeat; self-loops throw.
  SparseAdjacency(std::int32_t nodes, std::vector<Edge> edges);

  std::int32_t nodes() const { return nodes_; }
  std::int64_t edge_count() const { return static_cast<std::int64_t>(targets_.size() / 2); }
  std::int32_t degree(std::int32_t i) const {
    return static_cast<std::int32_t>(offsets_[i + 1] - offsets_[i]);
  }
  std::span<const std::int32_t> neighbors(std::int32_t i) const {
    return {targets_.data() + offsets_[i], targets_.data() + offsets_[i + 1]};
  }
  bool has_edge(std::int32_t i, std::int32_t j) const;

  /// Unordered pairs (i, j) with i < j in lexicographic order.
  std::vector<Edge> edges() const;

  Eigen::SparseMatrix<double> to_sparse_matrix() const;

  friend bool operator==(const SparseAdjacency&, const SparseAdjacency&) = default;

 private:
  std::int32_t nodes_ = 0;
  std::vector<std::int64_t> offsets_{0};
  std::vector<std::int32_t> targets_;
};

/// Node-to-community labels. Detected partitions use 1..K; planted truth
/// uses 0 for background nodes outside every planted group.
struct Partition {
  std::vector<std::int32_t> labels;
  std::int32_t communities = 0;

  std::int32_t nodes() const { return static_cast<std::int32_t>(labels.size()); }
  friend bool operator==(const Partition&, const Partition&) = default;
};

}  // namespace netinf
