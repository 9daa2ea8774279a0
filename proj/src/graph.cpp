#include "netinf/graph.hpp"

#include <algorithm>
#include <string>

#include "netinf/error.hpp"

namespace netinf {

SparseAdjacency::SparseAdjacency(std::int32_t nodes, std::vector<Edge> edges) : nodes_(nodes) {
  require(nodes >= 0, ErrorKind::InvalidInput, "negative node count");
  for (auto& [i, j] : edges) {
    require(i >= 0 && j >= 0 && i < nodes && j < nodes, ErrorKind::InvalidInput,
            "edge (" + std::to_string(i + 1) + ", " + std::to_string(j + 1) +
                ") out of range for " + std::to_string(nodes) + " nodes");
    require(i != j, ErrorKind::InvalidInput, "self-loop on node " + std::to_string(i + 1));
    if (i > j) std::swap(i, j);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  std::vector<std::int64_t> degree(static_cast<std::size_t>(nodes), 0);
  for (const auto& [i, j] : edges) {
    ++degree[i];
    ++degree[j];
  }
  offsets_.assign(static_cast<std::size_t>(nodes) + 1, 0);
  for (std::int32_t i = 0; i < nodes; ++i) offsets_[i + 1] = offsets_[i] + degree[i];
  targets_.resize(static_cast<std::size_t>(offsets_[nodes]));
  std::vector<std::int64_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (const auto& [i, j] : edges) {
    targets_[cursor[i]++] = j;
    targets_[cursor[j]++] = i;
  }
  for (std::int32_t i = 0; i < nodes; ++i)
    std::sort(targets_.begin() + offsets_[i], targets_.begin() + offsets_[i + 1]);
}

bool SparseAdjacency::has_edge(std::int32_t i, std::int32_t j) const {
  const auto nb = neighbors(i);
  return std::binary_search(nb.begin(), nb.end(), j);
}

std::vector<Edge> SparseAdjacency::edges() const {
  std::vector<Edge> out;
  out.reserve(static_cast<std::size_t>(edge_count()));
  for (std::int32_t i = 0; i < nodes_; ++i)
    for (const auto j : neighbors(i))
      if (i < j) out.emplace_back(i, j);
  return out;
}

Eigen::SparseMatrix<double> SparseAdjacency::to_sparse_matrix() const {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(targets_.size());
  for (std::int32_t i = 0; i < nodes_; ++i)
    for (const auto j : neighbors(i)) triplets.emplace_back(i, j, 1.0);
  Eigen::SparseMatrix<double> a(nodes_, nodes_);
  a.setFromTriplets(triplets.begin(), triplets.end());
  return a;
}

}  // namespace netinf
