#include "netinf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "netinf/error.hpp"

namespace netinf::metrics {

namespace {

double entropy(const std::map<std::int32_t, std::int64_t>& counts, double total) {
  double h = 0.0;
  for (const auto& [label, c] : counts) {
    const double f = static_cast<double>(c) / total;
    h -= f * std::log(f);
  }
  return h;
}

}  // namespace

double nmi(const Partition& p, const Partition& q) {
  require(p.labels.size() == q.labels.size(), ErrorKind::DimensionMismatch,
          "partitions cover " + std::to_string(p.labels.size()) + " and " +
              std::to_string(q.labels.size()) + " nodes");
  require(!p.labels.empty(), ErrorKind::InvalidInput, "empty partition");
  const auto total = static_cast<double>(p.labels.size());

  std::map<std::int32_t, std::int64_t> count_p;
  std::map<std::int32_t, std::int64_t> count_q;
  std::map<std::pair<std::int32_t, std::int32_t>, std::int64_t> joint;
  for (std::size_t i = 0; i < p.labels.size(); ++i) {
    ++count_p[p.labels[i]];
    ++count_q[q.labels[i]];
    ++joint[{p.labels[i], q.labels[i]}];
  }
  const double hp = entropy(count_p, total);
  const double hq = entropy(count_q, total);
  if (count_p.size() == 1 && count_q.size() == 1) return 1.0;
  if (count_p.size() == 1 || count_q.size() == 1) return 0.0;

  // Sorted terms make the sum independent of argument order.
  std::vector<double> terms;
  terms.reserve(joint.size());
  for (const auto& [key, c] : joint) {
    const double np = static_cast<double>(count_p[key.first]);
    const double nq = static_cast<double>(count_q[key.second]);
    const double n = static_cast<double>(c);
    terms.push_back(n / total * std::log(n * total / (np * nq)));
  }
  std::sort(terms.begin(), terms.end());
  double mi = 0.0;
  for (const double t : terms) mi += t;
  return std::clamp(2.0 * mi / (hp + hq), 0.0, 1.0);
}

double ConfusionCounts::tpr() const {
  return tpr_defined() ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
}

double ConfusionCounts::fpr() const {
  return fpr_defined() ? static_cast<double>(fp) / static_cast<double>(fp + tn) : 0.0;
}

ConfusionCounts edge_confusion(const SparseAdjacency& inferred, const SparseAdjacency& truth) {
  require(inferred.nodes() == truth.nodes(), ErrorKind::DimensionMismatch,
          "graphs have " + std::to_string(inferred.nodes()) + " and " + std::to_string(truth.nodes()) +
              " nodes");
  const std::int64_t m = inferred.nodes();
  std::int64_t shared = 0;
  for (std::int32_t i = 0; i < inferred.nodes(); ++i) {
    const auto a = inferred.neighbors(i);
    const auto b = truth.neighbors(i);
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
      if (*ia < *ib) {
        ++ia;
      } else if (*ib < *ia) {
        ++ib;
      } else {
        if (i < *ia) ++shared;
        ++ia;
        ++ib;
      }
    }
  }
  ConfusionCounts c;
  c.tp = shared;
  c.fp = inferred.edge_count() - shared;
  c.fn = truth.edge_count() - shared;
  c.tn = m * (m - 1) / 2 - c.tp - c.fp - c.fn;
  return c;
}

Densities edge_density(const SparseAdjacency& adj, const Partition* partition) {
  const std::int64_t m = adj.nodes();
  const std::int64_t pairs = m * (m - 1) / 2;
  Densities d;
  d.overall = pairs > 0 ? static_cast<double>(adj.edge_count()) / static_cast<double>(pairs) : 0.0;
  if (partition == nullptr) return d;
  require(partition->nodes() == adj.nodes(), ErrorKind::DimensionMismatch,
          "partition and graph sizes differ");

  std::map<std::int32_t, std::int64_t> sizes;
  for (const auto l : partition->labels)
    if (l != 0) ++sizes[l];
  for (const auto& [label, s] : sizes) d.within_pairs += s * (s - 1) / 2;
  d.between_pairs = pairs - d.within_pairs;

  std::int64_t within_edges = 0;
  for (const auto& [i, j] : adj.edges()) {
    const auto li = partition->labels[i];
    if (li != 0 && li == partition->labels[j]) ++within_edges;
  }
  const std::int64_t between_edges = adj.edge_count() - within_edges;
  d.within = d.within_pairs > 0 ? static_cast<double>(within_edges) / static_cast<double>(d.within_pairs) : 0.0;
  d.between =
      d.between_pairs > 0 ? static_cast<double>(between_edges) / static_cast<double>(d.between_pairs) : 0.0;
  return d;
}

DegreeHistogram degree_histogram(const SparseAdjacency& adj) {
  DegreeHistogram h;
  h.degrees.resize(static_cast<std::size_t>(adj.nodes()));
  std::int64_t max_degree = 0;
  for (std::int32_t i = 0; i < adj.nodes(); ++i) {
    h.degrees[i] = adj.degree(i);
    max_degree = std::max(max_degree, h.degrees[i]);
  }
  h.counts.assign(static_cast<std::size_t>(max_degree) + 1, 0);
  for (const auto d : h.degrees) ++h.counts[d];
  return h;
}

}  // namespace netinf::metrics
