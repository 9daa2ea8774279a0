#include "netinf/study.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "netinf/assoc.hpp"
#include "netinf/community.hpp"
#include "netinf/ebayes.hpp"
#include "netinf/error.hpp"
#include "netinf/metrics.hpp"
#include "netinf/rng.hpp"

namespace netinf::study {

std::uint64_t run_seed(std::uint64_t study_seed, std::size_t point, int repetition) {
  return stream_key(study_seed, kStreamStudy, point, static_cast<std::uint64_t>(repetition));
}

std::vector<RunRecord> run_once(const simgen::SimConfig& config, std::size_t point, int repetition,
                                const StudyOptions& options) {
  RunRecord base;
  base.point = point;
  base.repetition = repetition;
  base.method = "thresholded";
  base.run_seed = run_seed(options.seed, point, repetition);
  base.config = config;
  base.config.seed = base.run_seed;

  RunRecord baseline = base;
  baseline.method = "spectral-direct";

  std::vector<RunRecord> out;
  try {
    const auto truth = simgen::generate_truth(base.config);
    base.config.alpha_offset = truth.alpha_offset;
    baseline.config.alpha_offset = truth.alpha_offset;
    base.truth_edges = truth.adjacency.edge_count();
    baseline.truth_edges = base.truth_edges;

    const auto corr = simgen::generate_correlations(truth.adjacency, config.r_gen, config.nu, base.run_seed);
    const auto assoc = assoc::fisher_z(corr, config.nu);
    const auto inferred = ebayes::infer_adjacency(assoc, options.estimate_a);

    community::SpectralConfig sc;
    sc.communities = options.communities.value_or(config.k);
    sc.restarts = options.restarts;
    sc.seed = base.run_seed;
    const auto detected = community::detect_communities(inferred.adjacency, sc);

    const auto conf = metrics::edge_confusion(inferred.adjacency, truth.adjacency);
    base.nmi = metrics::nmi(truth.partition, detected.partition);
    base.tpr = conf.tpr();
    base.fpr = conf.fpr();
    base.edges = inferred.adjacency.edge_count();
    base.union_edges = inferred.union_edges;

    if (options.baseline) {
      try {
        const auto direct = community::spectral_on_continuous(corr, sc);
        baseline.nmi = metrics::nmi(truth.partition, direct.partition);
      } catch (const std::exception& e) {
        baseline.ok = false;
        baseline.error = e.what();
      }
    }
  } catch (const std::exception& e) {
    base.ok = false;
    base.error = e.what();
    baseline.ok = false;
    baseline.error = e.what();
  }
  out.push_back(std::move(base));
  if (options.baseline) out.push_back(std::move(baseline));
  return out;
}

std::vector<RunRecord> run_study(const std::vector<simgen::SimConfig>& grid, const StudyOptions& options) {
  require(options.repetitions >= 1, ErrorKind::InvalidParameter, "repetitions must be >= 1");
  std::vector<RunRecord> records;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    simgen::SimConfig config = grid[p];
    // Calibrate once per grid point; every repetition reuses the offset.
    if (!config.alpha_offset) {
      try {
        config.alpha_offset = simgen::calibrate_alpha_offset(config);
      } catch (const std::exception&) {
        // run_once records the failure
      }
    }
    for (int rep = 0; rep < options.repetitions; ++rep) {
      auto runs = run_once(config, p, rep, options);
      records.insert(records.end(), runs.begin(), runs.end());
    }
  }
  return records;
}

Quartiles quartiles(std::vector<double> values) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  if (values.empty()) return {nan, nan, nan};
  std::sort(values.begin(), values.end());
  auto q = [&](double prob) {
    const double h = (static_cast<double>(values.size()) - 1.0) * prob;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  return {q(0.25), q(0.5), q(0.75)};
}

std::vector<PointSummary> summarize(const std::vector<RunRecord>& records) {
  std::map<std::pair<std::size_t, std::string>, std::vector<const RunRecord*>> groups;
  for (const auto& r : records) groups[{r.point, r.method}].push_back(&r);

  std::vector<PointSummary> out;
  for (const auto& [key, runs] : groups) {
    PointSummary s;
    s.point = key.first;
    s.method = key.second;
    s.config = runs.front()->config;
    s.config.seed = 0;
    std::vector<double> nmi, tpr, fpr, edges;
    for (const auto* r : runs) {
      ++s.runs;
      if (!r->ok) {
        ++s.failures;
        continue;
      }
      nmi.push_back(r->nmi);
      if (r->tpr) tpr.push_back(*r->tpr);
      if (r->fpr) fpr.push_back(*r->fpr);
      if (r->edges) edges.push_back(static_cast<double>(*r->edges));
    }
    s.nmi = quartiles(nmi);
    if (!tpr.empty()) s.tpr = quartiles(tpr);
    if (!fpr.empty()) s.fpr = quartiles(fpr);
    if (!edges.empty()) s.edges = quartiles(edges);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace netinf::study
