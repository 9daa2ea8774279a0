#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "netinf/simgen.hpp"

namespace netinf::study {

struct StudyOptions {
  int repetitions = 1;
  std::uint64_t seed = 1;
  bool baseline = false;  // also cluster |r| directly on every run
  bool estimate_a = false;
  int restarts = 10;
  std::optional<int> communities;  // defaults to the planted k
};

struct RunRecord {
  std::size_t point = 0;
  int repetition = 0;
  std::string method;  // "thresholded" or "spectral-direct"
  std::uint64_t run_seed = 0;
  simgen::SimConfig config;  // with the resolved alpha offset
  bool ok = true;
  std::string error;
  double nmi = 0.0;
  // Edge statistics exist only for the thresholded pipeline.
  std::optional<double> tpr;
  std::optional<double> fpr;
  std::optional<std::int64_t> edges;
  std::optional<std::int64_t> union_edges;
  std::int64_t truth_edges = 0;
};

/// For each grid point and repetition: simulate, infer, detect, score.
/// Failed runs are recorded with ok == false and do not stop the study.
std::vector<RunRecord> run_study(const std::vector<simgen::SimConfig>& grid, const StudyOptions& options);

/// Per-run seed derived from the study seed.
std::uint64_t run_seed(std::uint64_t study_seed, std::size_t point, int repetition);

/// Runs one repetition of one grid point.
std::vector<RunRecord> run_once(const simgen::SimConfig& config, std::size_t point, int repetition,
                                const StudyOptions& options);

struct Quartiles {
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
};

/// Linear-interpolation quantiles (type 7). Empty input gives NaNs.
Quartiles quartiles(std::vector<double> values);

struct PointSummary {
  std::size_t point = 0;
  std::string method;
  simgen::SimConfig config;
  int runs = 0;
  int failures = 0;
  Quartiles nmi;
  std::optional<Quartiles> tpr;
  std::optional<Quartiles> fpr;
  std::optional<Quartiles> edges;
};

std::vector<PointSummary> summarize(const std::vector<RunRecord>& records);

}  // namespace netinf::study
