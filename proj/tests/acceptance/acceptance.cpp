// Acceptance suite: one PASS/FAIL line per criterion. Exit status is nonzero
// when any criterion fails.
//
//   netinf_acceptance [--only N[,N...]] [--full-scale]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "netinf/assoc.hpp"
#include "netinf/cli.hpp"
#include "netinf/community.hpp"
#include "netinf/ebayes.hpp"
#include "netinf/io.hpp"
#include "netinf/lanczos.hpp"
#include "netinf/metrics.hpp"
#include "netinf/study.hpp"
#include "oracles.hpp"

using namespace netinf;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

double median_of(std::vector<double> v) { return study::quartiles(std::move(v)).median; }

simgen::SimConfig desk(double theta_in, double nu, double r_gen) {
  simgen::SimConfig c;
  c.m = 600;
  c.k = 4;
  c.community_size = 150;
  c.theta_in = theta_in;
  c.theta_out = 1.0;
  c.nu = nu;
  c.r_gen = r_gen;
  return c;
}

struct PointStats {
  double nmi = 0.0;
  double edges = 0.0;
  double tpr = 0.0;
  double fpr = 0.0;
  double baseline_nmi = 0.0;
  int failures = 0;
};

PointStats run_point(const simgen::SimConfig& c, int reps, bool baseline) {
  study::StudyOptions opt;
  opt.repetitions = reps;
  opt.seed = 1;
  opt.baseline = baseline;
  const auto records = study::run_study({c}, opt);
  std::vector<double> nmi, edges, tpr, fpr, base;
  PointStats s;
  for (const auto& r : records) {
    if (!r.ok) {
      ++s.failures;
      continue;
    }
    if (r.method == "thresholded") {
      nmi.push_back(r.nmi);
      edges.push_back(static_cast<double>(*r.edges));
      tpr.push_back(r.tpr.value_or(0.0));
      fpr.push_back(r.fpr.value_or(0.0));
    } else {
      base.push_back(r.nmi);
    }
  }
  if (!nmi.empty()) {
    s.nmi = median_of(nmi);
    s.edges = median_of(edges);
    s.tpr = median_of(tpr);
    s.fpr = median_of(fpr);
  }
  if (!base.empty()) s.baseline_nmi = median_of(base);
  return s;
}

// ---------------------------------------------------------------- 1

Outcome convolution_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  int points = 0;
  for (double a : {0.1, 0.5, 2.0})
    for (int s = -160; s <= 160; ++s) {
      const double z = 0.25 * s;
      const double ref = oracle::log_convolution_quadrature(z, a);
      const double got = ebayes::log_laplace_normal_density(z, a);
      worst = std::max(worst, std::abs(std::expm1(got - ref)));
      ++points;
    }
  const double secs = seconds_since(t0);
  return {worst <= 1e-8 && secs < 10.0, std::to_string(points) + " points, max rel err " + fmt(worst) +
                                            " (tol 1e-8), " + fmt(secs, 3) + " s (limit 10)"};
}

// ---------------------------------------------------------------- 2

Outcome posterior_median_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> uz(-10.0, 10.0);
  std::uniform_real_distribution<double> ulw(std::log(1e-3), std::log(0.999));
  std::uniform_real_distribution<double> ula(std::log(0.05), std::log(4.0));
  double worst = 0.0;
  int nonzero = 0;
  for (int t = 0; t < 500; ++t) {
    const double z = uz(gen);
    const double w = std::exp(ulw(gen));
    const double a = std::exp(ula(gen));
    const double ref = oracle::posterior_median_grid(z, w, a);
    const double got = ebayes::posterior_median(z, w, a).median;
    worst = std::max(worst, std::abs(got - ref));
    nonzero += got != 0.0;
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-6 && secs < 30.0, "500 triples (" + std::to_string(nonzero) + " nonzero), max abs err " +
                                            fmt(worst) + " (tol 1e-6), " + fmt(secs, 3) + " s (limit 30)"};
}

// ---------------------------------------------------------------- 3

Outcome weight_recovery() {
  const auto t0 = std::chrono::steady_clock::now();
  const double a = 0.5;
  bool ok = true;
  std::string detail;
  for (double w : {0.02, 0.1, 0.3}) {
    std::vector<double> est;
    for (int seed = 1; seed <= 20; ++seed) {
      std::mt19937_64 gen(1000 * seed + static_cast<int>(w * 100));
      std::normal_distribution<double> noise;
      std::exponential_distribution<double> mag(a);
      std::uniform_real_distribution<double> u;
      std::vector<double> row(2000);
      for (auto& z : row) {
        double mu = 0.0;
        if (u(gen) < w) mu = (u(gen) < 0.5 ? -1.0 : 1.0) * mag(gen);
        z = mu + noise(gen);
      }
      est.push_back(ebayes::fit_row(row, false).w);
    }
    const double med = median_of(est);
    const double tol = w <= 0.1 ? 0.05 : 0.08;
    ok = ok && std::abs(med - w) <= tol;
    detail += "w=" + fmt(w) + ": median " + fmt(med) + " (tol " + fmt(tol) + "); ";
  }
  const double secs = seconds_since(t0);
  return {ok && secs < 60.0, detail + fmt(secs, 3) + " s (limit 60)"};
}

// ---------------------------------------------------------------- 4, 5, 8

struct DeskRuns {
  bool done = false;
  PointStats high;
  PointStats low;
  double high_secs = 0.0;
};

DeskRuns& desk_runs(bool need_low) {
  static DeskRuns runs;
  if (!runs.done) {
    const auto t0 = std::chrono::steady_clock::now();
    runs.high = run_point(desk(50.0, 200.0, 0.8), 10, false);
    runs.high_secs = seconds_since(t0);
    runs.done = true;
  }
  static bool low_done = false;
  if (need_low && !low_done) {
    runs.low = run_point(desk(50.0, 200.0, 0.1), 10, false);
    low_done = true;
  }
  return runs;
}

Outcome high_signal_recovery() {
  const auto& r = desk_runs(false);
  return {r.high.nmi >= 0.9 && r.high.failures == 0 && r.high_secs < 600.0,
          "median NMI " + fmt(r.high.nmi) + " (need >= 0.9), " + std::to_string(r.high.failures) +
              " failed runs, " + fmt(r.high_secs, 3) + " s (limit 600)"};
}

Outcome failure_regime() {
  const auto& r = desk_runs(true);
  const double limit = 0.001 * 600.0 * 599.0 / 2.0;
  return {r.low.edges < limit && r.low.nmi <= 0.1 && r.low.failures == 0,
          "median edges " + fmt(r.low.edges, 6) + " (need < " + fmt(limit, 6) + "), median NMI " + fmt(r.low.nmi) +
              " (need <= 0.1)"};
}

Outcome tpr_fpr() {
  const auto& r = desk_runs(false);
  return {r.high.fpr <= 0.005 && r.high.tpr >= 0.8,
          "median FPR " + fmt(r.high.fpr) + " (need <= 0.005), median TPR " + fmt(r.high.tpr) + " (need >= 0.8)"};
}

// ---------------------------------------------------------------- 6

Outcome collapse_ordering() {
  std::vector<double> collapse;
  std::string detail;
  for (double nu : {50.0, 100.0, 200.0}) {
    double point = 0.0;
    std::string curve;
    for (int step = 20; step >= 1; --step) {
      const double r_gen = 0.05 * step;
      const auto s = run_point(desk(30.0, nu, r_gen), 10, false);
      curve += fmt(r_gen, 3) + ":" + fmt(s.nmi, 3) + " ";
      if (s.nmi < 0.3) {
        point = r_gen;
        break;
      }
    }
    collapse.push_back(point);
    detail += "nu=" + fmt(nu) + " collapse " + fmt(point, 3) + " [" + curve + "]; ";
  }
  const bool ok = collapse[0] > collapse[1] && collapse[1] > collapse[2];
  return {ok, detail + "need strictly decreasing"};
}

// ---------------------------------------------------------------- 7

Outcome baseline_comparison() {
  int wins = 0;
  std::string detail;
  for (double r_gen : {0.5, 0.6, 0.7}) {
    const auto s = run_point(desk(30.0, 200.0, r_gen), 10, true);
    const bool win = s.nmi >= s.baseline_nmi;
    wins += win;
    detail += "r_gen=" + fmt(r_gen) + ": thresholded " + fmt(s.nmi) + " vs direct " + fmt(s.baseline_nmi) + "; ";
  }
  return {wins >= 2, detail + std::to_string(wins) + "/3 points (need >= 2)"};
}

// ---------------------------------------------------------------- 9

Outcome exact_test_oracle() {
  double worst = 0.0;
  int tables = 0;
  for (int n = 1; n <= 12; ++n)
    for (int sa = 1; sa <= n; ++sa)
      for (int sb = 1; sb <= n; ++sb)
        for (int k = std::max(0, sa + sb - n); k <= std::min(sa, sb); ++k) {
          assoc::Incidence inc;
          inc.items = n;
          inc.entities = 2;
          inc.members.resize(2);
          for (int i = 0; i < sa; ++i) inc.members[0].push_back(i);
          for (int i = 0; i < k; ++i) inc.members[1].push_back(i);
          for (int i = 0; i < sb - k; ++i) inc.members[1].push_back(sa + i);
          const auto p = assoc::cooccurrence_pvalues(inc);
          const double ref = oracle::hypergeometric_tail_enumeration(n, sa, sb, k);
          worst = std::max({worst, std::abs(p.values(0, 1) - ref), std::abs(p.values(1, 0) - ref)});
          ++tables;
        }
  return {worst <= 1e-12, std::to_string(tables) + " tables, max abs err " + fmt(worst) + " (tol 1e-12)"};
}

// ---------------------------------------------------------------- 10

Outcome spectral_and_nmi() {
  std::mt19937_64 gen(10);
  double worst_eig = 0.0;
  for (int g = 0; g < 50; ++g) {
    const int m = 5 + static_cast<int>(gen() % 96);
    const double p = 0.02 + 0.3 * std::uniform_real_distribution<double>()(gen);
    std::vector<Edge> edges;
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j)
        if (std::uniform_real_distribution<double>()(gen) < p) edges.emplace_back(i, j);
    const SparseAdjacency adj(m, edges);
    const int count = std::min(m, 1 + static_cast<int>(gen() % 6));

    // Adjacency itself and the regularized operator.
    const Eigen::SparseMatrix<double> a = adj.to_sparse_matrix();
    const auto pairs = lanczos_eigs(m, [&](const Vector& x, Vector& y) { y = a * x; }, count,
                                    EigenOrder::LargestMagnitude);
    community::SpectralConfig cfg;
    cfg.communities = count;
    const auto emb = community::regularized_embedding(adj, cfg);

    for (const auto& [ref_matrix, values] :
         {std::pair<Matrix, Vector>{Matrix(a), pairs.values},
          std::pair<Matrix, Vector>{oracle::regularized_dense(adj, emb.tau), emb.eigenvalues}}) {
      Eigen::SelfAdjointEigenSolver<Matrix> dense(ref_matrix);
      std::vector<double> mags;
      for (int i = 0; i < m; ++i) mags.push_back(std::abs(dense.eigenvalues()(i)));
      std::sort(mags.rbegin(), mags.rend());
      std::vector<double> got;
      for (int c = 0; c < count; ++c) {
        got.push_back(std::abs(values(c)));
        double nearest = 1e300;
        for (int i = 0; i < m; ++i) nearest = std::min(nearest, std::abs(dense.eigenvalues()(i) - values(c)));
        worst_eig = std::max(worst_eig, nearest);
      }
      std::sort(got.rbegin(), got.rend());
      for (int c = 0; c < count; ++c) worst_eig = std::max(worst_eig, std::abs(got[c] - mags[c]));
    }
  }

  int nmi_failures = 0;
  for (int t = 0; t < 1000; ++t) {
    const int n = 1 + static_cast<int>(gen() % 200);
    const int ka = 1 + static_cast<int>(gen() % 8);
    const int kb = 1 + static_cast<int>(gen() % 8);
    Partition p, q;
    p.communities = ka;
    q.communities = kb;
    for (int i = 0; i < n; ++i) {
      p.labels.push_back(1 + static_cast<int>(gen() % ka));
      q.labels.push_back(1 + static_cast<int>(gen() % kb));
    }
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), gen);
    std::vector<int> relabel(ka + 1);
    std::iota(relabel.begin(), relabel.end(), 0);
    std::shuffle(relabel.begin() + 1, relabel.end(), gen);
    Partition pp = p, qp = q;
    for (int i = 0; i < n; ++i) {
      pp.labels[i] = relabel[p.labels[perm[i]]];
      qp.labels[i] = q.labels[perm[i]];
    }
    const double v = metrics::nmi(p, q);
    const bool ok = std::abs(metrics::nmi(p, p) - 1.0) <= 1e-12 && v == metrics::nmi(q, p) &&
                    std::abs(metrics::nmi(pp, qp) - v) <= 1e-12 && v >= 0.0 && v <= 1.0 + 1e-12;
    nmi_failures += !ok;
  }
  return {worst_eig <= 1e-6 && nmi_failures == 0,
          "50 graphs, max eigenvalue err " + fmt(worst_eig) + " (tol 1e-6); NMI fuzz failures " +
              std::to_string(nmi_failures) + "/1000"};
}

// ---------------------------------------------------------------- 11

std::vector<std::string> pipeline(const fs::path& root) {
  fs::remove_all(root);
  fs::create_directories(root);
  auto p = [&](const std::string& s) { return (root / s).string(); };
  io::write_text(p("sim.json"), R"({"m": 200, "k": 4, "community_size": 50, "theta_in": 50, "r_gen": 0.8, "nu": 200})");
  io::write_text(p("grid.json"),
                 R"({"base": {"m": 120, "k": 2, "community_size": 60}, "sweep": {"r_gen": [0.8, 0.4], "nu": [100, 200]}})");
  const std::vector<std::vector<std::string>> commands = {
      {"simulate", "--config", p("sim.json"), "--seed", "7", "--output-dir", p("sim")},
      {"simulate", "--config", p("sim.json"), "--seed", "7", "--format", "bin", "--output-dir", p("simbin")},
      {"infer", "--input", p("sim/correlation.csv"), "--kind", "correlation", "--nu", "200", "--output-dir", p("inf")},
      {"infer", "--input", p("simbin/correlation.bin"), "--kind", "correlation", "--nu", "200", "--estimate-a",
       "--output-dir", p("infa")},
      {"communities", "--edges", p("inf/edges.tsv"), "-k", "4", "--seed", "3", "--output-dir", p("com")},
      {"communities", "--edges", p("inf/edges.tsv"), "--auto-k", "--seed", "3", "--output-dir", p("comauto")},
      {"study", "--grid", p("grid.json"), "--reps", "2", "--seed", "11", "--baseline", "spectral-direct",
       "--output-dir", p("study")},
      {"evaluate", "--partition", p("com/partition.tsv"), "--partition", p("sim/planted_partition.tsv"), "--output",
       p("nmi.csv")},
      {"evaluate", "--adjacency", p("sim/truth_edges.tsv"), "--adjacency", p("inf/edges.tsv"), "--planted",
       p("sim/planted_partition.tsv"), "--output", p("confusion.csv")},
  };
  std::vector<std::string> errors;
  // Keep the command summaries off the report.
  std::ostringstream sink;
  auto* saved = std::cout.rdbuf(sink.rdbuf());
  for (auto cmd : commands) {
    cmd.insert(cmd.begin(), "netinf");
    const int rc = cli::run(cmd);
    if (rc != 0) errors.push_back(cmd[1] + " exited " + std::to_string(rc));
  }
  std::cout.rdbuf(saved);
  return errors;
}

Outcome determinism() {
  const fs::path base = fs::temp_directory_path() / "netinf_acceptance_determinism";
  auto errors = pipeline(base / "run1");
  auto more = pipeline(base / "run2");
  errors.insert(errors.end(), more.begin(), more.end());
  int files = 0;
  int differing = 0;
  std::string which;
  for (const auto& entry : fs::recursive_directory_iterator(base / "run1")) {
    if (!entry.is_regular_file() || entry.path().filename() == "manifest.json") continue;
    const auto rel = fs::relative(entry.path(), base / "run1");
    const auto other = base / "run2" / rel;
    ++files;
    const bool same = fs::exists(other) && io::read_text(entry.path().string()) == io::read_text(other.string());
    if (!same) {
      ++differing;
      which += " " + rel.string();
    }
  }
  // The repeated runs must also see the same set of files.
  int files2 = 0;
  for (const auto& entry : fs::recursive_directory_iterator(base / "run2"))
    if (entry.is_regular_file() && entry.path().filename() != "manifest.json") ++files2;
  const bool ok = errors.empty() && differing == 0 && files == files2 && files > 0;
  std::string detail = std::to_string(files) + " output files compared (manifests excluded), " +
                       std::to_string(differing) + " differ" + which;
  for (const auto& e : errors) detail += "; " + e;
  return {ok, detail};
}

// ---------------------------------------------------------------- spot check

void full_scale_spot_check() {
  for (double r_gen : {0.8, 0.1}) {
    simgen::SimConfig c;  // paper scale: m = 3000, k = 20, size 150
    c.theta_in = 50.0;
    c.nu = 200.0;
    c.r_gen = r_gen;
    const auto t0 = std::chrono::steady_clock::now();
    const auto s = run_point(c, 1, false);
    std::printf("[INFO] full scale m=3000 r_gen=%s: NMI %s, edges %s (0.001 m(m-1)/2 = %s), TPR %s, FPR %s, %s s\n",
                fmt(r_gen).c_str(), fmt(s.nmi).c_str(), fmt(s.edges, 7).c_str(), fmt(0.001 * 3000 * 2999 / 2, 7).c_str(),
                fmt(s.tpr).c_str(), fmt(s.fpr).c_str(), fmt(seconds_since(t0), 3).c_str());
    std::fflush(stdout);
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  bool full_scale = false;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--full-scale") {
      full_scale = true;
    } else if (arg == "--only" && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      for (std::string tok; std::getline(ss, tok, ',');) only.insert(std::stoi(tok));
    } else {
      std::fprintf(stderr, "usage: %s [--only N[,N...]] [--full-scale]\n", argv[0]);
      return 2;
    }
  }

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"convolution density vs quadrature", convolution_oracle},
      {"posterior median vs grid inversion", posterior_median_oracle},
      {"mixture weight recovery", weight_recovery},
      {"high-signal community recovery", high_signal_recovery},
      {"weak-signal failure regime", failure_regime},
      {"collapse point ordering in nu", collapse_ordering},
      {"thresholded vs direct spectral", baseline_comparison},
      {"edge TPR/FPR at high signal", tpr_fpr},
      {"exact test vs enumeration", exact_test_oracle},
      {"eigensolver and NMI properties", spectral_and_nmi},
      {"byte-identical repeated runs", determinism},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    failed += !out.pass;
    std::printf("[%s] %2d %s: %s [%ss]\n", out.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(),
                out.detail.c_str(), fmt(seconds_since(t0), 3).c_str());
    std::fflush(stdout);
  }
  if (full_scale) full_scale_spot_check();
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
