#include "netinf/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "netinf/assoc.hpp"
#include "netinf/community.hpp"
#include "netinf/ebayes.hpp"
#include "netinf/error.hpp"
#include "netinf/io.hpp"
#include "netinf/metrics.hpp"
#include "netinf/parallel.hpp"
#include "netinf/simgen.hpp"
#include "netinf/study.hpp"

namespace netinf::cli {

namespace fs = std::filesystem;
using io::json;

namespace {

[[noreturn]] void usage_error(const std::string& msg) { fail(ErrorKind::Usage, msg); }

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Usage: return kUsage;
    case ErrorKind::Convergence: return kNumerical;
    default: return kDataError;
  }
}

class Stopwatch {
 public:
  void lap(const std::string& name) {
    const auto now = std::chrono::steady_clock::now();
    laps_[name] = std::chrono::duration<double, std::milli>(now - last_).count();
    last_ = now;
  }
  json to_json() const { return laps_; }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
  json laps_ = json::object();
};

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

// One manifest per output directory. Timestamps and timings live only here.
void write_manifest(const fs::path& dir, const std::string& command, const std::vector<std::string>& args,
                    const std::vector<std::string>& inputs, const json& config, std::optional<std::uint64_t> seed,
                    const std::vector<std::string>& outputs, const Stopwatch& timer) {
  json in = json::array();
  for (const auto& path : inputs) in.push_back({{"path", path}, {"fnv1a64", io::file_digest(path)}});
  json manifest{{"command", command},
                {"arguments", args},
                {"inputs", in},
                {"config", config},
                {"seed", seed ? json(*seed) : json(nullptr)},
                {"tool_version", kVersion},
                {"outputs", outputs},
                {"started_at", utc_now()},
                {"timings_ms", timer.to_json()}};
  io::write_text((dir / "manifest.json").string(), manifest.dump(2) + "\n");
}

fs::path prepare_output_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec, ErrorKind::Io, "cannot create output directory " + dir + ": " + ec.message());
  return fs::path(dir);
}

// ---------------------------------------------------------------- infer

struct InferArgs {
  std::string input;
  std::string kind;
  std::optional<double> nu;
  std::optional<std::string> tail;
  bool estimate_a = false;
  std::string output_dir;
  int threads = 0;
};

int cmd_infer(const InferArgs& a, const std::vector<std::string>& argv) {
  Stopwatch timer;
  const bool correlational = a.kind == "samples" || a.kind == "covariance" || a.kind == "correlation";
  if (correlational && a.tail) usage_error("--tail applies only to pvalue or incidence input");
  if (!correlational && a.nu) usage_error("--nu applies only to samples, covariance or correlation input");
  if ((a.kind == "covariance" || a.kind == "correlation") && !a.nu)
    usage_error("--nu is required for " + a.kind + " input");
  set_threads(a.threads);

  AssocMatrix scores;
  json params{{"kind", a.kind}, {"estimate_a", a.estimate_a}};
  if (correlational) {
    SymmetricMatrix corr;
    double nu = 0.0;
    if (a.kind == "samples") {
      const auto samples = io::read_matrix(a.input);
      nu = a.nu.value_or(static_cast<double>(samples.values.rows()));
      corr = assoc::correlation_from_covariance(assoc::covariance_matrix({samples.values}));
    } else if (a.kind == "covariance") {
      nu = *a.nu;
      corr = assoc::correlation_from_covariance({io::read_matrix(a.input).values, SymmetricKind::Covariance});
    } else {
      nu = *a.nu;
      corr = {io::read_matrix(a.input).values, SymmetricKind::Correlation};
    }
    params["nu"] = nu;
    timer.lap("read");
    scores = assoc::fisher_z(corr, nu);
  } else {
    const std::string tail = a.tail.value_or("upper");
    const auto t = tail == "lower" ? assoc::Tail::Lower : assoc::Tail::Upper;
    params["tail"] = tail;
    SymmetricMatrix pvals;
    if (a.kind == "incidence") {
      const auto inc = io::read_incidence_tsv(a.input);
      pvals = assoc::cooccurrence_pvalues(inc.incidence);
    } else {
      pvals = {io::read_matrix(a.input).values, SymmetricKind::PValue};
    }
    timer.lap("read");
    scores = assoc::pvalues_to_z(pvals, t);
  }
  timer.lap("transform");

  const auto result = ebayes::infer_adjacency(scores, a.estimate_a);
  timer.lap("infer");

  const auto dir = prepare_output_dir(a.output_dir);
  io::write_edge_list((dir / "edges.tsv").string(), result.adjacency);
  json fit = io::to_json(result.fit);
  params["nodes"] = result.adjacency.nodes();
  params["edges"] = result.adjacency.edge_count();
  params["union_edges"] = result.union_edges;
  fit["params"] = params;
  io::write_text((dir / "fit.json").string(), fit.dump(2) + "\n");
  timer.lap("write");
  write_manifest(dir, "infer", argv, {a.input}, params, std::nullopt, {"edges.tsv", "fit.json"}, timer);
  std::cout << "nodes " << result.adjacency.nodes() << ", edges " << result.adjacency.edge_count() << '\n';
  return kOk;
}

// ---------------------------------------------------------------- communities

struct CommunitiesArgs {
  std::string edges;
  std::optional<std::int32_t> nodes;
  std::optional<int> k;
  bool auto_k = false;
  std::string tau = "auto";
  int restarts = 10;
  std::uint64_t seed = 1;
  bool no_row_normalize = false;
  std::string output_dir;
  int threads = 0;
};

int cmd_communities(const CommunitiesArgs& a, const std::vector<std::string>& argv) {
  Stopwatch timer;
  if (a.k.has_value() == a.auto_k) usage_error("give exactly one of --communities/-k or --auto-k");
  set_threads(a.threads);
  const auto adj = io::read_edge_list(a.edges, a.nodes);
  timer.lap("read");

  community::SpectralConfig sc;
  if (a.tau != "auto") {
    try {
      sc.tau = std::stod(a.tau);
    } catch (const std::exception&) {
      usage_error("--tau must be a number or 'auto'");
    }
    if (*sc.tau < 0.0) usage_error("--tau must be >= 0");
  }
  sc.restarts = a.restarts;
  sc.seed = a.seed;
  sc.row_normalize = !a.no_row_normalize;
  if (sc.restarts < 1) usage_error("--restarts must be >= 1");
  if (a.k) {
    if (*a.k < 1 || *a.k > adj.nodes())
      usage_error("K = " + std::to_string(*a.k) + " must lie in [1, " + std::to_string(adj.nodes()) + "]");
    sc.communities = *a.k;
  } else {
    sc.communities = community::select_num_communities(adj, std::nullopt, sc.tau);
  }
  timer.lap("select");
  const auto result = community::detect_communities(adj, sc);
  timer.lap("detect");

  const auto dir = prepare_output_dir(a.output_dir);
  io::write_partition((dir / "partition.tsv").string(), result.partition);
  json isolated = json::array();
  for (const auto i : result.embedding.isolated) isolated.push_back(i + 1);
  std::vector<double> eig(result.embedding.eigenvalues.data(),
                          result.embedding.eigenvalues.data() + result.embedding.eigenvalues.size());
  json report{{"K", sc.communities},
              {"auto_k", a.auto_k},
              {"tau", result.embedding.tau},
              {"row_normalize", sc.row_normalize},
              {"eigenvalues", eig},
              {"wcss", result.wcss},
              {"restarts", sc.restarts},
              {"restart_wcss", result.restart_wcss},
              {"empty_clusters", result.empty_clusters},
              {"lanczos_restarts", result.embedding.restarts},
              {"matvecs", result.embedding.matvecs},
              {"isolated_nodes", isolated},
              {"seed", a.seed}};
  io::write_text((dir / "report.json").string(), report.dump(2) + "\n");
  timer.lap("write");
  json config{{"K", sc.communities}, {"tau", a.tau}, {"restarts", sc.restarts}, {"row_normalize", sc.row_normalize}};
  write_manifest(dir, "communities", argv, {a.edges}, config, a.seed, {"partition.tsv", "report.json"}, timer);
  std::cout << "K " << sc.communities << ", wcss " << io::format_double(result.wcss) << '\n';
  return kOk;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string output_dir;
  std::string format = "csv";
  int threads = 0;
};

simgen::SimConfig load_sim_config(const std::string& path) {
  auto cfg = io::sim_config_from_json(io::read_json(path));
  try {
    simgen::validate(cfg);
  } catch (const Error& e) {
    usage_error(std::string("invalid simulation config: ") + e.what());
  }
  return cfg;
}

int cmd_simulate(const SimulateArgs& a, const std::vector<std::string>& argv) {
  Stopwatch timer;
  set_threads(a.threads);
  auto cfg = load_sim_config(a.config);
  if (a.seed) cfg.seed = *a.seed;
  timer.lap("read");
  const auto truth = simgen::generate_truth(cfg);
  cfg.alpha_offset = truth.alpha_offset;
  timer.lap("network");
  const auto corr = simgen::generate_correlations(truth.adjacency, cfg.r_gen, cfg.nu, cfg.seed);
  timer.lap("correlations");

  const auto dir = prepare_output_dir(a.output_dir);
  io::write_edge_list((dir / "truth_edges.tsv").string(), truth.adjacency);
  io::write_partition((dir / "planted_partition.tsv").string(), truth.partition);
  const std::string corr_name = a.format == "bin" ? "correlation.bin" : "correlation.csv";
  if (a.format == "bin") {
    io::write_matrix_binary((dir / corr_name).string(), corr.values);
  } else {
    io::write_matrix_csv((dir / corr_name).string(), corr.values);
  }
  io::write_matrix_csv((dir / "alpha.csv").string(), truth.alpha);
  const json resolved = io::to_json(cfg);
  io::write_text((dir / "config.json").string(), resolved.dump(2) + "\n");
  timer.lap("write");
  write_manifest(dir, "simulate", argv, {a.config}, resolved, cfg.seed,
                 {"truth_edges.tsv", "planted_partition.tsv", corr_name, "alpha.csv", "config.json"}, timer);
  std::cout << "nodes " << truth.adjacency.nodes() << ", edges " << truth.adjacency.edge_count() << '\n';
  return kOk;
}

// ---------------------------------------------------------------- study

struct StudyArgs {
  std::string grid;
  int reps = 1;
  std::uint64_t seed = 1;
  std::optional<std::string> baseline;
  bool estimate_a = false;
  int restarts = 10;
  std::optional<int> k;
  std::string output_dir;
  int threads = 0;
};

// {"base": {...}, "sweep": {"r_gen": [...], ...}} expands to the Cartesian
// product in key order; {"points": [{...}, ...]} lists points explicitly.
std::vector<simgen::SimConfig> expand_grid(const json& grid) {
  require(grid.is_object(), ErrorKind::InvalidInput, "grid must be a JSON object");
  const auto base = io::sim_config_from_json(grid.value("base", json::object()));
  std::vector<json> points;
  if (grid.contains("points")) {
    for (const auto& p : grid["points"]) points.push_back(p);
  } else {
    points.push_back(json::object());
    if (grid.contains("sweep")) {
      for (const auto& [key, values] : grid["sweep"].items()) {
        require(values.is_array() && !values.empty(), ErrorKind::InvalidInput,
                "sweep '" + key + "' must be a non-empty array");
        std::vector<json> next;
        for (const auto& p : points) {
          for (const auto& v : values) {
            json q = p;
            q[key] = v;
            next.push_back(std::move(q));
          }
        }
        points = std::move(next);
      }
    }
  }
  std::vector<simgen::SimConfig> out;
  for (const auto& p : points) {
    auto cfg = io::sim_config_from_json(p, base);
    try {
      simgen::validate(cfg);
    } catch (const Error& e) {
      usage_error(std::string("invalid grid point: ") + e.what());
    }
    out.push_back(cfg);
  }
  return out;
}

json to_json(const study::RunRecord& r) {
  auto opt = [](const auto& v) { return v ? json(*v) : json(nullptr); };
  return {{"point", r.point},
          {"repetition", r.repetition},
          {"method", r.method},
          {"run_seed", r.run_seed},
          {"config", io::to_json(r.config)},
          {"ok", r.ok},
          {"error", r.ok ? json(nullptr) : json(r.error)},
          {"nmi", r.ok ? json(r.nmi) : json(nullptr)},
          {"tpr", opt(r.tpr)},
          {"fpr", opt(r.fpr)},
          {"edges", opt(r.edges)},
          {"union_edges", opt(r.union_edges)},
          {"truth_edges", r.truth_edges}};
}

std::string summary_csv(const std::vector<study::PointSummary>& summaries) {
  std::ostringstream out;
  out << "point,method,m,k,community_size,theta_in,theta_out,r_gen,nu,runs,failures,"
         "nmi_q1,nmi_median,nmi_q3,tpr_q1,tpr_median,tpr_q3,fpr_q1,fpr_median,fpr_q3,"
         "edges_q1,edges_median,edges_q3\n";
  auto cell = [](double v) { return std::isnan(v) ? std::string() : io::format_double(v); };
  auto triple = [&](const std::optional<study::Quartiles>& q) {
    if (!q) return std::string(",,");
    return cell(q->q1) + "," + cell(q->median) + "," + cell(q->q3);
  };
  for (const auto& s : summaries) {
    const auto& c = s.config;
    out << s.point << ',' << s.method << ',' << c.m << ',' << c.k << ',' << c.community_size << ','
        << io::format_double(c.theta_in) << ',' << io::format_double(c.theta_out) << ','
        << io::format_double(c.r_gen) << ',' << io::format_double(c.nu) << ',' << s.runs << ',' << s.failures
        << ',' << triple(s.nmi) << ',' << triple(s.tpr) << ',' << triple(s.fpr) << ',' << triple(s.edges)
        << '\n';
  }
  return out.str();
}

int cmd_study(const StudyArgs& a, const std::vector<std::string>& argv) {
  Stopwatch timer;
  if (a.baseline && *a.baseline != "spectral-direct") usage_error("--baseline accepts only 'spectral-direct'");
  if (a.reps < 1) usage_error("--reps must be >= 1");
  set_threads(a.threads);
  const json grid_json = io::read_json(a.grid);
  const auto grid = expand_grid(grid_json);
  timer.lap("read");

  study::StudyOptions opts;
  opts.repetitions = a.reps;
  opts.seed = a.seed;
  opts.baseline = a.baseline.has_value();
  opts.estimate_a = a.estimate_a;
  opts.restarts = a.restarts;
  opts.communities = a.k;
  const auto records = study::run_study(grid, opts);
  timer.lap("runs");

  const auto dir = prepare_output_dir(a.output_dir);
  std::string lines;
  for (const auto& r : records) {
    if (!r.ok) std::cerr << "run failed (point " << r.point << ", rep " << r.repetition << "): " << r.error << '\n';
    lines += to_json(r).dump() + "\n";
  }
  io::write_text((dir / "records.jsonl").string(), lines);
  io::write_text((dir / "summary.csv").string(), summary_csv(study::summarize(records)));
  timer.lap("write");
  json config{{"grid", grid_json}, {"repetitions", a.reps}, {"baseline", a.baseline ? json(*a.baseline) : json(nullptr)},
              {"estimate_a", a.estimate_a}, {"restarts", a.restarts}};
  write_manifest(dir, "study", argv, {a.grid}, config, a.seed, {"records.jsonl", "summary.csv"}, timer);
  std::cout << "records " << records.size() << '\n';
  return kOk;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
  std::vector<std::string> partitions;
  std::vector<std::string> adjacencies;
  std::optional<std::string> planted;
  std::optional<std::int32_t> nodes;
  std::optional<std::string> output;
};

int cmd_evaluate(const EvaluateArgs& a) {
  const bool by_partition = !a.partitions.empty();
  const bool by_adjacency = !a.adjacencies.empty();
  if (by_partition == by_adjacency) usage_error("give either two --partition files or two --adjacency files");
  std::ostringstream out;
  out << "metric,value\n";
  if (by_partition) {
    if (a.partitions.size() != 2) usage_error("--partition must be given exactly twice");
    const auto p = io::read_partition(a.partitions[0]);
    const auto q = io::read_partition(a.partitions[1]);
    out << "nmi," << io::format_double(metrics::nmi(p, q)) << '\n';
  } else {
    if (a.adjacencies.size() != 2) usage_error("--adjacency must be given exactly twice (truth, inferred)");
    const auto truth = io::read_edge_list(a.adjacencies[0], a.nodes);
    const auto inferred = io::read_edge_list(a.adjacencies[1], a.nodes);
    const auto c = metrics::edge_confusion(inferred, truth);
    out << "tp," << c.tp << "\nfp," << c.fp << "\ntn," << c.tn << "\nfn," << c.fn << '\n';
    out << "tpr," << io::format_double(c.tpr()) << "\nfpr," << io::format_double(c.fpr()) << '\n';
    out << "tpr_defined," << (c.tpr_defined() ? 1 : 0) << "\nfpr_defined," << (c.fpr_defined() ? 1 : 0) << '\n';
    std::optional<Partition> planted;
    if (a.planted) planted = io::read_partition(*a.planted);
    const auto dt = metrics::edge_density(truth, planted ? &*planted : nullptr);
    const auto di = metrics::edge_density(inferred, planted ? &*planted : nullptr);
    out << "density_truth," << io::format_double(dt.overall) << "\ndensity_inferred," << io::format_double(di.overall)
        << '\n';
    if (planted) {
      out << "within_density_truth," << io::format_double(*dt.within) << "\nbetween_density_truth,"
          << io::format_double(*dt.between) << '\n';
      out << "within_density_inferred," << io::format_double(*di.within) << "\nbetween_density_inferred,"
          << io::format_double(*di.between) << '\n';
    }
  }
  if (a.output) {
    io::write_text(*a.output, out.str());
  } else {
    std::cout << out.str();
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  std::vector<char*> argv;
  std::vector<std::string> storage = args;
  for (auto& s : storage) argv.push_back(s.data());
  return run(static_cast<int>(argv.size()), argv.data());
}

int run(int argc, char** argv) {
  CLI::App app{"Network inference from association data and spectral community detection"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  const std::vector<std::string> raw(argv, argv + argc);

  InferArgs infer;
  auto* sub_infer = app.add_subcommand("infer", "Threshold association scores into a sparse adjacency");
  sub_infer->add_option("--input", infer.input, "Input matrix (CSV or binary) or incidence TSV")->required();
  sub_infer->add_option("--kind", infer.kind, "Input kind")
      ->required()
      ->check(CLI::IsMember({"samples", "covariance", "correlation", "pvalue", "incidence"}));
  sub_infer->add_option("--nu", infer.nu, "Degrees of freedom for the Fisher transform");
  sub_infer->add_option("--tail", infer.tail, "Tail of the p-values")->check(CLI::IsMember({"upper", "lower"}));
  sub_infer->add_flag("--estimate-a", infer.estimate_a, "Estimate the Laplace spread per row");
  sub_infer->add_option("--output-dir", infer.output_dir)->required();
  sub_infer->add_option("--threads", infer.threads);

  CommunitiesArgs comm;
  auto* sub_comm = app.add_subcommand("communities", "Regularized spectral clustering of an edge list");
  sub_comm->add_option("--edges", comm.edges, "Edge list TSV")->required();
  sub_comm->add_option("--nodes", comm.nodes, "Node count when the edge list has no header");
  sub_comm->add_option("-k,--communities", comm.k, "Number of communities");
  sub_comm->add_flag("--auto-k", comm.auto_k, "Choose K by the eigengap");
  sub_comm->add_option("--tau", comm.tau, "Degree regularizer, or 'auto' for the mean degree");
  sub_comm->add_option("--restarts", comm.restarts, "k-means restarts");
  sub_comm->add_option("--seed", comm.seed);
  sub_comm->add_flag("--no-row-normalize", comm.no_row_normalize, "Skip degree-correcting row normalization");
  sub_comm->add_option("--output-dir", comm.output_dir)->required();
  sub_comm->add_option("--threads", comm.threads);

  SimulateArgs sim;
  auto* sub_sim = app.add_subcommand("simulate", "Generate a planted network and its correlation matrix");
  sub_sim->add_option("--config", sim.config, "Simulation config JSON")->required();
  sub_sim->add_option("--seed", sim.seed, "Overrides the config seed");
  sub_sim->add_option("--output-dir", sim.output_dir)->required();
  sub_sim->add_option("--format", sim.format)->check(CLI::IsMember({"csv", "bin"}));
  sub_sim->add_option("--threads", sim.threads);

  StudyArgs st;
  auto* sub_study = app.add_subcommand("study", "Repeated simulate / infer / detect runs over a grid");
  sub_study->add_option("--grid", st.grid, "Grid JSON")->required();
  sub_study->add_option("--reps", st.reps, "Repetitions per grid point");
  sub_study->add_option("--seed", st.seed);
  sub_study->add_option("--baseline", st.baseline, "Paired baseline: spectral-direct");
  sub_study->add_flag("--estimate-a", st.estimate_a);
  sub_study->add_option("--restarts", st.restarts);
  sub_study->add_option("-k,--communities", st.k, "Communities to detect (default: planted k)");
  sub_study->add_option("--output-dir", st.output_dir)->required();
  sub_study->add_option("--threads", st.threads);

  EvaluateArgs ev;
  auto* sub_eval = app.add_subcommand("evaluate", "Compare partitions (NMI) or adjacencies (TPR/FPR)");
  sub_eval->add_option("--partition", ev.partitions, "Partition TSV (twice)");
  sub_eval->add_option("--adjacency", ev.adjacencies, "Edge list TSV: truth then inferred");
  sub_eval->add_option("--planted", ev.planted, "Planted partition for within/between densities");
  sub_eval->add_option("--nodes", ev.nodes);
  sub_eval->add_option("--output", ev.output, "Write CSV here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*sub_infer) return cmd_infer(infer, raw);
    if (*sub_comm) return cmd_communities(comm, raw);
    if (*sub_sim) return cmd_simulate(sim, raw);
    if (*sub_study) return cmd_study(st, raw);
    if (*sub_eval) return cmd_evaluate(ev);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsage;
}

}  // namespace netinf::cli
