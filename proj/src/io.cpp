#include "netinf/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "netinf/error.hpp"

namespace netinf::io {

namespace {

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  require(in.good(), ErrorKind::Io, "cannot open " + path + " for reading");
  return in;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode | std::ios::trunc);
  require(out.good(), ErrorKind::Io, "cannot open " + path + " for writing");
  return out;
}

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
  std::size_t start = 0;
  while (start < s.size() && (s[start] == ' ' || s[start] == '\t')) ++start;
  return s.substr(start);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep)) out.push_back(trim(field));
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::optional<double> parse_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const char* first = s.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::int64_t parse_int(const std::string& s, const std::string& path, std::size_t line_no) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  require(ec == std::errc() && ptr == s.data() + s.size() && !s.empty(), ErrorKind::InvalidInput,
          path + ":" + std::to_string(line_no) + ": expected an integer, got '" + s + "'");
  return v;
}

void write_u64(std::ostream& out, std::uint64_t v) {
  std::array<unsigned char, 8> b{};
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b.data()), 8);
}

std::uint64_t read_u64(std::istream& in) {
  std::array<unsigned char, 8> b{};
  in.read(reinterpret_cast<char*>(b.data()), 8);
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

NamedMatrix read_matrix_csv(const std::string& path) {
  auto in = open_in(path);
  NamedMatrix out;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    std::vector<double> row;
    row.reserve(fields.size());
    bool numeric = true;
    for (const auto& f : fields) {
      const auto v = parse_double(f);
      if (!v) {
        numeric = false;
        break;
      }
      row.push_back(*v);
    }
    if (!numeric) {
      require(rows.empty() && out.header.empty(), ErrorKind::InvalidInput,
              path + ":" + std::to_string(line_no) + ": non-numeric field");
      out.header = fields;
      continue;
    }
    require(rows.empty() || row.size() == rows.front().size(), ErrorKind::InvalidInput,
            path + ":" + std::to_string(line_no) + ": ragged row");
    rows.push_back(std::move(row));
  }
  require(!rows.empty(), ErrorKind::InvalidInput, path + ": no numeric rows");
  const auto cols = static_cast<Eigen::Index>(rows.front().size());
  require(out.header.empty() || static_cast<Eigen::Index>(out.header.size()) == cols,
          ErrorKind::InvalidInput, path + ": header width does not match data");
  out.values.resize(static_cast<Eigen::Index>(rows.size()), cols);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (Eigen::Index c = 0; c < cols; ++c) out.values(static_cast<Eigen::Index>(r), c) = rows[r][c];
  return out;
}

void write_matrix_csv(const std::string& path, const Matrix& values, const std::vector<std::string>& header) {
  auto out = open_out(path);
  if (!header.empty()) {
    for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
    out << '\n';
  }
  std::string line;
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    line.clear();
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      if (c) line += ',';
      line += format_double(values(r, c));
    }
    out << line << '\n';
  }
  require(out.good(), ErrorKind::Io, "failed writing " + path);
}

Matrix read_matrix_binary(const std::string& path) {
  auto in = open_in(path, std::ios::binary);
  char magic[8];
  in.read(magic, 8);
  require(in.good() && std::memcmp(magic, kBinaryMagic, 8) == 0, ErrorKind::InvalidInput,
          path + ": not a binary matrix file");
  const auto rows = read_u64(in);
  const auto cols = read_u64(in);
  require(in.good() && rows < (1ULL << 31) && cols < (1ULL << 31), ErrorKind::InvalidInput,
          path + ": bad header");
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const std::uint64_t bits = read_u64(in);
    double v = 0.0;
    std::memcpy(&v, &bits, sizeof v);
    m.data()[i] = v;
  }
  require(in.good(), ErrorKind::InvalidInput, path + ": truncated matrix data");
  return m;
}

void write_matrix_binary(const std::string& path, const Matrix& values) {
  auto out = open_out(path, std::ios::binary);
  out.write(kBinaryMagic, 8);
  write_u64(out, static_cast<std::uint64_t>(values.rows()));
  write_u64(out, static_cast<std::uint64_t>(values.cols()));
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    std::uint64_t bits = 0;
    const double v = values.data()[i];
    std::memcpy(&bits, &v, sizeof v);
    write_u64(out, bits);
  }
  require(out.good(), ErrorKind::Io, "failed writing " + path);
}

NamedMatrix read_matrix(const std::string& path) {
  {
    auto in = open_in(path, std::ios::binary);
    char magic[8] = {};
    in.read(magic, 8);
    if (in.gcount() == 8 && std::memcmp(magic, kBinaryMagic, 8) == 0) return {read_matrix_binary(path), {}};
  }
  return read_matrix_csv(path);
}

NamedIncidence read_incidence_tsv(const std::string& path) {
  auto in = open_in(path);
  NamedIncidence out;
  std::unordered_map<std::string, std::int64_t> entity_index;
  std::unordered_map<std::string, std::int64_t> item_index;
  std::vector<std::vector<std::int64_t>> members;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split(line, '\t');
    require(fields.size() >= 2, ErrorKind::InvalidInput,
            path + ":" + std::to_string(line_no) + ": expected entity<TAB>item");
    auto [eit, e_new] = entity_index.try_emplace(fields[0], static_cast<std::int64_t>(out.entity_names.size()));
    if (e_new) {
      out.entity_names.push_back(fields[0]);
      members.emplace_back();
    }
    auto [iit, i_new] = item_index.try_emplace(fields[1], static_cast<std::int64_t>(out.item_names.size()));
    if (i_new) out.item_names.push_back(fields[1]);
    members[eit->second].push_back(iit->second);
  }
  for (auto& m : members) {
    std::sort(m.begin(), m.end());
    m.erase(std::unique(m.begin(), m.end()), m.end());
  }
  out.incidence.items = static_cast<std::int64_t>(out.item_names.size());
  out.incidence.entities = static_cast<std::int64_t>(out.entity_names.size());
  out.incidence.members = std::move(members);
  return out;
}

void write_edge_list(const std::string& path, const SparseAdjacency& adj) {
  auto out = open_out(path);
  out << "# nodes\t" << adj.nodes() << '\n';
  for (const auto& [i, j] : adj.edges()) out << (i + 1) << '\t' << (j + 1) << "\t1\n";
  require(out.good(), ErrorKind::Io, "failed writing " + path);
}

SparseAdjacency read_edge_list(const std::string& path, std::optional<std::int32_t> nodes) {
  auto in = open_in(path);
  std::vector<Edge> edges;
  std::optional<std::int64_t> declared;
  std::int64_t max_id = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto fields = split(line.substr(1), '\t');
      if (fields.size() == 2 && fields[0] == "nodes") declared = parse_int(fields[1], path, line_no);
      continue;
    }
    const auto fields = split(line, '\t');
    require(fields.size() >= 2, ErrorKind::InvalidInput,
            path + ":" + std::to_string(line_no) + ": expected i<TAB>j[<TAB>1]");
    if (fields.size() >= 3 && fields[2] == "0") continue;
    const auto i = parse_int(fields[0], path, line_no);
    const auto j = parse_int(fields[1], path, line_no);
    require(i >= 1 && j >= 1, ErrorKind::InvalidInput,
            path + ":" + std::to_string(line_no) + ": node ids are 1-based");
    max_id = std::max({max_id, i, j});
    edges.emplace_back(static_cast<std::int32_t>(i - 1), static_cast<std::int32_t>(j - 1));
  }
  const std::int64_t m = nodes ? *nodes : declared.value_or(max_id);
  require(m >= max_id, ErrorKind::InvalidInput,
          path + ": node id " + std::to_string(max_id) + " exceeds node count " + std::to_string(m));
  return SparseAdjacency(static_cast<std::int32_t>(m), std::move(edges));
}

void write_partition(const std::string& path, const Partition& partition) {
  auto out = open_out(path);
  for (std::size_t i = 0; i < partition.labels.size(); ++i) out << (i + 1) << '\t' << partition.labels[i] << '\n';
  require(out.good(), ErrorKind::Io, "failed writing " + path);
}

Partition read_partition(const std::string& path) {
  auto in = open_in(path);
  std::vector<std::pair<std::int64_t, std::int32_t>> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split(line, '\t');
    require(fields.size() >= 2, ErrorKind::InvalidInput,
            path + ":" + std::to_string(line_no) + ": expected node<TAB>community");
    entries.emplace_back(parse_int(fields[0], path, line_no),
                         static_cast<std::int32_t>(parse_int(fields[1], path, line_no)));
  }
  Partition p;
  p.labels.assign(entries.size(), 0);
  std::vector<bool> seen(entries.size(), false);
  for (const auto& [node, label] : entries) {
    require(node >= 1 && node <= static_cast<std::int64_t>(entries.size()) && !seen[node - 1],
            ErrorKind::InvalidInput, path + ": nodes must be a permutation of 1..m");
    seen[node - 1] = true;
    p.labels[node - 1] = label;
    p.communities = std::max(p.communities, label);
  }
  return p;
}

json to_json(const simgen::SimConfig& c) {
  json j{{"m", c.m},
         {"k", c.k},
         {"community_size", c.community_size},
         {"theta_in", c.theta_in},
         {"theta_out", c.theta_out},
         {"pareto_low", c.pareto_low},
         {"pareto_high", c.pareto_high},
         {"pareto_exponent", c.pareto_exponent},
         {"target_rho_out", c.target_rho_out},
         {"r_gen", c.r_gen},
         {"nu", c.nu},
         {"seed", c.seed},
         {"deterministic_alpha", c.deterministic_alpha}};
  j["alpha_offset"] = c.alpha_offset ? json(*c.alpha_offset) : json(nullptr);
  return j;
}

simgen::SimConfig sim_config_from_json(const json& j, const simgen::SimConfig& defaults) {
  require(j.is_object(), ErrorKind::InvalidInput, "simulation config must be a JSON object");
  static const std::vector<std::string> known = {
      "m",           "k",         "community_size", "theta_in",        "theta_out",
      "pareto_low",  "pareto_high", "pareto_exponent", "alpha_offset",  "target_rho_out",
      "r_gen",       "nu",        "seed",           "deterministic_alpha"};
  for (const auto& [key, value] : j.items()) {
    require(std::find(known.begin(), known.end(), key) != known.end(), ErrorKind::InvalidInput,
            "unknown simulation config key '" + key + "'");
  }
  simgen::SimConfig c = defaults;
  try {
    c.m = j.value("m", c.m);
    c.k = j.value("k", c.k);
    c.community_size = j.value("community_size", c.community_size);
    c.theta_in = j.value("theta_in", c.theta_in);
    c.theta_out = j.value("theta_out", c.theta_out);
    c.pareto_low = j.value("pareto_low", c.pareto_low);
    c.pareto_high = j.value("pareto_high", c.pareto_high);
    c.pareto_exponent = j.value("pareto_exponent", c.pareto_exponent);
    c.target_rho_out = j.value("target_rho_out", c.target_rho_out);
    c.r_gen = j.value("r_gen", c.r_gen);
    c.nu = j.value("nu", c.nu);
    c.seed = j.value("seed", c.seed);
    c.deterministic_alpha = j.value("deterministic_alpha", c.deterministic_alpha);
    if (j.contains("alpha_offset")) {
      c.alpha_offset = j["alpha_offset"].is_null() ? std::nullopt : std::optional<double>(j["alpha_offset"].get<double>());
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::InvalidInput, std::string("bad simulation config: ") + e.what());
  }
  return c;
}

json to_json(const ebayes::MixtureFit& fit) {
  json rows = json::array();
  for (std::size_t i = 0; i < fit.w.size(); ++i) {
    rows.push_back({{"node", i + 1},
                    {"w", fit.w[i]},
                    {"a", fit.a[i]},
                    {"loglik", fit.loglik[i]},
                    {"w_min", fit.w_min[i]},
                    {"degenerate", fit.degenerate[i] != 0}});
  }
  return {{"estimated_a", fit.estimated_a}, {"rows", rows}};
}

json read_json(const std::string& path) {
  const std::string text = read_text(path);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::InvalidInput, path + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  auto out = open_out(path, std::ios::binary);
  out << text;
  require(out.good(), ErrorKind::Io, "failed writing " + path);
}

std::string read_text(const std::string& path) {
  auto in = open_in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string file_digest(const std::string& path) {
  const std::string data = read_text(path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace netinf::io
