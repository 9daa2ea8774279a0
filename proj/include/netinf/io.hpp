#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "netinf/assoc.hpp"
#include "netinf/ebayes.hpp"
#include "netinf/graph.hpp"
#include "netinf/matrix.hpp"
#include "netinf/simgen.hpp"

namespace netinf::io {

using nlohmann::json;

/// Shortest decimal form that round-trips exactly.
std::string format_double(double v);

struct NamedMatrix {
  Matrix values;
  std::vector<std::string> header;  // empty when the file has no header row
};

// Dense matrices: comma-separated with an optional non-numeric header row, or
// the binary layout: 8-byte magic "NETINFMX", uint64 rows, uint64 cols, then
// rows*cols little-endian float64 in column-major order.
inline constexpr char kBinaryMagic[8] = {'N', 'E', 'T', 'I', 'N', 'F', 'M', 'X'};

NamedMatrix read_matrix_csv(const std::string& path);
void write_matrix_csv(const std::string& path, const Matrix& values,
                      const std::vector<std::string>& header = {});
Matrix read_matrix_binary(const std::string& path);
void write_matrix_binary(const std::string& path, const Matrix& values);
/// Dispatches on the binary magic.
NamedMatrix read_matrix(const std::string& path);

/// Tab-separated (entity-id, item-id) pairs; ids are arbitrary strings.
/// Entities and items are indexed in order of first appearance.
struct NamedIncidence {
  assoc::Incidence incidence;
  std::vector<std::string> entity_names;
  std::vector<std::string> item_names;
};
NamedIncidence read_incidence_tsv(const std::string& path);

// Edge list: optional "# nodes<TAB>m" line, then "i<TAB>j<TAB>1" with
// 1-based i < j.
void write_edge_list(const std::string& path, const SparseAdjacency& adj);
SparseAdjacency read_edge_list(const std::string& path, std::optional<std::int32_t> nodes = std::nullopt);

// Partition: "node<TAB>community" lines, 1-based nodes.
void write_partition(const std::string& path, const Partition& partition);
Partition read_partition(const std::string& path);

json to_json(const simgen::SimConfig& config);
simgen::SimConfig sim_config_from_json(const json& j, const simgen::SimConfig& defaults = {});

json to_json(const ebayes::MixtureFit& fit);

json read_json(const std::string& path);
void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

/// FNV-1a 64-bit digest of a file, as 16 hex digits.
std::string file_digest(const std::string& path);

}  // namespace netinf::io
