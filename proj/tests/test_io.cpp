#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "netinf/error.hpp"
#include "netinf/io.hpp"

using namespace netinf;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "netinf_io_tests";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(io::format_double(0.1), "0.1");
  EXPECT_EQ(io::format_double(1.0), "1");
  const double v = 0.1 + 0.2;
  EXPECT_EQ(std::stod(io::format_double(v)), v);
}

TEST(MatrixIo, CsvRoundTripWithHeader) {
  Matrix m(2, 3);
  m << 1.5, -2.0, 1e-300, 0.1 + 0.2, 3.0, -0.0;
  const auto p = scratch("m.csv").string();
  io::write_matrix_csv(p, m, {"a", "b", "c"});
  const auto r = io::read_matrix(p);
  EXPECT_EQ(r.values, m);
  EXPECT_EQ(r.header, (std::vector<std::string>{"a", "b", "c"}));
  io::write_matrix_csv(p, m);
  EXPECT_TRUE(io::read_matrix(p).header.empty());
}

TEST(MatrixIo, BinaryRoundTripAndDetection) {
  Matrix m = Matrix::Random(4, 7);
  const auto p = scratch("m.bin").string();
  io::write_matrix_binary(p, m);
  EXPECT_EQ(io::read_matrix_binary(p), m);
  EXPECT_EQ(io::read_matrix(p).values, m);
  std::ifstream in(p, std::ios::binary);
  char magic[8];
  in.read(magic, 8);
  EXPECT_EQ(std::string(magic, 8), "NETINFMX");
}

TEST(MatrixIo, RaggedCsvRejected) {
  const auto p = scratch("bad.csv").string();
  io::write_text(p, "1,2\n3\n");
  EXPECT_THROW(io::read_matrix(p), Error);
  io::write_text(p, "1,2\n3,x\n");
  EXPECT_THROW(io::read_matrix(p), Error);
}

TEST(EdgeList, RoundTripOneBasedWithHeader) {
  SparseAdjacency adj(6, {{0, 5}, {2, 1}, {3, 4}});
  const auto p = scratch("e.tsv").string();
  io::write_edge_list(p, adj);
  const std::string text = io::read_text(p);
  EXPECT_EQ(text.rfind("# nodes\t6\n", 0), 0u);
  EXPECT_NE(text.find("1\t6\t1"), std::string::npos);
  EXPECT_EQ(io::read_edge_list(p), adj);
}

TEST(EdgeList, HeaderlessNeedsNodes) {
  const auto p = scratch("e2.tsv").string();
  io::write_text(p, "1\t2\t1\n2\t3\t1\n");
  EXPECT_EQ(io::read_edge_list(p, 4).nodes(), 4);
  io::write_text(p, "1\t1\t1\n");
  EXPECT_THROW(io::read_edge_list(p, 3), Error);
}

TEST(PartitionIo, RoundTrip) {
  Partition part;
  part.labels = {1, 2, 2, 1, 3};
  part.communities = 3;
  const auto p = scratch("p.tsv").string();
  io::write_partition(p, part);
  EXPECT_EQ(io::read_partition(p), part);
}

TEST(IncidenceIo, FirstAppearanceIndexing) {
  const auto p = scratch("inc.tsv").string();
  io::write_text(p, "geneB\tx\ngeneA\ty\ngeneB\ty\n");
  const auto inc = io::read_incidence_tsv(p);
  EXPECT_EQ(inc.entity_names, (std::vector<std::string>{"geneB", "geneA"}));
  EXPECT_EQ(inc.item_names, (std::vector<std::string>{"x", "y"}));
  EXPECT_EQ(inc.incidence.entities, 2);
  EXPECT_EQ(inc.incidence.items, 2);
}

TEST(ConfigJson, RoundTripAndUnknownKeys) {
  simgen::SimConfig c;
  c.m = 77;
  c.alpha_offset = -1.25;
  c.r_gen = 0.3;
  const auto back = io::sim_config_from_json(io::to_json(c));
  EXPECT_EQ(back.m, 77);
  EXPECT_EQ(back.alpha_offset, c.alpha_offset);
  EXPECT_EQ(back.r_gen, 0.3);
  EXPECT_THROW(io::sim_config_from_json(io::json{{"bogus", 1}}), Error);
}

TEST(Digest, StableAndContentSensitive) {
  const auto p = scratch("d.txt").string();
  io::write_text(p, "abc");
  const auto d1 = io::file_digest(p);
  EXPECT_EQ(d1, io::file_digest(p));
  io::write_text(p, "abd");
  EXPECT_NE(d1, io::file_digest(p));
}
