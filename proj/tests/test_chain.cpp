#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <vector>

#include "rebel/chain.hpp"
#include "rebel/errors.hpp"
#include "rebel/io.hpp"
#include "rebel/models.hpp"

using namespace rebel;

namespace {
ChainPath make_path(std::vector<double> xs) {
  ChainPath p;
  p.dim = 1;
  p.data = std::move(xs);
  p.origin = "test";
  return p;
}
}  // namespace

TEST_CASE("partition_from_times tiles the sample exactly") {
  // 1-based renewal times 2, 5, 7 on n = 9.
  const BlockPartition part = partition_from_times({2, 5, 7}, 9);
  REQUIRE(part.blocks.size() == part.complete_count + 2);
  CHECK(part.complete_count == 2);
  CHECK(part.blocks.front().begin == 0);
  CHECK(part.blocks.front().end == 2);
  CHECK(part.complete(0).begin == 2);
  CHECK(part.complete(0).end == 5);
  CHECK(part.complete(1).begin == 5);
  CHECK(part.complete(1).end == 7);
  CHECK(part.blocks.back().begin == 7);
  CHECK(part.blocks.back().end == 9);
  CHECK_NOTHROW(check_partition(part, 9));

  // Sum of complete block lengths = last renewal - first renewal.
  std::size_t total = 0;
  for (std::size_t j = 0; j < part.complete_count; ++j) total += part.complete(j).size();
  CHECK(total == 7 - 2);
}

TEST_CASE("partition with trailing renewal has empty tail block") {
  const BlockPartition part = partition_from_times({3, 6}, 6);
  CHECK(part.complete_count == 1);
  CHECK(part.blocks.back().empty());
  CHECK_NOTHROW(check_partition(part, 6));
}

TEST_CASE("check_partition rejects inconsistent partitions") {
  BlockPartition part = partition_from_times({2, 5}, 8);
  part.blocks[1].end = 4;  // break the tiling
  CHECK_THROWS_AS(check_partition(part, 8), ValidationError);
  CHECK_THROWS_AS(check_partition(partition_from_times({2, 5}, 8), 9), ValidationError);
  CHECK_THROWS_AS(partition_from_times({5, 2}, 8), ValidationError);  // not increasing
  CHECK_THROWS_AS(partition_from_times({2, 5, 12}, 8), ValidationError);  // out of range
}

TEST_CASE("stack embeds the most recent states first") {
  const ChainPath p = make_path({1.0, 2.0, 3.0, 4.0, 5.0});
  const ChainPath s =
      stack(p, 2);  // states (X_{i+1}, X_i): (2,1), (3,2), (4,3), (5,4)
  REQUIRE(s.length() == 4);
  REQUIRE(s.dim == 2);
  CHECK(s.state(0)[0] == 2.0);
  CHECK(s.state(0)[1] == 1.0);
  CHECK(s.state(3)[0] == 5.0);
  CHECK(s.state(3)[1] == 4.0);

  const ChainPath id = stack(p, 1);
  CHECK(id.data == p.data);
  CHECK(id.dim == p.dim);
}

TEST_CASE("stack of stack composes like a single deeper stack on coordinate 0") {
  const ChainPath p = simulate(ModelSpec::ar1(0.5, 3), 40);
  const ChainPath s3 = stack(p, 3);
  REQUIRE(s3.length() == 38);
  REQUIRE(s3.dim == 3);
  for (std::size_t i = 0; i < s3.length(); ++i) {
    CHECK(s3.state(i)[0] == p.scalar(i + 2));
    CHECK(s3.state(i)[1] == p.scalar(i + 1));
    CHECK(s3.state(i)[2] == p.scalar(i));
  }
  CHECK_THROWS_AS(stack(p, 0), ValidationError);
  CHECK_THROWS_AS(stack(p, 41), ValidationError);
}

TEST_CASE("path csv round-trip") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "rebel_chain_test";
  fs::create_directories(dir);
  const std::string file = (dir / "p.csv").string();

  const ChainPath p = simulate(ModelSpec::ar1(0.9, 17), 200);
  io::write_path_csv(p, file);
  const ChainPath back = io::read_path_csv(file);
  REQUIRE(back.length() == p.length());
  REQUIRE(back.dim == p.dim);
  for (std::size_t i = 0; i < p.length(); ++i)
    CHECK(back.scalar(i) == p.scalar(i));  // format_double round-trips exactly

  const ChainPath s = stack(p, 2);
  io::write_path_csv(s, file);
  const ChainPath back2 = io::read_path_csv(file);
  CHECK(back2.dim == 2);
  CHECK(back2.data == s.data);
  fs::remove_all(dir);
}

TEST_CASE("blocks csv round-trip") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "rebel_chain_test2";
  fs::create_directories(dir);
  const std::string file = (dir / "b.csv").string();

  const BlockPartition part = partition_from_times({2, 5, 7}, 9);
  io::write_blocks_csv(part, file);
  const BlockPartition back = io::read_blocks_csv(file, 9);
  CHECK(back.complete_count == part.complete_count);
  CHECK(back.regeneration_times == part.regeneration_times);
  REQUIRE(back.blocks.size() == part.blocks.size());
  for (std::size_t j = 0; j < part.blocks.size(); ++j) {
    CHECK(back.blocks[j].begin == part.blocks[j].begin);
    CHECK(back.blocks[j].end == part.blocks[j].end);
  }
  // Wrong n is rejected.
  CHECK_THROWS_AS(io::read_blocks_csv(file, 10), ValidationError);
  fs::remove_all(dir);
}
