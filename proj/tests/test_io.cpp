#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "ewlat/io.hpp"

using namespace ewlat;
using nlohmann::json;

TEST_CASE("defaults round-trip through JSON") {
  const RunConfig c = parse_config(json::object());
  CHECK(c.grid_n == 64);
  CHECK(c.params().M_H == doctest::Approx(125.09));
  const RunConfig d = parse_config(to_json(c));
  CHECK(to_json(d) == to_json(c));
  CHECK(config_hash(d) == config_hash(c));
}

TEST_CASE("validation") {
  CHECK_THROWS_AS(parse_config(json{{"grid_n", 64}, {"bogus", 1}}), ValidationError);
  CHECK_THROWS_AS(parse_config(json{{"grid_n", "sixty-four"}}), ValidationError);
  CHECK_THROWS_AS(parse_config(json{{"grid_n", 63}}), ValidationError);
  CHECK_THROWS_AS(parse_config(json{{"tau", {0.1, -1.0}}}), ValidationError);
  CHECK_THROWS_AS(parse_config(json{{"scan", {{"resolution", 1}}}}), ValidationError);
  CHECK_THROWS_AS(parse_config(json{{"spectrum", {{"op", "h9"}}}}), ValidationError);
  CHECK_THROWS_AS(parse_config(json{{"params", {{"M_W", 80.0}, {"g", 0.6}}}}), ValidationError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ValidationError);
  const RunConfig c = parse_config(json{{"params", {{"g", 0.65}, {"gprime", 0.35}, {"lambda", 0.2}}}});
  CHECK(c.params().g == 0.65);
}

TEST_CASE("config hash is SHA-256 of the canonical dump") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  RunConfig c = parse_config(json::object());
  const std::string h = config_hash(c);
  CHECK(h.size() == 64);
  c.seed += 1;
  CHECK(config_hash(c) != h);
}

TEST_CASE("17-digit output round-trips") {
  for (double x : {0.1, 1.0 / 3.0, 2.0e-300, -125.09, 6.02214076e23})
    CHECK(std::strtod(fmt17(x).c_str(), nullptr) == x);
}

TEST_CASE("manifest and CSV writers") {
  const auto dir = std::filesystem::temp_directory_path() / "ewlat_io_test";
  std::filesystem::create_directories(dir);
  const RunConfig c = parse_config(json::object());
  write_csv_table(dir / "t.csv", {"a", "b"}, {{0.1, 2.0}, {1.0 / 3.0, -1.0}});
  write_manifest(dir / "t.csv", c, json{{"x", 1e-9}}, "test");
  std::ifstream in(dir / "t.csv.manifest.json");
  const json m = json::parse(in);
  CHECK(m["config_hash"] == config_hash(c));
  CHECK(m["version"] == kVersion);
  CHECK(m["file"] == "t.csv");
  std::ifstream csv(dir / "t.csv");
  std::string header, row;
  std::getline(csv, header);
  std::getline(csv, row);
  CHECK(header == "a,b");
  CHECK(row == "0.10000000000000001,2");
  CHECK_THROWS_AS(write_csv_table(dir / "u.csv", {"a"}, {{1.0, 2.0}}), std::logic_error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("worker count override from the environment") {
  RunConfig c = parse_config(json{{"workers", 3}});
  ::unsetenv("EWLAT_WORKERS");
  CHECK(c.resolved_workers() == 3);
  ::setenv("EWLAT_WORKERS", "5", 1);
  CHECK(c.resolved_workers() == 5);
  ::setenv("EWLAT_WORKERS", "x", 1);
  CHECK_THROWS_AS(c.resolved_workers(), ValidationError);
  ::unsetenv("EWLAT_WORKERS");
}
