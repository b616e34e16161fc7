#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "engine_fixtures.hpp"
#include "ggsd/config.hpp"
#include "ggsd/report_io.hpp"

using namespace ggsd;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  auto p = fs::temp_directory_path() / ("ggsd_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_SUITE("report_io") {

TEST_CASE("git blob hashes") {
  CHECK(git_blob_sha1("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
  // printf 'hello\n' | git hash-object --stdin
  CHECK(git_blob_sha1("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
}

TEST_CASE("atomic write replaces content and leaves no temporaries") {
  const auto dir = scratch_dir("atomic");
  const auto f = dir / "a.txt";
  atomic_write(f, "first");
  atomic_write(f, "second");
  CHECK(read_file(f) == "second");
  int n = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++n;
  CHECK(n == 1);
  atomic_write(dir / "sub" / "b.txt", "x");
  CHECK(read_file(dir / "sub" / "b.txt") == "x");
}

TEST_CASE("trace json carries decisions") {
  const auto cfg = parse_config(std::string(GGSD_SOURCE_DIR) + "/configs/worked-example.json");
  const auto tr = analyze_observed(cfg.designs.at(1), *cfg.observed);
  const auto j = nlohmann::json::parse(trace_to_json(tr));
  CHECK(j.is_object());
  const auto text = j.dump();
  CHECK(text.find("ContinueFullOnly") != std::string::npos);
  CHECK(text.find("IA2") != std::string::npos);
}

TEST_CASE("boundary rows") {
  const auto d = fixtures::make_design(DesignKind::GSD);
  const auto rows = design_boundaries(d);
  CHECK(rows.size() == 10);
  for (const auto& r : rows) {
    CHECK(r.z > 0.0);
    CHECK(r.cumulative_spend <= r.alpha + 1e-12);
    CHECK(r.nominal_p == doctest::Approx(0.5 * std::erfc(r.z / std::sqrt(2.0))).epsilon(1e-9));
  }
  const auto csv = boundaries_csv(rows);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 11);
}

TEST_CASE("outputs and manifest") {
  const auto dir = scratch_dir("outputs");
  Manifest m;
  m.command = "simulate";
  m.seed = 3;
  m.reps = 10;
  write_outputs(dir, {{"a.csv", "x,y\n"}, {"nested/b.csv", "1\n"}}, m);
  const auto j = nlohmann::json::parse(read_file(dir / "manifest.json"));
  CHECK(j.dump().find(git_blob_sha1("x,y\n")) != std::string::npos);
  CHECK(j.dump().find(git_blob_sha1("1\n")) != std::string::npos);
  CHECK(read_file(dir / "nested" / "b.csv") == "1\n");
  CHECK_THROWS(read_summary_tables(dir));
}

}
