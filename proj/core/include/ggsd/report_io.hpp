#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ggsd/boundaries.hpp"
#include "ggsd/engine.hpp"
#include "ggsd/harness.hpp"

namespace ggsd {

/// Writes `content` next to `path` and renames it into place, so readers
/// never observe a partial file.
void atomic_write(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

/// Hex SHA-1 of the git blob object holding `content`.
std::string git_blob_sha1(const std::string& content);

/// Nested JSON rendering of a trace.
std::string trace_to_json(const DecisionTrace& trace);

struct BoundaryRow {
  std::string design;
  std::string hypothesis;
  double alpha = 0.0;
  int look = 0;
  int analysis = 0;
  double fraction = 0.0;
  double z = 0.0;
  double nominal_p = 0.0;
  double cumulative_spend = 0.0;
};

/// Boundaries of every hypothesis at its initial alpha.
std::vector<BoundaryRow> design_boundaries(const DesignSpec& design);
std::string boundaries_csv(const std::vector<BoundaryRow>& rows);

struct ManifestEntry {
  std::string file;
  std::string sha1;
};

struct Manifest {
  std::string command;
  std::string config_path;
  std::string config_text;
  std::uint64_t seed = 0;
  long reps = 0;
  int threads = 1;
  std::vector<ManifestEntry> outputs;
};

std::string manifest_json(const Manifest& m);

/// Writes each (name, content) into `dir` atomically, then manifest.json.
void write_outputs(const std::filesystem::path& dir,
                   const std::vector<std::pair<std::string, std::string>>& files,
                   Manifest manifest);

/// Loads fwer.csv, power.csv and termination.csv from `dir`.
SummaryTables read_summary_tables(const std::filesystem::path& dir);

}  // namespace ggsd
