#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ggsd/engine.hpp"
#include "ggsd/errors.hpp"
#include "ggsd/harness.hpp"
#include "ggsd/simdata.hpp"

namespace ggsd {

/// Every problem found while loading a configuration, each prefixed with the
/// JSON path of the offending field.
class ConfigErrors : public ConfigError {
 public:
  explicit ConfigErrors(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const noexcept { return errors_; }

 private:
  std::vector<std::string> errors_;
};

struct ThresholdQuery {
  double hr = 0.7;
  double events = 0.0;
  double gamma = 0.05;
};

struct RunConfig {
  std::vector<ScenarioSpec> settings;
  std::vector<DesignSpec> designs;
  std::vector<WeightSet> weight_sets;
  long reps = 2000;
  std::uint64_t seed = 1;
  int threads = 1;
  PowerDefinition power;
  std::optional<TrialObservations> observed;
  std::vector<ThresholdQuery> thresholds;
  std::string output_dir = "out";

  std::string source_path;
  std::string source_text;  ///< verbatim file contents, echoed into manifests
};

/// Parses JSON (comments allowed). Unknown keys are rejected; all validation
/// errors are collected before throwing ConfigErrors.
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<memory>");
RunConfig parse_config(const std::filesystem::path& path);

}  // namespace ggsd
