#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ggsd/engine.hpp"
#include "ggsd/simdata.hpp"

namespace ggsd {

/// Inverse-normal weights applied at every look, or the event-driven
/// reference set recomputed from each simulated trial's stage event counts.
struct WeightSet {
  std::string name;
  bool event_driven = false;
  StageWeights pfs{};
  StageWeights os{};

  /// Weights from squared stage-1 weights, e.g. fixed(0.7, 0.7).
  static WeightSet fixed(double pfs_w1_sq, double os_w1_sq);
  static WeightSet reference();
};

/// How the two hypotheses of a population combine into a power event.
enum class PowerRule { Both, Any };

std::string to_string(PowerRule r);
PowerRule parse_power_rule(const std::string& s);

struct PowerDefinition {
  PowerRule within_population = PowerRule::Both;
};

/// Key of the configuration a trace belongs to.
struct RunKey {
  const DesignSpec* design = nullptr;
  const WeightSet* weights = nullptr;  ///< nullptr for GSD
};

struct HarnessOptions {
  int threads = 1;
  PowerDefinition power;
  /// Called once per replication with the simulated patients. Must be thread safe.
  std::function<void(long rep, std::span<const PatientRecord>)> on_trial;
  /// Called for every trace. Must be thread safe.
  std::function<void(long rep, const RunKey&, const DecisionTrace&)> on_trace;
};

/// Aggregates of one (setting, design, weight set).
struct ReportRow {
  std::string setting;
  std::string design;
  DesignKind kind = DesignKind::GSD;
  std::string weights;  ///< "none" for GSD
  long reps = 0;
  std::uint64_t seed = 0;
  bool fwer_defined = false;  ///< false when the setting has no true null
  long fwer_hits = 0;
  long power_s_hits = 0;
  long power_sorf_hits = 0;
  std::vector<long> termination;  ///< [0] futility, [k] terminated at analysis k
  long trigger_shortfalls = 0;    ///< trials whose last events came before a trigger

  double fwer() const;
  double power_s() const;
  double power_sorf() const;
  double fraction_reaching_final() const;
};

/// Monte Carlo standard error of a proportion.
double mc_standard_error(double p, long n);

struct SimulationReport {
  std::vector<ReportRow> rows;

  const ReportRow* find(const std::string& design, const std::string& weights) const;
};

/// Runs `reps` replications of the setting through every design (and, for AD
/// and gGSD, every weight set). Deterministic given `seed`; replication r uses
/// substream seed ^ r.
SimulationReport run_monte_carlo(const ScenarioSpec& setting, std::span<const DesignSpec> designs,
                                 std::span<const WeightSet> weight_sets, long reps,
                                 std::uint64_t seed, const HarnessOptions& options = {});

struct SummaryTables {
  std::string fwer_csv;
  std::string power_csv;
  std::string termination_csv;
};

/// Long-format tables keyed by (setting, design, weights).
SummaryTables summarize(std::span<const SimulationReport> reports);

/// Inverse of summarize. Throws DataError on malformed tables.
std::vector<SimulationReport> parse_summary(const SummaryTables& tables);

}  // namespace ggsd
