#pragma once

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "ggsd/boundaries.hpp"
#include "ggsd/combine.hpp"
#include "ggsd/futility.hpp"
#include "ggsd/multiplicity.hpp"

namespace ggsd {

enum class DesignKind { GSD, AD, gGSD };

std::string to_string(DesignKind k);
DesignKind parse_design_kind(const std::string& s);

/// Spending function and planned information fractions of one hypothesis.
struct HypothesisPlan {
  SpendingFunction spending;
  std::vector<double> fractions;  ///< one per look of the hypothesis' endpoint
};

/// Pre-specified inverse-normal weights per endpoint and look.
struct WeightTable {
  std::array<std::vector<StageWeights>, 2> by_endpoint;  ///< [endpoint_index][look - 1]

  const StageWeights& at(Endpoint e, std::size_t look) const;
  /// Same weights at every look of both endpoints.
  static WeightTable uniform(StageWeights pfs, StageWeights os, std::size_t pfs_looks,
                             std::size_t os_looks);
};

struct DesignSpec {
  std::string name;
  DesignKind kind = DesignKind::gGSD;
  double alpha = 0.025;
  AlphaVector initial_alpha{};  ///< alpha_1..alpha_4 (F-OS, F-PFS, S-OS, S-PFS)
  TransitionMatrix transitions = within_population_transitions();
  std::array<HypothesisPlan, HypothesisId::kCount> plans;
  int analyses = 3;
  /// 1-based analysis indices at which each endpoint is tested
  /// ([endpoint_index]); an endpoint is closed after its last listed analysis.
  std::array<std::vector<int>, 2> tested_at;
  WeightTable weights;
  FutilityRule futility;
  /// Single-population scenarios test PFS at the full alpha and pass it all to OS.
  bool special_graph = true;
  double p_clamp = kDefaultPClamp;
  IntegrationOptions integration;

  const HypothesisPlan& plan(HypothesisId h) const { return plans[h.index()]; }
  /// Look number (1-based) of `endpoint` at `analysis`, or 0 if not tested there.
  int look_of(Endpoint endpoint, int analysis) const;
  /// Throws ConfigError listing every violated invariant.
  void validate() const;
};

/// Observed statistics for one (analysis, endpoint, target) slot, as one-sided
/// p-values. Which fields are needed depends on the design:
/// GSD reads `pooled`; AD/gGSD read `stage1`/`stage2` through the scenario
/// wiring, or `combined` when the slot is supplied already combined.
struct SlotObservation {
  std::optional<double> pooled;
  std::optional<double> stage1;
  std::optional<double> stage2;
  std::optional<double> combined;
};

struct AnalysisObservation {
  /// slots[endpoint_index][target_index]
  std::array<std::array<SlotObservation, 3>, 2> slots;

  SlotObservation& slot(Endpoint e, TestTarget t);
  const SlotObservation& slot(Endpoint e, TestTarget t) const;
};

struct TrialObservations {
  std::optional<double> hr_full;  ///< stage-1 PFS hazard ratios (AD/gGSD only)
  std::optional<double> hr_sub;
  std::vector<AnalysisObservation> analyses;
};

enum class TerminationReason { Futility, AllRejected, ReachedFinal };

std::string to_string(TerminationReason r);

struct TestRecord {
  TestTarget target = TestTarget::Full;
  Endpoint endpoint = Endpoint::PFS;
  int look = 0;
  double z = 0.0;
  double boundary = 0.0;  ///< +inf when the test carries no alpha
  double alpha = 0.0;     ///< level behind `boundary` (max over members for FS)
  bool crossed = false;   ///< statistic at some look <= current crossed its current bound
  bool confirmed = false; ///< rejection confirmed at this analysis
  bool gated = false;     ///< F blocked by the hierarchical gate
  bool clamped = false;

  std::string label() const;  ///< e.g. "S-PFS", "FS-OS"
};

struct AnalysisRecord {
  int index = 0;  ///< 1-based
  std::string name;  ///< IA1, IA2, ..., FA
  std::vector<TestRecord> tests;
  AlphaVector alpha_before{};
  AlphaVector alpha_after{};
  std::vector<std::string> notes;
};

struct DecisionTrace {
  std::string design_name;
  DesignKind kind = DesignKind::GSD;
  std::optional<SelectionResult> selection;
  std::optional<Scenario> scenario;
  std::array<bool, HypothesisId::kCount> in_scope{};
  AlphaVector initial_alpha{};
  int planned_analyses = 0;
  std::vector<AnalysisRecord> analyses;  ///< analyses actually run
  std::array<int, HypothesisId::kCount> rejected_at{};  ///< 0 = never
  std::array<int, 2> intersection_rejected_at{};        ///< per endpoint_index, 0 = never
  int termination_analysis = 0;                         ///< 0 = stopped at futility
  TerminationReason termination = TerminationReason::ReachedFinal;
  std::vector<std::string> warnings;

  bool rejected(HypothesisId h) const { return rejected_at[h.index()] > 0; }
  int analysis_count() const;
};

/// Human-readable name of analysis k out of K (IA1, IA2, ..., FA).
std::string analysis_name(int k, int total);

/// Memoised boundary sets keyed by (spending, fractions, alpha). Thread safe.
class BoundaryCache {
 public:
  const BoundarySet& get(const HypothesisPlan& plan, double alpha,
                         const IntegrationOptions& opts);
  std::size_t size() const;

 private:
  using Key = std::tuple<int, std::vector<double>, std::vector<double>, std::vector<double>, double>;
  mutable std::mutex mutex_;
  std::map<Key, std::unique_ptr<BoundarySet>> cache_;
};

/// Stage-2 scenario implied by the futility decision (nullopt on a stop).
std::optional<Scenario> scenario_for(SelectionDecision d);

/// Hypothesis graph in force at the start of stage 2 for a design/scenario.
HypothesisGraph initial_graph(const DesignSpec& design, std::optional<Scenario> scenario);

/// Runs the per-trial decision logic of the design over the supplied
/// observations. GSD tests the pooled statistics of all four hypotheses with
/// the graph; AD and gGSD apply the futility gate, combine stagewise p-values
/// for the selected scenario and confirm elementary rejections only through
/// the population intersection; gGSD additionally tests F only after an S
/// rejection when both populations continue.
DecisionTrace run_design(const DesignSpec& design, const TrialObservations& obs,
                         BoundaryCache* cache = nullptr);

/// Observed-data entry point: identical decision logic to run_design.
DecisionTrace analyze_observed(const DesignSpec& design, const TrialObservations& observed,
                               BoundaryCache* cache = nullptr);

/// Plain-language account of a trace, one sentence per line. The last line
/// summarises every confirmed rejection.
std::string narrate(const DecisionTrace& trace);

}  // namespace ggsd
