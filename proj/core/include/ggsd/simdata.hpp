#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ggsd/multiplicity.hpp"

namespace ggsd {

constexpr std::size_t endpoint_index(Endpoint e) noexcept { return e == Endpoint::PFS ? 0 : 1; }
constexpr std::size_t population_index(Population p) noexcept {
  return p == Population::Full ? 0 : 1;
}

/// Per-endpoint value pair indexed by endpoint_index.
using PerEndpoint = std::array<double, 2>;

/// When stage 1 ends: a fixed calendar time, or the first calendar time at
/// which every listed population has reached its event count on `endpoint`.
struct Stage1Cutoff {
  enum class Kind { Months, Events };
  Kind kind = Kind::Events;
  double months = 0.0;
  std::array<long, 2> events{};  ///< [population_index]; 0 = no requirement
  Endpoint endpoint = Endpoint::PFS;
};

/// Event-count triggers for the stage-2 analyses. Analysis k happens when the
/// driving population reaches `full[k]` (or `sub[k]` when only S continues)
/// events on `endpoint`.
struct AnalysisTriggers {
  Endpoint endpoint = Endpoint::OS;
  std::vector<long> full;
  std::vector<long> sub;
};

struct ScenarioSpec {
  std::string name;
  int sample_size = 0;
  double sub_prevalence = 0.5;
  double enroll_duration = 12.0;  ///< months
  Stage1Cutoff stage1_cutoff;
  PerEndpoint control_median_sub{1.0, 1.0};  ///< months
  PerEndpoint control_median_complement{1.0, 1.0};
  PerEndpoint hr_sub{1.0, 1.0};
  PerEndpoint hr_complement{1.0, 1.0};
  PerEndpoint annual_dropout{0.0, 0.0};
  AnalysisTriggers triggers;
  /// Explicit true-null status per hypothesis index; derived from the hazard
  /// ratios when absent (null iff every contributing HR equals 1).
  std::optional<std::array<bool, HypothesisId::kCount>> null_override;

  bool is_true_null(HypothesisId h) const;
  std::size_t analyses() const noexcept { return triggers.full.size(); }
  void validate() const;
};

enum class Arm : std::uint8_t { Control = 0, Experimental = 1 };

struct PatientRecord {
  double enroll_time = 0.0;  ///< calendar months
  int stage = 1;
  bool in_subgroup = false;
  Arm arm = Arm::Control;
  PerEndpoint event_time{};    ///< latent, months from enrollment
  PerEndpoint dropout_time{};  ///< months from enrollment; +inf without dropout

  /// Calendar time of an observed event, or +inf if dropout comes first.
  double calendar_event(Endpoint e) const noexcept;
};

/// Seed of replication `rep` under master seed `seed` (seed xor rep).
constexpr std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t rep) noexcept {
  return seed ^ rep;
}

/// Simulates all planned patients. Enrollment uniform on [0, enroll_duration],
/// subgroup membership Bernoulli(prevalence), 1:1 randomisation, exponential
/// event and dropout times. Records are ordered by enrollment time and stage
/// labels are assigned from the stage-1 cutoff.
std::vector<PatientRecord> generate_trial(const ScenarioSpec& spec, std::uint64_t seed);

/// Calendar time at which stage 1 ends.
double stage1_cutoff_time(std::span<const PatientRecord> records, const ScenarioSpec& spec);

/// Calendar time at which `population` accrues `target` observed events on
/// `endpoint`. Throws SchedulingError if fewer events can ever occur.
double event_time_for_count(std::span<const PatientRecord> records, Population population,
                            Endpoint endpoint, long target);

/// Calendar times of all analyses, driven by `population`'s triggers.
std::vector<double> schedule_analyses(std::span<const PatientRecord> records,
                                      const ScenarioSpec& spec, Population driving);

/// Removes stage-2 patients outside the subgroup (stage 2 enrolls S only).
std::vector<PatientRecord> drop_stage2_complement(std::span<const PatientRecord> records);

enum class Cohort { Stage1 = 0, Stage2 = 1, Pooled = 2 };

struct LogrankResult {
  long events = 0;
  double z = 0.0;  ///< positive favours the experimental arm
  double p = 1.0;  ///< one-sided, 1 - Phi(z); 1.0 when there are no events
  bool no_events = true;
};

struct AnalysisSnapshot {
  double calendar_time = 0.0;
  /// stats[cohort][population][endpoint]
  std::array<std::array<std::array<LogrankResult, 2>, 2>, 3> stats{};

  const LogrankResult& at(Cohort c, Population p, Endpoint e) const {
    return stats[static_cast<std::size_t>(c)][population_index(p)][endpoint_index(e)];
  }
  LogrankResult& at(Cohort c, Population p, Endpoint e) {
    return stats[static_cast<std::size_t>(c)][population_index(p)][endpoint_index(e)];
  }
};

/// Logrank statistics for every (cohort, population, endpoint) slot with data
/// cut at calendar `time`.
AnalysisSnapshot snapshot_at(std::span<const PatientRecord> records, double time);

/// Observation for a single survival analysis.
struct SurvivalObs {
  double time = 0.0;
  bool event = false;
  bool experimental = false;
};

/// Two-sample logrank test; z > 0 when the experimental arm has fewer events
/// than expected.
LogrankResult logrank(std::span<const SurvivalObs> obs);

struct CoxResult {
  double hr = 1.0;
  double log_hr = 0.0;
  int iterations = 0;
  bool converged = false;
  long events = 0;
};

/// Cox proportional-hazards fit on the treatment indicator (Breslow ties),
/// Newton-Raphson from log HR = 0 until |score| < 1e-8 (max 50 iterations).
CoxResult cox_hazard_ratio(std::span<const SurvivalObs> obs);

/// Stage-1 PFS hazard ratios for F and S with data cut at the cutoff.
struct FutilitySnapshot {
  double calendar_time = 0.0;
  double hr_full = 1.0;
  double hr_sub = 1.0;
  long events_full = 0;
  long events_sub = 0;
};

FutilitySnapshot futility_snapshot(std::span<const PatientRecord> records, double cutoff_time);

/// Expected number of observed events on `endpoint` in `population` by
/// calendar time `t` under uniform accrual (closed form, no simulation).
double expected_events(const ScenarioSpec& spec, Population population, Endpoint endpoint,
                       double t);

/// One patient per row with a header.
void write_trial_csv(std::ostream& os, std::span<const PatientRecord> records);

}  // namespace ggsd
