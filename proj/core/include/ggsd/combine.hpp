#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "ggsd/multiplicity.hpp"

namespace ggsd {

inline constexpr double kDefaultPClamp = 1e-12;

/// Inverse-normal combination weights; w1^2 + w2^2 = 1.
struct StageWeights {
  double w1 = 1.0;
  double w2 = 0.0;

  /// From squared weights (w1^2, w2^2). Throws DomainError unless both are
  /// nonnegative and sum to 1 within 1e-9.
  static StageWeights from_squares(double w1_sq, double w2_sq);

  friend bool operator==(const StageWeights&, const StageWeights&) = default;
};

/// Stage-2 population scenario chosen at the end of stage 1.
enum class Scenario { SOnly, FOnly, Both };

std::string to_string(Scenario s);

/// What a combined statistic tests: an elementary population hypothesis or
/// the F-S intersection for the same endpoint.
enum class TestTarget { Full, Sub, Intersection };

inline constexpr std::array<TestTarget, 3> kTestTargets{TestTarget::Full, TestTarget::Sub,
                                                        TestTarget::Intersection};

std::string to_string(TestTarget t);
constexpr std::size_t target_index(TestTarget t) noexcept { return static_cast<std::size_t>(t); }
constexpr TestTarget target_of(Population p) noexcept {
  return p == Population::Full ? TestTarget::Full : TestTarget::Sub;
}

/// Cohort-wise one-sided p-values for one endpoint at one analysis.
struct CohortPValues {
  std::array<std::optional<double>, 3> stage1;  ///< indexed by target_index
  std::array<std::optional<double>, 3> stage2;

  std::optional<double>& p1(TestTarget t) { return stage1[target_index(t)]; }
  std::optional<double>& p2(TestTarget t) { return stage2[target_index(t)]; }
  const std::optional<double>& p1(TestTarget t) const { return stage1[target_index(t)]; }
  const std::optional<double>& p2(TestTarget t) const { return stage2[target_index(t)]; }

  /// Fills missing intersection entries with the Hochberg intersection of the
  /// F and S entries of the same stage, when both are present.
  void complete_intersections();
};

struct Pairing {
  TestTarget target = TestTarget::Full;
  double p1 = 1.0;
  double p2 = 1.0;
};

/// Which cohort p-values feed each test for a stage-2 scenario:
///  SOnly: FS <- (p1 FS, p2 S), S <- (p1 S, p2 S)
///  FOnly: FS <- (p1 FS, p2 F), F <- (p1 F, p2 F)
///  Both:  FS <- (p1 FS, p2 FS), F <- (p1 F, p2 F), S <- (p1 S, p2 S)
/// Throws DataError naming the first missing slot.
std::vector<Pairing> scenario_wiring(Scenario scenario, const CohortPValues& cohorts,
                                     Endpoint endpoint, int analysis);

/// Slots (stage, target) that scenario_wiring reads for a scenario.
struct WiringSlot {
  int stage = 1;
  TestTarget source = TestTarget::Full;
  TestTarget target = TestTarget::Full;
};
std::vector<WiringSlot> wiring_slots(Scenario scenario);

struct CombinedZ {
  double z = 0.0;
  bool clamped = false;  ///< an input p-value was 0 or 1 and was moved inside by eps
};

/// w1 * Phi^-1(1 - p1) + w2 * Phi^-1(1 - p2).
CombinedZ inverse_normal(double p1, double p2, StageWeights w, double eps = kDefaultPClamp);

/// Reference weights proportional to the square root of stage event counts.
/// Throws DomainError when both counts are zero or either is negative.
StageWeights event_weights(double n1, double n2);

}  // namespace ggsd
