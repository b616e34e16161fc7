#pragma once

#include <string>

namespace ggsd {

/// End-of-stage-1 hazard-ratio gate.
struct FutilityRule {
  double theta_full = 1.0;
  double theta_sub = 1.0;
  double gamma_full = 0.05;
  double gamma_sub = 0.05;
  double assumed_hr_full = 0.7;
  double assumed_hr_sub = 0.7;
  double events_full = 0.0;  ///< stage-1 PFS events behind theta_full (0 if theta given directly)
  double events_sub = 0.0;

  /// Thresholds calibrated from (assumed HR, events, gamma) for both populations.
  static FutilityRule calibrated(double assumed_hr_full, double events_full, double gamma_full,
                                 double assumed_hr_sub, double events_sub, double gamma_sub);

  void validate() const;
};

enum class SelectionDecision { ContinueBoth, ContinueSubOnly, ContinueFullOnly, StopFutility };

std::string to_string(SelectionDecision d);

struct SelectionResult {
  SelectionDecision decision = SelectionDecision::StopFutility;
  double hr_full = 1.0;
  double hr_sub = 1.0;
};

/// theta such that P(HR_hat > theta | true_hr) = gamma when
/// log HR_hat ~ N(log true_hr, 4 / events).
double calibrate_threshold(double true_hr, double events, double gamma);

/// Population selection rule. A hazard ratio equal to its threshold fails the gate.
SelectionResult select_population(double hr_full, double hr_sub, const FutilityRule& rule);

}  // namespace ggsd
