#include "ggsd/futility.hpp"

#include <cmath>
#include <sstream>

#include "ggsd/errors.hpp"
#include "ggsd/numerics.hpp"

namespace ggsd {

std::string to_string(SelectionDecision d) {
  switch (d) {
    case SelectionDecision::ContinueBoth: return "ContinueBoth";
    case SelectionDecision::ContinueSubOnly: return "ContinueSubOnly";
    case SelectionDecision::ContinueFullOnly: return "ContinueFullOnly";
    case SelectionDecision::StopFutility: return "StopFutility";
  }
  return "?";
}

double calibrate_threshold(double true_hr, double events, double gamma) {
  if (!(true_hr > 0.0)) throw DomainError("calibrate_threshold: true HR must be positive");
  if (!(events >= 4.0)) {
    throw DomainError("calibrate_threshold: at least 4 events are required");
  }
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw DomainError("calibrate_threshold: gamma must lie in (0, 1)");
  }
  return true_hr * std::exp(norm_quantile(1.0 - gamma) * 2.0 / std::sqrt(events));
}

FutilityRule FutilityRule::calibrated(double assumed_hr_full, double events_full,
                                      double gamma_full, double assumed_hr_sub,
                                      double events_sub, double gamma_sub) {
  FutilityRule r;
  r.assumed_hr_full = assumed_hr_full;
  r.assumed_hr_sub = assumed_hr_sub;
  r.events_full = events_full;
  r.events_sub = events_sub;
  r.gamma_full = gamma_full;
  r.gamma_sub = gamma_sub;
  r.theta_full = calibrate_threshold(assumed_hr_full, events_full, gamma_full);
  r.theta_sub = calibrate_threshold(assumed_hr_sub, events_sub, gamma_sub);
  return r;
}

void FutilityRule::validate() const {
  std::ostringstream err;
  if (!(theta_full > 0.0)) err << "theta_full must be positive; ";
  if (!(theta_sub > 0.0)) err << "theta_sub must be positive; ";
  if (!(assumed_hr_full > 0.0)) err << "assumed_hr_full must be positive; ";
  if (!(assumed_hr_sub > 0.0)) err << "assumed_hr_sub must be positive; ";
  if (!(gamma_full > 0.0 && gamma_full <= 0.5)) err << "gamma_full must lie in (0, 0.5]; ";
  if (!(gamma_sub > 0.0 && gamma_sub <= 0.5)) err << "gamma_sub must lie in (0, 0.5]; ";
  if (!err.str().empty()) throw ConfigError("futility rule: " + err.str());
}

SelectionResult select_population(double hr_full, double hr_sub, const FutilityRule& rule) {
  const bool full_passes = hr_full < rule.theta_full;
  const bool sub_passes = hr_sub < rule.theta_sub;
  SelectionDecision d;
  if (full_passes && sub_passes) {
    d = SelectionDecision::ContinueBoth;
  } else if (sub_passes) {
    d = SelectionDecision::ContinueSubOnly;
  } else if (full_passes) {
    d = SelectionDecision::ContinueFullOnly;
  } else {
    d = SelectionDecision::StopFutility;
  }
  return {d, hr_full, hr_sub};
}

}  // namespace ggsd
