#include "ggsd/combine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ggsd/errors.hpp"
#include "ggsd/numerics.hpp"

namespace ggsd {

StageWeights StageWeights::from_squares(double w1_sq, double w2_sq) {
  if (!(w1_sq >= 0.0 && w2_sq >= 0.0) || std::abs(w1_sq + w2_sq - 1.0) > 1e-9) {
    std::ostringstream os;
    os << "stage weights: squared weights (" << w1_sq << ", " << w2_sq
       << ") must be nonnegative and sum to 1";
    throw DomainError(os.str());
  }
  // Normalise so that w1^2 + w2^2 == 1 holds to rounding.
  const double s = w1_sq + w2_sq;
  return {std::sqrt(w1_sq / s), std::sqrt(w2_sq / s)};
}

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::SOnly: return "SOnly";
    case Scenario::FOnly: return "FOnly";
    case Scenario::Both: return "Both";
  }
  return "?";
}

std::string to_string(TestTarget t) {
  switch (t) {
    case TestTarget::Full: return "F";
    case TestTarget::Sub: return "S";
    case TestTarget::Intersection: return "FS";
  }
  return "?";
}

void CohortPValues::complete_intersections() {
  for (auto* stage : {&stage1, &stage2}) {
    auto& s = *stage;
    const auto& f = s[target_index(TestTarget::Full)];
    const auto& sub = s[target_index(TestTarget::Sub)];
    auto& fs = s[target_index(TestTarget::Intersection)];
    if (!fs && f && sub) fs = hochberg_intersection(*f, *sub);
  }
}

std::vector<WiringSlot> wiring_slots(Scenario scenario) {
  using T = TestTarget;
  switch (scenario) {
    case Scenario::SOnly:
      return {{1, T::Intersection, T::Intersection}, {2, T::Sub, T::Intersection},
              {1, T::Sub, T::Sub}, {2, T::Sub, T::Sub}};
    case Scenario::FOnly:
      return {{1, T::Intersection, T::Intersection}, {2, T::Full, T::Intersection},
              {1, T::Full, T::Full}, {2, T::Full, T::Full}};
    case Scenario::Both:
      return {{1, T::Intersection, T::Intersection}, {2, T::Intersection, T::Intersection},
              {1, T::Full, T::Full}, {2, T::Full, T::Full},
              {1, T::Sub, T::Sub}, {2, T::Sub, T::Sub}};
  }
  return {};
}

std::vector<Pairing> scenario_wiring(Scenario scenario, const CohortPValues& cohorts,
                                     Endpoint endpoint, int analysis) {
  const auto slots = wiring_slots(scenario);
  std::vector<Pairing> out;
  for (std::size_t i = 0; i + 1 < slots.size(); i += 2) {
    const auto& s1 = slots[i];
    const auto& s2 = slots[i + 1];
    const auto& v1 = cohorts.p1(s1.source);
    const auto& v2 = cohorts.p2(s2.source);
    for (const auto& [slot, value] : {std::pair{s1, &v1}, std::pair{s2, &v2}}) {
      if (!*value) {
        std::ostringstream os;
        os << "missing cohort p-value: stage " << slot.stage << " " << to_string(slot.source)
           << " " << to_string(endpoint) << " at analysis " << analysis << " (scenario "
           << to_string(scenario) << ")";
        throw DataError(os.str());
      }
    }
    out.push_back({s1.target, *v1, *v2});
  }
  return out;
}

CombinedZ inverse_normal(double p1, double p2, StageWeights w, double eps) {
  CombinedZ out;
  auto clamp = [&](double p) {
    if (p <= eps) {
      if (p <= 0.0) out.clamped = true;
      return eps;
    }
    if (p >= 1.0 - eps) {
      if (p >= 1.0) out.clamped = true;
      return 1.0 - eps;
    }
    return p;
  };
  const double q1 = clamp(p1);
  const double q2 = clamp(p2);
  // Phi^-1(1 - p) == -Phi^-1(p); the latter keeps precision for small p.
  out.z = 0.0;
  if (w.w1 != 0.0) out.z += w.w1 * -norm_quantile(q1);
  if (w.w2 != 0.0) out.z += w.w2 * -norm_quantile(q2);
  return out;
}

StageWeights event_weights(double n1, double n2) {
  if (n1 < 0.0 || n2 < 0.0) throw DomainError("event_weights: negative event count");
  const double total = n1 + n2;
  if (!(total > 0.0)) throw DomainError("event_weights: both event counts are zero");
  return {std::sqrt(n1 / total), std::sqrt(n2 / total)};
}

}  // namespace ggsd
