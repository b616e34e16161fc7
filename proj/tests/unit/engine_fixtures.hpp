#pragma once

#include <cmath>
#include <random>

#include "ggsd/engine.hpp"

namespace fixtures {

using namespace ggsd;

inline DesignSpec make_design(DesignKind kind) {
  DesignSpec d;
  d.name = to_string(kind);
  d.kind = kind;
  d.alpha = 0.025;
  if (kind == DesignKind::gGSD) {
    d.initial_alpha = {0.01488, 0.01012, 0.0148, 0.0102};
  } else {
    d.initial_alpha = {0.00025, 0.00017, 0.01458, 0.0100};
  }
  const std::array<std::vector<double>, 4> fr{std::vector<double>{0.69, 0.92, 1.0},
                                              {0.90, 1.0},
                                              {0.66, 0.91, 1.0},
                                              {0.89, 1.0}};
  for (std::size_t i = 0; i < 4; ++i) d.plans[i] = {SpendingFunction::lan_demets_obf(), fr[i]};
  d.analyses = 3;
  d.tested_at = {std::vector<int>{1, 2}, std::vector<int>{1, 2, 3}};
  const StageWeights half{std::sqrt(0.5), std::sqrt(0.5)};
  d.weights = WeightTable::uniform(half, half, 2, 3);
  d.futility.theta_full = 0.83;
  d.futility.theta_sub = 0.85;
  return d;
}

inline TrialObservations constant_observations(double p, double hr_full, double hr_sub) {
  TrialObservations obs;
  obs.hr_full = hr_full;
  obs.hr_sub = hr_sub;
  obs.analyses.resize(3);
  for (auto& a : obs.analyses) {
    for (auto e : kEndpoints) {
      for (auto t : {TestTarget::Full, TestTarget::Sub}) {
        auto& s = a.slot(e, t);
        s.pooled = s.stage1 = s.stage2 = p;
      }
    }
  }
  return obs;
}

// Stagewise p-values drawn around a shifted normal; small p is common enough
// to exercise every branch of the engines.
inline TrialObservations random_observations(std::mt19937_64& rng, double shift) {
  std::normal_distribution<double> n(shift, 1.0);
  std::uniform_real_distribution<double> hr(0.6, 1.0);
  auto p = [&] { return 0.5 * std::erfc(n(rng) / std::sqrt(2.0)); };
  TrialObservations obs;
  obs.hr_full = hr(rng);
  obs.hr_sub = hr(rng);
  obs.analyses.resize(3);
  for (auto& a : obs.analyses) {
    for (auto e : kEndpoints) {
      for (auto t : {TestTarget::Full, TestTarget::Sub}) {
        auto& s = a.slot(e, t);
        s.pooled = p();
        s.stage1 = p();
        s.stage2 = p();
      }
    }
  }
  return obs;
}

}  // namespace fixtures
