#include "ggsd/engine.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "ggsd/errors.hpp"
#include "ggsd/numerics.hpp"
#include "ggsd/simdata.hpp"

namespace ggsd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string endpoint_label(HypothesisId h) {
  return to_string(h.endpoint) + "(" + to_string(h.population) + ")";
}

std::string fmt_p(double p) {
  std::ostringstream os;
  if (p < 1e-4) {
    os << std::scientific << std::setprecision(2) << p;
  } else {
    os << std::fixed << std::setprecision(4) << p;
  }
  return os.str();
}

std::vector<TestTarget> targets_for(DesignKind kind, std::optional<Scenario> scenario) {
  if (kind == DesignKind::GSD) return {TestTarget::Full, TestTarget::Sub};
  switch (*scenario) {
    case Scenario::SOnly: return {TestTarget::Intersection, TestTarget::Sub};
    case Scenario::FOnly: return {TestTarget::Intersection, TestTarget::Full};
    case Scenario::Both: return {TestTarget::Intersection, TestTarget::Sub, TestTarget::Full};
  }
  return {};
}

std::string slot_name(int analysis, Endpoint e, TestTarget t, const char* field) {
  std::ostringstream os;
  os << "analysis " << analysis << " " << to_string(e) << " " << to_string(t) << "." << field;
  return os.str();
}

// Per-analysis combined statistics for every target of an endpoint.
struct EndpointStats {
  std::array<std::optional<double>, 3> z;
  std::array<bool, 3> clamped{};
};

EndpointStats combine_endpoint(const DesignSpec& design, std::optional<Scenario> scenario,
                               const AnalysisObservation& obs, Endpoint e, int analysis,
                               int look) {
  EndpointStats out;
  auto store = [&](TestTarget t, CombinedZ cz) {
    out.z[target_index(t)] = cz.z;
    out.clamped[target_index(t)] = cz.clamped;
  };
  const StageWeights single{1.0, 0.0};

  if (design.kind == DesignKind::GSD) {
    for (auto t : {TestTarget::Full, TestTarget::Sub}) {
      const auto& p = obs.slot(e, t).pooled;
      const auto& c = obs.slot(e, t).combined;
      if (!p && !c) throw DataError("missing observation " + slot_name(analysis, e, t, "pooled"));
      store(t, inverse_normal(p ? *p : *c, 0.5, single, design.p_clamp));
    }
    return out;
  }

  const auto targets = targets_for(design.kind, scenario);
  bool any_combined = false;
  for (auto t : targets) any_combined = any_combined || obs.slot(e, t).combined.has_value();

  CohortPValues cohorts;
  for (auto t : kTestTargets) {
    cohorts.p1(t) = obs.slot(e, t).stage1;
    cohorts.p2(t) = obs.slot(e, t).stage2;
  }
  cohorts.complete_intersections();
  const StageWeights w = design.weights.at(e, static_cast<std::size_t>(look));

  if (!any_combined) {
    for (const auto& pair : scenario_wiring(*scenario, cohorts, e, analysis)) {
      store(pair.target, inverse_normal(pair.p1, pair.p2, w, design.p_clamp));
    }
    return out;
  }

  const auto slots = wiring_slots(*scenario);
  for (std::size_t i = 0; i + 1 < slots.size(); i += 2) {
    const auto target = slots[i].target;
    if (const auto& c = obs.slot(e, target).combined) {
      store(target, inverse_normal(*c, 0.5, single, design.p_clamp));
      continue;
    }
    const auto& p1 = cohorts.p1(slots[i].source);
    const auto& p2 = cohorts.p2(slots[i + 1].source);
    if (!p1) throw DataError("missing observation " + slot_name(analysis, e, slots[i].source, "stage1"));
    if (!p2) {
      throw DataError("missing observation " + slot_name(analysis, e, slots[i + 1].source, "stage2"));
    }
    store(target, inverse_normal(*p1, *p2, w, design.p_clamp));
  }
  return out;
}

}  // namespace

std::string to_string(DesignKind k) {
  switch (k) {
    case DesignKind::GSD: return "GSD";
    case DesignKind::AD: return "AD";
    case DesignKind::gGSD: return "gGSD";
  }
  return "?";
}

DesignKind parse_design_kind(const std::string& s) {
  if (s == "GSD") return DesignKind::GSD;
  if (s == "AD") return DesignKind::AD;
  if (s == "gGSD") return DesignKind::gGSD;
  throw DomainError("unknown design kind '" + s + "' (expected GSD, AD or gGSD)");
}

std::string to_string(TerminationReason r) {
  switch (r) {
    case TerminationReason::Futility: return "futility";
    case TerminationReason::AllRejected: return "all-rejected";
    case TerminationReason::ReachedFinal: return "reached-FA";
  }
  return "?";
}

const StageWeights& WeightTable::at(Endpoint e, std::size_t look) const {
  const auto& v = by_endpoint[endpoint_index(e)];
  if (look == 0 || look > v.size()) {
    std::ostringstream os;
    os << "no stage weights for " << to_string(e) << " look " << look;
    throw DataError(os.str());
  }
  return v[look - 1];
}

WeightTable WeightTable::uniform(StageWeights pfs, StageWeights os, std::size_t pfs_looks,
                                 std::size_t os_looks) {
  WeightTable t;
  t.by_endpoint[endpoint_index(Endpoint::PFS)].assign(pfs_looks, pfs);
  t.by_endpoint[endpoint_index(Endpoint::OS)].assign(os_looks, os);
  return t;
}

SlotObservation& AnalysisObservation::slot(Endpoint e, TestTarget t) {
  return slots[endpoint_index(e)][target_index(t)];
}
const SlotObservation& AnalysisObservation::slot(Endpoint e, TestTarget t) const {
  return slots[endpoint_index(e)][target_index(t)];
}

int DesignSpec::look_of(Endpoint endpoint, int analysis) const {
  const auto& v = tested_at[endpoint_index(endpoint)];
  const auto it = std::find(v.begin(), v.end(), analysis);
  return it == v.end() ? 0 : static_cast<int>(it - v.begin()) + 1;
}

void DesignSpec::validate() const {
  std::ostringstream err;
  if (!(alpha > 0.0 && alpha < 0.5)) err << "alpha must lie in (0, 0.5); ";
  if (analyses < 1) err << "analyses must be at least 1; ";
  for (auto e : kEndpoints) {
    const auto& at = tested_at[endpoint_index(e)];
    if (at.empty()) err << "tested_at." << to_string(e) << " is empty; ";
    for (std::size_t i = 0; i < at.size(); ++i) {
      if (at[i] < 1 || at[i] > analyses) err << "tested_at." << to_string(e) << " out of range; ";
      if (i > 0 && at[i] <= at[i - 1]) {
        err << "tested_at." << to_string(e) << " must be strictly increasing; ";
      }
    }
  }
  for (auto h : kHypotheses) {
    const auto& p = plans[h.index()];
    const auto looks = tested_at[endpoint_index(h.endpoint)].size();
    if (p.fractions.size() != looks) {
      err << "fractions." << h.label() << " needs " << looks << " entries; ";
    }
    double prev = 0.0;
    for (double t : p.fractions) {
      if (!(t > prev) || t > 1.0) {
        err << "fractions." << h.label() << " must be strictly increasing in (0, 1]; ";
        break;
      }
      prev = t;
    }
    if (initial_alpha[h.index()] < 0.0) err << "initial_alpha." << h.label() << " is negative; ";
  }
  const double tol = 1e-9;
  if (kind == DesignKind::gGSD) {
    for (auto pop : kPopulations) {
      const double s = initial_alpha[HypothesisId{pop, Endpoint::OS}.index()] +
                       initial_alpha[HypothesisId{pop, Endpoint::PFS}.index()];
      if (std::abs(s - alpha) > tol) {
        err << "initial_alpha for population " << to_string(pop) << " must sum to alpha; ";
      }
    }
    for (auto from : kHypotheses) {
      for (auto to : kHypotheses) {
        if (from.population != to.population && transitions[from.index()][to.index()] != 0.0) {
          err << "gGSD transitions must stay within a population (" << from.label() << " -> "
              << to.label() << "); ";
        }
      }
    }
  } else {
    double s = 0.0;
    for (double a : initial_alpha) s += a;
    if (std::abs(s - alpha) > tol) err << "initial_alpha must sum to alpha; ";
  }
  if (kind != DesignKind::GSD) {
    for (auto e : kEndpoints) {
      const auto n = weights.by_endpoint[endpoint_index(e)].size();
      if (n != tested_at[endpoint_index(e)].size()) {
        err << "weights." << to_string(e) << " needs one entry per look; ";
      }
    }
  }
  try {
    HypothesisGraph g;
    g.transitions = transitions;
    g.validate(1.0);
  } catch (const ConfigError& e) {
    err << e.what() << "; ";
  }
  if (kind != DesignKind::GSD) {
    try {
      futility.validate();
    } catch (const ConfigError& e) {
      err << e.what() << "; ";
    }
  }
  if (!err.str().empty()) throw ConfigError("design '" + name + "': " + err.str());
}

std::string TestRecord::label() const {
  return to_string(target) + "-" + to_string(endpoint);
}

int DecisionTrace::analysis_count() const { return static_cast<int>(analyses.size()); }

std::string analysis_name(int k, int total) {
  if (k == 0) return "futility";
  if (k == total) return "FA";
  return "IA" + std::to_string(k);
}

const BoundarySet& BoundaryCache::get(const HypothesisPlan& plan, double alpha,
                                      const IntegrationOptions& opts) {
  Key key{static_cast<int>(plan.spending.kind), plan.spending.table_t,
          plan.spending.table_fraction, plan.fractions, alpha};
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return *it->second;
  }
  auto set = std::make_unique<BoundarySet>(
      compute_boundaries(alpha, plan.fractions, plan.spending, opts));
  std::lock_guard lock(mutex_);
  auto [it, inserted] = cache_.emplace(std::move(key), std::move(set));
  return *it->second;
}

std::size_t BoundaryCache::size() const {
  std::lock_guard lock(mutex_);
  return cache_.size();
}

std::optional<Scenario> scenario_for(SelectionDecision d) {
  switch (d) {
    case SelectionDecision::ContinueBoth: return Scenario::Both;
    case SelectionDecision::ContinueSubOnly: return Scenario::SOnly;
    case SelectionDecision::ContinueFullOnly: return Scenario::FOnly;
    case SelectionDecision::StopFutility: return std::nullopt;
  }
  return std::nullopt;
}

HypothesisGraph initial_graph(const DesignSpec& design, std::optional<Scenario> scenario) {
  HypothesisGraph g;
  g.alphas = design.initial_alpha;
  g.transitions = design.transitions;
  if (design.kind == DesignKind::GSD || !scenario || *scenario == Scenario::Both) return g;

  const Population kept = *scenario == Scenario::SOnly ? Population::Sub : Population::Full;
  const Population dropped = kept == Population::Sub ? Population::Full : Population::Sub;
  const HypothesisId kept_pfs{kept, Endpoint::PFS}, kept_os{kept, Endpoint::OS};

  if (design.kind == DesignKind::AD) {
    for (auto e : kEndpoints) {
      g.alphas[HypothesisId{kept, e}.index()] += g.alphas[HypothesisId{dropped, e}.index()];
    }
  } else if (design.special_graph) {
    g.alphas[kept_pfs.index()] = design.alpha;
    g.alphas[kept_os.index()] = 0.0;
    g.transitions = {};
    g.transitions[kept_pfs.index()][kept_os.index()] = 1.0;
    g.transitions[kept_os.index()][kept_pfs.index()] = 1.0;
  }
  for (auto e : kEndpoints) {
    const auto d = HypothesisId{dropped, e}.index();
    g.alphas[d] = 0.0;
    for (std::size_t i = 0; i < HypothesisId::kCount; ++i) {
      g.transitions[d][i] = 0.0;
      g.transitions[i][d] = 0.0;
    }
  }
  return g;
}

DecisionTrace run_design(const DesignSpec& design, const TrialObservations& obs,
                         BoundaryCache* cache) {
  BoundaryCache local;
  if (cache == nullptr) cache = &local;
  const int total = design.analyses;

  DecisionTrace trace;
  trace.design_name = design.name;
  trace.kind = design.kind;
  trace.planned_analyses = total;

  std::optional<Scenario> scenario;
  if (design.kind != DesignKind::GSD) {
    if (!obs.hr_full || !obs.hr_sub) {
      throw DataError("missing observation futility.hr_full / futility.hr_sub");
    }
    trace.selection = select_population(*obs.hr_full, *obs.hr_sub, design.futility);
    scenario = scenario_for(trace.selection->decision);
    if (!scenario) {
      trace.termination = TerminationReason::Futility;
      trace.termination_analysis = 0;
      return trace;
    }
    trace.scenario = scenario;
  }

  if (static_cast<int>(obs.analyses.size()) < total) {
    std::ostringstream os;
    os << "observations cover " << obs.analyses.size() << " analyses but the design plans "
       << total;
    throw DataError(os.str());
  }

  HypothesisGraph graph = initial_graph(design, scenario);
  trace.initial_alpha = graph.alphas;
  for (auto h : kHypotheses) {
    trace.in_scope[h.index()] =
        design.kind == DesignKind::GSD || *scenario == Scenario::Both ||
        (*scenario == Scenario::SOnly) == (h.population == Population::Sub);
  }

  const bool closed_testing = design.kind != DesignKind::GSD;
  const bool gated = design.kind == DesignKind::gGSD && *scenario == Scenario::Both;
  bool gate_open = !gated;
  constexpr int kNever = std::numeric_limits<int>::max();
  std::array<int, HypothesisId::kCount> first_look{};
  first_look.fill(1);
  if (gated) {
    for (auto e : kEndpoints) first_look[HypothesisId{Population::Full, e}.index()] = kNever;
  }

  AlphaVector rejected_level{};
  // Boundary and level of each endpoint's intersection test when it was rejected.
  std::array<std::pair<double, double>, 2> intersection_at_rejection{};
  // z_history[endpoint][target][look - 1]
  std::array<std::array<std::vector<double>, 3>, 2> z_history;
  const auto targets = targets_for(design.kind, scenario);

  auto bound_at = [&](HypothesisId h, double alpha, int look) {
    if (!(alpha > 0.0)) return kInf;
    return cache->get(design.plan(h), alpha, design.integration).z_bounds[look - 1];
  };
  auto members = [&](Endpoint e) {
    std::vector<HypothesisId> out;
    for (auto pop : kPopulations) {
      const HypothesisId h{pop, e};
      if (trace.in_scope[h.index()] && !graph.rejected.test(h.index()) && graph.alpha(h) > 0.0) {
        out.push_back(h);
      }
    }
    return out;
  };
  auto intersection_bound = [&](Endpoint e, int look) {
    const auto m = members(e);
    if (m.empty()) return std::pair{kInf, 0.0};
    std::vector<double> bounds;
    double alpha = 0.0;
    for (auto h : m) {
      bounds.push_back(bound_at(h, graph.alpha(h), look));
      alpha = std::max(alpha, graph.alpha(h));
    }
    return std::pair{intersection_boundary(bounds), alpha};
  };
  auto crossed_any = [&](const std::vector<double>& z, int from, int to, auto&& bound) {
    for (int j = std::max(from, 1); j <= to; ++j) {
      if (z[j - 1] >= bound(j)) return true;
    }
    return false;
  };

  for (int k = 1; k <= total; ++k) {
    AnalysisRecord rec;
    rec.index = k;
    rec.name = analysis_name(k, total);
    rec.alpha_before = graph.alphas;
    const auto& aobs = obs.analyses[k - 1];

    std::array<EndpointStats, 2> stats;
    for (auto e : kEndpoints) {
      const int look = design.look_of(e, k);
      if (look == 0) continue;
      // Nothing left open on this endpoint: its later p-values are never read.
      bool open = false;
      for (auto pop : kPopulations) {
        const HypothesisId h{pop, e};
        open = open || (trace.in_scope[h.index()] && !graph.rejected.test(h.index()));
      }
      if (!open) {
        for (auto t : targets) z_history[endpoint_index(e)][target_index(t)].resize(look, -kInf);
        continue;
      }
      stats[endpoint_index(e)] = combine_endpoint(design, scenario, aobs, e, k, look);
      for (auto t : targets) {
        auto& hist = z_history[endpoint_index(e)][target_index(t)];
        hist.resize(static_cast<std::size_t>(look), -kInf);
        hist[look - 1] = stats[endpoint_index(e)].z[target_index(t)].value_or(-kInf);
        if (stats[endpoint_index(e)].clamped[target_index(t)]) {
          trace.warnings.push_back(rec.name + ": p-value of " + to_string(t) + "-" +
                                   to_string(e) + " clamped to [eps, 1 - eps]");
        }
      }
    }

    // Test, reject, reallocate and retest until nothing changes.
    for (bool changed = true; changed;) {
      changed = false;
      for (auto e : kEndpoints) {
        const int look = design.look_of(e, k);
        if (look == 0) continue;
        const auto ei = endpoint_index(e);
        if (closed_testing && trace.intersection_rejected_at[ei] == 0 && !members(e).empty()) {
          const auto& z = z_history[ei][target_index(TestTarget::Intersection)];
          if (crossed_any(z, 1, look, [&](int j) { return intersection_bound(e, j).first; })) {
            trace.intersection_rejected_at[ei] = k;
            intersection_at_rejection[ei] = intersection_bound(e, look);
            rec.notes.push_back("intersection FS-" + to_string(e) + " rejected");
            changed = true;
          }
        }
        for (auto pop : {Population::Sub, Population::Full}) {
          const HypothesisId h{pop, e};
          const auto hi = h.index();
          if (!trace.in_scope[hi] || graph.rejected.test(hi) || !(graph.alpha(h) > 0.0)) continue;
          if (pop == Population::Full && !gate_open) continue;
          const auto& z = z_history[ei][target_index(target_of(pop))];
          const double a = graph.alpha(h);
          if (!crossed_any(z, first_look[hi], look, [&](int j) { return bound_at(h, a, j); })) {
            continue;
          }
          if (closed_testing && trace.intersection_rejected_at[ei] == 0) continue;
          std::ostringstream note;
          note << endpoint_label(h) << " rejected at level " << a;
          graph = graph_reject(graph, h);
          trace.rejected_at[hi] = k;
          rejected_level[hi] = a;
          rec.notes.push_back(note.str());
          changed = true;
          if (!gate_open && pop == Population::Sub) {
            gate_open = true;
            rec.notes.push_back("gate opened: F hypotheses become testable");
            for (auto fe : kEndpoints) {
              int fl = kNever;
              for (int a2 = k; a2 <= total; ++a2) {
                if (const int l = design.look_of(fe, a2); l > 0) {
                  fl = l;
                  break;
                }
              }
              first_look[HypothesisId{Population::Full, fe}.index()] = fl;
            }
          }
        }
      }
    }

    // Final state of every active test at this analysis.
    for (auto e : kEndpoints) {
      const int look = design.look_of(e, k);
      if (look == 0) continue;
      const auto ei = endpoint_index(e);
      for (auto t : targets) {
        TestRecord tr;
        tr.target = t;
        tr.endpoint = e;
        tr.look = look;
        tr.z = z_history[ei][target_index(t)][look - 1];
        tr.clamped = stats[ei].clamped[target_index(t)];
        if (t == TestTarget::Intersection) {
          const int at = trace.intersection_rejected_at[ei];
          if (at != 0 && at < k) continue;
          tr.confirmed = at == k;
          std::tie(tr.boundary, tr.alpha) =
              tr.confirmed ? intersection_at_rejection[ei] : intersection_bound(e, look);
          tr.crossed = tr.confirmed || tr.z >= tr.boundary;
        } else {
          const HypothesisId h{t == TestTarget::Full ? Population::Full : Population::Sub, e};
          const int at = trace.rejected_at[h.index()];
          if (at != 0 && at < k) continue;
          tr.confirmed = at == k;
          const double level = tr.confirmed ? rejected_level[h.index()] : graph.alpha(h);
          tr.alpha = level;
          tr.boundary = bound_at(h, level, look);
          tr.gated = h.population == Population::Full && first_look[h.index()] > look;
          tr.crossed = tr.confirmed ||
                       (!tr.gated && crossed_any(z_history[ei][target_index(t)], first_look[h.index()],
                                                 look, [&](int j) { return bound_at(h, level, j); }));
        }
        rec.tests.push_back(tr);
      }
    }
    rec.alpha_after = graph.alphas;
    trace.analyses.push_back(std::move(rec));

    bool all_rejected = true;
    for (auto h : kHypotheses) {
      if (trace.in_scope[h.index()] && !graph.rejected.test(h.index())) all_rejected = false;
    }
    if (all_rejected) {
      trace.termination = TerminationReason::AllRejected;
      trace.termination_analysis = k;
      return trace;
    }
  }
  trace.termination = TerminationReason::ReachedFinal;
  trace.termination_analysis = total;
  return trace;
}

DecisionTrace analyze_observed(const DesignSpec& design, const TrialObservations& observed,
                               BoundaryCache* cache) {
  design.validate();
  return run_design(design, observed, cache);
}

std::string narrate(const DecisionTrace& trace) {
  std::ostringstream os;
  const int total = trace.planned_analyses;
  os << "Design " << trace.design_name << " (" << to_string(trace.kind) << ").\n";
  if (trace.selection) {
    const auto& s = *trace.selection;
    os << "End of stage 1: HR(F) = " << std::fixed << std::setprecision(3) << s.hr_full
       << ", HR(S) = " << s.hr_sub << " -> " << to_string(s.decision);
    if (trace.scenario) os << " (stage 2 scenario " << to_string(*trace.scenario) << ")";
    os << ".\n";
    os.unsetf(std::ios::floatfield);
  }
  for (const auto& a : trace.analyses) {
    for (const auto& t : a.tests) {
      const std::string name = to_string(t.endpoint) + "(" + to_string(t.target) + ")";
      os << a.name << ": " << name << " p = " << fmt_p(norm_sf(t.z));
      if (t.boundary == kInf) {
        os << " has no alpha";
      } else {
        os << " vs boundary " << fmt_p(norm_sf(t.boundary));
      }
      if (t.gated) {
        os << " -> not tested (no S hypothesis rejected yet)";
      } else if (t.confirmed) {
        os << " -> rejected";
      } else if (t.crossed) {
        os << " -> crossed, blocked by closed testing";
      } else {
        os << " -> not rejected";
      }
      os << ".\n";
    }
  }
  switch (trace.termination) {
    case TerminationReason::Futility:
      os << "Trial stops for futility at the end of stage 1.\n";
      break;
    case TerminationReason::AllRejected:
      os << "Trial terminates at " << analysis_name(trace.termination_analysis, total)
         << ": every hypothesis in scope is rejected.\n";
      break;
    case TerminationReason::ReachedFinal:
      os << "Trial continues to the final analysis.\n";
      break;
  }
  std::vector<std::pair<int, HypothesisId>> rej;
  for (auto h : kHypotheses) {
    if (trace.rejected_at[h.index()] > 0) rej.emplace_back(trace.rejected_at[h.index()], h);
  }
  std::stable_sort(rej.begin(), rej.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  if (rej.empty()) {
    os << "Summary: no hypothesis rejected";
  } else {
    os << "Summary: ";
    for (std::size_t i = 0; i < rej.size(); ++i) {
      if (i > 0) os << "; ";
      os << endpoint_label(rej[i].second) << " rejected at "
         << analysis_name(rej[i].first, trace.planned_analyses);
    }
  }
  os << "\n";
  return os.str();
}

}  // namespace ggsd
