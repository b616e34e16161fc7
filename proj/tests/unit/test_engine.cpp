#include <doctest.h>

#include <random>
#include <string>

#include "engine_fixtures.hpp"
#include "ggsd/config.hpp"
#include "ggsd/engine.hpp"
#include "ggsd/errors.hpp"
#include "ggsd/numerics.hpp"

using namespace ggsd;
using fixtures::make_design;

namespace {

const HypothesisId FOS{Population::Full, Endpoint::OS};
const HypothesisId FPFS{Population::Full, Endpoint::PFS};
const HypothesisId SOS{Population::Sub, Endpoint::OS};
const HypothesisId SPFS{Population::Sub, Endpoint::PFS};

std::string worked_example_path() { return std::string(GGSD_SOURCE_DIR) + "/configs/worked-example.json"; }

bool ends_with(const std::string& s, const std::string& tail) {
  auto t = s;
  while (!t.empty() && (t.back() == '\n' || t.back() == ' ')) t.pop_back();
  return t.size() >= tail.size() && t.compare(t.size() - tail.size(), tail.size(), tail) == 0;
}

void check_trace_invariants(const DecisionTrace& tr) {
  for (auto h : kHypotheses) {
    const int at = tr.rejected_at[h.index()];
    if (at == 0) continue;
    CHECK(tr.in_scope[h.index()]);
    if (tr.kind != DesignKind::GSD) {
      const int inter = tr.intersection_rejected_at[endpoint_index(h.endpoint)];
      CHECK(inter > 0);
      CHECK(inter <= at);
    }
  }
  if (tr.kind == DesignKind::gGSD && tr.scenario == Scenario::Both) {
    const int s = [&] {
      int m = 0;
      for (auto h : {SOS, SPFS}) {
        const int a = tr.rejected_at[h.index()];
        if (a > 0 && (m == 0 || a < m)) m = a;
      }
      return m;
    }();
    for (auto h : {FOS, FPFS}) {
      const int a = tr.rejected_at[h.index()];
      if (a > 0) {
        CHECK(s > 0);
        CHECK(a >= s);
      }
    }
  }
  for (const auto& a : tr.analyses) {
    double full = 0, sub = 0;
    for (auto h : kHypotheses) {
      CHECK(a.alpha_after[h.index()] >= 0.0);
      (h.population == Population::Full ? full : sub) += a.alpha_after[h.index()];
    }
    if (tr.kind == DesignKind::gGSD) {
      CHECK(full <= 0.025 + 1e-12);
      CHECK(sub <= 0.025 + 1e-12);
    } else {
      CHECK(full + sub <= 0.025 + 1e-12);
    }
  }
  // rejected hypotheses stay rejected and termination is at the first complete analysis
  bool all = true;
  int last = 0;
  for (auto h : kHypotheses) {
    if (!tr.in_scope[h.index()]) continue;
    if (tr.rejected_at[h.index()] == 0) all = false;
    last = std::max(last, tr.rejected_at[h.index()]);
  }
  if (tr.termination == TerminationReason::AllRejected) {
    CHECK(all);
    CHECK(tr.termination_analysis == last);
  }
}

}  // namespace

TEST_SUITE("engine") {

TEST_CASE("worked example: GSD rejects nothing") {
  const auto cfg = parse_config(worked_example_path());
  const auto& gsd = cfg.designs.at(0);
  REQUIRE(gsd.kind == DesignKind::GSD);
  const auto tr = analyze_observed(gsd, *cfg.observed);
  for (auto h : kHypotheses) CHECK_FALSE(tr.rejected(h));
  CHECK(tr.termination == TerminationReason::ReachedFinal);
  CHECK(tr.termination_analysis == 3);
}

TEST_CASE("worked example: gGSD sequence") {
  const auto cfg = parse_config(worked_example_path());
  const auto& g = cfg.designs.at(1);
  REQUIRE(g.kind == DesignKind::gGSD);
  const auto tr = analyze_observed(g, *cfg.observed);
  REQUIRE(tr.selection);
  CHECK(tr.selection->decision == SelectionDecision::ContinueFullOnly);
  CHECK(tr.scenario == Scenario::FOnly);
  CHECK(tr.rejected_at[FPFS.index()] == 1);
  CHECK(tr.rejected_at[FOS.index()] == 2);
  CHECK_FALSE(tr.in_scope[SOS.index()]);
  CHECK_FALSE(tr.in_scope[SPFS.index()]);
  CHECK(tr.termination == TerminationReason::AllRejected);
  CHECK(tr.termination_analysis == 2);
  REQUIRE(tr.analyses.size() == 2);
  // OS(F) at IA1 is tested with the alpha passed on from PFS(F) and does not cross
  bool seen = false;
  for (const auto& t : tr.analyses[0].tests) {
    if (t.target == TestTarget::Full && t.endpoint == Endpoint::OS) {
      seen = true;
      CHECK_FALSE(t.confirmed);
      CHECK(t.alpha == doctest::Approx(0.025));
    }
  }
  CHECK(seen);
  const auto text = narrate(tr);
  CHECK(ends_with(text, "OS(F) rejected at IA2"));
  CHECK(text.find("ContinueFullOnly") != std::string::npos);
  check_trace_invariants(tr);
}

TEST_CASE("null data rejects nothing") {
  for (auto kind : {DesignKind::GSD, DesignKind::AD, DesignKind::gGSD}) {
    const auto d = make_design(kind);
    auto tr = run_design(d, fixtures::constant_observations(0.5, 0.7, 0.7));
    for (auto h : kHypotheses) CHECK_FALSE(tr.rejected(h));
    CHECK(tr.termination == TerminationReason::ReachedFinal);
    CHECK(tr.termination_analysis == 3);
    tr = run_design(d, fixtures::constant_observations(1.0 - 1e-12, 0.7, 0.7));
    for (auto h : kHypotheses) CHECK_FALSE(tr.rejected(h));
    if (kind != DesignKind::GSD) {
      tr = run_design(d, fixtures::constant_observations(0.5, 0.95, 0.95));
      CHECK(tr.termination == TerminationReason::Futility);
      CHECK(tr.termination_analysis == 0);
      CHECK(tr.analyses.empty());
    }
  }
}

TEST_CASE("full-only: PFS rejected, OS never crosses") {
  const auto d = make_design(DesignKind::gGSD);
  auto obs = fixtures::constant_observations(0.4, 0.75, 0.95);
  auto& a1 = obs.analyses[0].slot(Endpoint::PFS, TestTarget::Full);
  a1.stage1 = 1e-4;
  a1.stage2 = 1e-4;
  obs.analyses[0].slot(Endpoint::PFS, TestTarget::Sub).stage1 = 0.4;
  const auto tr = run_design(d, obs);
  CHECK(tr.scenario == Scenario::FOnly);
  int n = 0;
  for (auto h : kHypotheses) n += tr.rejected(h);
  CHECK(n == 1);
  CHECK(tr.rejected_at[FPFS.index()] == 1);
  CHECK(tr.termination == TerminationReason::ReachedFinal);
  CHECK(tr.termination_analysis == 3);
}

TEST_CASE("hierarchical gate blocks F until S is rejected") {
  const auto d = make_design(DesignKind::gGSD);
  auto obs = fixtures::constant_observations(0.3, 0.7, 0.7);
  // overwhelming F evidence from the start, S evidence only at IA2
  for (auto& a : obs.analyses) {
    for (auto e : kEndpoints) {
      a.slot(e, TestTarget::Full).stage1 = 1e-8;
      a.slot(e, TestTarget::Full).stage2 = 1e-8;
    }
  }
  obs.analyses[1].slot(Endpoint::PFS, TestTarget::Sub).stage1 = 1e-6;
  obs.analyses[1].slot(Endpoint::PFS, TestTarget::Sub).stage2 = 1e-6;
  const auto tr = run_design(d, obs);
  CHECK(tr.scenario == Scenario::Both);
  CHECK(tr.rejected_at[SPFS.index()] == 2);
  CHECK(tr.rejected_at[FPFS.index()] == 2);
  CHECK(tr.rejected_at[FOS.index()] == 2);
  bool gated = false;
  for (const auto& t : tr.analyses[0].tests) gated = gated || t.gated;
  CHECK(gated);
  check_trace_invariants(tr);

  // AD has no gate: F goes at IA1
  auto ad = make_design(DesignKind::AD);
  const auto tr2 = run_design(ad, obs);
  CHECK(tr2.rejected_at[FPFS.index()] == 1);
}

TEST_CASE("reallocated alpha re-tests earlier looks") {
  // OS(S) at IA1 sits between its own boundary and the boundary at the pooled
  // S alpha; rejecting PFS(S) at IA2 must then confirm OS(S) at IA2.
  const auto d = make_design(DesignKind::GSD);
  const auto& plan = d.plan(SOS);
  BoundaryCache cache;
  const double c_own = cache.get(plan, d.initial_alpha[SOS.index()], d.integration).z_bounds[0];
  const double c_pool =
      cache.get(plan, d.initial_alpha[SOS.index()] + d.initial_alpha[SPFS.index()], d.integration)
          .z_bounds[0];
  REQUIRE(c_pool < c_own);
  const double z = 0.5 * (c_pool + c_own);
  auto obs = fixtures::constant_observations(0.5, 0.7, 0.7);
  obs.analyses[0].slot(Endpoint::OS, TestTarget::Sub).pooled = 1.0 - norm_cdf(z);
  obs.analyses[1].slot(Endpoint::PFS, TestTarget::Sub).pooled = 1e-6;
  const auto tr = run_design(d, obs, &cache);
  CHECK(tr.rejected_at[SPFS.index()] == 2);
  CHECK(tr.rejected_at[SOS.index()] == 2);
  CHECK(tr.analyses[1].alpha_after[SOS.index()] == 0.0);
}

TEST_CASE("random traces satisfy coherence, gate and conservation") {
  std::mt19937_64 rng(4242);
  BoundaryCache cache;
  const auto designs = {make_design(DesignKind::GSD), make_design(DesignKind::AD),
                        make_design(DesignKind::gGSD)};
  int rejections = 0;
  for (int rep = 0; rep < 400; ++rep) {
    const auto obs = fixtures::random_observations(rng, rep % 2 ? 2.0 : 3.0);
    for (const auto& d : designs) {
      const auto tr = run_design(d, obs, &cache);
      for (auto h : kHypotheses) rejections += tr.rejected(h);
      check_trace_invariants(tr);
    }
  }
  CHECK(rejections > 100);
}

TEST_CASE("lowering one p-value never removes a rejection") {
  std::mt19937_64 rng(77);
  BoundaryCache cache;
  for (int rep = 0; rep < 150; ++rep) {
    const auto obs = fixtures::random_observations(rng, 2.2);
    for (auto kind : {DesignKind::GSD, DesignKind::AD, DesignKind::gGSD}) {
      const auto d = make_design(kind);
      const auto base = run_design(d, obs, &cache);
      auto lowered = obs;
      const auto k = rng() % 3;
      const auto e = kEndpoints[rng() % 2];
      const auto t = rng() % 2 ? TestTarget::Full : TestTarget::Sub;
      auto& slot = lowered.analyses[k].slot(e, t);
      const int field = static_cast<int>(rng() % 3);
      auto& p = field == 0 ? slot.pooled : field == 1 ? slot.stage1 : slot.stage2;
      *p *= 0.1;
      const auto tr = run_design(d, lowered, &cache);
      for (auto h : kHypotheses) {
        if (base.rejected(h)) {
          CHECK(tr.rejected(h));
          CHECK(tr.rejected_at[h.index()] <= base.rejected_at[h.index()]);
        }
      }
    }
  }
}

TEST_CASE("GSD ignores the stage split") {
  std::mt19937_64 rng(5);
  const auto d = make_design(DesignKind::GSD);
  for (int rep = 0; rep < 50; ++rep) {
    const auto obs = fixtures::random_observations(rng, 2.5);
    auto relabeled = obs;
    for (auto& a : relabeled.analyses) {
      for (auto e : kEndpoints) {
        for (auto t : kTestTargets) std::swap(a.slot(e, t).stage1, a.slot(e, t).stage2);
      }
    }
    const auto a = run_design(d, obs);
    const auto b = run_design(d, relabeled);
    CHECK(a.rejected_at == b.rejected_at);
    CHECK(a.termination_analysis == b.termination_analysis);
  }
}

TEST_CASE("missing slots are named") {
  auto d = make_design(DesignKind::AD);
  auto obs = fixtures::constant_observations(0.5, 0.7, 0.7);
  obs.analyses[1].slot(Endpoint::OS, TestTarget::Sub).stage2.reset();
  try {
    run_design(d, obs);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("OS") != std::string::npos);
  }
  obs = fixtures::constant_observations(0.5, 0.7, 0.7);
  obs.analyses.pop_back();
  CHECK_THROWS_AS(run_design(d, obs), DataError);
  obs = fixtures::constant_observations(0.5, 0.7, 0.7);
  obs.hr_sub.reset();
  CHECK_THROWS_AS(run_design(d, obs), DataError);
}

TEST_CASE("design validation") {
  auto d = make_design(DesignKind::gGSD);
  CHECK_NOTHROW(d.validate());
  d.initial_alpha[SOS.index()] = 0.02;
  CHECK_THROWS_AS(d.validate(), ConfigError);
  d = make_design(DesignKind::GSD);
  d.initial_alpha = {0.01, 0.01, 0.01, 0.01};
  CHECK_THROWS_AS(d.validate(), ConfigError);
  d = make_design(DesignKind::gGSD);
  d.transitions[FPFS.index()][SOS.index()] = 0.5;
  d.transitions[FPFS.index()][FOS.index()] = 0.5;
  CHECK_THROWS_AS(d.validate(), ConfigError);
  d = make_design(DesignKind::AD);
  d.plans[0].fractions = {0.5, 1.0};
  CHECK_THROWS_AS(d.validate(), ConfigError);
}

TEST_CASE("initial graphs per scenario") {
  const auto g = make_design(DesignKind::gGSD);
  auto s = initial_graph(g, Scenario::SOnly);
  CHECK(s.alpha(SPFS) == 0.025);
  CHECK(s.alpha(SOS) == 0.0);
  CHECK(s.alpha(FPFS) == 0.0);
  CHECK(s.transitions[SPFS.index()][SOS.index()] == 1.0);
  const auto a = make_design(DesignKind::AD);
  auto f = initial_graph(a, Scenario::FOnly);
  CHECK(f.alpha(FPFS) == doctest::Approx(0.00017 + 0.0100));
  CHECK(f.alpha(FOS) == doctest::Approx(0.00025 + 0.01458));
  CHECK(f.total_alpha() == doctest::Approx(0.025));
  CHECK(initial_graph(g, Scenario::Both).alphas == g.initial_alpha);
  CHECK(scenario_for(SelectionDecision::StopFutility) == std::nullopt);
  CHECK(scenario_for(SelectionDecision::ContinueSubOnly) == Scenario::SOnly);
}

TEST_CASE("analysis names and boundary cache") {
  CHECK(analysis_name(0, 3) == "futility");
  CHECK(analysis_name(1, 3) == "IA1");
  CHECK(analysis_name(3, 3) == "FA");
  BoundaryCache cache;
  const auto d = make_design(DesignKind::GSD);
  const auto& a = cache.get(d.plan(SOS), 0.01, d.integration);
  const auto& b = cache.get(d.plan(SOS), 0.01, d.integration);
  CHECK(&a == &b);
  CHECK(cache.size() == 1);
  cache.get(d.plan(SOS), 0.02, d.integration);
  CHECK(cache.size() == 2);
}

}
