#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "ggsd/errors.hpp"
#include "ggsd/numerics.hpp"
#include "ggsd/simdata.hpp"

using namespace ggsd;

namespace {

ScenarioSpec small_spec(double hr = 1.0) {
  ScenarioSpec s;
  s.name = "small";
  s.sample_size = 200;
  s.sub_prevalence = 0.5;
  s.enroll_duration = 12.0;
  s.control_median_sub = {4.0, 10.5};
  s.control_median_complement = {3.0, 5.7};
  s.hr_sub = {hr, hr};
  s.hr_complement = {hr, hr};
  s.annual_dropout = {0.1, 0.01};
  s.stage1_cutoff.kind = Stage1Cutoff::Kind::Months;
  s.stage1_cutoff.months = 6.0;
  s.triggers.endpoint = Endpoint::OS;
  s.triggers.full = {60, 100, 120};
  s.triggers.sub = {30, 50, 60};
  return s;
}

// Logrank by the textbook O - E / sqrt(V) table, experimental arm as group 1.
double hand_logrank_z(std::vector<SurvivalObs> obs) {
  std::sort(obs.begin(), obs.end(), [](auto& a, auto& b) { return a.time < b.time; });
  double o = 0, e = 0, v = 0;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    if (!obs[i].event) continue;
    double n1 = 0, n = 0;
    for (std::size_t j = i; j < obs.size(); ++j) {
      n += 1;
      n1 += obs[j].experimental;
    }
    const double d = 1;
    o += obs[i].experimental;
    e += d * n1 / n;
    if (n > 1) v += n1 * (n - n1) * d * (n - d) / (n * n * (n - 1));
  }
  return (e - o) / std::sqrt(v);
}

double ks_uniform(std::vector<double> p) {
  std::sort(p.begin(), p.end());
  const double n = static_cast<double>(p.size());
  double d = 0;
  for (std::size_t i = 0; i < p.size(); ++i) d = std::max({d, (i + 1) / n - p[i], p[i] - i / n});
  return d;
}

}  // namespace

TEST_SUITE("simdata") {

TEST_CASE("trial generation basics") {
  auto s = small_spec();
  const auto recs = generate_trial(s, 7);
  REQUIRE(recs.size() == 200);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(recs[i].enroll_time >= 0.0);
    CHECK(recs[i].enroll_time <= 12.0);
    if (i > 0) CHECK(recs[i].enroll_time >= recs[i - 1].enroll_time);
    CHECK(recs[i].stage == (recs[i].enroll_time < 6.0 ? 1 : 2));
    CHECK(recs[i].event_time[0] > 0.0);
    CHECK(recs[i].dropout_time[1] > 0.0);
  }
  s.sub_prevalence = 1.0;
  for (const auto& r : generate_trial(s, 8)) CHECK(r.in_subgroup);
}

TEST_CASE("generation is deterministic per seed") {
  const auto s = small_spec(0.7);
  const auto a = generate_trial(s, 42);
  const auto b = generate_trial(s, 42);
  const auto c = generate_trial(s, 43);
  std::ostringstream sa, sb, sc;
  write_trial_csv(sa, a);
  write_trial_csv(sb, b);
  write_trial_csv(sc, c);
  CHECK(sa.str() == sb.str());
  CHECK(sa.str() != sc.str());
  CHECK(substream_seed(10, 3) == (10u ^ 3u));
}

TEST_CASE("control-arm PFS mean matches the exponential median") {
  auto s = small_spec();
  s.sample_size = 100000;
  s.sub_prevalence = 1.0;
  const auto recs = generate_trial(s, 1);
  double sum = 0;
  long n = 0;
  for (const auto& r : recs) {
    if (r.arm != Arm::Control) continue;
    sum += r.event_time[0];
    ++n;
  }
  CHECK(std::abs(sum / n - 4.0 / std::log(2.0)) < 0.1);
}

TEST_CASE("setting-1 sized trial") {
  auto s = small_spec(0.7);
  s.sample_size = 554;
  s.sub_prevalence = 0.75;
  s.enroll_duration = 28;
  s.stage1_cutoff.kind = Stage1Cutoff::Kind::Events;
  s.stage1_cutoff.events = {287, 171};
  s.stage1_cutoff.endpoint = Endpoint::PFS;
  const auto recs = generate_trial(s, 5);
  CHECK(recs.size() == 554);
  const double cut = stage1_cutoff_time(recs, s);
  CHECK(event_time_for_count(recs, Population::Full, Endpoint::PFS, 287) <= cut);
  CHECK(event_time_for_count(recs, Population::Sub, Endpoint::PFS, 171) <= cut);
  for (const auto& r : recs) CHECK(r.stage == (r.enroll_time < cut ? 1 : 2));
}

TEST_CASE("scheduling by event counts") {
  const auto s = small_spec();
  const auto recs = generate_trial(s, 3);
  std::vector<double> os;
  for (const auto& r : recs) {
    const double t = r.calendar_event(Endpoint::OS);
    if (std::isfinite(t)) os.push_back(t);
  }
  std::sort(os.begin(), os.end());
  CHECK(event_time_for_count(recs, Population::Full, Endpoint::OS, 1) == os.front());
  CHECK(event_time_for_count(recs, Population::Full, Endpoint::OS, static_cast<long>(os.size())) ==
        os.back());
  try {
    event_time_for_count(recs, Population::Full, Endpoint::OS, static_cast<long>(os.size()) + 1);
    FAIL("expected SchedulingError");
  } catch (const SchedulingError& e) {
    CHECK(e.max_achievable() == static_cast<long>(os.size()));
  }
  const auto times = schedule_analyses(recs, s, Population::Full);
  REQUIRE(times.size() == 3);
  CHECK(times[0] <= times[1]);
  CHECK(times[1] <= times[2]);
}

TEST_CASE("expected OS fraction at the first analysis") {
  // Setting-1 triggers put about 69% of the final OS events at IA1.
  auto s = small_spec(0.7);
  s.sample_size = 554;
  s.sub_prevalence = 0.75;
  s.enroll_duration = 28;
  s.hr_complement = {0.7, 0.7};
  auto when = [&](double target) {
    return find_root([&](double t) { return expected_events(s, Population::Full, Endpoint::OS, t) - target; },
                     0.1, 500.0);
  };
  const double t1 = when(357);
  const double t3 = when(518);
  CHECK(expected_events(s, Population::Full, Endpoint::OS, t1) / expected_events(s, Population::Full, Endpoint::OS, t3) ==
        doctest::Approx(0.69).epsilon(0.02));
  // the simulated scheduler lands near the same ratio
  s.stage1_cutoff.months = 10;
  s.triggers.full = {357, 476, 518};
  s.triggers.sub = {249, 344, 381};
  double ratio = 0;
  for (int seed = 0; seed < 20; ++seed) {
    const auto recs = generate_trial(s, seed);
    const auto t = schedule_analyses(recs, s, Population::Full);
    const auto a = snapshot_at(recs, t[0]).at(Cohort::Pooled, Population::Full, Endpoint::OS).events;
    ratio += double(a) / 518.0 / 20.0;
  }
  CHECK(ratio == doctest::Approx(0.69).epsilon(0.02));
}

TEST_CASE("logrank hand dataset") {
  const std::vector<SurvivalObs> obs{{1, true, true}, {2, true, false}, {3, true, true}, {4, true, false}};
  const auto r = logrank(obs);
  CHECK(r.events == 4);
  CHECK(r.z == doctest::Approx(hand_logrank_z(obs)).epsilon(1e-12));
  CHECK(r.z == doctest::Approx(-(2.0 / 3.0) / std::sqrt(0.25 + 2.0 / 9.0 + 0.25)).epsilon(1e-12));
  CHECK(r.p == doctest::Approx(1.0 - norm_cdf(r.z)));
}

TEST_CASE("logrank with censoring against the hand table") {
  std::mt19937_64 rng(8);
  std::exponential_distribution<double> ex(0.1);
  std::uniform_real_distribution<double> u(0, 1);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<SurvivalObs> obs;
    for (int i = 0; i < 60; ++i) obs.push_back({ex(rng), u(rng) < 0.7, u(rng) < 0.5});
    CHECK(logrank(obs).z == doctest::Approx(hand_logrank_z(obs)).epsilon(1e-10));
  }
}

TEST_CASE("exchanged arms give zero statistic") {
  std::vector<SurvivalObs> sym;
  for (double t : {1.0, 2.0, 3.0}) {
    sym.push_back({t, true, true});
    sym.push_back({t + 1e-9, true, false});
  }
  std::vector<SurvivalObs> swapped = sym;
  for (auto& o : swapped) o.experimental = !o.experimental;
  CHECK(logrank(sym).z == doctest::Approx(-logrank(swapped).z));
  const std::vector<SurvivalObs> tied{{1, true, true}, {1, true, false}, {2, true, true}, {2, true, false}};
  CHECK(logrank(tied).z == doctest::Approx(0.0).scale(1));
  CHECK(logrank(tied).p == doctest::Approx(0.5));
}

TEST_CASE("no events means no evidence") {
  const std::vector<SurvivalObs> obs{{1, false, true}, {2, false, false}};
  const auto r = logrank(obs);
  CHECK(r.no_events);
  CHECK(r.p == 1.0);
  CHECK(r.events == 0);
}

TEST_CASE("cox estimate is consistent") {
  std::mt19937_64 rng(21);
  std::exponential_distribution<double> c(0.1), e(0.07);
  std::vector<SurvivalObs> obs;
  for (int i = 0; i < 100000; ++i) {
    const bool x = i % 2;
    obs.push_back({x ? e(rng) : c(rng), true, x});
  }
  const auto fit = cox_hazard_ratio(obs);
  CHECK(fit.converged);
  CHECK(fit.events == 100000);
  CHECK(std::abs(fit.hr - 0.7) < 0.02);
}

TEST_CASE("snapshot cohort additivity and monotone information") {
  const auto s = small_spec(0.8);
  const auto recs = generate_trial(s, 77);
  long prev[2][2] = {{0, 0}, {0, 0}};
  for (double t = 2; t < 60; t += 4) {
    const auto snap = snapshot_at(recs, t);
    for (auto pop : kPopulations) {
      for (auto ep : kEndpoints) {
        const long a = snap.at(Cohort::Stage1, pop, ep).events;
        const long b = snap.at(Cohort::Stage2, pop, ep).events;
        const long c = snap.at(Cohort::Pooled, pop, ep).events;
        CHECK(a + b == c);
        CHECK(c >= prev[population_index(pop)][endpoint_index(ep)]);
        prev[population_index(pop)][endpoint_index(ep)] = c;
        CHECK(snap.at(Cohort::Pooled, pop, ep).p >= 0.0);
        CHECK(snap.at(Cohort::Pooled, pop, ep).p <= 1.0);
      }
    }
  }
  CHECK_THROWS_AS(snapshot_at(recs, -1.0), DomainError);
}

TEST_CASE("logrank p is uniform under the global null") {
  auto s = small_spec(1.0);
  s.sample_size = 150;
  std::vector<double> p;
  p.reserve(20000);
  for (std::uint64_t rep = 0; rep < 20000; ++rep) {
    const auto recs = generate_trial(s, substream_seed(555, rep));
    p.push_back(snapshot_at(recs, 20.0).at(Cohort::Pooled, Population::Full, Endpoint::PFS).p);
  }
  CHECK(ks_uniform(p) < 0.02);
}

TEST_CASE("dropping the stage-2 complement") {
  const auto s = small_spec();
  const auto recs = generate_trial(s, 9);
  const auto kept = drop_stage2_complement(recs);
  for (const auto& r : kept) CHECK((r.stage == 1 || r.in_subgroup));
  long expected = 0;
  for (const auto& r : recs) expected += (r.stage == 1 || r.in_subgroup);
  CHECK(static_cast<long>(kept.size()) == expected);
}

TEST_CASE("spec validation and true-null derivation") {
  auto s = small_spec(1.0);
  CHECK_NOTHROW(s.validate());
  for (auto h : kHypotheses) CHECK(s.is_true_null(h));
  s.hr_sub = {0.7, 0.7};
  CHECK_FALSE(s.is_true_null({Population::Sub, Endpoint::PFS}));
  CHECK_FALSE(s.is_true_null({Population::Full, Endpoint::PFS}));
  s.sub_prevalence = 0.0;
  s.triggers.sub = {1};
  CHECK_THROWS_AS(s.validate(), ConfigError);
}

}
