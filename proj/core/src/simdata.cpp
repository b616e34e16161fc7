#include "ggsd/simdata.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "ggsd/errors.hpp"
#include "ggsd/numerics.hpp"

namespace ggsd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLn2 = 0.69314718055994530942;

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// mt19937_64 with hand-rolled transforms so draws are identical across
// standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  double uniform() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double exponential(double rate) noexcept {
    if (!(rate > 0.0)) return kInf;
    return -std::log1p(-uniform()) / rate;
  }

 private:
  std::mt19937_64 engine_;
};

double monthly_dropout_rate(double annual) {
  return annual > 0.0 ? -std::log1p(-annual) / 12.0 : 0.0;
}

double event_rate(const ScenarioSpec& spec, bool sub, Arm arm, std::size_t e) {
  const double median = sub ? spec.control_median_sub[e] : spec.control_median_complement[e];
  const double hr = arm == Arm::Experimental
                        ? (sub ? spec.hr_sub[e] : spec.hr_complement[e])
                        : 1.0;
  return kLn2 / median * hr;
}

bool in_population(const PatientRecord& r, Population p) {
  return p == Population::Full || r.in_subgroup;
}

}  // namespace

bool ScenarioSpec::is_true_null(HypothesisId h) const {
  if (null_override) return (*null_override)[h.index()];
  const auto e = endpoint_index(h.endpoint);
  if (h.population == Population::Sub) return hr_sub[e] == 1.0;
  return hr_sub[e] == 1.0 && hr_complement[e] == 1.0;
}

void ScenarioSpec::validate() const {
  std::ostringstream err;
  if (sample_size <= 0) err << "sample_size must be positive; ";
  if (!(sub_prevalence > 0.0 && sub_prevalence <= 1.0)) {
    err << "sub_prevalence must lie in (0, 1]; ";
  }
  if (!(enroll_duration > 0.0)) err << "enroll_duration must be positive; ";
  for (std::size_t e = 0; e < 2; ++e) {
    const auto name = to_string(kEndpoints[e]);
    if (!(control_median_sub[e] > 0.0) || !(control_median_complement[e] > 0.0)) {
      err << "control medians for " << name << " must be positive; ";
    }
    if (!(hr_sub[e] > 0.0) || !(hr_complement[e] > 0.0)) {
      err << "hazard ratios for " << name << " must be positive; ";
    }
    if (!(annual_dropout[e] >= 0.0 && annual_dropout[e] < 1.0)) {
      err << "annual dropout for " << name << " must lie in [0, 1); ";
    }
  }
  if (stage1_cutoff.kind == Stage1Cutoff::Kind::Months && !(stage1_cutoff.months > 0.0)) {
    err << "stage1_cutoff.months must be positive; ";
  }
  if (stage1_cutoff.kind == Stage1Cutoff::Kind::Events) {
    const auto& ev = stage1_cutoff.events;
    if (ev[0] < 0 || ev[1] < 0 || ev[0] + ev[1] == 0) {
      err << "stage1_cutoff.events needs a positive count for at least one population; ";
    }
  }
  if (triggers.full.empty()) err << "analysis triggers must list at least one analysis; ";
  if (triggers.sub.size() != triggers.full.size()) {
    err << "analysis triggers for F and S must have the same length; ";
  }
  for (const auto* list : {&triggers.full, &triggers.sub}) {
    for (std::size_t k = 0; k < list->size(); ++k) {
      if ((*list)[k] <= 0) err << "analysis triggers must be positive; ";
      if (k > 0 && (*list)[k] < (*list)[k - 1]) err << "analysis triggers must be nondecreasing; ";
    }
  }
  if (!err.str().empty()) throw ConfigError("scenario '" + name + "': " + err.str());
}

double PatientRecord::calendar_event(Endpoint e) const noexcept {
  const auto i = endpoint_index(e);
  return event_time[i] <= dropout_time[i] ? enroll_time + event_time[i] : kInf;
}

std::vector<PatientRecord> generate_trial(const ScenarioSpec& spec, std::uint64_t seed) {
  Rng rng(seed);
  const PerEndpoint dropout{monthly_dropout_rate(spec.annual_dropout[0]),
                            monthly_dropout_rate(spec.annual_dropout[1])};
  std::vector<PatientRecord> records(static_cast<std::size_t>(spec.sample_size));
  for (auto& r : records) {
    r.enroll_time = rng.uniform() * spec.enroll_duration;
    r.in_subgroup = rng.uniform() < spec.sub_prevalence;
    r.arm = rng.uniform() < 0.5 ? Arm::Control : Arm::Experimental;
    for (std::size_t e = 0; e < 2; ++e) {
      r.event_time[e] = rng.exponential(event_rate(spec, r.in_subgroup, r.arm, e));
    }
    for (std::size_t e = 0; e < 2; ++e) r.dropout_time[e] = rng.exponential(dropout[e]);
  }
  std::stable_sort(records.begin(), records.end(),
                   [](const auto& a, const auto& b) { return a.enroll_time < b.enroll_time; });
  const double cutoff = stage1_cutoff_time(records, spec);
  for (auto& r : records) r.stage = r.enroll_time < cutoff ? 1 : 2;
  return records;
}

double event_time_for_count(std::span<const PatientRecord> records, Population population,
                            Endpoint endpoint, long target) {
  if (target <= 0) throw DomainError("event trigger must be positive");
  std::vector<double> times;
  times.reserve(records.size());
  for (const auto& r : records) {
    if (!in_population(r, population)) continue;
    const double t = r.calendar_event(endpoint);
    if (t < kInf) times.push_back(t);
  }
  const auto max_count = static_cast<long>(times.size());
  if (target > max_count) {
    std::ostringstream os;
    os << "cannot reach " << target << " " << to_string(endpoint) << " events in population "
       << to_string(population) << "; at most " << max_count << " can occur";
    throw SchedulingError(os.str(), max_count);
  }
  auto nth = times.begin() + (target - 1);
  std::nth_element(times.begin(), nth, times.end());
  return *nth;
}

double stage1_cutoff_time(std::span<const PatientRecord> records, const ScenarioSpec& spec) {
  const auto& c = spec.stage1_cutoff;
  if (c.kind == Stage1Cutoff::Kind::Months) return c.months;
  double t = 0.0;
  for (auto pop : kPopulations) {
    const long n = c.events[population_index(pop)];
    if (n > 0) t = std::max(t, event_time_for_count(records, pop, c.endpoint, n));
  }
  return t;
}

std::vector<double> schedule_analyses(std::span<const PatientRecord> records,
                                      const ScenarioSpec& spec, Population driving) {
  const auto& targets = driving == Population::Full ? spec.triggers.full : spec.triggers.sub;
  std::vector<double> times;
  times.reserve(targets.size());
  for (long target : targets) {
    const double t = event_time_for_count(records, driving, spec.triggers.endpoint, target);
    times.push_back(times.empty() ? t : std::max(t, times.back()));
  }
  return times;
}

std::vector<PatientRecord> drop_stage2_complement(std::span<const PatientRecord> records) {
  std::vector<PatientRecord> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    if (r.stage == 1 || r.in_subgroup) out.push_back(r);
  }
  return out;
}

LogrankResult logrank(std::span<const SurvivalObs> obs) {
  std::vector<SurvivalObs> sorted(obs.begin(), obs.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.time < b.time; });
  double n1 = 0.0, n0 = 0.0;
  for (const auto& o : sorted) (o.experimental ? n1 : n0) += 1.0;

  double o_minus_e = 0.0;
  double var = 0.0;
  long events = 0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    double d1 = 0.0, d0 = 0.0, leave1 = 0.0, leave0 = 0.0;
    while (j < sorted.size() && sorted[j].time == sorted[i].time) {
      const auto& o = sorted[j];
      if (o.event) (o.experimental ? d1 : d0) += 1.0;
      (o.experimental ? leave1 : leave0) += 1.0;
      ++j;
    }
    const double d = d1 + d0;
    const double n = n1 + n0;
    if (d > 0.0) {
      events += static_cast<long>(d);
      o_minus_e += d1 - d * n1 / n;
      if (n > 1.0) var += d * (n1 / n) * (n0 / n) * (n - d) / (n - 1.0);
    }
    n1 -= leave1;
    n0 -= leave0;
    i = j;
  }
  LogrankResult out;
  out.events = events;
  out.no_events = events == 0;
  if (events == 0 || !(var > 0.0)) {
    out.z = 0.0;
    out.p = 1.0;
    return out;
  }
  out.z = -o_minus_e / std::sqrt(var);
  out.p = norm_sf(out.z);
  return out;
}

CoxResult cox_hazard_ratio(std::span<const SurvivalObs> obs) {
  std::vector<SurvivalObs> sorted(obs.begin(), obs.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.time > b.time; });
  CoxResult out;
  for (const auto& o : sorted) out.events += o.event ? 1 : 0;
  if (out.events == 0) return out;

  // Distinct times in descending order, with risk-set membership accumulated.
  struct TimeGroup {
    double at_risk0, at_risk1;  // counts with time >= t
    double d, d1;
  };
  std::vector<TimeGroup> groups;
  double r0 = 0.0, r1 = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    double d = 0.0, d1 = 0.0;
    while (j < sorted.size() && sorted[j].time == sorted[i].time) {
      (sorted[j].experimental ? r1 : r0) += 1.0;
      if (sorted[j].event) {
        d += 1.0;
        if (sorted[j].experimental) d1 += 1.0;
      }
      ++j;
    }
    if (d > 0.0) groups.push_back({r0, r1, d, d1});
    i = j;
  }

  double beta = 0.0;
  for (int iter = 1; iter <= 50; ++iter) {
    double score = 0.0, info = 0.0;
    const double eb = std::exp(beta);
    for (const auto& g : groups) {
      const double s1 = g.at_risk1 * eb;
      const double s0 = g.at_risk0 + s1;
      const double m = s1 / s0;
      score += g.d1 - g.d * m;
      info += g.d * m * (1.0 - m);
    }
    out.iterations = iter;
    if (std::abs(score) < 1e-8) {
      out.converged = true;
      break;
    }
    if (!(info > 0.0)) break;
    const double step = std::clamp(score / info, -5.0, 5.0);
    beta += step;
  }
  out.log_hr = beta;
  out.hr = std::exp(beta);
  return out;
}

AnalysisSnapshot snapshot_at(std::span<const PatientRecord> records, double time) {
  if (time < 0.0) throw DomainError("snapshot_at: time must be nonnegative");
  AnalysisSnapshot snap;
  snap.calendar_time = time;
  std::vector<SurvivalObs> slot;
  slot.reserve(records.size());
  for (auto cohort : {Cohort::Stage1, Cohort::Stage2, Cohort::Pooled}) {
    for (auto pop : kPopulations) {
      for (auto ep : kEndpoints) {
        slot.clear();
        const auto e = endpoint_index(ep);
        for (const auto& r : records) {
          if (r.enroll_time > time || !in_population(r, pop)) continue;
          if (cohort == Cohort::Stage1 && r.stage != 1) continue;
          if (cohort == Cohort::Stage2 && r.stage != 2) continue;
          const double follow = time - r.enroll_time;
          const double censor = std::min(r.dropout_time[e], follow);
          const bool event = r.event_time[e] <= censor;
          slot.push_back({event ? r.event_time[e] : censor, event, r.arm == Arm::Experimental});
        }
        snap.at(cohort, pop, ep) = logrank(slot);
      }
    }
  }
  return snap;
}

FutilitySnapshot futility_snapshot(std::span<const PatientRecord> records, double cutoff_time) {
  FutilitySnapshot snap;
  snap.calendar_time = cutoff_time;
  constexpr auto e = endpoint_index(Endpoint::PFS);
  for (auto pop : kPopulations) {
    std::vector<SurvivalObs> obs;
    for (const auto& r : records) {
      if (r.stage != 1 || r.enroll_time > cutoff_time || !in_population(r, pop)) continue;
      const double censor = std::min(r.dropout_time[e], cutoff_time - r.enroll_time);
      const bool event = r.event_time[e] <= censor;
      obs.push_back({event ? r.event_time[e] : censor, event, r.arm == Arm::Experimental});
    }
    const auto fit = cox_hazard_ratio(obs);
    if (pop == Population::Full) {
      snap.hr_full = fit.hr;
      snap.events_full = fit.events;
    } else {
      snap.hr_sub = fit.hr;
      snap.events_sub = fit.events;
    }
  }
  return snap;
}

double expected_events(const ScenarioSpec& spec, Population population, Endpoint endpoint,
                       double t) {
  if (t <= 0.0) return 0.0;
  const auto e = endpoint_index(endpoint);
  const double delta = monthly_dropout_rate(spec.annual_dropout[e]);
  const double a = spec.enroll_duration;
  const double m = std::min(t, a);
  double total = 0.0;
  for (bool sub : {true, false}) {
    if (!sub && population == Population::Sub) continue;
    const double share = sub ? spec.sub_prevalence : 1.0 - spec.sub_prevalence;
    for (auto arm : {Arm::Control, Arm::Experimental}) {
      const double lambda = event_rate(spec, sub, arm, e);
      const double r = lambda + delta;
      const double frac =
          lambda / (r * a) * (m - (std::exp(-r * (t - m)) - std::exp(-r * t)) / r);
      total += spec.sample_size * share * 0.5 * frac;
    }
  }
  return total;
}

void write_trial_csv(std::ostream& os, std::span<const PatientRecord> records) {
  os << "id,enroll_time,stage,in_subgroup,arm,pfs_time,os_time,pfs_dropout,os_dropout\n";
  os << std::setprecision(17);
  std::size_t id = 0;
  for (const auto& r : records) {
    os << ++id << ',' << r.enroll_time << ',' << r.stage << ',' << (r.in_subgroup ? 1 : 0) << ','
       << (r.arm == Arm::Experimental ? "experimental" : "control") << ',' << r.event_time[0]
       << ',' << r.event_time[1] << ',' << r.dropout_time[0] << ',' << r.dropout_time[1] << '\n';
  }
}

}  // namespace ggsd
