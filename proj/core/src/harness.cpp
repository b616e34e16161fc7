#include "ggsd/harness.hpp"

#include <atomic>
#include <cmath>
#include <iomanip>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "ggsd/errors.hpp"

namespace ggsd {

namespace {

std::string weight_name(double pfs_sq, double os_sq) {
  std::ostringstream os;
  os << "pfs=" << pfs_sq << "/" << 1.0 - pfs_sq << ";os=" << os_sq << "/" << 1.0 - os_sq;
  return os.str();
}

// Observations of one trial as seen under a given data layout.
struct ScenarioData {
  TrialObservations obs;
  std::vector<AnalysisSnapshot> snapshots;
  Population driving = Population::Full;
  bool shortfall = false;
};

ScenarioData build_data(std::span<const PatientRecord> records, const ScenarioSpec& spec,
                        Population driving) {
  ScenarioData d;
  d.driving = driving;
  const auto& targets = driving == Population::Full ? spec.triggers.full : spec.triggers.sub;
  double prev = 0.0;
  for (long target : targets) {
    double t;
    try {
      t = event_time_for_count(records, driving, spec.triggers.endpoint, target);
    } catch (const SchedulingError& e) {
      d.shortfall = true;
      t = e.max_achievable() > 0
              ? event_time_for_count(records, driving, spec.triggers.endpoint, e.max_achievable())
              : 0.0;
    }
    prev = std::max(prev, t);
    d.snapshots.push_back(snapshot_at(records, prev));
  }
  for (const auto& snap : d.snapshots) {
    AnalysisObservation a;
    for (auto e : kEndpoints) {
      for (auto pop : kPopulations) {
        auto& slot = a.slot(e, target_of(pop));
        slot.pooled = snap.at(Cohort::Pooled, pop, e).p;
        slot.stage1 = snap.at(Cohort::Stage1, pop, e).p;
        slot.stage2 = snap.at(Cohort::Stage2, pop, e).p;
      }
    }
    d.obs.analyses.push_back(a);
  }
  return d;
}

WeightTable event_driven_table(const DesignSpec& design, const ScenarioData& data) {
  WeightTable t;
  for (auto e : kEndpoints) {
    auto& v = t.by_endpoint[endpoint_index(e)];
    for (int analysis : design.tested_at[endpoint_index(e)]) {
      const auto& snap = data.snapshots[analysis - 1];
      const double n1 = static_cast<double>(snap.at(Cohort::Stage1, data.driving, e).events);
      const double n2 = static_cast<double>(snap.at(Cohort::Stage2, data.driving, e).events);
      v.push_back(n1 + n2 > 0.0 ? event_weights(n1, n2) : StageWeights::from_squares(0.5, 0.5));
    }
  }
  return t;
}

struct RunConfig {
  const DesignSpec* source = nullptr;
  const WeightSet* weights = nullptr;
  DesignSpec design;
};

struct Outcome {
  bool fwer = false;
  bool power_s = false;
  bool power_sorf = false;
  int termination = 0;
  bool shortfall = false;
};

bool population_success(const ScenarioSpec& spec, const DecisionTrace& trace, Population pop,
                        PowerRule rule) {
  bool all = true, any = false;
  for (auto e : kEndpoints) {
    const HypothesisId h{pop, e};
    // True nulls never count toward power.
    const bool hit = trace.rejected(h) && !spec.is_true_null(h);
    all = all && hit;
    any = any || hit;
  }
  return rule == PowerRule::Both ? all : any;
}

}  // namespace

WeightSet WeightSet::fixed(double pfs_w1_sq, double os_w1_sq) {
  WeightSet w;
  w.name = weight_name(pfs_w1_sq, os_w1_sq);
  w.pfs = StageWeights::from_squares(pfs_w1_sq, 1.0 - pfs_w1_sq);
  w.os = StageWeights::from_squares(os_w1_sq, 1.0 - os_w1_sq);
  return w;
}

WeightSet WeightSet::reference() {
  WeightSet w;
  w.name = "event-driven";
  w.event_driven = true;
  return w;
}

std::string to_string(PowerRule r) { return r == PowerRule::Both ? "both" : "any"; }

PowerRule parse_power_rule(const std::string& s) {
  if (s == "both") return PowerRule::Both;
  if (s == "any") return PowerRule::Any;
  throw DomainError("unknown power rule '" + s + "' (expected both or any)");
}

double ReportRow::fwer() const {
  return reps > 0 ? static_cast<double>(fwer_hits) / static_cast<double>(reps) : 0.0;
}
double ReportRow::power_s() const {
  return reps > 0 ? static_cast<double>(power_s_hits) / static_cast<double>(reps) : 0.0;
}
double ReportRow::power_sorf() const {
  return reps > 0 ? static_cast<double>(power_sorf_hits) / static_cast<double>(reps) : 0.0;
}
double ReportRow::fraction_reaching_final() const {
  if (reps == 0 || termination.empty()) return 0.0;
  return static_cast<double>(termination.back()) / static_cast<double>(reps);
}

double mc_standard_error(double p, long n) {
  return n > 0 ? std::sqrt(p * (1.0 - p) / static_cast<double>(n)) : 0.0;
}

const ReportRow* SimulationReport::find(const std::string& design,
                                        const std::string& weights) const {
  for (const auto& r : rows) {
    if (r.design == design && r.weights == weights) return &r;
  }
  return nullptr;
}

SimulationReport run_monte_carlo(const ScenarioSpec& setting, std::span<const DesignSpec> designs,
                                 std::span<const WeightSet> weight_sets, long reps,
                                 std::uint64_t seed, const HarnessOptions& options) {
  if (reps < 1) throw ConfigError("reps must be at least 1");
  setting.validate();

  std::vector<RunConfig> configs;
  for (const auto& d : designs) {
    d.validate();
    if (static_cast<std::size_t>(d.analyses) != setting.analyses()) {
      throw ConfigError("design '" + d.name + "' plans " + std::to_string(d.analyses) +
                        " analyses but setting '" + setting.name + "' triggers " +
                        std::to_string(setting.analyses()));
    }
    if (d.kind == DesignKind::GSD) {
      configs.push_back({&d, nullptr, d});
      continue;
    }
    for (const auto& w : weight_sets) {
      RunConfig c{&d, &w, d};
      if (!w.event_driven) {
        c.design.weights = WeightTable::uniform(w.pfs, w.os, d.tested_at[0].size(),
                                                d.tested_at[1].size());
      }
      configs.push_back(std::move(c));
    }
  }

  bool any_null = false;
  for (auto h : kHypotheses) any_null = any_null || setting.is_true_null(h);

  const auto n_configs = configs.size();
  std::vector<Outcome> outcomes(static_cast<std::size_t>(reps) * n_configs);
  BoundaryCache cache;
  std::atomic<long> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (long rep = next++; rep < reps; rep = next++) {
      try {
        const auto records = generate_trial(setting, substream_seed(seed, static_cast<std::uint64_t>(rep)));
        if (options.on_trial) options.on_trial(rep, records);
        const double cutoff = stage1_cutoff_time(records, setting);
        const auto fut = futility_snapshot(records, cutoff);

        std::optional<ScenarioData> full_data, sub_data;
        auto data_for = [&](std::optional<Scenario> sc) -> const ScenarioData& {
          if (sc && *sc == Scenario::SOnly) {
            if (!sub_data) {
              sub_data = build_data(drop_stage2_complement(records), setting, Population::Sub);
            }
            return *sub_data;
          }
          if (!full_data) full_data = build_data(records, setting, Population::Full);
          return *full_data;
        };

        for (std::size_t c = 0; c < n_configs; ++c) {
          const auto& cfg = configs[c];
          Outcome& out = outcomes[static_cast<std::size_t>(rep) * n_configs + c];
          DecisionTrace trace;
          if (cfg.design.kind == DesignKind::GSD) {
            trace = run_design(cfg.design, data_for(std::nullopt).obs, &cache);
          } else {
            const auto sel = select_population(fut.hr_full, fut.hr_sub, cfg.design.futility);
            const auto sc = scenario_for(sel.decision);
            if (!sc) {
              TrialObservations obs;
              obs.hr_full = fut.hr_full;
              obs.hr_sub = fut.hr_sub;
              trace = run_design(cfg.design, obs, &cache);
            } else {
              const auto& data = data_for(sc);
              TrialObservations obs = data.obs;
              obs.hr_full = fut.hr_full;
              obs.hr_sub = fut.hr_sub;
              out.shortfall = data.shortfall;
              if (cfg.weights->event_driven) {
                DesignSpec d = cfg.design;
                d.weights = event_driven_table(d, data);
                trace = run_design(d, obs, &cache);
              } else {
                trace = run_design(cfg.design, obs, &cache);
              }
            }
          }
          if (cfg.design.kind == DesignKind::GSD) out.shortfall = data_for(std::nullopt).shortfall;
          for (auto h : kHypotheses) {
            if (trace.rejected(h) && setting.is_true_null(h)) out.fwer = true;
          }
          const auto rule = options.power.within_population;
          const bool s_ok = population_success(setting, trace, Population::Sub, rule);
          const bool f_ok = population_success(setting, trace, Population::Full, rule);
          out.power_s = s_ok;
          out.power_sorf = s_ok || f_ok;
          out.termination = trace.termination_analysis;
          if (options.on_trace) options.on_trace(rep, RunKey{cfg.source, cfg.weights}, trace);
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = reps;
      }
    }
  };

  const int threads = std::max(1, options.threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  SimulationReport report;
  for (std::size_t c = 0; c < n_configs; ++c) {
    const auto& cfg = configs[c];
    ReportRow row;
    row.setting = setting.name;
    row.design = cfg.design.name;
    row.kind = cfg.design.kind;
    row.weights = cfg.weights ? cfg.weights->name : "none";
    row.reps = reps;
    row.seed = seed;
    row.fwer_defined = any_null;
    row.termination.assign(static_cast<std::size_t>(cfg.design.analyses) + 1, 0);
    for (long rep = 0; rep < reps; ++rep) {
      const auto& o = outcomes[static_cast<std::size_t>(rep) * n_configs + c];
      row.fwer_hits += o.fwer;
      row.power_s_hits += o.power_s;
      row.power_sorf_hits += o.power_sorf;
      row.trigger_shortfalls += o.shortfall;
      ++row.termination[static_cast<std::size_t>(o.termination)];
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(6) << x;
  return os.str();
}

std::string key_columns(const ReportRow& r) {
  std::ostringstream os;
  os << r.setting << "," << r.design << "," << to_string(r.kind) << "," << r.weights << ","
     << r.reps << "," << r.seed;
  return os.str();
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

SummaryTables summarize(std::span<const SimulationReport> reports) {
  SummaryTables t;
  std::ostringstream fwer, power, term;
  const char* key = "setting,design,kind,weights,reps,seed";
  fwer << key << ",hits,estimate,mc_se\n";
  power << key << ",metric,hits,estimate,mc_se,trigger_shortfalls\n";
  term << key << ",analysis,count,fraction\n";
  for (const auto& rep : reports) {
    for (const auto& r : rep.rows) {
      const auto k = key_columns(r);
      if (r.fwer_defined) {
        fwer << k << "," << r.fwer_hits << "," << fmt(r.fwer()) << ","
             << fmt(mc_standard_error(r.fwer(), r.reps)) << "\n";
      }
      power << k << ",power_S," << r.power_s_hits << "," << fmt(r.power_s()) << ","
            << fmt(mc_standard_error(r.power_s(), r.reps)) << "," << r.trigger_shortfalls << "\n";
      power << k << ",power_SorF," << r.power_sorf_hits << "," << fmt(r.power_sorf()) << ","
            << fmt(mc_standard_error(r.power_sorf(), r.reps)) << "," << r.trigger_shortfalls
            << "\n";
      const int total = static_cast<int>(r.termination.size()) - 1;
      for (int a = 0; a <= total; ++a) {
        const long n = r.termination[static_cast<std::size_t>(a)];
        term << k << "," << analysis_name(a, total) << "," << n << ","
             << fmt(r.reps > 0 ? static_cast<double>(n) / static_cast<double>(r.reps) : 0.0)
             << "\n";
      }
    }
  }
  t.fwer_csv = fwer.str();
  t.power_csv = power.str();
  t.termination_csv = term.str();
  return t;
}

std::vector<SimulationReport> parse_summary(const SummaryTables& tables) {
  std::vector<SimulationReport> reports;
  std::map<std::string, std::size_t> setting_index;
  std::map<std::string, std::pair<std::size_t, std::size_t>> by_key;

  auto row_for = [&](const std::vector<std::string>& f, const std::string& where) -> ReportRow& {
    const std::string key = f[0] + "," + f[1] + "," + f[3];
    if (auto it = by_key.find(key); it != by_key.end()) {
      return reports[it->second.first].rows[it->second.second];
    }
    auto [sit, inserted] = setting_index.emplace(f[0], reports.size());
    if (inserted) reports.emplace_back();
    auto& rows = reports[sit->second].rows;
    ReportRow r;
    try {
      r.setting = f[0];
      r.design = f[1];
      r.kind = parse_design_kind(f[2]);
      r.weights = f[3];
      r.reps = std::stol(f[4]);
      r.seed = std::stoull(f[5]);
    } catch (const std::exception& e) {
      throw DataError(where + ": malformed key columns (" + e.what() + ")");
    }
    by_key[key] = {sit->second, rows.size()};
    rows.push_back(std::move(r));
    return rows.back();
  };

  auto each_line = [&](const std::string& text, const std::string& name, std::size_t fields,
                       auto&& fn) {
    std::istringstream is(text);
    std::string line;
    int n = 0;
    while (std::getline(is, line)) {
      if (n++ == 0) {
        if (line.rfind("setting,", 0) != 0) throw DataError(name + ": missing header row");
        continue;
      }
      if (line.empty()) continue;
      auto f = split(line, ',');
      const std::string where = name + " line " + std::to_string(n);
      if (f.size() != fields) throw DataError(where + ": expected " + std::to_string(fields) + " fields");
      try {
        fn(f, where);
      } catch (const std::invalid_argument&) {
        throw DataError(where + ": malformed number");
      } catch (const std::out_of_range&) {
        throw DataError(where + ": number out of range");
      }
    }
  };

  each_line(tables.power_csv, "power.csv", 11, [&](const auto& f, const auto& where) {
    auto& r = row_for(f, where);
    r.trigger_shortfalls = std::stol(f[10]);
    if (f[6] == "power_S") {
      r.power_s_hits = std::stol(f[7]);
    } else if (f[6] == "power_SorF") {
      r.power_sorf_hits = std::stol(f[7]);
    } else {
      throw DataError(where + ": unknown metric '" + f[6] + "'");
    }
  });
  each_line(tables.fwer_csv, "fwer.csv", 9, [&](const auto& f, const auto& where) {
    auto& r = row_for(f, where);
    r.fwer_defined = true;
    r.fwer_hits = std::stol(f[6]);
  });
  each_line(tables.termination_csv, "termination.csv", 9, [&](const auto& f, const auto& where) {
    auto& r = row_for(f, where);
    r.termination.push_back(std::stol(f[7]));
  });
  return reports;
}

}  // namespace ggsd
