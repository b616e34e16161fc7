#include "ggsd/cli.hpp"

#include <iomanip>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>

#include <CLI11.hpp>

#include "ggsd/config.hpp"
#include "ggsd/engine.hpp"
#include "ggsd/futility.hpp"
#include "ggsd/harness.hpp"
#include "ggsd/report_io.hpp"

namespace ggsd {

namespace {

namespace fs = std::filesystem;

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<long> reps;
  std::optional<std::string> out;
  std::optional<int> threads;
  bool dump_trials = false;
  std::optional<double> hr;
  std::optional<double> events;
  double gamma = 0.05;
  std::vector<std::string> inputs;
};

RunConfig load(const Flags& f) {
  if (f.config.empty()) throw ConfigError("--config is required for this command");
  RunConfig cfg = parse_config(f.config);
  if (f.seed) cfg.seed = *f.seed;
  if (f.reps) {
    if (*f.reps < 1) throw ConfigError("--reps must be at least 1");
    cfg.reps = *f.reps;
  }
  if (f.threads) {
    if (*f.threads < 1) throw ConfigError("--threads must be at least 1");
    cfg.threads = *f.threads;
  }
  if (f.out) cfg.output_dir = *f.out;
  return cfg;
}

Manifest manifest_for(const std::string& command, const RunConfig& cfg) {
  Manifest m;
  m.command = command;
  m.config_path = cfg.source_path;
  m.config_text = cfg.source_text;
  m.seed = cfg.seed;
  m.reps = cfg.reps;
  m.threads = cfg.threads;
  return m;
}

std::string safe_name(std::string s) {
  for (auto& c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
  }
  return s;
}

int cmd_boundaries(const Flags& f, std::ostream& out) {
  const auto cfg = load(f);
  if (cfg.designs.empty()) throw ConfigError("configuration lists no designs");
  std::vector<BoundaryRow> rows;
  for (const auto& d : cfg.designs) {
    auto r = design_boundaries(d);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  const auto csv = boundaries_csv(rows);
  out << csv;
  write_outputs(cfg.output_dir, {{"boundaries.csv", csv}}, manifest_for("boundaries", cfg));
  return 0;
}

int cmd_thresholds(const Flags& f, std::ostream& out) {
  std::vector<ThresholdQuery> queries;
  std::optional<RunConfig> cfg;
  if (!f.config.empty()) {
    cfg = load(f);
    queries = cfg->thresholds;
    for (const auto& d : cfg->designs) {
      const auto& r = d.futility;
      if (d.kind == DesignKind::GSD || r.events_full <= 0.0) continue;
      queries.push_back({r.assumed_hr_full, r.events_full, r.gamma_full});
      queries.push_back({r.assumed_hr_sub, r.events_sub, r.gamma_sub});
    }
  }
  if (f.hr || f.events) {
    if (!f.hr || !f.events) throw ConfigError("--hr and --events must be given together");
    queries.push_back({*f.hr, *f.events, f.gamma});
  }
  if (queries.empty()) throw ConfigError("no threshold queries (use --config or --hr/--events)");
  std::ostringstream csv;
  csv << "hr,events,gamma,theta,theta_exact\n";
  for (const auto& q : queries) {
    const double theta = calibrate_threshold(q.hr, q.events, q.gamma);
    csv << q.hr << "," << q.events << "," << q.gamma << "," << std::fixed << std::setprecision(3)
        << theta << "," << std::setprecision(10) << theta << "\n";
    csv.unsetf(std::ios::floatfield);
    csv << std::setprecision(6);
  }
  out << csv.str();
  if (cfg) write_outputs(cfg->output_dir, {{"thresholds.csv", csv.str()}}, manifest_for("thresholds", *cfg));
  return 0;
}

int cmd_simulate(const Flags& f, std::ostream& out, std::ostream& err) {
  const auto cfg = load(f);
  if (cfg.settings.empty()) throw ConfigError("configuration lists no settings");
  if (cfg.designs.empty()) throw ConfigError("configuration lists no designs");
  std::vector<WeightSet> weights = cfg.weight_sets;
  if (weights.empty()) weights.push_back(WeightSet::fixed(0.5, 0.5));

  std::vector<SimulationReport> reports;
  std::vector<std::pair<std::string, std::string>> dumps;
  std::mutex dump_mutex;
  for (const auto& s : cfg.settings) {
    err << "simulating " << s.name << " (" << cfg.reps << " replications, seed " << cfg.seed
        << ", " << cfg.threads << " thread(s))\n";
    HarnessOptions opts;
    opts.threads = cfg.threads;
    opts.power = cfg.power;
    if (f.dump_trials) {
      opts.on_trial = [&](long rep, std::span<const PatientRecord> records) {
        std::ostringstream os;
        write_trial_csv(os, records);
        std::ostringstream name;
        name << "trials/" << safe_name(s.name) << "/rep_" << std::setw(6) << std::setfill('0')
             << rep << ".csv";
        std::lock_guard lock(dump_mutex);
        dumps.emplace_back(name.str(), os.str());
      };
    }
    reports.push_back(run_monte_carlo(s, cfg.designs, weights, cfg.reps, cfg.seed, opts));
  }
  const auto tables = summarize(reports);
  std::sort(dumps.begin(), dumps.end());
  std::vector<std::pair<std::string, std::string>> files{
      {"fwer.csv", tables.fwer_csv},
      {"power.csv", tables.power_csv},
      {"termination.csv", tables.termination_csv}};
  files.insert(files.end(), dumps.begin(), dumps.end());
  write_outputs(cfg.output_dir, files, manifest_for("simulate", cfg));
  out << tables.power_csv;
  err << "wrote " << cfg.output_dir << "/{fwer,power,termination}.csv and manifest.json\n";
  return 0;
}

int cmd_analyze(const Flags& f, std::ostream& out) {
  const auto cfg = load(f);
  if (!cfg.observed) throw ConfigError("configuration has no 'observed' section");
  if (cfg.designs.empty()) throw ConfigError("configuration lists no designs");
  std::vector<std::pair<std::string, std::string>> files;
  BoundaryCache cache;
  std::string narrative_all;
  for (const auto& d : cfg.designs) {
    const auto trace = analyze_observed(d, *cfg.observed, &cache);
    const auto text = narrate(trace);
    narrative_all += text + "\n";
    files.emplace_back("trace_" + safe_name(d.name) + ".json", trace_to_json(trace));
    files.emplace_back("narrative_" + safe_name(d.name) + ".txt", text);
  }
  // Drop the separator after the last design so the output ends on its summary.
  if (!narrative_all.empty()) narrative_all.pop_back();
  out << narrative_all;
  write_outputs(cfg.output_dir, files, manifest_for("analyze", cfg));
  return 0;
}

int cmd_report(const Flags& f, std::ostream& out) {
  std::vector<std::string> inputs = f.inputs;
  if (inputs.empty() && f.out) inputs.push_back(*f.out);
  if (inputs.empty()) throw ConfigError("report needs at least one results directory");
  std::vector<SimulationReport> merged;
  for (const auto& dir : inputs) {
    auto reports = parse_summary(read_summary_tables(dir));
    merged.insert(merged.end(), reports.begin(), reports.end());
  }
  std::ostringstream csv;
  csv << "setting,design,weights,reps,fwer,power_S,power_SorF,futility,reach_FA\n" << std::fixed
      << std::setprecision(4);
  for (const auto& rep : merged) {
    for (const auto& r : rep.rows) {
      csv << r.setting << "," << r.design << "," << r.weights << "," << r.reps << ",";
      if (r.fwer_defined) csv << r.fwer();
      csv << "," << r.power_s() << "," << r.power_sorf() << ","
          << (r.termination.empty() ? 0.0 : double(r.termination.front()) / double(r.reps)) << ","
          << r.fraction_reaching_final() << "\n";
    }
  }
  out << csv.str();
  if (f.out) {
    const auto tables = summarize(merged);
    Manifest m;
    m.command = "report";
    write_outputs(*f.out,
                  {{"fwer.csv", tables.fwer_csv},
                   {"power.csv", tables.power_csv},
                   {"termination.csv", tables.termination_csv},
                   {"summary.csv", csv.str()}},
                  m);
  }
  return 0;
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gated group sequential design toolkit", "ggsd"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags f;
  app.add_option("--config", f.config, "Configuration file (JSON, comments allowed)");
  app.add_option("--seed", f.seed, "Master seed");
  app.add_option("--reps", f.reps, "Replications per setting");
  app.add_option("--out", f.out, "Output directory");
  app.add_option("--threads", f.threads, "Worker threads");
  app.add_flag("--dump-trials", f.dump_trials, "Write every simulated trial as CSV");

  auto* boundaries = app.add_subcommand("boundaries", "Efficacy boundaries of every design");
  auto* thresholds = app.add_subcommand("thresholds", "Futility thresholds");
  thresholds->add_option("--hr", f.hr, "Assumed hazard ratio");
  thresholds->add_option("--events", f.events, "Stage-1 events");
  thresholds->add_option("--gamma", f.gamma, "Probability of failing the gate under the alternative");
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo operating characteristics");
  auto* analyze = app.add_subcommand("analyze", "Apply the designs to observed p-values");
  auto* report = app.add_subcommand("report", "Merge result tables");
  report->add_option("dirs", f.inputs, "Result directories");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*boundaries) return cmd_boundaries(f, out);
    if (*thresholds) return cmd_thresholds(f, out);
    if (*simulate) return cmd_simulate(f, out, err);
    if (*analyze) return cmd_analyze(f, out);
    if (*report) return cmd_report(f, out);
  } catch (const ConfigErrors& e) {
    err << "configuration error(s):\n";
    for (const auto& m : e.errors()) err << "  " << m << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace ggsd
