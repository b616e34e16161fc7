#include "ggsd/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace ggsd {

namespace {

using json = nlohmann::json;

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : "\n") + s;
  return out;
}

// Walks a JSON tree, recording problems with their paths instead of stopping.
class Reader {
 public:
  std::vector<std::string> errors;

  void fail(const std::string& path, const std::string& msg) {
    errors.push_back(path + ": " + msg);
  }

  bool object(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
    if (!j.is_object()) {
      fail(path, "expected an object");
      return false;
    }
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : j.items()) {
      if (!allowed.count(k)) fail(path + "." + k, "unknown key");
    }
    return true;
  }

  template <typename T>
  std::optional<T> opt(const json& j, const char* key, const std::string& path) {
    if (!j.contains(key)) return std::nullopt;
    return value<T>(j.at(key), path + "." + key);
  }

  template <typename T>
  std::optional<T> req(const json& j, const char* key, const std::string& path) {
    if (!j.contains(key)) {
      fail(path + "." + key, "required field is missing");
      return std::nullopt;
    }
    return value<T>(j.at(key), path + "." + key);
  }

  template <typename T>
  std::optional<T> value(const json& j, const std::string& path) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!j.is_boolean()) return fail(path, "expected true or false"), std::nullopt;
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!j.is_string()) return fail(path, "expected a string"), std::nullopt;
    } else if constexpr (std::is_integral_v<T>) {
      if (!j.is_number_integer()) return fail(path, "expected an integer"), std::nullopt;
    } else {
      if (!j.is_number()) return fail(path, "expected a number"), std::nullopt;
    }
    return j.get<T>();
  }

  template <typename T>
  std::optional<std::vector<T>> list(const json& j, const std::string& path) {
    if (!j.is_array()) return fail(path, "expected a list"), std::nullopt;
    std::vector<T> out;
    bool ok = true;
    for (std::size_t i = 0; i < j.size(); ++i) {
      auto v = value<T>(j[i], path + "[" + std::to_string(i) + "]");
      ok = ok && v.has_value();
      if (v) out.push_back(*v);
    }
    return ok ? std::optional(out) : std::nullopt;
  }

  // Runs fn, turning library exceptions into errors at `path`.
  template <typename F>
  bool guard(const std::string& path, F&& fn) {
    try {
      fn();
      return true;
    } catch (const ConfigErrors& e) {
      for (const auto& m : e.errors()) fail(path, m);
    } catch (const Error& e) {
      fail(path, e.what());
    }
    return false;
  }
};

PerEndpoint per_endpoint(Reader& r, const json& j, const std::string& path, PerEndpoint dflt) {
  if (!r.object(j, path, {"pfs", "os"})) return dflt;
  PerEndpoint out = dflt;
  if (auto v = r.opt<double>(j, "pfs", path)) out[endpoint_index(Endpoint::PFS)] = *v;
  if (auto v = r.opt<double>(j, "os", path)) out[endpoint_index(Endpoint::OS)] = *v;
  return out;
}

ScenarioSpec read_setting(Reader& r, const json& j, const std::string& path) {
  ScenarioSpec s;
  if (!r.object(j, path,
                {"name", "sample_size", "sub_prevalence", "enroll_duration", "control_median",
                 "hazard_ratio", "annual_dropout", "stage1_cutoff", "triggers", "true_null"})) {
    return s;
  }
  if (auto v = r.req<std::string>(j, "name", path)) s.name = *v;
  if (auto v = r.req<int>(j, "sample_size", path)) s.sample_size = *v;
  if (auto v = r.req<double>(j, "sub_prevalence", path)) s.sub_prevalence = *v;
  if (auto v = r.req<double>(j, "enroll_duration", path)) s.enroll_duration = *v;

  for (auto [key, sub, comp] :
       {std::tuple{"control_median", &s.control_median_sub, &s.control_median_complement},
        std::tuple{"hazard_ratio", &s.hr_sub, &s.hr_complement}}) {
    const std::string p = path + "." + key;
    if (!j.contains(key)) {
      r.fail(p, "required field is missing");
      continue;
    }
    const auto& node = j.at(key);
    if (!r.object(node, p, {"sub", "complement"})) continue;
    if (node.contains("sub")) *sub = per_endpoint(r, node.at("sub"), p + ".sub", *sub);
    if (node.contains("complement")) {
      *comp = per_endpoint(r, node.at("complement"), p + ".complement", *comp);
    }
  }
  if (j.contains("annual_dropout")) {
    s.annual_dropout = per_endpoint(r, j.at("annual_dropout"), path + ".annual_dropout", {0, 0});
  }

  if (!j.contains("stage1_cutoff")) {
    r.fail(path + ".stage1_cutoff", "required field is missing");
  } else {
    const auto& c = j.at("stage1_cutoff");
    const auto p = path + ".stage1_cutoff";
    if (r.object(c, p, {"months", "events", "population", "endpoint"})) {
      if (c.contains("months") == c.contains("events")) {
        r.fail(p, "give exactly one of months or events");
      } else if (c.contains("months")) {
        s.stage1_cutoff.kind = Stage1Cutoff::Kind::Months;
        if (auto v = r.opt<double>(c, "months", p)) s.stage1_cutoff.months = *v;
      } else {
        s.stage1_cutoff.kind = Stage1Cutoff::Kind::Events;
        const auto& ev = c.at("events");
        if (ev.is_number()) {
          // A bare count applies to one population (F unless named).
          Population pop = Population::Full;
          if (auto v = r.opt<std::string>(c, "population", p)) {
            r.guard(p + ".population", [&] { pop = parse_population(*v); });
          }
          if (auto v = r.value<long>(ev, p + ".events")) {
            s.stage1_cutoff.events[population_index(pop)] = *v;
          }
        } else if (r.object(ev, p + ".events", {"F", "S"})) {
          if (c.contains("population")) r.fail(p + ".population", "not allowed with per-population events");
          for (auto pop : kPopulations) {
            if (auto v = r.opt<long>(ev, to_string(pop).c_str(), p + ".events")) {
              s.stage1_cutoff.events[population_index(pop)] = *v;
            }
          }
        }
      }
      if (auto v = r.opt<std::string>(c, "endpoint", p)) {
        r.guard(p + ".endpoint", [&] { s.stage1_cutoff.endpoint = parse_endpoint(*v); });
      }
    }
  }

  if (!j.contains("triggers")) {
    r.fail(path + ".triggers", "required field is missing");
  } else {
    const auto& t = j.at("triggers");
    const auto p = path + ".triggers";
    if (r.object(t, p, {"endpoint", "full", "sub"})) {
      if (auto v = r.opt<std::string>(t, "endpoint", p)) {
        r.guard(p + ".endpoint", [&] { s.triggers.endpoint = parse_endpoint(*v); });
      }
      if (t.contains("full")) {
        if (auto v = r.list<long>(t.at("full"), p + ".full")) s.triggers.full = *v;
      } else {
        r.fail(p + ".full", "required field is missing");
      }
      if (t.contains("sub")) {
        if (auto v = r.list<long>(t.at("sub"), p + ".sub")) s.triggers.sub = *v;
      } else {
        r.fail(p + ".sub", "required field is missing");
      }
    }
  }

  if (j.contains("true_null")) {
    if (auto labels = r.list<std::string>(j.at("true_null"), path + ".true_null")) {
      std::array<bool, HypothesisId::kCount> nulls{};
      for (const auto& l : *labels) {
        r.guard(path + ".true_null", [&] { nulls[HypothesisId::parse(l).index()] = true; });
      }
      s.null_override = nulls;
    }
  }
  r.guard(path, [&] { s.validate(); });
  return s;
}

// A weight pair is either [w1^2, w2^2] or {"w1": .., "w2": ..}.
std::optional<StageWeights> read_weight_pair(Reader& r, const json& j, const std::string& path) {
  std::optional<StageWeights> out;
  if (j.is_array()) {
    auto v = r.list<double>(j, path);
    if (!v) return std::nullopt;
    if (v->size() != 2) {
      r.fail(path, "expected [w1^2, w2^2]");
      return std::nullopt;
    }
    r.guard(path, [&] { out = StageWeights::from_squares((*v)[0], (*v)[1]); });
    return out;
  }
  if (!r.object(j, path, {"w1", "w2"})) return std::nullopt;
  auto w1 = r.req<double>(j, "w1", path);
  auto w2 = r.req<double>(j, "w2", path);
  if (!w1 || !w2) return std::nullopt;
  r.guard(path, [&] { out = StageWeights::from_squares(*w1 * *w1, *w2 * *w2); });
  return out;
}

SpendingFunction read_spending(Reader& r, const json& j, const std::string& path) {
  SpendingFunction fn = SpendingFunction::lan_demets_obf();
  if (j.is_string()) {
    r.guard(path, [&] {
      const auto kind = parse_spending_kind(j.get<std::string>());
      if (kind == SpendingKind::Tabulated) throw ConfigError("tabulated spending needs t and fraction");
      fn = kind == SpendingKind::LanDeMetsOBF ? SpendingFunction::lan_demets_obf()
                                              : SpendingFunction::lan_demets_pocock();
    });
    return fn;
  }
  if (!r.object(j, path, {"kind", "t", "fraction"})) return fn;
  auto t = j.contains("t") ? r.list<double>(j.at("t"), path + ".t") : std::nullopt;
  auto f = j.contains("fraction") ? r.list<double>(j.at("fraction"), path + ".fraction")
                                  : std::nullopt;
  if (!t || !f) {
    r.fail(path, "tabulated spending needs lists t and fraction");
    return fn;
  }
  r.guard(path, [&] { fn = SpendingFunction::tabulated(*t, *f); });
  return fn;
}

DesignSpec read_design(Reader& r, const json& j, const std::string& path) {
  DesignSpec d;
  if (!r.object(j, path,
                {"name", "kind", "alpha", "initial_alpha", "transitions", "spending", "fractions",
                 "analyses", "tested_at", "weights", "futility", "special_graph", "p_clamp",
                 "integration"})) {
    return d;
  }
  if (auto v = r.req<std::string>(j, "name", path)) d.name = *v;
  if (auto v = r.req<std::string>(j, "kind", path)) {
    r.guard(path + ".kind", [&] { d.kind = parse_design_kind(*v); });
  }
  if (auto v = r.opt<double>(j, "alpha", path)) d.alpha = *v;
  if (auto v = r.opt<int>(j, "analyses", path)) d.analyses = *v;
  if (auto v = r.opt<bool>(j, "special_graph", path)) d.special_graph = *v;
  if (auto v = r.opt<double>(j, "p_clamp", path)) d.p_clamp = *v;

  d.tested_at[endpoint_index(Endpoint::PFS)] = {1, 2};
  d.tested_at[endpoint_index(Endpoint::OS)] = {1, 2, 3};
  if (j.contains("tested_at")) {
    const auto& t = j.at("tested_at");
    const auto p = path + ".tested_at";
    if (r.object(t, p, {"PFS", "OS"})) {
      for (auto e : kEndpoints) {
        const auto key = to_string(e);
        if (!t.contains(key)) continue;
        if (auto v = r.list<int>(t.at(key), p + "." + key)) d.tested_at[endpoint_index(e)] = *v;
      }
    }
  }

  auto per_hypothesis = [&](const char* key, auto&& fn) {
    const auto p = path + "." + key;
    const auto& node = j.at(key);
    if (!r.object(node, p, {"F-OS", "F-PFS", "S-OS", "S-PFS"})) return;
    for (auto h : kHypotheses) {
      if (node.contains(h.label())) fn(h, node.at(h.label()), p + "." + h.label());
    }
  };

  if (!j.contains("initial_alpha")) {
    r.fail(path + ".initial_alpha", "required field is missing");
  } else {
    std::array<bool, HypothesisId::kCount> seen{};
    per_hypothesis("initial_alpha", [&](HypothesisId h, const json& v, const std::string& p) {
      if (auto a = r.value<double>(v, p)) d.initial_alpha[h.index()] = *a;
      seen[h.index()] = true;
    });
    for (auto h : kHypotheses) {
      if (!seen[h.index()] && j.at("initial_alpha").is_object()) {
        r.fail(path + ".initial_alpha." + h.label(), "required field is missing");
      }
    }
  }

  if (j.contains("transitions")) {
    d.transitions = {};
    per_hypothesis("transitions", [&](HypothesisId from, const json& row, const std::string& p) {
      if (!r.object(row, p, {"F-OS", "F-PFS", "S-OS", "S-PFS"})) return;
      for (auto to : kHypotheses) {
        if (auto g = r.opt<double>(row, to.label().c_str(), p)) {
          d.transitions[from.index()][to.index()] = *g;
        }
      }
    });
  }

  // "spending" is one function for every hypothesis or a per-hypothesis map.
  for (auto h : kHypotheses) d.plans[h.index()].spending = SpendingFunction::lan_demets_obf();
  if (j.contains("spending")) {
    const auto& s = j.at("spending");
    const auto p = path + ".spending";
    if (s.is_object() && (s.contains("F-OS") || s.contains("F-PFS") || s.contains("S-OS") ||
                          s.contains("S-PFS"))) {
      per_hypothesis("spending", [&](HypothesisId h, const json& v, const std::string& hp) {
        d.plans[h.index()].spending = read_spending(r, v, hp);
      });
    } else {
      const auto fn = read_spending(r, s, p);
      for (auto h : kHypotheses) d.plans[h.index()].spending = fn;
    }
  }

  if (!j.contains("fractions")) {
    r.fail(path + ".fractions", "required field is missing");
  } else {
    per_hypothesis("fractions", [&](HypothesisId h, const json& v, const std::string& p) {
      if (auto f = r.list<double>(v, p)) d.plans[h.index()].fractions = *f;
    });
  }

  const auto looks = [&](Endpoint e) { return d.tested_at[endpoint_index(e)].size(); };
  d.weights = WeightTable::uniform(StageWeights::from_squares(0.5, 0.5),
                                   StageWeights::from_squares(0.5, 0.5), looks(Endpoint::PFS),
                                   looks(Endpoint::OS));
  if (j.contains("weights")) {
    const auto& w = j.at("weights");
    const auto p = path + ".weights";
    if (r.object(w, p, {"PFS", "OS"})) {
      for (auto e : kEndpoints) {
        const auto key = to_string(e);
        if (!w.contains(key)) continue;
        const auto& node = w.at(key);
        const auto ep = p + "." + key;
        auto& out = d.weights.by_endpoint[endpoint_index(e)];
        // A single pair applies at every look; a list of pairs gives one per look.
        const bool single = node.is_object() ||
                            (node.is_array() && node.size() == 2 && node[0].is_number());
        if (single) {
          if (auto pair = read_weight_pair(r, node, ep)) out.assign(looks(e), *pair);
        } else if (node.is_array()) {
          out.clear();
          for (std::size_t i = 0; i < node.size(); ++i) {
            if (auto pair = read_weight_pair(r, node[i], ep + "[" + std::to_string(i) + "]")) {
              out.push_back(*pair);
            }
          }
        } else {
          r.fail(ep, "expected a weight pair or a list of pairs");
        }
      }
    }
  }

  if (j.contains("futility")) {
    const auto& f = j.at("futility");
    const auto p = path + ".futility";
    if (r.object(f, p, {"theta", "gamma", "assumed_hr", "events"})) {
      auto pair = [&](const char* key, double dflt) -> std::array<double, 2> {
        if (!f.contains(key)) return {dflt, dflt};
        const auto& node = f.at(key);
        const auto kp = p + "." + key;
        if (node.is_number()) return {node.get<double>(), node.get<double>()};
        if (!r.object(node, kp, {"F", "S"})) return {dflt, dflt};
        auto a = r.req<double>(node, "F", kp);
        auto b = r.req<double>(node, "S", kp);
        return {a.value_or(dflt), b.value_or(dflt)};
      };
      if (f.contains("theta")) {
        const auto th = pair("theta", 1.0);
        d.futility.theta_full = th[0];
        d.futility.theta_sub = th[1];
        for (const char* k : {"gamma", "assumed_hr", "events"}) {
          if (f.contains(k)) r.fail(p + "." + k, "not allowed together with theta");
        }
      } else if (f.contains("events")) {
        const auto g = pair("gamma", 0.05);
        const auto hr = pair("assumed_hr", 0.7);
        const auto ev = pair("events", 0.0);
        r.guard(p, [&] {
          d.futility = FutilityRule::calibrated(hr[0], ev[0], g[0], hr[1], ev[1], g[1]);
        });
      } else {
        r.fail(p, "give theta or events (with optional gamma and assumed_hr)");
      }
    }
  } else if (d.kind != DesignKind::GSD) {
    r.fail(path + ".futility", "required for AD and gGSD designs");
  }

  if (j.contains("integration")) {
    const auto& g = j.at("integration");
    const auto p = path + ".integration";
    if (r.object(g, p, {"nodes_per_look", "sd_span"})) {
      if (auto v = r.opt<long>(g, "nodes_per_look", p)) {
        if (*v < 3 || *v % 2 == 0) {
          r.fail(p + ".nodes_per_look", "must be odd and at least 3");
        } else {
          d.integration.nodes_per_look = static_cast<std::size_t>(*v);
        }
      }
      if (auto v = r.opt<double>(g, "sd_span", p)) d.integration.sd_span = *v;
    }
  }
  r.guard(path, [&] { d.validate(); });
  return d;
}

WeightSet read_weight_set(Reader& r, const json& j, const std::string& path) {
  if (j.is_string()) {
    if (j.get<std::string>() == "event-driven") return WeightSet::reference();
    r.fail(path, "unknown weight set '" + j.get<std::string>() + "'");
    return {};
  }
  WeightSet w;
  if (!r.object(j, path, {"name", "PFS", "OS"})) return w;
  auto pfs = j.contains("PFS") ? read_weight_pair(r, j.at("PFS"), path + ".PFS") : std::nullopt;
  auto os = j.contains("OS") ? read_weight_pair(r, j.at("OS"), path + ".OS") : std::nullopt;
  if (!j.contains("PFS")) r.fail(path + ".PFS", "required field is missing");
  if (!j.contains("OS")) r.fail(path + ".OS", "required field is missing");
  if (pfs && os) {
    w = WeightSet::fixed(pfs->w1 * pfs->w1, os->w1 * os->w1);
    w.pfs = *pfs;
    w.os = *os;
  }
  if (auto n = r.opt<std::string>(j, "name", path)) w.name = *n;
  return w;
}

TrialObservations read_observed(Reader& r, const json& j, const std::string& path) {
  TrialObservations obs;
  if (!r.object(j, path, {"hazard_ratio", "analyses"})) return obs;
  if (j.contains("hazard_ratio")) {
    const auto& h = j.at("hazard_ratio");
    const auto p = path + ".hazard_ratio";
    if (r.object(h, p, {"F", "S"})) {
      obs.hr_full = r.req<double>(h, "F", p);
      obs.hr_sub = r.req<double>(h, "S", p);
    }
  }
  if (!j.contains("analyses") || !j.at("analyses").is_array()) {
    r.fail(path + ".analyses", "expected a list of analyses");
    return obs;
  }
  const auto& list = j.at("analyses");
  for (std::size_t k = 0; k < list.size(); ++k) {
    const auto p = path + ".analyses[" + std::to_string(k) + "]";
    AnalysisObservation a;
    if (r.object(list[k], p, {"PFS", "OS"})) {
      for (auto e : kEndpoints) {
        const auto ek = to_string(e);
        if (!list[k].contains(ek)) continue;
        const auto& en = list[k].at(ek);
        const auto ep = p + "." + ek;
        if (!r.object(en, ep, {"F", "S", "FS"})) continue;
        for (auto t : kTestTargets) {
          const auto tk = to_string(t);
          if (!en.contains(tk)) continue;
          const auto& sn = en.at(tk);
          const auto sp = ep + "." + tk;
          if (!r.object(sn, sp, {"pooled", "stage1", "stage2", "combined"})) continue;
          auto& slot = a.slot(e, t);
          for (auto [key, field] : {std::pair{"pooled", &slot.pooled},
                                    std::pair{"stage1", &slot.stage1},
                                    std::pair{"stage2", &slot.stage2},
                                    std::pair{"combined", &slot.combined}}) {
            if (auto v = r.opt<double>(sn, key, sp)) {
              if (!(*v >= 0.0 && *v <= 1.0)) {
                r.fail(sp + "." + key, "p-value must lie in [0, 1]");
              } else {
                *field = *v;
              }
            }
          }
        }
      }
    }
    obs.analyses.push_back(a);
  }
  return obs;
}

}  // namespace

ConfigErrors::ConfigErrors(std::vector<std::string> errors)
    : ConfigError(join(errors)), errors_(std::move(errors)) {}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigErrors({origin + ": syntax error: " + e.what()});
  }
  Reader r;
  RunConfig cfg;
  cfg.source_path = origin;
  cfg.source_text = text;
  if (!r.object(root, "$",
                {"settings", "designs", "weight_sets", "simulation", "observed", "thresholds",
                 "output"})) {
    throw ConfigErrors(r.errors);
  }

  auto each = [&](const char* key, auto&& fn) {
    if (!root.contains(key)) return;
    const auto& arr = root.at(key);
    const std::string p = std::string("$.") + key;
    if (!arr.is_array()) {
      r.fail(p, "expected a list");
      return;
    }
    for (std::size_t i = 0; i < arr.size(); ++i) fn(arr[i], p + "[" + std::to_string(i) + "]");
  };
  each("settings", [&](const json& j, const std::string& p) {
    cfg.settings.push_back(read_setting(r, j, p));
  });
  each("designs", [&](const json& j, const std::string& p) {
    cfg.designs.push_back(read_design(r, j, p));
  });
  each("weight_sets", [&](const json& j, const std::string& p) {
    cfg.weight_sets.push_back(read_weight_set(r, j, p));
  });
  each("thresholds", [&](const json& j, const std::string& p) {
    ThresholdQuery q;
    if (r.object(j, p, {"hr", "events", "gamma"})) {
      if (auto v = r.req<double>(j, "hr", p)) q.hr = *v;
      if (auto v = r.req<double>(j, "events", p)) q.events = *v;
      if (auto v = r.opt<double>(j, "gamma", p)) q.gamma = *v;
    }
    cfg.thresholds.push_back(q);
  });

  std::set<std::string> names;
  for (std::size_t i = 0; i < cfg.designs.size(); ++i) {
    if (!names.insert(cfg.designs[i].name).second) {
      r.fail("$.designs[" + std::to_string(i) + "].name", "duplicate design name");
    }
  }
  names.clear();
  for (std::size_t i = 0; i < cfg.weight_sets.size(); ++i) {
    if (!names.insert(cfg.weight_sets[i].name).second) {
      r.fail("$.weight_sets[" + std::to_string(i) + "]", "duplicate weight set");
    }
  }

  if (root.contains("simulation")) {
    const auto& s = root.at("simulation");
    if (r.object(s, "$.simulation", {"reps", "seed", "threads", "power_rule"})) {
      if (auto v = r.opt<long>(s, "reps", "$.simulation")) {
        if (*v < 1) r.fail("$.simulation.reps", "must be at least 1");
        cfg.reps = *v;
      }
      if (auto v = r.opt<std::uint64_t>(s, "seed", "$.simulation")) cfg.seed = *v;
      if (auto v = r.opt<int>(s, "threads", "$.simulation")) {
        if (*v < 1) r.fail("$.simulation.threads", "must be at least 1");
        cfg.threads = *v;
      }
      if (auto v = r.opt<std::string>(s, "power_rule", "$.simulation")) {
        r.guard("$.simulation.power_rule",
                [&] { cfg.power.within_population = parse_power_rule(*v); });
      }
    }
  }
  if (root.contains("observed")) cfg.observed = read_observed(r, root.at("observed"), "$.observed");
  if (root.contains("output")) {
    const auto& o = root.at("output");
    if (r.object(o, "$.output", {"dir"})) {
      if (auto v = r.opt<std::string>(o, "dir", "$.output")) cfg.output_dir = *v;
    }
  }
  if (!r.errors.empty()) throw ConfigErrors(r.errors);
  return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigErrors({path.string() + ": cannot open file"});
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.string());
}

}  // namespace ggsd
