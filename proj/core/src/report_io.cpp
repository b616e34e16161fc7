#include "ggsd/report_io.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>
#include <openssl/evp.h>
#include <unistd.h>

#include "ggsd/errors.hpp"

namespace ggsd {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

void atomic_write(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw DataError("write failed for " + tmp.string());
    }
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string git_blob_sha1(const std::string& content) {
  const std::string header = "blob " + std::to_string(content.size()) + '\0';
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  const bool ok = ctx != nullptr && EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, header.data(), header.size()) == 1 &&
                  EVP_DigestUpdate(ctx, content.data(), content.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, digest, &len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw Error("SHA-1 digest failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) {
    os << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  }
  return os.str();
}

namespace {

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json alphas_json(const AlphaVector& a) {
  json j = json::object();
  for (auto h : kHypotheses) j[h.label()] = a[h.index()];
  return j;
}

}  // namespace

std::string trace_to_json(const DecisionTrace& trace) {
  json j;
  j["design"] = trace.design_name;
  j["kind"] = to_string(trace.kind);
  if (trace.selection) {
    j["futility"] = {{"hr_full", trace.selection->hr_full},
                     {"hr_sub", trace.selection->hr_sub},
                     {"decision", to_string(trace.selection->decision)}};
  } else {
    j["futility"] = nullptr;
  }
  j["scenario"] = trace.scenario ? json(to_string(*trace.scenario)) : json(nullptr);
  json scope = json::array();
  for (auto h : kHypotheses) {
    if (trace.in_scope[h.index()]) scope.push_back(h.label());
  }
  j["in_scope"] = scope;
  j["initial_alpha"] = alphas_json(trace.initial_alpha);
  json analyses = json::array();
  for (const auto& a : trace.analyses) {
    json aj;
    aj["index"] = a.index;
    aj["name"] = a.name;
    aj["alpha_before"] = alphas_json(a.alpha_before);
    aj["alpha_after"] = alphas_json(a.alpha_after);
    json tests = json::array();
    for (const auto& t : a.tests) {
      tests.push_back({{"test", t.label()},
                       {"look", t.look},
                       {"z", number_or_null(t.z)},
                       {"boundary", number_or_null(t.boundary)},
                       {"alpha", t.alpha},
                       {"crossed", t.crossed},
                       {"confirmed", t.confirmed},
                       {"gated", t.gated},
                       {"clamped", t.clamped}});
    }
    aj["tests"] = tests;
    aj["notes"] = a.notes;
    analyses.push_back(aj);
  }
  j["analyses"] = analyses;
  json rejected = json::object();
  for (auto h : kHypotheses) {
    const int at = trace.rejected_at[h.index()];
    rejected[h.label()] = at > 0 ? json(analysis_name(at, trace.planned_analyses)) : json(nullptr);
  }
  j["rejected_at"] = rejected;
  j["termination"] = {{"analysis", analysis_name(trace.termination_analysis, trace.planned_analyses)},
                      {"reason", to_string(trace.termination)}};
  j["warnings"] = trace.warnings;
  return j.dump(2) + "\n";
}

std::vector<BoundaryRow> design_boundaries(const DesignSpec& design) {
  std::vector<BoundaryRow> rows;
  for (auto h : kHypotheses) {
    const double alpha = design.initial_alpha[h.index()];
    if (!(alpha > 0.0)) continue;
    const auto& plan = design.plan(h);
    const auto b = compute_boundaries(alpha, plan.fractions, plan.spending, design.integration);
    const auto& at = design.tested_at[endpoint_index(h.endpoint)];
    for (std::size_t k = 0; k < b.looks(); ++k) {
      rows.push_back({design.name, h.label(), alpha, static_cast<int>(k + 1), at[k],
                      b.fractions[k], b.z_bounds[k], b.nominal_p[k],
                      spend(plan.spending, alpha, b.fractions[k])});
    }
  }
  return rows;
}

std::string boundaries_csv(const std::vector<BoundaryRow>& rows) {
  std::ostringstream os;
  os << "design,hypothesis,alpha,look,analysis,fraction,z,nominal_p,cumulative_spend\n";
  os << std::setprecision(10);
  for (const auto& r : rows) {
    os << r.design << "," << r.hypothesis << "," << r.alpha << "," << r.look << "," << r.analysis
       << "," << r.fraction << "," << r.z << "," << r.nominal_p << "," << r.cumulative_spend
       << "\n";
  }
  return os.str();
}

std::string manifest_json(const Manifest& m) {
  json j;
  j["tool"] = "ggsd";
  j["command"] = m.command;
  j["config"] = {{"path", m.config_path},
                 {"sha1", git_blob_sha1(m.config_text)},
                 {"text", m.config_text}};
  j["seed"] = m.seed;
  j["reps"] = m.reps;
  j["threads"] = m.threads;
  json outs = json::array();
  for (const auto& o : m.outputs) outs.push_back({{"file", o.file}, {"sha1", o.sha1}});
  j["outputs"] = outs;
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::ostringstream ts;
  ts << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ");
  j["created_utc"] = ts.str();
  return j.dump(2) + "\n";
}

void write_outputs(const fs::path& dir, const std::vector<std::pair<std::string, std::string>>& files,
                   Manifest manifest) {
  fs::create_directories(dir);
  for (const auto& [name, content] : files) {
    atomic_write(dir / name, content);
    manifest.outputs.push_back({name, git_blob_sha1(content)});
  }
  atomic_write(dir / "manifest.json", manifest_json(manifest));
}

SummaryTables read_summary_tables(const fs::path& dir) {
  return {read_file(dir / "fwer.csv"), read_file(dir / "power.csv"),
          read_file(dir / "termination.csv")};
}

}  // namespace ggsd
