#include "ggsd/multiplicity.hpp"

#include <algorithm>
#include <sstream>

#include "ggsd/errors.hpp"

namespace ggsd {

std::string to_string(Population p) { return p == Population::Full ? "F" : "S"; }
std::string to_string(Endpoint e) { return e == Endpoint::PFS ? "PFS" : "OS"; }

Population parse_population(const std::string& s) {
  if (s == "F" || s == "full" || s == "Full") return Population::Full;
  if (s == "S" || s == "sub" || s == "Sub") return Population::Sub;
  throw DomainError("unknown population '" + s + "'");
}

Endpoint parse_endpoint(const std::string& s) {
  if (s == "PFS") return Endpoint::PFS;
  if (s == "OS") return Endpoint::OS;
  throw DomainError("unknown endpoint '" + s + "'");
}

std::string HypothesisId::label() const {
  return to_string(population) + "-" + to_string(endpoint);
}

HypothesisId HypothesisId::parse(const std::string& label) {
  const auto dash = label.find('-');
  if (dash == std::string::npos) throw DomainError("bad hypothesis label '" + label + "'");
  return {parse_population(label.substr(0, dash)), parse_endpoint(label.substr(dash + 1))};
}

double HypothesisGraph::total_alpha() const {
  double total = 0.0;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (!rejected.test(i)) total += alphas[i];
  }
  return total;
}

void HypothesisGraph::validate(double overall_alpha) const {
  std::ostringstream err;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const auto label = HypothesisId::from_index(i).label();
    if (alphas[i] < 0.0) err << "alpha[" << label << "] is negative; ";
    if (rejected.test(i) && alphas[i] != 0.0) err << label << " rejected but carries alpha; ";
    double out = 0.0;
    for (std::size_t j = 0; j < alphas.size(); ++j) {
      const double g = transitions[i][j];
      if (g < 0.0 || g > 1.0) err << "transition " << label << " weight outside [0, 1]; ";
      if (i == j && g != 0.0) err << "self-loop on " << label << "; ";
      out += g;
    }
    if (out > 1.0 + 1e-12) err << "outgoing weights of " << label << " exceed 1; ";
  }
  if (total_alpha() > overall_alpha + 1e-12) err << "total alpha exceeds overall level; ";
  if (!err.str().empty()) throw ConfigError("hypothesis graph: " + err.str());
}

TransitionMatrix within_population_transitions() {
  TransitionMatrix g{};
  for (auto pop : kPopulations) {
    const auto pfs = HypothesisId{pop, Endpoint::PFS}.index();
    const auto os = HypothesisId{pop, Endpoint::OS}.index();
    g[pfs][os] = 1.0;
    g[os][pfs] = 1.0;
  }
  return g;
}

HypothesisGraph graph_reject(const HypothesisGraph& graph, HypothesisId h) {
  const std::size_t j = h.index();
  if (graph.rejected.test(j)) {
    throw StateError("graph_reject: " + h.label() + " is already rejected");
  }
  constexpr std::size_t n = HypothesisId::kCount;
  HypothesisGraph next = graph;
  for (std::size_t l = 0; l < n; ++l) {
    if (l == j || graph.rejected.test(l)) continue;
    next.alphas[l] = graph.alphas[l] + graph.alphas[j] * graph.transitions[j][l];
  }
  for (std::size_t l = 0; l < n; ++l) {
    for (std::size_t k = 0; k < n; ++k) {
      if (l == j || k == j || l == k || graph.rejected.test(l) || graph.rejected.test(k)) {
        next.transitions[l][k] = 0.0;
        continue;
      }
      const double loop = graph.transitions[l][j] * graph.transitions[j][l];
      next.transitions[l][k] =
          loop < 1.0 ? (graph.transitions[l][k] + graph.transitions[l][j] * graph.transitions[j][k]) /
                           (1.0 - loop)
                     : 0.0;
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    next.transitions[j][k] = 0.0;
    next.transitions[k][j] = 0.0;
  }
  next.alphas[j] = 0.0;
  next.rejected.set(j);
  return next;
}

double hochberg_intersection(double p_full, double p_sub) {
  const double lo = std::min(p_full, p_sub);
  const double hi = std::max(p_full, p_sub);
  return std::min(2.0 * lo, hi);
}

double intersection_boundary(std::span<const double> z_bounds) {
  if (z_bounds.empty()) throw DomainError("intersection_boundary: empty boundary set");
  return *std::min_element(z_bounds.begin(), z_bounds.end());
}

ElementaryCrossing closed_test_gate(const ClosedFamily& family, bool intersection_rejected,
                                    ElementaryCrossing crossed) {
  const bool closed = family.intersection_rejected || intersection_rejected;
  if (!closed) return {};
  return crossed;
}

}  // namespace ggsd
