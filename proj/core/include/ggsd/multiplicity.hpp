#pragma once

#include <array>
#include <bitset>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace ggsd {

enum class Population { Full, Sub };
enum class Endpoint { PFS, OS };

inline constexpr std::array<Population, 2> kPopulations{Population::Full, Population::Sub};
inline constexpr std::array<Endpoint, 2> kEndpoints{Endpoint::PFS, Endpoint::OS};

std::string to_string(Population p);
std::string to_string(Endpoint e);
Population parse_population(const std::string& s);
Endpoint parse_endpoint(const std::string& s);

/// One of the four elementary null hypotheses H0^{population, endpoint}.
struct HypothesisId {
  Population population = Population::Full;
  Endpoint endpoint = Endpoint::PFS;

  static constexpr std::size_t kCount = 4;

  /// Dense index: F-OS 0, F-PFS 1, S-OS 2, S-PFS 3 (alpha_1..alpha_4 order).
  constexpr std::size_t index() const noexcept {
    return (population == Population::Full ? 0 : 2) + (endpoint == Endpoint::OS ? 0 : 1);
  }
  static constexpr HypothesisId from_index(std::size_t i) noexcept {
    return {i < 2 ? Population::Full : Population::Sub,
            i % 2 == 0 ? Endpoint::OS : Endpoint::PFS};
  }
  /// "F-OS", "S-PFS", ...
  std::string label() const;
  static HypothesisId parse(const std::string& label);

  friend constexpr bool operator==(HypothesisId, HypothesisId) = default;
};

inline constexpr std::array<HypothesisId, 4> kHypotheses{
    HypothesisId::from_index(0), HypothesisId::from_index(1), HypothesisId::from_index(2),
    HypothesisId::from_index(3)};

using AlphaVector = std::array<double, HypothesisId::kCount>;
using TransitionMatrix = std::array<AlphaVector, HypothesisId::kCount>;

/// Maurer-Bretz graph over the four hypotheses. Updated by value.
struct HypothesisGraph {
  AlphaVector alphas{};
  TransitionMatrix transitions{};  ///< transitions[from][to]
  std::bitset<HypothesisId::kCount> rejected;

  double alpha(HypothesisId h) const { return alphas[h.index()]; }
  bool is_rejected(HypothesisId h) const { return rejected.test(h.index()); }
  double total_alpha() const;

  /// Throws ConfigError when the graph invariants do not hold.
  void validate(double overall_alpha) const;
};

/// Graph with PFS <-> OS edges of weight 1 inside each population and no
/// cross-population edges.
TransitionMatrix within_population_transitions();

/// Rejects `h` and propagates its alpha along the outgoing edges, updating the
/// remaining transition weights with the standard graphical algebra.
/// Throws StateError if `h` is already rejected.
HypothesisGraph graph_reject(const HypothesisGraph& graph, HypothesisId h);

/// Two-hypothesis equally weighted Hochberg intersection p-value,
/// min(2 min(pF, pS), max(pF, pS)).
double hochberg_intersection(double p_full, double p_sub);

/// Minimum of the supplied boundaries. Throws DomainError on an empty set.
double intersection_boundary(std::span<const double> z_bounds);

/// Population intersection family for one endpoint.
struct ClosedFamily {
  Endpoint endpoint = Endpoint::PFS;
  bool intersection_rejected = false;
};

struct ElementaryCrossing {
  bool full = false;
  bool sub = false;
};

/// Elementary rejections allowed by closure: a crossed elementary hypothesis is
/// confirmed only when the F-S intersection of its family is rejected.
ElementaryCrossing closed_test_gate(const ClosedFamily& family, bool intersection_rejected,
                                    ElementaryCrossing crossed);

}  // namespace ggsd
