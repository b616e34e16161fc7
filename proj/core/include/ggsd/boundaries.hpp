#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace ggsd {

enum class SpendingKind {
  LanDeMetsOBF,     ///< 2 * (1 - Phi(Phi^-1(1 - a/2) / sqrt(t)))
  LanDeMetsPocock,  ///< a * log(1 + (e - 1) t)
  Tabulated,        ///< piecewise-linear cumulative fraction of alpha
};

/// Cumulative alpha spending function s(t; alpha).
///
/// For `Tabulated`, `table_t` and `table_fraction` give knots of the spent
/// fraction s(t) / alpha; the curve is linear between knots, starts at (0, 0)
/// and must reach 1 at t = 1.
struct SpendingFunction {
  SpendingKind kind = SpendingKind::LanDeMetsOBF;
  std::vector<double> table_t;
  std::vector<double> table_fraction;

  static SpendingFunction lan_demets_obf() { return {}; }
  static SpendingFunction lan_demets_pocock() {
    return {SpendingKind::LanDeMetsPocock, {}, {}};
  }
  static SpendingFunction tabulated(std::vector<double> t, std::vector<double> fraction);

  friend bool operator==(const SpendingFunction&, const SpendingFunction&) = default;
};

std::string to_string(SpendingKind kind);
SpendingKind parse_spending_kind(const std::string& name);

/// Cumulative alpha spent at information fraction t in (0, 1].
double spend(const SpendingFunction& fn, double alpha_total, double t);

/// Group-sequential efficacy boundaries for one hypothesis.
struct BoundarySet {
  std::vector<double> fractions;  ///< t_1 < ... < t_K, t_K <= 1
  std::vector<double> z_bounds;   ///< c_k; +inf means the look can never reject
  std::vector<double> nominal_p;  ///< 1 - Phi(c_k)
  double alpha_total = 0.0;

  std::size_t looks() const noexcept { return z_bounds.size(); }
};

/// Quadrature resolution for the recursive density propagation.
struct IntegrationOptions {
  std::size_t nodes_per_look = 401;
  double sd_span = 8.0;  ///< grid half-width in standard deviations
};

/// Solves c_1..c_K so that, under the canonical joint normal null with
/// Cov(Z_i, Z_j) = sqrt(t_i / t_j), the probability of first crossing at look k
/// equals s(t_k) - s(t_{k-1}).
BoundarySet compute_boundaries(double alpha_total, std::span<const double> fractions,
                               const SpendingFunction& fn,
                               const IntegrationOptions& opts = {});

/// P(Z_k >= c_k for some k) under the null for the supplied bounds.
double crossing_probability(const BoundarySet& bounds,
                            const IntegrationOptions& opts = {});

/// Builds a BoundarySet from explicit z boundaries (nominal_p filled in).
BoundarySet make_boundary_set(std::vector<double> fractions, std::vector<double> z_bounds,
                              double alpha_total);

}  // namespace ggsd
