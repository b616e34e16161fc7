#pragma once

#include <functional>
#include <vector>

namespace ggsd {

inline constexpr double kRootTolerance = 1e-10;

double norm_pdf(double x) noexcept;

/// Standard normal CDF. Saturates to exactly 0 or 1 far in the tails.
double norm_cdf(double x) noexcept;

/// Upper tail 1 - norm_cdf(x), computed without cancellation.
double norm_sf(double x) noexcept;

/// Inverse of norm_cdf on (0, 1). Throws DomainError outside the open interval.
double norm_quantile(double p);

/// Root of f on [lo, hi] using Brent's method (bisection with inverse
/// quadratic / secant steps). Requires f(lo) * f(hi) <= 0; throws BracketError
/// otherwise. Terminates once the bracket is narrower than `tol`.
double find_root(const std::function<double(double)>& f, double lo, double hi,
                 double tol = kRootTolerance);

/// Quadrature grid: abscissae with matching weights over [lo, hi].
struct Grid {
  std::vector<double> points;
  std::vector<double> weights;
  double lo = 0.0;
  double hi = 0.0;

  std::size_t size() const noexcept { return points.size(); }
};

/// Composite Simpson grid with `nodes` points (rounded up to the next odd
/// number, minimum 3) over [lo, hi]. Requires lo < hi.
Grid simpson_grid(double lo, double hi, std::size_t nodes);

}  // namespace ggsd
