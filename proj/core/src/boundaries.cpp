#include "ggsd/boundaries.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "ggsd/errors.hpp"
#include "ggsd/numerics.hpp"

namespace ggsd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxNodes = 20001;

void validate_fractions(std::span<const double> fractions) {
  if (fractions.empty()) throw DomainError("boundaries: at least one look is required");
  double prev = 0.0;
  for (double t : fractions) {
    if (!(t > prev) || t > 1.0) {
      std::ostringstream os;
      os << "boundaries: information fractions must be strictly increasing in (0, 1]; got "
         << t << " after " << prev;
      throw DomainError(os.str());
    }
    prev = t;
  }
}

// Sub-density of the score statistic S_k = Z_k * sqrt(t_k) on the continuation
// region, propagated look by look. Increments S_k - S_{k-1} ~ N(0, t_k - t_{k-1}).
class ScorePropagator {
 public:
  ScorePropagator(std::span<const double> fractions, const IntegrationOptions& opts)
      : t_(fractions.begin(), fractions.end()), opts_(opts) {}

  std::size_t look() const noexcept { return look_; }

  // Probability of first crossing at the current look for boundary c.
  double crossing(double c) const {
    if (c == kInf) return 0.0;
    const double tk = t_[look_];
    if (look_ == 0) return norm_sf(c);
    const double sd = std::sqrt(tk - t_[look_ - 1]);
    const double b = c * std::sqrt(tk);
    double acc = 0.0;
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      acc += mass_[i] * norm_sf((b - grid_.points[i]) / sd);
    }
    return acc;
  }

  // Fixes the boundary at the current look and moves the density forward.
  void advance(double c) {
    const double tk = t_[look_];
    const double sqrt_t = std::sqrt(tk);
    const double lo = -opts_.sd_span * sqrt_t;
    const double hi = std::min(c == kInf ? kInf : c * sqrt_t, opts_.sd_span * sqrt_t);

    if (!(hi > lo) || (look_ > 0 && empty_)) {
      empty_ = true;
      grid_ = {};
      mass_.clear();
      ++look_;
      return;
    }

    Grid next = simpson_grid(lo, hi, node_count(hi - lo));
    std::vector<double> next_mass(next.size());
    if (look_ == 0) {
      for (std::size_t j = 0; j < next.size(); ++j) {
        next_mass[j] = next.weights[j] * norm_pdf(next.points[j] / sqrt_t) / sqrt_t;
      }
    } else {
      const double sd = std::sqrt(tk - t_[look_ - 1]);
      for (std::size_t j = 0; j < next.size(); ++j) {
        double dens = 0.0;
        for (std::size_t i = 0; i < grid_.size(); ++i) {
          dens += mass_[i] * norm_pdf((next.points[j] - grid_.points[i]) / sd);
        }
        next_mass[j] = next.weights[j] * dens / sd;
      }
    }
    grid_ = std::move(next);
    mass_ = std::move(next_mass);
    ++look_;
  }

 private:
  // Node spacing must resolve the narrower of the increments on either side.
  std::size_t node_count(double width) const {
    double step = width / static_cast<double>(opts_.nodes_per_look - 1);
    for (std::size_t k : {look_, look_ + 1}) {
      if (k == 0 || k >= t_.size()) continue;
      step = std::min(step, std::sqrt(t_[k] - t_[k - 1]) / 8.0);
    }
    const auto n = static_cast<std::size_t>(std::ceil(width / step)) + 1;
    return std::clamp(n, opts_.nodes_per_look, kMaxNodes);
  }

  std::vector<double> t_;
  IntegrationOptions opts_;
  std::size_t look_ = 0;
  Grid grid_;
  std::vector<double> mass_;  // weight_i * density_i
  bool empty_ = false;
};

}  // namespace

SpendingFunction SpendingFunction::tabulated(std::vector<double> t,
                                             std::vector<double> fraction) {
  if (t.size() != fraction.size() || t.empty()) {
    throw DomainError("tabulated spending: knot vectors must be nonempty and equal length");
  }
  double prev_t = 0.0;
  double prev_f = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] > prev_t) || t[i] > 1.0) {
      throw DomainError("tabulated spending: knots must be strictly increasing in (0, 1]");
    }
    if (fraction[i] < prev_f || fraction[i] > 1.0) {
      throw SpendingError("tabulated spending: spent fraction must be nondecreasing in [0, 1]");
    }
    prev_t = t[i];
    prev_f = fraction[i];
  }
  if (t.back() != 1.0 || fraction.back() != 1.0) {
    throw DomainError("tabulated spending: the last knot must be (1, 1)");
  }
  return {SpendingKind::Tabulated, std::move(t), std::move(fraction)};
}

std::string to_string(SpendingKind kind) {
  switch (kind) {
    case SpendingKind::LanDeMetsOBF: return "LDOBF";
    case SpendingKind::LanDeMetsPocock: return "LDPocock";
    case SpendingKind::Tabulated: return "tabulated";
  }
  return "?";
}

SpendingKind parse_spending_kind(const std::string& name) {
  if (name == "LDOBF") return SpendingKind::LanDeMetsOBF;
  if (name == "LDPocock") return SpendingKind::LanDeMetsPocock;
  if (name == "tabulated") return SpendingKind::Tabulated;
  throw DomainError("unknown spending function '" + name +
                    "' (expected LDOBF, LDPocock or tabulated)");
}

double spend(const SpendingFunction& fn, double alpha_total, double t) {
  if (!(t > 0.0)) throw DomainError("spend: information fraction must be positive");
  if (!(alpha_total > 0.0 && alpha_total < 0.5)) {
    throw DomainError("spend: alpha_total must lie in (0, 0.5)");
  }
  t = std::min(t, 1.0);
  switch (fn.kind) {
    case SpendingKind::LanDeMetsOBF:
      if (t == 1.0) return alpha_total;
      return 2.0 * norm_sf(norm_quantile(1.0 - alpha_total / 2.0) / std::sqrt(t));
    case SpendingKind::LanDeMetsPocock:
      return alpha_total * std::log1p((std::numbers::e - 1.0) * t);
    case SpendingKind::Tabulated: {
      double prev_t = 0.0;
      double prev_f = 0.0;
      for (std::size_t i = 0; i < fn.table_t.size(); ++i) {
        if (t <= fn.table_t[i]) {
          const double w = (t - prev_t) / (fn.table_t[i] - prev_t);
          return alpha_total * (prev_f + w * (fn.table_fraction[i] - prev_f));
        }
        prev_t = fn.table_t[i];
        prev_f = fn.table_fraction[i];
      }
      return alpha_total;
    }
  }
  return alpha_total;
}

BoundarySet make_boundary_set(std::vector<double> fractions, std::vector<double> z_bounds,
                              double alpha_total) {
  validate_fractions(fractions);
  if (fractions.size() != z_bounds.size()) {
    throw DomainError("boundaries: fractions and z_bounds differ in length");
  }
  BoundarySet out;
  out.nominal_p.reserve(z_bounds.size());
  for (double c : z_bounds) out.nominal_p.push_back(c == kInf ? 0.0 : norm_sf(c));
  out.fractions = std::move(fractions);
  out.z_bounds = std::move(z_bounds);
  out.alpha_total = alpha_total;
  return out;
}

BoundarySet compute_boundaries(double alpha_total, std::span<const double> fractions,
                               const SpendingFunction& fn, const IntegrationOptions& opts) {
  validate_fractions(fractions);
  ScorePropagator prop(fractions, opts);
  std::vector<double> z(fractions.size());
  double spent = 0.0;
  for (std::size_t k = 0; k < fractions.size(); ++k) {
    const double cumulative = k + 1 == fractions.size() && fractions[k] == 1.0
                                  ? alpha_total
                                  : spend(fn, alpha_total, fractions[k]);
    const double increment = cumulative - spent;
    if (increment < -1e-15) {
      std::ostringstream os;
      os << "boundaries: negative alpha increment " << increment << " at look " << k + 1;
      throw SpendingError(os.str());
    }
    if (increment <= 1e-15) {
      z[k] = kInf;
    } else {
      z[k] = find_root([&](double c) { return prop.crossing(c) - increment; }, -10.0, 40.0,
                       kRootTolerance);
    }
    prop.advance(z[k]);
    spent = std::max(spent, cumulative);
  }
  return make_boundary_set({fractions.begin(), fractions.end()}, std::move(z), alpha_total);
}

double crossing_probability(const BoundarySet& bounds, const IntegrationOptions& opts) {
  validate_fractions(bounds.fractions);
  ScorePropagator prop(bounds.fractions, opts);
  double total = 0.0;
  for (double c : bounds.z_bounds) {
    total += prop.crossing(c);
    prop.advance(c);
  }
  return total;
}

}  // namespace ggsd
