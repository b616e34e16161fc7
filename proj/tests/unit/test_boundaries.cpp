#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "ggsd/boundaries.hpp"
#include "ggsd/errors.hpp"
#include "ggsd/numerics.hpp"
#include "oracles/grid_boundary.hpp"
#include "oracles/hp_normal.hpp"

using namespace ggsd;

namespace {
const auto obf = SpendingFunction::lan_demets_obf();
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

TEST_SUITE("boundaries") {

TEST_CASE("LDOBF spending") {
  CHECK(spend(obf, 0.025, 1.0) == doctest::Approx(0.025).epsilon(1e-14));
  // closed form with the 50-digit normal
  const double z = oracle::norm_quantile(1.0 - 0.0125);
  const double ref = 2.0 * (1.0 - oracle::norm_cdf(z / std::sqrt(0.5)));
  CHECK(std::abs(spend(obf, 0.025, 0.5) - ref) < 1e-12);
  CHECK(std::abs(spend(obf, 0.025, 0.5) - 0.001525) < 2e-6);
  CHECK(spend(obf, 0.025, 1e-6) < 1e-300);
  CHECK_THROWS_AS(spend(obf, 0.025, 0.0), DomainError);
  CHECK_THROWS_AS(spend(obf, 0.025, -0.1), DomainError);
}

TEST_CASE("spending functions are nondecreasing and reach alpha") {
  for (const auto& fn : {obf, SpendingFunction::lan_demets_pocock(),
                         SpendingFunction::tabulated({0.3, 0.7, 1.0}, {0.1, 0.5, 1.0})}) {
    double prev = 0.0;
    for (double t = 0.01; t <= 1.0 + 1e-12; t += 0.01) {
      const double s = spend(fn, 0.02, std::min(t, 1.0));
      CHECK(s >= prev - 1e-15);
      prev = s;
    }
    CHECK(spend(fn, 0.02, 1.0) == doctest::Approx(0.02));
  }
  // linear between knots, through the origin
  const auto tab = SpendingFunction::tabulated({0.5, 1.0}, {0.2, 1.0});
  CHECK(spend(tab, 0.01, 0.25) == doctest::Approx(0.001));
  CHECK(spend(tab, 0.01, 0.75) == doctest::Approx(0.006));
}

TEST_CASE("single look equals the fixed design") {
  const std::vector<double> t{1.0};
  const auto b = compute_boundaries(0.025, t, obf);
  REQUIRE(b.looks() == 1);
  CHECK(std::abs(b.z_bounds[0] - 1.959964) < 1e-6);
  CHECK(b.nominal_p[0] == doctest::Approx(0.025).epsilon(1e-9));
}

TEST_CASE("two equal looks against the fine-grid oracle") {
  const std::vector<double> t{0.5, 1.0};
  const auto b = compute_boundaries(0.025, t, obf);
  const auto ref = oracle::grid_boundaries(0.025, t);
  REQUIRE(b.looks() == 2);
  CHECK(std::abs(b.z_bounds[0] - 2.963) < 2e-3);
  CHECK(std::abs(b.z_bounds[1] - 1.969) < 2e-3);
  CHECK(std::abs(b.z_bounds[0] - ref.z[0]) < 1e-4);
  CHECK(std::abs(b.z_bounds[1] - ref.z[1]) < 1e-4);
}

TEST_CASE("three unequal looks against the fine-grid oracle") {
  const std::vector<double> t{0.66, 0.91, 1.0};
  const auto b = compute_boundaries(0.01458, t, obf);
  const auto ref = oracle::grid_boundaries(0.01458, t);
  for (std::size_t k = 0; k < t.size(); ++k) CHECK(std::abs(b.z_bounds[k] - ref.z[k]) < 1e-4);
}

TEST_CASE("subgroup PFS nominal level at the first look") {
  // Reference nominal level 0.0036 for alpha 0.00835 at about 89% information.
  const std::vector<double> t{0.89, 1.0};
  const auto b = compute_boundaries(0.00835, t, obf);
  CHECK(std::abs(b.nominal_p[0] - 0.0036) <= 0.002);
}

TEST_CASE("nominal_p matches the boundaries") {
  const std::vector<double> t{0.3, 0.6, 1.0};
  const auto b = compute_boundaries(0.02, t, obf);
  for (std::size_t k = 0; k < b.looks(); ++k) {
    CHECK(b.nominal_p[k] == doctest::Approx(1.0 - norm_cdf(b.z_bounds[k])).epsilon(1e-12));
  }
}

TEST_CASE("crossing probability") {
  CHECK(std::abs(crossing_probability(make_boundary_set({1.0}, {1.959964}, 0.025)) - 0.025) <
        1e-6);
  CHECK(std::abs(crossing_probability(make_boundary_set({0.5, 1.0}, {kInf, 1.959964}, 0.025)) -
                 0.025) < 1e-6);
  const std::vector<double> t{0.5, 1.0};
  CHECK(std::abs(crossing_probability(compute_boundaries(0.025, t, obf)) - 0.025) < 1e-5);
}

TEST_CASE("incremental crossing equals spent alpha") {
  const std::vector<double> t{0.25, 0.5, 0.8, 1.0};
  const auto b = compute_boundaries(0.03, t, obf);
  for (std::size_t k = 1; k <= t.size(); ++k) {
    auto partial = make_boundary_set({t.begin(), t.begin() + k},
                                     {b.z_bounds.begin(), b.z_bounds.begin() + k}, 0.03);
    CHECK(std::abs(crossing_probability(partial) - spend(obf, 0.03, t[k - 1])) < 1e-6);
  }
}

TEST_CASE("round trip on randomized designs") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> ua(0.001, 0.05);
  std::uniform_int_distribution<int> uk(1, 5);
  std::uniform_real_distribution<double> ut(0.05, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    const int k = uk(rng);
    std::vector<double> t;
    while (static_cast<int>(t.size()) < k - 1) {
      const double x = ut(rng);
      bool ok = x < 0.999;
      for (double y : t) ok = ok && std::abs(x - y) > 0.02;
      if (ok) t.push_back(x);
    }
    std::sort(t.begin(), t.end());
    t.push_back(1.0);
    const double a = ua(rng);
    const auto fn = rep % 3 == 0 ? SpendingFunction::lan_demets_pocock() : obf;
    const auto b = compute_boundaries(a, t, fn);
    INFO("rep " << rep << " alpha " << a << " looks " << k);
    CHECK(std::abs(crossing_probability(b) - a) < 1e-5);
  }
}

TEST_CASE("raising alpha lowers every boundary") {
  const std::vector<double> t{0.4, 0.7, 1.0};
  const auto lo = compute_boundaries(0.01, t, obf);
  const auto hi = compute_boundaries(0.02, t, obf);
  for (std::size_t k = 0; k < t.size(); ++k) CHECK(hi.z_bounds[k] < lo.z_bounds[k]);
}

TEST_CASE("an interim look raises the final boundary") {
  const std::vector<double> one{1.0};
  const std::vector<double> two{0.6, 1.0};
  CHECK(compute_boundaries(0.025, two, obf).z_bounds.back() >
        compute_boundaries(0.025, one, obf).z_bounds.back());
}

TEST_CASE("grid refinement changes boundaries by less than 1e-4") {
  const std::vector<double> t{0.69, 0.92, 1.0};
  IntegrationOptions fine;
  fine.nodes_per_look = 2 * fine.nodes_per_look + 1;
  const auto a = compute_boundaries(0.01488, t, obf);
  const auto b = compute_boundaries(0.01488, t, obf, fine);
  for (std::size_t k = 0; k < t.size(); ++k) CHECK(std::abs(a.z_bounds[k] - b.z_bounds[k]) < 1e-4);
}

TEST_CASE("input validation") {
  const std::vector<double> bad{0.6, 0.5};
  CHECK_THROWS_AS(compute_boundaries(0.025, bad, obf), Error);
  const std::vector<double> over{0.5, 1.2};
  CHECK_THROWS_AS(compute_boundaries(0.025, over, obf), Error);
  // a decreasing tabulated curve cannot be spent
  const std::vector<double> t{0.5, 1.0};
  CHECK_THROWS(SpendingFunction::tabulated({0.5, 1.0}, {0.8, 0.6}));
}

}
