#pragma once

// 50-digit normal distribution, used only as a reference in tests.

#include <boost/math/special_functions/erf.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

namespace oracle {

using hp = boost::multiprecision::cpp_bin_float_50;

inline hp hp_cdf(const hp& x) {
  return boost::math::erfc(-x / boost::multiprecision::sqrt(hp(2))) / 2;
}

inline double norm_cdf(double x) { return static_cast<double>(hp_cdf(hp(x))); }

// Newton on the 50-digit cdf; the start only needs to be in the right basin.
inline double norm_quantile(double p) {
  const hp target(p);
  const hp pi = boost::math::constants::pi<hp>();
  hp x = 0;
  for (int i = 0; i < 200; ++i) {
    const hp pdf = boost::multiprecision::exp(-x * x / 2) / boost::multiprecision::sqrt(2 * pi);
    hp step = (hp_cdf(x) - target) / pdf;
    if (step > 1) step = 1;
    if (step < -1) step = -1;
    x -= step;
    if (boost::multiprecision::abs(step) < hp(1e-40)) break;
  }
  return static_cast<double>(x);
}

}  // namespace oracle
