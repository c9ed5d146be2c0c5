#pragma once

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cstddef>
#include <limits>
#include <utility>

#include "hcantor/error.hpp"

namespace hcantor {

struct Extremes {
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();

  double spread() const { return max - min; }
  void merge(const Extremes& o) {
    min = std::min(min, o.min);
    max = std::max(max, o.max);
  }
};

/// Extremes of a smooth f on [lo, hi]: uniform grid, then a Brent pass in the
/// cells around the sampled minimum and maximum.
template <class F>
Extremes sampled_extremes(F&& f, double lo, double hi, std::size_t grid) {
  if (grid < 2) fail(ErrorKind::precondition, "sample grid must have at least 2 points");
  const double step = (hi - lo) / static_cast<double>(grid - 1);
  auto at = [&](std::size_t k) { return k + 1 == grid ? hi : lo + step * static_cast<double>(k); };

  Extremes e;
  std::size_t imin = 0, imax = 0;
  for (std::size_t k = 0; k < grid; ++k) {
    const double v = f(at(k));
    if (v < e.min) e.min = v, imin = k;
    if (v > e.max) e.max = v, imax = k;
  }

  constexpr int bits = std::numeric_limits<double>::digits / 2 + 4;
  auto cell = [&](std::size_t k) {
    return std::pair{at(k == 0 ? 0 : k - 1), at(std::min(k + 1, grid - 1))};
  };
  {
    auto [a, b] = cell(imin);
    if (a < b) {
      auto r = boost::math::tools::brent_find_minima(f, a, b, bits);
      e.min = std::min(e.min, r.second);
    }
  }
  {
    auto [a, b] = cell(imax);
    if (a < b) {
      auto neg = [&](double x) { return -f(x); };
      auto r = boost::math::tools::brent_find_minima(neg, a, b, bits);
      e.max = std::max(e.max, -r.second);
    }
  }
  return e;
}

}  // namespace hcantor
