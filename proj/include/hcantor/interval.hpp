#pragma once

#include <algorithm>
#include <ostream>

#include "hcantor/scalar.hpp"

namespace hcantor {

/// Compact interval [lo, hi] with lo < hi.
template <Scalar T>
struct Interval {
  T lo;
  T hi;

  Interval(T lo_, T hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
    if (!(lo < hi)) fail(ErrorKind::invariant, "interval requires lo < hi");
  }

  T length() const { return hi - lo; }
  T midpoint() const { return (lo + hi) / 2; }

  bool contains(const T& x) const { return lo <= x && x <= hi; }
  bool contains_open(const T& x) const { return lo < x && x < hi; }
  bool contains(const Interval& other) const { return lo <= other.lo && other.hi <= hi; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Interval spanned by two distinct points, in either order.
template <Scalar T>
Interval<T> span(T a, T b) {
  if (b < a) std::swap(a, b);
  return Interval<T>(std::move(a), std::move(b));
}

template <Scalar T>
Interval<T> convert(const Interval<Rational>& iv) {
  return Interval<T>(from_rational<T>(iv.lo), from_rational<T>(iv.hi));
}

inline Interval<double> to_double(const Interval<Rational>& iv) {
  return Interval<double>(to_double(iv.lo), to_double(iv.hi));
}
inline Interval<double> to_double(const Interval<double>& iv) { return iv; }

/// Containment with binary64 slack; exact for rationals.
template <Scalar T>
bool within(const Interval<T>& outer, const Interval<T>& inner) {
  if constexpr (is_exact_v<T>) {
    return outer.contains(inner);
  } else {
    return inner.lo >= outer.lo - kContainTol && inner.hi <= outer.hi + kContainTol;
  }
}

template <Scalar T>
bool within(const Interval<T>& outer, const T& x) {
  if constexpr (is_exact_v<T>) {
    return outer.contains(x);
  } else {
    return x >= outer.lo - kContainTol && x <= outer.hi + kContainTol;
  }
}

/// Interval identity: exact for rationals, endpoint match at kMatchTol otherwise.
template <Scalar T>
bool same_interval(const Interval<T>& a, const Interval<T>& b) {
  if constexpr (is_exact_v<T>) {
    return a == b;
  } else {
    return approx_equal(a.lo, b.lo) && approx_equal(a.hi, b.hi);
  }
}

template <Scalar T>
std::ostream& operator<<(std::ostream& os, const Interval<T>& iv) {
  if constexpr (is_exact_v<T>) {
    return os << '[' << to_string(iv.lo) << ',' << to_string(iv.hi) << ']';
  } else {
    return os << '[' << iv.lo << ',' << iv.hi << ']';
  }
}

}  // namespace hcantor
