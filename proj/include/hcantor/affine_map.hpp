#pragma once

#include "hcantor/interval.hpp"

namespace hcantor {

/// x -> slope * x + intercept, slope != 0.
template <Scalar T>
struct AffineMap {
  T slope{1};
  T intercept{0};

  static AffineMap identity() { return AffineMap{T(1), T(0)}; }

  /// The affine map sending [from.lo, from.hi] onto `to`, preserving or reversing order.
  static AffineMap matching(const Interval<T>& from, const Interval<T>& to, int orientation) {
    AffineMap m;
    m.slope = (orientation > 0 ? T(1) : T(-1)) * to.length() / from.length();
    m.intercept = (orientation > 0 ? to.lo : to.hi) - m.slope * from.lo;
    return m;
  }

  T operator()(const T& x) const { return slope * x + intercept; }
  Interval<T> operator()(const Interval<T>& iv) const { return span((*this)(iv.lo), (*this)(iv.hi)); }

  T inverse(const T& y) const { return (y - intercept) / slope; }

  /// this ∘ inner
  AffineMap after(const AffineMap& inner) const {
    return AffineMap{slope * inner.slope, slope * inner.intercept + intercept};
  }

  int orientation() const { return sign_of(slope); }

  friend bool operator==(const AffineMap&, const AffineMap&) = default;
};

template <Scalar T>
AffineMap<T> convert(const AffineMap<Rational>& m) {
  return AffineMap<T>{from_rational<T>(m.slope), from_rational<T>(m.intercept)};
}

}  // namespace hcantor
