#pragma once

// The homeomorphism psi: L -> L carrying blocks and gaps of C_S onto those of
// the affine model C_R: psi = phi^R(w) ∘ S^|w| on the gap phi^S(w)(J_i).

#include "hcantor/symbolic.hpp"

namespace hcantor {

class ConjugacyMap {
 public:
  ConjugacyMap(BranchSystem source, BranchSystem target, std::size_t depth = 20)
      : source_(std::move(source)), target_(std::move(target)), depth_(depth) {
    if (!target_.is_affine()) fail(ErrorKind::precondition, "conjugacy target must be affine");
    if (!source_.same_skeleton(target_))
      fail(ErrorKind::precondition, "source and target need the same domains and orientations");
    check_level_cap(source_.k(), depth_);
  }

  /// Conjugacy from S to its own affine model.
  static ConjugacyMap to_affine_model(const BranchSystem& s, std::size_t depth = 20) {
    return ConjugacyMap(s, s.affine_model(), depth);
  }

  const BranchSystem& source() const { return source_; }
  const BranchSystem& target() const { return target_; }
  std::size_t depth() const { return depth_; }

 private:
  BranchSystem source_;
  BranchSystem target_;
  std::size_t depth_;
};

/// A point value (resolved, lo == hi) or a certified bracket [lo, hi].
struct PsiValue {
  bool resolved = false;
  Rational lo;
  Rational hi;
  Word word;           // gap address (resolved) or itinerary (bracket)
  int gap_index = 0;   // 0 when unresolved

  double width() const { return to_double(hi - lo); }
};

namespace detail {

// Closure membership in J_i; binary64 points within kMatchTol of an endpoint snap to it.
template <Scalar T>
std::optional<Rational> snap_into_gap(const Interval<Rational>& J, const T& y) {
  if constexpr (is_exact_v<T>) {
    if (J.contains(y)) return y;
    return std::nullopt;
  } else {
    const double lo = to_double(J.lo), hi = to_double(J.hi);
    if (approx_equal(y, lo)) return J.lo;
    if (approx_equal(y, hi)) return J.hi;
    if (lo < y && y < hi) return exact_rational(y);
    return std::nullopt;
  }
}

}  // namespace detail

template <Scalar T>
PsiValue psi_eval(const ConjugacyMap& map, const T& x) {
  const BranchSystem& S = map.source();
  const BranchSystem& R = map.target();
  if (!within(S.template ambient_as<T>(), x)) fail(ErrorKind::domain, "psi_eval argument outside L");
  T y = x;
  Word w;
  for (std::size_t n = 0; n <= map.depth(); ++n) {
    for (int i = 1; i < static_cast<int>(S.k()); ++i) {
      if (auto snapped = detail::snap_into_gap(S.level0_gap(i), y)) {
        const Rational v = phi_word(R, w, *snapped);
        return PsiValue{true, v, v, w, i};
      }
    }
    auto j = branch_of(S, y);
    if (!j) fail(ErrorKind::domain, "orbit left the branch domains");
    if (n == map.depth()) break;
    w.push_back(*j);
    y = eval_branch(S, *j, y);
  }
  const Interval<Rational> bracket = phi_word(R, w, R.ambient());
  return PsiValue{false, bracket.lo, bracket.hi, w, 0};
}

/// psi(phi^S(w)(L)) = phi^R(w)(L).
inline Interval<Rational> psi_block_image(const ConjugacyMap& map, const Word& w) {
  if (w.size() > map.depth()) fail(ErrorKind::precondition, "word longer than the conjugacy depth");
  return phi_word(map.target(), w, map.target().ambient());
}

}  // namespace hcantor
