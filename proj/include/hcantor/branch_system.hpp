#pragma once

// Expanding k-branch interval maps: each branch sends its domain I_j onto the
// ambient interval L with |S'| > 1. Branches are affine, optionally carrying a
// smooth endpoint-preserving bump.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "hcantor/affine_map.hpp"
#include "hcantor/interval.hpp"
#include "hcantor/sampling.hpp"

namespace hcantor {

/// Branch symbols are 1-based, matching the word alphabet {1..k}.
using Symbol = int;

struct Branch {
  Interval<Rational> domain;
  int orientation = 1;
  AffineMap<Rational> base;  // maps domain exactly onto L
  double amplitude = 0.0;    // derivative amplitude of the bump term

  bool is_affine() const { return amplitude == 0.0; }
};

class BranchSystem {
 public:
  BranchSystem(Interval<Rational> ambient, std::vector<Branch> branches, double alpha = 1.0)
      : ambient_(std::move(ambient)), branches_(std::move(branches)), alpha_(alpha), ambient_d_(to_double(ambient_)) {
    validate();
    for (const auto& b : branches_) {
      domains_d_.push_back(to_double(b.domain));
      slopes_d_.push_back(to_double(b.base.slope));
      intercepts_d_.push_back(to_double(b.base.intercept));
    }
    for (std::size_t i = 0; i + 1 < branches_.size(); ++i) {
      gaps_.emplace_back(branches_[i].domain.hi, branches_[i + 1].domain.lo);
      gaps_d_.push_back(to_double(gaps_.back()));
    }
  }

  template <Scalar T>
  const Interval<T>& ambient_as() const {
    if constexpr (is_exact_v<T>) {
      return ambient_;
    } else {
      return ambient_d_;
    }
  }

  template <Scalar T>
  const Interval<T>& domain_as(Symbol j) const {
    check_symbol(j);
    if constexpr (is_exact_v<T>) {
      return branches_[static_cast<std::size_t>(j - 1)].domain;
    } else {
      return domains_d_[static_cast<std::size_t>(j - 1)];
    }
  }

  template <Scalar T>
  const Interval<T>& gap_as(int i) const {
    if (i < 1 || static_cast<std::size_t>(i) >= branches_.size())
      fail(ErrorKind::domain, "gap index " + std::to_string(i) + " out of range");
    if constexpr (is_exact_v<T>) {
      return gaps_[static_cast<std::size_t>(i - 1)];
    } else {
      return gaps_d_[static_cast<std::size_t>(i - 1)];
    }
  }

  /// Binary64 copy of branch j's affine part.
  double slope_d(Symbol j) const { return slopes_d_[static_cast<std::size_t>(j - 1)]; }
  double intercept_d(Symbol j) const { return intercepts_d_[static_cast<std::size_t>(j - 1)]; }

  const Interval<Rational>& ambient() const { return ambient_; }
  std::size_t k() const { return branches_.size(); }
  double alpha() const { return alpha_; }
  const std::vector<Branch>& branches() const { return branches_; }

  const Branch& branch(Symbol j) const {
    check_symbol(j);
    return branches_[static_cast<std::size_t>(j - 1)];
  }

  bool is_affine() const {
    for (const auto& b : branches_)
      if (!b.is_affine()) return false;
    return true;
  }

  /// J_i, the open interval between I_i and I_{i+1}, 1 <= i <= k-1 (stored by its closure).
  const Interval<Rational>& level0_gap(int i) const { return gap_as<Rational>(i); }

  /// Same skeleton and orientations, all amplitudes zero.
  BranchSystem affine_model() const {
    auto bs = branches_;
    for (auto& b : bs) b.amplitude = 0.0;
    return BranchSystem(ambient_, std::move(bs), alpha_);
  }

  /// Same L, domains and orientations.
  bool same_skeleton(const BranchSystem& o) const {
    if (!(ambient_ == o.ambient_) || k() != o.k()) return false;
    for (std::size_t j = 0; j < k(); ++j) {
      if (!(branches_[j].domain == o.branches_[j].domain)) return false;
      if (branches_[j].orientation != o.branches_[j].orientation) return false;
    }
    return true;
  }

 private:
  void check_symbol(Symbol j) const {
    if (j < 1 || static_cast<std::size_t>(j) > branches_.size())
      fail(ErrorKind::domain, "branch symbol " + std::to_string(j) + " out of range");
  }

  void validate() const {
    if (branches_.size() < 2) fail(ErrorKind::invariant, "a branch system needs k >= 2 branches");
    if (ambient_.lo < 0 || ambient_.hi > 1) fail(ErrorKind::invariant, "L must lie in [0,1]");
    if (!(alpha_ > 0)) fail(ErrorKind::invariant, "Hoelder exponent alpha must be positive");
    for (std::size_t j = 0; j < branches_.size(); ++j) {
      const Branch& b = branches_[j];
      const std::string tag = "branch " + std::to_string(j + 1);
      if (!ambient_.contains(b.domain)) fail(ErrorKind::invariant, tag + ": domain not inside L");
      if (j > 0 && !(branches_[j - 1].domain.hi < b.domain.lo))
        fail(ErrorKind::invariant, tag + ": domains must be pairwise disjoint and listed left to right");
      if (b.orientation != 1 && b.orientation != -1)
        fail(ErrorKind::invariant, tag + ": orientation must be +1 or -1");
      if (b.base.orientation() != b.orientation)
        fail(ErrorKind::invariant, tag + ": affine part disagrees with orientation");
      if (!(b.base(b.domain) == ambient_)) fail(ErrorKind::invariant, tag + ": S(I_j) != L");
      if (!std::isfinite(b.amplitude)) fail(ErrorKind::invariant, tag + ": non-finite amplitude");
      const double slope = std::abs(to_double(b.base.slope));
      if (!(slope - std::abs(b.amplitude) > 1.0))
        fail(ErrorKind::invariant,
             tag + ": amplitude " + shortest_decimal(b.amplitude) + " violates |S'| > 1 (min |S'| = " +
                 shortest_decimal(slope - std::abs(b.amplitude)) + ")");
    }
    if (!(branches_.front().domain.lo == ambient_.lo) || !(branches_.back().domain.hi == ambient_.hi))
      fail(ErrorKind::invariant, "outermost branch domains must share the endpoints of L");
  }

  Interval<Rational> ambient_;
  std::vector<Branch> branches_;
  double alpha_;
  std::vector<Interval<Rational>> gaps_;
  Interval<double> ambient_d_;
  std::vector<Interval<double>> domains_d_;
  std::vector<Interval<double>> gaps_d_;
  std::vector<double> slopes_d_;
  std::vector<double> intercepts_d_;
};

/// Affine system with |slope_j| = |L| / |I_j| and the requested orientations.
inline BranchSystem make_affine_system(const Interval<Rational>& L,
                                       const std::vector<Interval<Rational>>& domains,
                                       const std::vector<int>& orientations, double alpha = 1.0) {
  if (domains.size() < 2) fail(ErrorKind::invariant, "a branch system needs k >= 2 branches");
  if (orientations.size() != domains.size())
    fail(ErrorKind::invariant, "one orientation per branch domain is required");
  std::vector<Branch> bs;
  bs.reserve(domains.size());
  for (std::size_t j = 0; j < domains.size(); ++j) {
    if (j > 0 && !(domains[j - 1].hi < domains[j].lo))
      fail(ErrorKind::invariant, "branch domains overlap or are out of order at branch " + std::to_string(j + 1));
    if (!L.contains(domains[j]))
      fail(ErrorKind::invariant, "branch " + std::to_string(j + 1) + ": domain not inside L");
    bs.push_back(Branch{domains[j], orientations[j], AffineMap<Rational>::matching(domains[j], L, orientations[j]), 0.0});
  }
  return BranchSystem(L, std::move(bs), alpha);
}

/// Adds a_j * |I_j| * B(t), B(t) = sin(2 pi t) / (2 pi), t = (x - lo_j) / |I_j|, to branch j.
inline BranchSystem make_perturbed_system(const BranchSystem& base, const std::vector<double>& amplitudes) {
  if (!base.is_affine()) fail(ErrorKind::precondition, "perturbation base must be affine");
  if (amplitudes.size() != base.k()) fail(ErrorKind::invariant, "one amplitude per branch is required");
  auto bs = base.branches();
  for (std::size_t j = 0; j < bs.size(); ++j) bs[j].amplitude = amplitudes[j];
  return BranchSystem(base.ambient(), std::move(bs), base.alpha());
}

// ---------------------------------------------------------------------------
// Evaluation

/// S restricted to branch j (no domain lookup).
template <Scalar T>
T eval_branch(const BranchSystem& s, Symbol j, const T& x) {
  const Branch& b = s.branch(j);
  if constexpr (is_exact_v<T>) {
    if (!b.is_affine()) fail(ErrorKind::precondition, "exact evaluation needs an affine branch");
    return b.base(x);
  } else {
    const Interval<double>& d = s.template domain_as<double>(j);
    const double lo = d.lo;
    const double len = d.hi - d.lo;
    double y = s.slope_d(j) * x + s.intercept_d(j);
    if (b.is_affine()) return y;
    const double t = (x - lo) / len;
    return y + b.amplitude * len * std::sin(2 * std::numbers::pi * t) / (2 * std::numbers::pi);
  }
}

template <Scalar T>
T deriv_branch(const BranchSystem& s, Symbol j, const T& x) {
  const Branch& b = s.branch(j);
  if constexpr (is_exact_v<T>) {
    if (!b.is_affine()) fail(ErrorKind::precondition, "exact evaluation needs an affine branch");
    (void)x;
    return b.base.slope;
  } else {
    const double slope = s.slope_d(j);
    if (b.is_affine()) return slope;
    const Interval<double>& d = s.template domain_as<double>(j);
    const double t = (x - d.lo) / (d.hi - d.lo);
    return slope + b.amplitude * std::cos(2 * std::numbers::pi * t);
  }
}

/// Branch whose (closed) domain holds x.
template <Scalar T>
std::optional<Symbol> branch_of(const BranchSystem& s, const T& x) {
  for (std::size_t j = 0; j < s.k(); ++j) {
    if (within(s.template domain_as<T>(static_cast<Symbol>(j + 1)), x)) return static_cast<Symbol>(j + 1);
  }
  return std::nullopt;
}

/// Branch whose domain holds the whole interval.
template <Scalar T>
std::optional<Symbol> branch_of(const BranchSystem& s, const Interval<T>& iv) {
  for (std::size_t j = 0; j < s.k(); ++j) {
    if (within(s.template domain_as<T>(static_cast<Symbol>(j + 1)), iv)) return static_cast<Symbol>(j + 1);
  }
  return std::nullopt;
}

template <Scalar T>
T eval(const BranchSystem& s, const T& x) {
  auto j = branch_of(s, x);
  if (!j) fail(ErrorKind::domain, "point outside the branch domains");
  return eval_branch(s, *j, x);
}

template <Scalar T>
T deriv(const BranchSystem& s, const T& x) {
  auto j = branch_of(s, x);
  if (!j) fail(ErrorKind::domain, "point outside the branch domains");
  return deriv_branch(s, *j, x);
}

/// Image of an interval inside branch j (monotone branches: endpoint images).
template <Scalar T>
Interval<T> eval_branch(const BranchSystem& s, Symbol j, const Interval<T>& iv) {
  return span(eval_branch(s, j, iv.lo), eval_branch(s, j, iv.hi));
}

/// phi_j: the inverse of branch j, L -> I_j.
template <Scalar T>
T branch_inverse(const BranchSystem& s, Symbol j, const T& y) {
  const Branch& b = s.branch(j);
  if (!within(s.template ambient_as<T>(), y)) fail(ErrorKind::domain, "branch_inverse argument outside L");
  if constexpr (is_exact_v<T>) {
    if (!b.is_affine()) fail(ErrorKind::precondition, "exact inversion needs an affine branch");
    return b.base.inverse(y);
  } else {
    const Interval<double>& L = s.template ambient_as<double>();
    const Interval<double>& d = s.template domain_as<double>(j);
    const double yl = std::clamp(y, L.lo, L.hi);
    if (b.is_affine()) return std::clamp((yl - s.intercept_d(j)) / s.slope_d(j), d.lo, d.hi);
    // Bracketed bisection on the monotone branch.
    double lo = d.lo, hi = d.hi;
    const bool increasing = b.orientation > 0;
    for (int it = 0; it < 200; ++it) {
      const double mid = lo + (hi - lo) / 2;
      if (mid <= lo || mid >= hi) break;
      const bool below = eval_branch(s, j, mid) < yl;
      if (below == increasing) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    const double rl = std::abs(eval_branch(s, j, lo) - yl);
    const double rh = std::abs(eval_branch(s, j, hi) - yl);
    return rl <= rh ? lo : hi;
  }
}

template <Scalar T>
Interval<T> branch_inverse(const BranchSystem& s, Symbol j, const Interval<T>& iv) {
  return span(branch_inverse(s, j, iv.lo), branch_inverse(s, j, iv.hi));
}

// ---------------------------------------------------------------------------
// Class membership

struct ClassReport {
  double nonlinearity = 0.0;
  double holder_constant = 0.0;
  double sigma = 0.0;
  bool in_class = false;
  double M = 0.0;
  double eps = 0.0;
  double alpha = 1.0;
  std::size_t grid = 0;
  std::size_t pair_grid = 0;  // points per branch used for the pairwise Hoelder scan
};

/// Largest pairwise grid used for the Hoelder constant (the scan is quadratic).
inline constexpr std::size_t kHolderPairGrid = 512;

namespace detail {

inline Extremes log_deriv_extremes(const BranchSystem& s, Symbol j, std::size_t grid) {
  const Branch& b = s.branch(j);
  if (b.is_affine()) {
    const double v = std::log(std::abs(to_double(b.base.slope)));
    return Extremes{v, v};
  }
  auto f = [&](double x) { return std::log(std::abs(deriv_branch(s, j, x))); };
  return sampled_extremes(f, to_double(b.domain.lo), to_double(b.domain.hi), grid);
}

}  // namespace detail

inline ClassReport class_membership(const BranchSystem& s, double M, double eps, std::size_t grid) {
  if (grid < 2) fail(ErrorKind::precondition, "class_membership needs grid >= 2");
  ClassReport r;
  r.M = M;
  r.eps = eps;
  r.alpha = s.alpha();
  r.grid = grid;
  r.pair_grid = std::min(grid, kHolderPairGrid);
  double min_abs_deriv = std::numeric_limits<double>::infinity();
  for (Symbol j = 1; j <= static_cast<Symbol>(s.k()); ++j) {
    const Extremes e = detail::log_deriv_extremes(s, j, grid);
    min_abs_deriv = std::min(min_abs_deriv, std::exp(e.min));
    if (s.branch(j).is_affine()) continue;  // nonlinearity and Hoelder term vanish exactly
    r.nonlinearity = std::max(r.nonlinearity, e.spread());

    const Branch& b = s.branch(j);
    const double lo = to_double(b.domain.lo), hi = to_double(b.domain.hi);
    std::vector<double> xs(r.pair_grid), vs(r.pair_grid);
    for (std::size_t a = 0; a < r.pair_grid; ++a) {
      xs[a] = a + 1 == r.pair_grid ? hi : lo + (hi - lo) * static_cast<double>(a) / static_cast<double>(r.pair_grid - 1);
      vs[a] = std::log(std::abs(deriv_branch(s, j, xs[a])));
    }
    for (std::size_t a = 0; a < r.pair_grid; ++a)
      for (std::size_t c = a + 1; c < r.pair_grid; ++c)
        r.holder_constant =
            std::max(r.holder_constant, std::abs(vs[a] - vs[c]) / std::pow(xs[c] - xs[a], s.alpha()));
  }
  r.sigma = 1.0 / min_abs_deriv;
  r.in_class = r.nonlinearity < eps && r.holder_constant <= M;
  return r;
}

}  // namespace hcantor
