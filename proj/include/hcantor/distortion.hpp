#pragma once

// Nonlinearity, iterated distortion, the gap-level bound, and S-vs-R gap comparison.

#include <cmath>
#include <map>
#include <numbers>
#include <variant>

#include "hcantor/symbolic.hpp"

namespace hcantor {

/// A sampled sup of log-derivative ratios, with the data needed to reproduce it.
struct DistortionValue {
  double value = 0.0;
  Interval<double> domain;
  std::size_t iterate = 1;
  std::size_t grid = 0;
};

/// N(S): max over branches of sup log(S'(x)/S'(y)).
inline DistortionValue nonlinearity(const BranchSystem& s, std::size_t grid) {
  if (grid < 2) fail(ErrorKind::precondition, "nonlinearity needs grid >= 2");
  DistortionValue out{0.0, to_double(s.ambient()), 1, grid};
  for (Symbol j = 1; j <= static_cast<Symbol>(s.k()); ++j) {
    if (s.branch(j).is_affine()) continue;
    out.value = std::max(out.value, detail::log_deriv_extremes(s, j, grid).spread());
  }
  return out;
}

namespace detail {

// log |(S^m)'(x)| along a fixed branch address.
inline double log_iterate_deriv(const BranchSystem& s, const Word& address, double x) {
  double acc = 0.0;
  for (int sym : address) {
    acc += std::log(std::abs(deriv_branch(s, sym, x)));
    x = eval_branch(s, sym, x);
  }
  return acc;
}

}  // namespace detail

/// N(S^m restricted to I); I must sit inside an m-block.
template <Scalar T>
DistortionValue distortion_on(const BranchSystem& s, std::size_t m, const Interval<T>& I, std::size_t grid) {
  if (grid < 2) fail(ErrorKind::precondition, "distortion_on needs grid >= 2");
  auto address = block_address(s, I, m);
  if (!address) fail(ErrorKind::precondition, "interval is not inside an " + std::to_string(m) + "-block");
  DistortionValue out{0.0, to_double(I), m, grid};
  if (s.is_affine()) return out;
  const Interval<double> D = to_double(I);
  auto f = [&](double x) { return detail::log_iterate_deriv(s, *address, x); };
  out.value = sampled_extremes(f, D.lo, D.hi, grid).spread();
  return out;
}

// ---------------------------------------------------------------------------
// Composition bound N(S^m ∘ F) <= N(S^m | F(D)) + N(F | D)

/// Inner factor S^iterate.
struct SystemIterate {
  std::size_t iterate = 1;
};

using InnerMap = std::variant<AffineMap<double>, SystemIterate>;

struct ChainBound {
  double lhs = 0.0;
  double rhs = 0.0;
  double outer = 0.0;  // N(S^m | inner(D))
  double inner = 0.0;  // N(inner | D)
  bool holds = false;
};

inline ChainBound chain_bound_check(const BranchSystem& s, std::size_t m, const InnerMap& inner,
                                    const Interval<double>& domain, std::size_t grid) {
  ChainBound out;
  if (const auto* h = std::get_if<AffineMap<double>>(&inner)) {
    const Interval<double> image = (*h)(domain);
    auto address = block_address(s, image, m);
    if (!address) fail(ErrorKind::precondition, "inner image leaves the branch domains before the outer iterate");
    out.outer = distortion_on(s, m, image, grid).value;
    out.inner = 0.0;
    if (!s.is_affine()) {
      const double log_slope = std::log(std::abs(h->slope));
      auto f = [&](double x) { return log_slope + detail::log_iterate_deriv(s, *address, (*h)(x)); };
      out.lhs = sampled_extremes(f, domain.lo, domain.hi, grid).spread();
    }
  } else {
    const std::size_t j = std::get<SystemIterate>(inner).iterate;
    auto inner_address = block_address(s, domain, j);
    if (!inner_address) fail(ErrorKind::precondition, "domain is not inside a block of the inner iterate");
    Interval<double> image = domain;
    for (int sym : *inner_address) image = eval_branch(s, sym, image);
    if (!block_address(s, image, m)) fail(ErrorKind::precondition, "inner image leaves the branch domains before the outer iterate");
    out.outer = distortion_on(s, m, image, grid).value;
    out.inner = distortion_on(s, j, domain, grid).value;
    out.lhs = distortion_on(s, m + j, domain, grid).value;
  }
  out.rhs = out.outer + out.inner;
  out.holds = out.lhs <= out.rhs + 1e-9;
  return out;
}

// ---------------------------------------------------------------------------
// Bounded distortion depth

struct BoundedDistortion {
  double delta = 0.0;
  std::size_t N = 0;          // max_level + 1 when no depth certifies
  std::size_t max_level = 0;
  double worst = 0.0;         // largest distortion seen while certifying N
  std::size_t blocks_scanned = 0;
  bool certified() const { return N <= max_level; }
};

/// Smallest N such that N(S^(m-N+1) | I) < delta for every m-block I, N < m <= max_level.
/// N = max_level + 1 when no such N exists.
inline BoundedDistortion bounded_distortion_depth(const BranchSystem& s, double delta, std::size_t max_level,
                                                  std::size_t grid = 33) {
  if (!(delta > 0)) fail(ErrorKind::precondition, "delta must be positive");
  check_level_cap(s.k(), max_level);
  BoundedDistortion out{delta, max_level + 1, max_level, 0.0, 0};
  if (s.is_affine()) {
    out.N = 1;
    return out;
  }
  std::vector<std::vector<Block<double>>> by_level(max_level + 1);
  for (std::size_t m = 2; m <= max_level; ++m) by_level[m] = blocks<double>(s, m);

  // N = max_level would certify vacuously (no level in (N, max_level]), so it is never returned.
  for (std::size_t N = 1; N < max_level; ++N) {
    bool ok = true;
    double worst = 0.0;
    std::size_t scanned = 0;
    for (std::size_t m = N + 1; m <= max_level && ok; ++m) {
      for (const auto& b : by_level[m]) {
        const double d = distortion_on(s, m - N + 1, b.interval, grid).value;
        ++scanned;
        worst = std::max(worst, d);
        if (!(d < delta)) {
          ok = false;
          break;
        }
      }
    }
    if (ok) {
      out.N = N;
      out.worst = worst;
      out.blocks_scanned = scanned;
      return out;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Gap-level bound

struct LevelBound {
  std::vector<double> mu;  // |L| / |I_i|
  double delta = 0.0;
  double beta = 0.0;       // min(mu_i - delta)
  std::size_t l = 0;
  double max_gap = 0.0;
  double min_gap = 0.0;
};

/// Default delta = (min mu_i - 1) / 2.
inline double default_level_delta(const BranchSystem& r) {
  double min_mu = std::numeric_limits<double>::infinity();
  for (const auto& b : r.branches()) min_mu = std::min(min_mu, to_double(r.ambient().length() / b.domain.length()));
  return (min_mu - 1.0) / 2.0;
}

/// l = largest p with beta^p <= e * max|J_r| / min|J_j|.
inline LevelBound gap_level_bound(const BranchSystem& r, double delta) {
  if (!r.is_affine()) fail(ErrorKind::precondition, "gap_level_bound takes the affine model");
  LevelBound out;
  out.delta = delta;
  out.beta = std::numeric_limits<double>::infinity();
  for (const auto& b : r.branches()) {
    const double mu = to_double(r.ambient().length() / b.domain.length());
    out.mu.push_back(mu);
    out.beta = std::min(out.beta, mu - delta);
  }
  if (!(out.beta > 1.0)) fail(ErrorKind::precondition, "delta too large: beta = min(mu_i - delta) must exceed 1");
  Rational maxJ = r.level0_gap(1).length(), minJ = maxJ;
  for (int i = 2; i < static_cast<int>(r.k()); ++i) {
    maxJ = std::max(maxJ, r.level0_gap(i).length());
    minJ = std::min(minJ, r.level0_gap(i).length());
  }
  out.max_gap = to_double(maxJ);
  out.min_gap = to_double(minJ);
  const double budget = 1.0 + std::log(to_double(maxJ / minJ));  // log(e * maxJ / minJ)
  const double step = std::log(out.beta);
  std::size_t p = 0;
  while (static_cast<double>(p + 1) * step <= budget + 1e-12) ++p;
  out.l = p;
  return out;
}

inline LevelBound gap_level_bound(const BranchSystem& r) { return gap_level_bound(r, default_level_delta(r)); }

// ---------------------------------------------------------------------------
// S-gaps against R-gaps

struct GapComparison {
  double c = 0.0;        // max |log(|J^S| / |J^R|)| over levels <= level
  double band_lo = 1.0;  // exp(-2c): ratio band for quotients of gap lengths
  double band_hi = 1.0;  // exp(2c)
  std::size_t level = 0;
  std::size_t gaps_compared = 0;
};

inline GapComparison compare_gaps(const BranchSystem& s, const BranchSystem& r, std::size_t level) {
  if (!r.is_affine()) fail(ErrorKind::precondition, "compare_gaps reference must be affine");
  if (!s.same_skeleton(r)) fail(ErrorKind::precondition, "compare_gaps needs matching branch structure");
  GapComparison out;
  out.level = level;
  for (std::size_t m = 0; m <= level; ++m) {
    const auto gr = gaps<Rational>(r, m);
    out.gaps_compared += gr.size();
    if (s.is_affine()) continue;  // same skeleton and affine: identical gaps
    const auto gs = gaps<double>(s, m);
    for (std::size_t q = 0; q < gr.size(); ++q) {
      if (!gs[q].same_address(gr[q])) fail(ErrorKind::inconsistent, "gap order differs between S and R");
      out.c = std::max(out.c, std::abs(std::log(gs[q].interval.length() / to_double(gr[q].interval.length()))));
    }
  }
  out.band_lo = std::exp(-2 * out.c);
  out.band_hi = std::exp(2 * out.c);
  return out;
}

}  // namespace hcantor
