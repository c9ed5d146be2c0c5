#pragma once

// Symbolic addressing of n-blocks phi(w)(L) and level-m gaps phi(w)(J_i).

#include <algorithm>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "hcantor/branch_system.hpp"
#include "hcantor/word.hpp"

namespace hcantor {

template <Scalar T>
struct Block {
  Word word;
  Interval<T> interval;
  std::size_t level() const { return word.size(); }
};

/// Gap J_index(word) = phi(word)(J_index); stored by its closure.
template <Scalar T>
struct GapId {
  int index = 1;
  Word word;
  Interval<T> interval;

  std::size_t level() const { return word.size(); }
  /// Identity ignores the interval representation.
  template <Scalar U>
  bool same_address(const GapId<U>& o) const {
    return index == o.index && word == o.word;
  }
};

/// Enumerations are capped at 2^24 words.
inline constexpr std::uint64_t kMaxWords = std::uint64_t{1} << 24;

inline void check_level_cap(std::size_t k, std::size_t n) {
  std::uint64_t count = 1;
  for (std::size_t i = 0; i < n; ++i) {
    count *= k;
    if (count > kMaxWords)
      fail(ErrorKind::depth_cap, "level " + std::to_string(n) + " exceeds the enumeration cap for k=" + std::to_string(k));
  }
}

/// phi(w)(target) = phi_{w_1} ∘ ... ∘ phi_{w_n} (target).
template <Scalar T>
Interval<T> phi_word(const BranchSystem& s, const Word& w, const Interval<T>& target) {
  if (!within(s.template ambient_as<T>(), target)) fail(ErrorKind::domain, "phi_word target not inside L");
  if (!w.valid_for(s.k())) fail(ErrorKind::domain, "word '" + w.to_string() + "' has symbols outside 1..k");
  Interval<T> out = target;
  for (std::size_t i = w.size(); i-- > 0;) out = branch_inverse(s, w[i], out);
  return out;
}

template <Scalar T>
T phi_word(const BranchSystem& s, const Word& w, T y) {
  for (std::size_t i = w.size(); i-- > 0;) y = branch_inverse(s, w[i], y);
  return y;
}

/// Orientation of phi(w): (-1)^(number of decreasing branches along w).
inline int word_orientation(const BranchSystem& s, const Word& w) {
  int o = 1;
  for (int sym : w) o *= s.branch(sym).orientation;
  return o;
}

/// S^|w| restricted to the block phi(w)(L), as one affine map (affine systems).
inline AffineMap<Rational> block_return_affine(const BranchSystem& s, const Word& w) {
  if (!s.is_affine()) fail(ErrorKind::precondition, "block_return_affine needs an affine system");
  AffineMap<Rational> m = AffineMap<Rational>::identity();
  for (int sym : w) m = s.branch(sym).base.after(m);
  return m;
}

namespace detail {

template <class Item>
void sort_left_to_right(std::vector<Item>& items) {
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.interval.lo < b.interval.lo; });
}

}  // namespace detail

/// All k^n blocks of level n, left to right.
template <Scalar T>
std::vector<Block<T>> blocks(const BranchSystem& s, std::size_t n) {
  check_level_cap(s.k(), n);
  std::vector<Block<T>> cur{Block<T>{Word{}, s.template ambient_as<T>()}};
  for (std::size_t level = 0; level < n; ++level) {
    std::vector<Block<T>> next;
    next.reserve(cur.size() * s.k());
    for (Symbol j = 1; j <= static_cast<Symbol>(s.k()); ++j)
      for (const auto& b : cur) next.push_back(Block<T>{j + b.word, branch_inverse(s, j, b.interval)});
    cur = std::move(next);
  }
  detail::sort_left_to_right(cur);
  return cur;
}

template <Scalar T>
std::vector<GapId<T>> level0_gaps(const BranchSystem& s) {
  std::vector<GapId<T>> out;
  for (int i = 1; i < static_cast<int>(s.k()); ++i) out.push_back(GapId<T>{i, Word{}, s.template gap_as<T>(i)});
  return out;
}

/// All (k-1) k^m gaps of level exactly m, left to right.
template <Scalar T>
std::vector<GapId<T>> gaps(const BranchSystem& s, std::size_t m) {
  check_level_cap(s.k(), m);
  std::vector<GapId<T>> cur = level0_gaps<T>(s);
  for (std::size_t level = 0; level < m; ++level) {
    std::vector<GapId<T>> next;
    next.reserve(cur.size() * s.k());
    for (Symbol j = 1; j <= static_cast<Symbol>(s.k()); ++j)
      for (const auto& g : cur) next.push_back(GapId<T>{g.index, j + g.word, branch_inverse(s, j, g.interval)});
    cur = std::move(next);
  }
  detail::sort_left_to_right(cur);
  return cur;
}

/// Gaps of every level 0..m, grouped by level.
template <Scalar T>
std::vector<GapId<T>> gaps_up_to(const BranchSystem& s, std::size_t m) {
  std::vector<GapId<T>> out;
  for (std::size_t level = 0; level <= m; ++level) {
    auto g = gaps<T>(s, level);
    out.insert(out.end(), std::make_move_iterator(g.begin()), std::make_move_iterator(g.end()));
  }
  return out;
}

/// Gaps phi(w)(phi(v)(J_i)) inside the block phi(w)(L), for |v| = 0..relative_depth.
template <Scalar T>
std::vector<GapId<T>> gaps_in_block(const BranchSystem& s, const Word& w, std::size_t relative_depth) {
  std::vector<GapId<T>> out;
  for (std::size_t r = 0; r <= relative_depth; ++r) {
    for (auto& g : gaps<T>(s, r)) {
      Word full = w + g.word;
      out.push_back(GapId<T>{g.index, full, phi_word(s, w, g.interval)});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Itineraries

template <Scalar T>
struct Escape {
  std::size_t step = 0;  // first iterate index lying in a gap
  Word prefix;           // symbols read before escaping; x lies in J_gap.index(prefix)
  GapId<T> gap;          // level-0 gap holding S^step(x)
};

template <Scalar T>
using Itinerary = std::variant<Word, Escape<T>>;

/// Index of the open level-0 gap holding x, if any.
template <Scalar T>
std::optional<int> level0_gap_of(const BranchSystem& s, const T& x) {
  for (int i = 1; i < static_cast<int>(s.k()); ++i) {
    if (s.template gap_as<T>(i).contains_open(x)) return i;
  }
  return std::nullopt;
}

/// Reads symbols while x, S(x), ..., S^depth(x) stay in the branch domains.
template <Scalar T>
Itinerary<T> itinerary(const BranchSystem& s, T x, std::size_t depth) {
  if (!within(s.template ambient_as<T>(), x)) fail(ErrorKind::domain, "itinerary start outside L");
  Word w;
  for (std::size_t step = 0; step <= depth; ++step) {
    auto j = branch_of(s, x);
    if (!j) {
      auto gi = level0_gap_of(s, x);
      if (!gi) fail(ErrorKind::domain, "iterate left L");
      return Escape<T>{step, w, GapId<T>{*gi, Word{}, s.template gap_as<T>(*gi)}};
    }
    if (step == depth) break;
    w.push_back(*j);
    x = eval_branch(s, *j, x);
  }
  return w;
}

// ---------------------------------------------------------------------------
// Gap location

/// Descends through the branches until the interval is a level-0 gap.
/// Exact for rationals; binary64 candidates are re-derived forward and matched at kMatchTol.
template <Scalar T>
std::optional<GapId<T>> locate_gap(const BranchSystem& s, const Interval<T>& iv, std::size_t max_level) {
  Interval<T> cur = iv;
  Word w;
  for (std::size_t level = 0; level <= max_level; ++level) {
    for (int i = 1; i < static_cast<int>(s.k()); ++i) {
      const Interval<T> J = s.template gap_as<T>(i);
      if (same_interval(cur, J)) {
        if constexpr (is_exact_v<T>) {
          return GapId<T>{i, w, iv};
        } else {
          Interval<T> fwd = phi_word(s, w, J);
          if (same_interval(fwd, iv)) return GapId<T>{i, w, fwd};
          return std::nullopt;
        }
      }
    }
    if (level == max_level) break;
    auto j = branch_of(s, cur);
    if (!j) return std::nullopt;
    w.push_back(*j);
    cur = eval_branch(s, *j, cur);
  }
  return std::nullopt;
}

/// Symbols of the blocks holding iv, S(iv), ..., S^(m-1)(iv); nullopt if some
/// iterate straddles a gap.
template <Scalar T>
std::optional<Word> block_address(const BranchSystem& s, Interval<T> iv, std::size_t m) {
  Word w;
  for (std::size_t step = 0; step < m; ++step) {
    auto j = branch_of(s, iv);
    if (!j) return std::nullopt;
    w.push_back(*j);
    iv = eval_branch(s, *j, iv);
  }
  return w;
}

}  // namespace hcantor
