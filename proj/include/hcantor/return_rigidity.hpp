#pragma once

// Renormalized return maps g_T = S^(u_T) ∘ f|_T over blocks T, the triples
// (i, j, theta_p) they realize, the affine self-maps of an affine Cantor set
// forced by those triples, and the piecewise-affine model map built from them.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hcantor/distortion.hpp"
#include "hcantor/symbolic.hpp"

namespace hcantor {

// ---------------------------------------------------------------------------
// Piecewise maps

/// On `domain`: x -> phi(word)(inner(x)), phi taken in the system the map is applied with.
struct MapPiece {
  Interval<Rational> domain;
  Word word;
  AffineMap<Rational> inner;
};

class PiecewiseMap {
 public:
  explicit PiecewiseMap(std::vector<MapPiece> pieces) : pieces_(std::move(pieces)) {
    if (pieces_.empty()) fail(ErrorKind::invariant, "a piecewise map needs at least one piece");
    std::sort(pieces_.begin(), pieces_.end(),
              [](const MapPiece& a, const MapPiece& b) { return a.domain.lo < b.domain.lo; });
    for (std::size_t q = 0; q < pieces_.size(); ++q) {
      if (pieces_[q].inner.slope == 0) fail(ErrorKind::invariant, "piece " + std::to_string(q + 1) + " is not injective");
      if (q > 0 && !(pieces_[q - 1].domain.hi < pieces_[q].domain.lo))
        fail(ErrorKind::invariant, "piecewise map domains overlap");
    }
  }

  const std::vector<MapPiece>& pieces() const { return pieces_; }

  template <Scalar T>
  const MapPiece* piece_for(const Interval<T>& iv) const {
    for (const auto& p : pieces_)
      if (within(convert<T>(p.domain), iv)) return &p;
    return nullptr;
  }

  template <Scalar T>
  const MapPiece* piece_for(const T& x) const {
    for (const auto& p : pieces_)
      if (within(convert<T>(p.domain), x)) return &p;
    return nullptr;
  }

  template <Scalar T>
  static T apply(const BranchSystem& s, const MapPiece& p, const T& x) {
    const T y = convert<T>(p.inner)(x);
    if (!within(s.template ambient_as<T>(), y)) fail(ErrorKind::domain, "piece inner map leaves L");
    return phi_word(s, p.word, y);
  }

  template <Scalar T>
  static Interval<T> apply(const BranchSystem& s, const MapPiece& p, const Interval<T>& iv) {
    return span(apply(s, p, iv.lo), apply(s, p, iv.hi));
  }

  static int orientation(const BranchSystem& s, const MapPiece& p) {
    return p.inner.orientation() * word_orientation(s, p.word);
  }

  template <Scalar T>
  T operator()(const BranchSystem& s, const T& x) const {
    const MapPiece* p = piece_for(x);
    if (!p) fail(ErrorKind::domain, "point outside every piece");
    return apply(s, *p, x);
  }

 private:
  std::vector<MapPiece> pieces_;
};

// ---------------------------------------------------------------------------
// Triples

struct Triple {
  int i = 1;
  int j = 1;
  Word theta;
  int sign = 1;

  std::size_t p() const { return theta.size(); }

  /// "i,j,word,sign", word dash-separated (possibly empty), sign '+' or '-'.
  std::string to_string() const {
    return std::to_string(i) + "," + std::to_string(j) + "," + theta.to_string() + "," + (sign > 0 ? "+" : "-");
  }

  static Triple parse(std::string_view text) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : text) {
      if (c == ',') {
        parts.push_back(cur);
        cur.clear();
      } else if (c != '[' && c != ']' && c != ' ') {
        cur += c;
      }
    }
    parts.push_back(cur);
    if (parts.size() != 4) fail(ErrorKind::parse, "triple must read i,j,[word],sign: '" + std::string(text) + "'");
    Triple t;
    auto as_int = [&](const std::string& s) {
      if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        fail(ErrorKind::parse, "bad gap index in triple '" + std::string(text) + "'");
      return std::stoi(s);
    };
    t.i = as_int(parts[0]);
    t.j = as_int(parts[1]);
    t.theta = Word::parse(parts[2] == "0" ? "" : parts[2]);
    if (parts[3] == "+" || parts[3] == "+1" || parts[3] == "1") {
      t.sign = 1;
    } else if (parts[3] == "-" || parts[3] == "-1") {
      t.sign = -1;
    } else {
      fail(ErrorKind::parse, "bad sign in triple '" + std::string(text) + "'");
    }
    return t;
  }

  friend auto operator<=>(const Triple&, const Triple&) = default;
  friend bool operator==(const Triple&, const Triple&) = default;
};

// ---------------------------------------------------------------------------
// Return maps

/// g_T = S^u ∘ f on the block T, with the branch address of the u-step orbit.
template <Scalar T>
struct ReturnMap {
  const BranchSystem* system = nullptr;
  Block<T> block;
  const MapPiece* piece = nullptr;
  std::size_t u = 0;
  Word orbit;     // branch symbols visited by S^u on f(T)
  int sign = 1;   // orientation of g_T

  T operator()(const T& x) const {
    T y = PiecewiseMap::apply(*system, *piece, x);
    for (int sym : orbit) y = eval_branch(*system, sym, y);
    return y;
  }
  Interval<T> operator()(const Interval<T>& iv) const { return span((*this)(iv.lo), (*this)(iv.hi)); }
};

/// Relative depth of the gap scan backing the min-formulation of u_T.
inline constexpr std::size_t kReturnSearchDepth = 4;
/// Deepest level the gap locator descends to when classifying images.
inline constexpr std::size_t kLocateDepth = 128;

namespace detail {

template <Scalar T>
std::size_t max_return_steps(const BranchSystem& s, Interval<T> K, Word* orbit) {
  std::size_t n = 0;
  while (n < kLocateDepth) {
    auto j = branch_of(s, K);
    if (!j) break;
    if (orbit) orbit->push_back(*j);
    K = eval_branch(s, *j, K);
    ++n;
  }
  return n;
}

}  // namespace detail

template <Scalar T>
ReturnMap<T> make_return_map(const BranchSystem& s, const PiecewiseMap& f, const Block<T>& block,
                             std::size_t search_depth = kReturnSearchDepth) {
  const MapPiece* piece = f.piece_for(block.interval);
  if (!piece) fail(ErrorKind::precondition, "block " + block.word.to_string() + " is not inside one piece of f");
  const Interval<T> K = PiecewiseMap::apply(s, *piece, block.interval);
  if (!within(s.template ambient_as<T>(), K)) fail(ErrorKind::precondition, "f(T) is not inside L");

  // max{n : S^(n-1)(f(T)) inside the branch domains}
  Word orbit;
  const std::size_t u_max = detail::max_return_steps(s, K, &orbit);

  // min{n : S^n(f(J_i(r))) = J_j, J_i(r) inside T}
  std::optional<std::size_t> u_min;
  for (const auto& g : gaps_in_block<T>(s, block.word, search_depth)) {
    const Interval<T> image = PiecewiseMap::apply(s, *piece, g.interval);
    if (auto located = locate_gap(s, image, kLocateDepth)) {
      if (!u_min || located->level() < *u_min) u_min = located->level();
    }
  }
  if (!u_min) fail(ErrorKind::precondition, "f sends no gap of block " + block.word.to_string() + " onto a gap");
  if (*u_min != u_max)
    fail(ErrorKind::inconsistent, "u_T formulations disagree on block " + block.word.to_string() + ": max gives " +
                                      std::to_string(u_max) + ", min gives " + std::to_string(*u_min));

  const int sign = PiecewiseMap::orientation(s, *piece) * word_orientation(s, orbit);
  return ReturnMap<T>{&s, block, piece, u_max, std::move(orbit), sign};
}

template <Scalar T>
std::size_t u_of_block(const BranchSystem& s, const PiecewiseMap& f, const Block<T>& block,
                       std::size_t search_depth = kReturnSearchDepth) {
  return make_return_map(s, f, block, search_depth).u;
}

template <Scalar T>
T g_eval(const BranchSystem& s, const PiecewiseMap& f, const Block<T>& block, const T& x) {
  if (!within(block.interval, x)) fail(ErrorKind::domain, "g_eval point outside the block");
  return make_return_map(s, f, block)(x);
}

/// Block at the given address.
template <Scalar T>
Block<T> block_of(const BranchSystem& s, const Word& w) {
  return Block<T>{w, phi_word(s, w, s.template ambient_as<T>())};
}

template <Scalar T>
struct GapImage {
  GapId<T> gap;
  std::optional<GapId<T>> image;
};

template <Scalar T>
struct ReturnRecord {
  Block<T> block;
  std::size_t u = 0;
  int sign = 0;
  std::optional<Triple> triple;
  std::vector<GapImage<T>> gap_images;
  std::string failure;  // empty on success

  bool ok() const { return failure.empty(); }
};

/// Smallest r >= m such that g_T sends some J_i(r) inside T onto a level-0 gap, for every m-block T.
template <Scalar T>
std::vector<ReturnRecord<T>> extract_triples(const BranchSystem& s, const PiecewiseMap& f, std::size_t depth_m,
                                             std::size_t depth_r) {
  if (depth_r < depth_m) fail(ErrorKind::precondition, "depth_r must be at least depth_m");
  std::vector<ReturnRecord<T>> out;
  const auto level0 = level0_gaps<T>(s);
  for (const auto& block : blocks<T>(s, depth_m)) {
    ReturnRecord<T> rec{block, 0, 0, std::nullopt, {}, {}};
    try {
      const ReturnMap<T> g = make_return_map(s, f, block);
      rec.u = g.u;
      rec.sign = g.sign;
      for (std::size_t r = depth_m; r <= depth_r && !rec.triple; ++r) {
        for (const auto& rel : gaps<T>(s, r - depth_m)) {
          const Interval<T> gap = phi_word(s, block.word, rel.interval);
          const Interval<T> image = g(gap);
          for (const auto& J : level0) {
            if (same_interval(image, J.interval)) {
              rec.triple = Triple{rel.index, J.index, rel.word, g.sign};
              break;
            }
          }
          if (rec.triple) break;
        }
      }
      for (const auto& gap : gaps_in_block<T>(s, block.word, depth_r - depth_m))
        rec.gap_images.push_back(GapImage<T>{gap, locate_gap(s, g(gap.interval), kLocateDepth)});
      if (!rec.triple) rec.failure = "no gap of level <= " + std::to_string(depth_r) + " maps onto a level-0 gap";
    } catch (const Error& e) {
      rec.failure = e.what();
    }
    out.push_back(std::move(rec));
  }
  return out;
}

/// Triples realized at no fewer than `min_levels` distinct block levels.
template <Scalar T>
std::vector<Triple> recurring_triples(const std::vector<ReturnRecord<T>>& records, std::size_t min_levels = 2) {
  std::map<Triple, std::set<std::size_t>> levels;
  for (const auto& r : records)
    if (r.triple) levels[*r.triple].insert(r.block.level());
  std::vector<Triple> out;
  for (const auto& [t, ls] : levels)
    if (ls.size() >= min_levels) out.push_back(t);
  return out;
}

/// max{k : S^(k-1)(g_T(T(j1))) inside the branch domains}; 0 when g_T(T(j1)) meets a gap.
template <Scalar T>
std::size_t return_depth(const BranchSystem& s, const PiecewiseMap& f, const Block<T>& block, Symbol j1) {
  const ReturnMap<T> g = make_return_map(s, f, block);
  const Block<T> sub = block_of<T>(s, block.word + Word{j1});
  return detail::max_return_steps(s, g(sub.interval), nullptr);
}

// ---------------------------------------------------------------------------
// Affine self-maps of the affine Cantor set

struct AffineSelfMap {
  AffineMap<Rational> map;
  std::size_t verified_depth = 0;

  friend bool operator==(const AffineSelfMap& a, const AffineSelfMap& b) { return a.map == b.map; }
};

inline constexpr std::size_t kSelfMapVerifyDepth = 8;

/// h(L) inside L, h(L)'s endpoints survive `depth` iterates, and every gap of
/// level <= depth lands exactly on a gap.
inline bool verify_selfmap(const BranchSystem& r, const AffineMap<Rational>& h, std::size_t depth) {
  if (!r.is_affine()) fail(ErrorKind::precondition, "self-map verification needs an affine system");
  if (h.slope == 0) return false;
  const Interval<Rational> image = h(r.ambient());
  if (!r.ambient().contains(image)) return false;
  for (const Rational& endpoint : {image.lo, image.hi})
    if (!std::holds_alternative<Word>(itinerary(r, endpoint, depth))) return false;
  for (const auto& g : gaps_up_to<Rational>(r, depth))
    if (!locate_gap(r, h(g.interval), depth + kLocateDepth)) return false;
  return true;
}

/// The affine map sending J_i(theta) onto J_j with the triple's orientation, kept if it verifies.
inline std::optional<AffineSelfMap> solve_affine_selfmap(const BranchSystem& r, const Triple& t,
                                                         std::size_t verify_depth = kSelfMapVerifyDepth) {
  if (!r.is_affine()) fail(ErrorKind::precondition, "solve_affine_selfmap needs an affine system");
  const Interval<Rational> anchor = phi_word(r, t.theta, r.level0_gap(t.i));
  const auto h = AffineMap<Rational>::matching(anchor, r.level0_gap(t.j), t.sign);
  if (!verify_selfmap(r, h, verify_depth)) return std::nullopt;
  return AffineSelfMap{h, verify_depth};
}

/// Brute force: every map sending a gap of level <= depth_a onto a level-0 gap, either orientation.
inline std::vector<AffineSelfMap> selfmap_oracle(const BranchSystem& r, std::size_t depth_a, std::size_t verify_depth) {
  if (!r.is_affine()) fail(ErrorKind::precondition, "selfmap_oracle needs an affine system");
  std::vector<AffineSelfMap> out;
  const auto targets = level0_gaps<Rational>(r);
  for (const auto& from : gaps_up_to<Rational>(r, depth_a)) {
    for (const auto& to : targets) {
      for (int sign : {1, -1}) {
        const auto h = AffineMap<Rational>::matching(from.interval, to.interval, sign);
        if (std::find(out.begin(), out.end(), AffineSelfMap{h, 0}) != out.end()) continue;
        if (verify_selfmap(r, h, verify_depth)) out.push_back(AffineSelfMap{h, verify_depth});
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const AffineSelfMap& a, const AffineSelfMap& b) {
    return a.map.slope != b.map.slope ? a.map.slope < b.map.slope : a.map.intercept < b.map.intercept;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Forced gap images

struct GapPrediction {
  double band_lo = 0.0;  // admissible image lengths
  double band_hi = 0.0;
  Interval<Rational> predicted_position;
  std::vector<GapId<Rational>> candidates;
};

namespace detail {

// Signed separation of g from a: positive when g lies to the right.
inline Rational signed_offset(const Interval<Rational>& a, const Interval<Rational>& g) {
  if (g.lo >= a.hi) return g.lo - a.hi;
  if (g.hi <= a.lo) return -(a.lo - g.hi);
  return Rational(0);
}

struct GapKey {
  int index;
  Word word;
  friend auto operator<=>(const GapKey&, const GapKey&) = default;
};

class GapPredictor {
 public:
  GapPredictor(const BranchSystem& r, const Triple& t, double eta)
      : r_(r), eta_(eta), target_(r.level0_gap(t.j)), anchor_(phi_word(r, t.theta, r.level0_gap(t.i))),
        h_(AffineMap<Rational>::matching(anchor_, target_, t.sign)) {}

  GapPrediction predict(const GapId<Rational>& gap) {
    if (auto it = memo_.find(key(gap)); it != memo_.end()) return it->second;

    GapPrediction out{0.0, 0.0, h_(gap.interval), {}};
    const Rational predicted_len = out.predicted_position.length();
    out.band_lo = std::exp(-3 * eta_) * to_double(predicted_len);
    out.band_hi = std::exp(3 * eta_) * to_double(predicted_len);

    std::vector<std::pair<Interval<Rational>, Interval<Rational>>> anchors{{anchor_, target_}};
    for (const auto& n : lower_neighbours(gap)) {
      GapPrediction np = predict(n);
      if (np.candidates.size() == 1) anchors.emplace_back(n.interval, np.candidates.front().interval);
    }

    const double len_slack = 3 * eta_ + 1e-12;
    const double off_slack = 2 * eta_ + 1e-12;
    const Rational scale = abs(h_.slope);
    for (const auto& c : pool(out.band_lo, out.band_hi)) {
      if (std::abs(std::log(to_double(c.interval.length() / predicted_len))) > len_slack) continue;
      if (abs(c.interval.midpoint() - out.predicted_position.midpoint()) > target_.length()) continue;
      bool ok = true;
      for (const auto& [src, img] : anchors) {
        const Rational c1 = signed_offset(src, gap.interval);
        const Rational c2 = signed_offset(img, c.interval);
        if (c1 == 0) {
          ok = c.interval == img;
        } else {
          const Rational expected = c1 * scale * h_.orientation();
          ok = sign_of(c2) == sign_of(expected) && std::abs(std::log(to_double(c2 / expected))) <= off_slack;
        }
        if (!ok) break;
      }
      if (ok) out.candidates.push_back(c);
    }
    memo_.emplace(key(gap), out);
    return out;
  }

 private:
  static GapKey key(const GapId<Rational>& g) { return GapKey{g.index, g.word}; }

  // Nearest gaps of strictly lower level on each side.
  std::vector<GapId<Rational>> lower_neighbours(const GapId<Rational>& gap) {
    std::vector<GapId<Rational>> out;
    if (gap.level() == 0) return out;
    const auto lower = gaps_up_to<Rational>(r_, gap.level() - 1);
    const GapId<Rational>* left = nullptr;
    const GapId<Rational>* right = nullptr;
    for (const auto& g : lower) {
      if (g.interval.hi <= gap.interval.lo && (!left || g.interval.hi > left->interval.hi)) left = &g;
      if (g.interval.lo >= gap.interval.hi && (!right || g.interval.lo < right->interval.lo)) right = &g;
    }
    if (left) out.push_back(*left);
    if (right) out.push_back(*right);
    return out;
  }

  // Gaps at every level whose length range meets [lo, hi].
  const std::vector<GapId<Rational>>& pool(double lo, double hi) {
    auto& cached = pools_[{lo, hi}];
    if (!cached.empty()) return cached;
    Rational min_ratio(1), max_ratio(0);
    for (const auto& b : r_.branches()) {
      const Rational q = b.domain.length() / r_.ambient().length();
      min_ratio = std::min(min_ratio, q);
      max_ratio = std::max(max_ratio, q);
    }
    Rational min_j = r_.level0_gap(1).length(), max_j = min_j;
    for (int i = 2; i < static_cast<int>(r_.k()); ++i) {
      min_j = std::min(min_j, r_.level0_gap(i).length());
      max_j = std::max(max_j, r_.level0_gap(i).length());
    }
    const double slack = 1.0 + 1e-12;
    for (std::size_t level = 0;; ++level) {
      if (to_double(max_j) * slack < lo) break;
      if (to_double(min_j) <= hi * slack) {
        auto g = gaps<Rational>(r_, level);
        cached.insert(cached.end(), g.begin(), g.end());
      }
      min_j *= min_ratio;
      max_j *= max_ratio;
    }
    detail::sort_left_to_right(cached);
    return cached;
  }

  const BranchSystem& r_;
  double eta_;
  Interval<Rational> target_;
  Interval<Rational> anchor_;
  AffineMap<Rational> h_;
  std::map<GapKey, GapPrediction> memo_;
  std::map<std::pair<double, double>, std::vector<GapId<Rational>>> pools_;
};

}  // namespace detail

/// Admissible images of a gap under a map realizing the triple with nonlinearity below eta.
/// `gap` is addressed in L (the block-relative word).
inline GapPrediction predict_gap_image(const BranchSystem& r, const Triple& t, const GapId<Rational>& gap, double eta,
                                       std::optional<std::size_t> level_bound = std::nullopt) {
  if (!r.is_affine()) fail(ErrorKind::precondition, "predict_gap_image needs the affine model");
  if (!(eta >= 0 && eta < 0.5)) fail(ErrorKind::precondition, "eta must lie in [0, 1/2)");
  const std::size_t l = level_bound ? *level_bound : gap_level_bound(r).l;
  if (gap.level() > 2 * l + 2)
    fail(ErrorKind::precondition, "gap level " + std::to_string(gap.level()) + " exceeds 2l+2 = " + std::to_string(2 * l + 2));
  GapPrediction out = detail::GapPredictor(r, t, eta).predict(gap);
  if (out.candidates.empty()) fail(ErrorKind::not_found, "no admissible image for gap " + gap.word.to_string());
  return out;
}

// ---------------------------------------------------------------------------
// Model map

struct CoverEntry {
  Word block;
  Word word_t;
  AffineSelfMap h;
};

/// F on phi^R(block)(L) equals phi^R(word_t) ∘ h ∘ R^|block|.
inline PiecewiseMap assemble_model_diffeo(const BranchSystem& r, const std::vector<CoverEntry>& cover) {
  if (!r.is_affine()) fail(ErrorKind::precondition, "the model map is built over the affine system");
  if (cover.empty()) fail(ErrorKind::precondition, "empty cover");
  Rational mass(0);
  for (std::size_t a = 0; a < cover.size(); ++a) {
    if (!cover[a].block.valid_for(r.k()) || !cover[a].word_t.valid_for(r.k()))
      fail(ErrorKind::precondition, "cover entry " + std::to_string(a + 1) + " has symbols outside 1..k");
    for (std::size_t b = 0; b < cover.size(); ++b)
      if (a != b && cover[b].block.starts_with(cover[a].block))
        fail(ErrorKind::precondition, "overlapping cover: block " + cover[a].block.to_string() + " contains " +
                                          cover[b].block.to_string());
    Rational w(1);
    for (std::size_t q = 0; q < cover[a].block.size(); ++q) w /= static_cast<long long>(r.k());
    mass += w;
  }
  if (mass != 1) fail(ErrorKind::precondition, "cover blocks do not cover C_R");

  std::vector<MapPiece> pieces;
  for (const auto& e : cover) {
    const std::size_t depth = e.h.verified_depth == 0 ? kSelfMapVerifyDepth : e.h.verified_depth;
    if (!verify_selfmap(r, e.h.map, depth))
      fail(ErrorKind::precondition, "unverified self-map on block " + e.block.to_string());
    pieces.push_back(MapPiece{phi_word(r, e.block, r.ambient()), e.word_t, e.h.map.after(block_return_affine(r, e.block))});
  }
  return PiecewiseMap(std::move(pieces));
}

}  // namespace hcantor
