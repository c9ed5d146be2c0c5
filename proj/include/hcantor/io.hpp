#pragma once

// File formats. System, piecewise-map and cover files are JSON; bulk interval
// dumps are CSV. Rationals travel as "p/q" strings, binary64 values as
// shortest round-trip decimals.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "hcantor/return_rigidity.hpp"
#include "hcantor/conjugacy.hpp"

namespace hcantor::io {

using Json = nlohmann::ordered_json;

inline Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    fail(ErrorKind::parse, what + ": " + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::parse, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// A rational given as "p/q", an integer/decimal string, or a JSON number (read as its shortest decimal).
inline Rational rational_of(const Json& j, const std::string& what) {
  if (j.is_string()) {
    try {
      return parse_rational(j.get<std::string>());
    } catch (const Error& e) {
      fail(ErrorKind::parse, what + ": " + e.what());
    }
  }
  if (j.is_number_integer()) return Rational(j.get<long long>());
  if (j.is_number()) return decimal_rational(j.get<double>());
  fail(ErrorKind::parse, what + " must be a rational string or a number");
}

inline double number_of(const Json& j, const std::string& what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return to_double(rational_of(j, what));
  fail(ErrorKind::parse, what + " must be a number");
}

inline int int_of(const Json& j, const std::string& what) {
  if (!j.is_number_integer()) fail(ErrorKind::parse, what + " must be an integer");
  return j.get<int>();
}

inline Interval<Rational> interval_of(const Json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2) fail(ErrorKind::parse, what + " must be a two-element array");
  return Interval<Rational>(rational_of(j[0], what + "[0]"), rational_of(j[1], what + "[1]"));
}

inline const Json& field(const Json& j, const char* key, const std::string& what) {
  if (!j.is_object() || !j.contains(key)) fail(ErrorKind::parse, what + " lacks \"" + key + "\"");
  return j.at(key);
}

inline Word word_of(const Json& j, const std::string& what) {
  if (j.is_string()) return Word::parse(j.get<std::string>());
  if (j.is_array()) {
    std::vector<int> syms;
    for (const auto& s : j) syms.push_back(int_of(s, what));
    return Word(std::move(syms));
  }
  fail(ErrorKind::parse, what + " must be a word string or symbol array");
}

inline Json to_json(const Rational& r) { return to_string(r); }
inline Json to_json(double x) { return x; }

template <Scalar T>
Json to_json(const Interval<T>& iv) {
  return Json::array({to_json(iv.lo), to_json(iv.hi)});
}

// ---------------------------------------------------------------------------
// Branch systems
//
// {"L": ["0","1"], "alpha": 1,
//  "branches": [{"domain": ["0","1/3"], "orientation": 1, "amplitude": 0}, ...]}

inline BranchSystem system_from_json(const Json& j) {
  const std::string what = "system";
  const Interval<Rational> L = interval_of(field(j, "L", what), "L");
  const double alpha = j.contains("alpha") ? number_of(j.at("alpha"), "alpha") : 1.0;
  const Json& bs = field(j, "branches", what);
  if (!bs.is_array()) fail(ErrorKind::parse, "branches must be an array");
  std::vector<Interval<Rational>> domains;
  std::vector<int> orientations;
  std::vector<double> amplitudes;
  for (std::size_t q = 0; q < bs.size(); ++q) {
    const std::string bw = "branch " + std::to_string(q + 1);
    domains.push_back(interval_of(field(bs[q], "domain", bw), bw + " domain"));
    orientations.push_back(bs[q].contains("orientation") ? int_of(bs[q].at("orientation"), bw + " orientation") : 1);
    amplitudes.push_back(bs[q].contains("amplitude") ? number_of(bs[q].at("amplitude"), bw + " amplitude") : 0.0);
  }
  const BranchSystem base = make_affine_system(L, domains, orientations, alpha);
  for (double a : amplitudes)
    if (a != 0.0) return make_perturbed_system(base, amplitudes);
  return base;
}

inline BranchSystem load_system(const std::string& path) {
  return system_from_json(parse_json(read_file(path), path));
}

inline Json to_json(const BranchSystem& s) {
  Json out;
  out["L"] = to_json(s.ambient());
  out["alpha"] = s.alpha();
  Json bs = Json::array();
  for (const auto& b : s.branches()) {
    Json e;
    e["domain"] = to_json(b.domain);
    e["orientation"] = b.orientation;
    e["amplitude"] = b.amplitude;
    bs.push_back(e);
  }
  out["branches"] = bs;
  return out;
}

// ---------------------------------------------------------------------------
// Piecewise maps
//
// {"pieces": [{"domain": ["0","1/3"], "word": "1", "slope": "-1", "intercept": "1/3"}, ...]}

inline PiecewiseMap map_from_json(const Json& j) {
  const Json& ps = field(j, "pieces", "piecewise map");
  if (!ps.is_array()) fail(ErrorKind::parse, "pieces must be an array");
  std::vector<MapPiece> pieces;
  for (std::size_t q = 0; q < ps.size(); ++q) {
    const std::string pw = "piece " + std::to_string(q + 1);
    const Json& p = ps[q];
    MapPiece m{interval_of(field(p, "domain", pw), pw + " domain"),
               p.contains("word") ? word_of(p.at("word"), pw + " word") : Word{},
               AffineMap<Rational>{p.contains("slope") ? rational_of(p.at("slope"), pw + " slope") : Rational(1),
                                   p.contains("intercept") ? rational_of(p.at("intercept"), pw + " intercept")
                                                           : Rational(0)}};
    pieces.push_back(std::move(m));
  }
  return PiecewiseMap(std::move(pieces));
}

inline PiecewiseMap load_map(const std::string& path) { return map_from_json(parse_json(read_file(path), path)); }

inline Json to_json(const PiecewiseMap& f) {
  Json ps = Json::array();
  for (const auto& p : f.pieces()) {
    Json e;
    e["domain"] = to_json(p.domain);
    e["word"] = p.word.to_string();
    e["slope"] = to_json(p.inner.slope);
    e["intercept"] = to_json(p.inner.intercept);
    ps.push_back(e);
  }
  Json out;
  out["pieces"] = ps;
  return out;
}

// ---------------------------------------------------------------------------
// Covers for the model map
//
// {"cover": [{"block": "1", "word_t": "1", "triple": "1,1,,-"},
//            {"block": "2", "word_t": "2", "slope": "1", "intercept": "0"}]}
// An entry names its self-map either through a triple (solved) or directly.

struct CoverSpec {
  std::vector<CoverEntry> entries;
  std::vector<std::optional<Triple>> triples;  // constructing triple per entry, when given
};

inline CoverSpec cover_from_json(const BranchSystem& r, const Json& j, std::size_t verify_depth) {
  const Json& cs = field(j, "cover", "cover file");
  if (!cs.is_array()) fail(ErrorKind::parse, "cover must be an array");
  CoverSpec out;
  for (std::size_t q = 0; q < cs.size(); ++q) {
    const std::string ew = "cover entry " + std::to_string(q + 1);
    const Json& e = cs[q];
    CoverEntry entry{word_of(field(e, "block", ew), ew + " block"),
                     e.contains("word_t") ? word_of(e.at("word_t"), ew + " word_t") : Word{},
                     {}};
    std::optional<Triple> t;
    if (e.contains("triple")) {
      if (!e.at("triple").is_string()) fail(ErrorKind::parse, ew + " triple must be a string");
      t = Triple::parse(e.at("triple").get<std::string>());
      auto h = solve_affine_selfmap(r, *t, verify_depth);
      if (!h) fail(ErrorKind::precondition, ew + ": triple " + t->to_string() + " has no affine self-map");
      entry.h = *h;
    } else {
      entry.h = AffineSelfMap{AffineMap<Rational>{rational_of(field(e, "slope", ew), ew + " slope"),
                                                  e.contains("intercept") ? rational_of(e.at("intercept"), ew)
                                                                          : Rational(0)},
                              verify_depth};
    }
    out.entries.push_back(std::move(entry));
    out.triples.push_back(t);
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV dumps

inline std::string csv_number(const Rational& r) { return shortest_decimal(to_double(r)); }
inline std::string csv_number(double x) { return shortest_decimal(x); }
inline std::string csv_exact(const Rational& r) { return to_string(r); }
inline std::string csv_exact(double) { return ""; }

template <Scalar T>
void write_blocks_csv(std::ostream& os, const std::vector<Block<T>>& bs) {
  os << "level,word,lo,hi,lo_exact,hi_exact\n";
  for (const auto& b : bs)
    os << b.level() << ',' << b.word.to_string() << ',' << csv_number(b.interval.lo) << ','
       << csv_number(b.interval.hi) << ',' << csv_exact(b.interval.lo) << ',' << csv_exact(b.interval.hi) << '\n';
}

template <Scalar T>
void write_gaps_csv(std::ostream& os, const std::vector<GapId<T>>& gs) {
  os << "level,index,word,lo,hi,lo_exact,hi_exact\n";
  for (const auto& g : gs)
    os << g.level() << ',' << g.index << ',' << g.word.to_string() << ',' << csv_number(g.interval.lo) << ','
       << csv_number(g.interval.hi) << ',' << csv_exact(g.interval.lo) << ',' << csv_exact(g.interval.hi) << '\n';
}

}  // namespace hcantor::io
