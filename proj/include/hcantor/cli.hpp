#pragma once

// Command dispatch behind the hcantor tool. Every command writes one report
// (JSON, or CSV for `gaps`) to the configured output and returns an exit code;
// failures produce a JSON error object on the error stream.

#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "hcantor/conjugacy.hpp"
#include "hcantor/io.hpp"

namespace hcantor::cli {

enum class Command { build, gaps, distortion, conjugate, return_analysis, selfmaps, model };

inline std::optional<Command> command_from_string(std::string_view s) {
  if (s == "build") return Command::build;
  if (s == "gaps") return Command::gaps;
  if (s == "distortion") return Command::distortion;
  if (s == "conjugate") return Command::conjugate;
  if (s == "return-analysis") return Command::return_analysis;
  if (s == "selfmaps") return Command::selfmaps;
  if (s == "model") return Command::model;
  return std::nullopt;
}

inline const char* command_name(Command c) {
  switch (c) {
    case Command::build: return "build";
    case Command::gaps: return "gaps";
    case Command::distortion: return "distortion";
    case Command::conjugate: return "conjugate";
    case Command::return_analysis: return "return-analysis";
    case Command::selfmaps: return "selfmaps";
    case Command::model: return "model";
  }
  return "?";
}

struct RunConfig {
  Command command = Command::build;
  std::string system_path;
  std::string output_path;  // empty: the output stream passed to run()
  std::string csv_path;     // optional bulk dump (build: blocks, conjugate: samples)

  std::optional<std::size_t> depth;  // per-command meaning, see default_depth()
  std::optional<std::size_t> level;  // gaps: level to dump
  std::optional<std::size_t> depth_r;
  std::size_t depth_a = 2;           // selfmaps: oracle candidate depth
  std::size_t grid = 257;
  std::uint64_t seed = 0;
  std::size_t samples = 1000;

  std::string triple;
  std::string map_path;
  std::string cover_path;
  std::string points_path;

  double delta = 0.005;                  // bounded distortion threshold
  std::optional<double> level_delta;     // gap-level bound delta; default (min mu - 1)/2
  double eta = 0.05;
  double eps = 0.1;
  double M = 1.0;
  std::optional<double> alpha;           // overrides the system file's exponent
};

inline std::size_t default_depth(Command c) {
  switch (c) {
    case Command::build: return 4;
    case Command::gaps: return 1;
    case Command::distortion: return 8;
    case Command::conjugate: return 20;
    case Command::return_analysis: return 2;
    case Command::selfmaps: return kSelfMapVerifyDepth;
    case Command::model: return kSelfMapVerifyDepth;
  }
  return 0;
}

inline int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::parse: return 2;
    case ErrorKind::invariant: return 3;
    case ErrorKind::depth_cap: return 4;
    default: return 5;
  }
}

namespace detail {

using io::Json;

inline std::string gap_label(int index, const Word& w) { return std::to_string(index) + ":" + w.to_string(); }

inline Json map_json(const AffineMap<Rational>& h) {
  Json j;
  j["slope"] = to_string(h.slope);
  j["intercept"] = to_string(h.intercept);
  return j;
}

inline BranchSystem load(const RunConfig& cfg) {
  if (cfg.system_path.empty()) fail(ErrorKind::parse, "--system is required");
  BranchSystem s = io::load_system(cfg.system_path);
  if (cfg.alpha) {
    std::vector<Branch> bs = s.branches();
    s = BranchSystem(s.ambient(), std::move(bs), *cfg.alpha);
  }
  return s;
}

inline Json header(const RunConfig& cfg, const BranchSystem& s) {
  Json j;
  j["command"] = command_name(cfg.command);
  j["system"] = io::to_json(s);
  return j;
}

template <Scalar T>
Json level_summary(const BranchSystem& s, std::size_t depth) {
  Json levels = Json::array();
  for (std::size_t n = 0; n <= depth; ++n) {
    const auto bs = blocks<T>(s, n);
    T measure(0);
    for (const auto& b : bs) measure += b.interval.length();
    Json e;
    e["level"] = n;
    e["blocks"] = bs.size();
    e["gaps"] = gaps<T>(s, n).size();
    e["block_measure"] = io::to_json(measure);
    levels.push_back(e);
  }
  return levels;
}

inline Json run_build(const RunConfig& cfg, const BranchSystem& s, std::size_t depth) {
  Json j = header(cfg, s);
  j["k"] = s.k();
  j["affine"] = s.is_affine();
  j["depth"] = depth;
  if (s.is_affine()) {
    j["levels"] = level_summary<Rational>(s, depth);
    if (!cfg.csv_path.empty()) {
      std::ofstream os(cfg.csv_path);
      io::write_blocks_csv(os, blocks<Rational>(s, depth));
    }
  } else {
    j["levels"] = level_summary<double>(s, depth);
    if (!cfg.csv_path.empty()) {
      std::ofstream os(cfg.csv_path);
      io::write_blocks_csv(os, blocks<double>(s, depth));
    }
  }
  return j;
}

inline Json run_distortion(const RunConfig& cfg, const BranchSystem& s, std::size_t depth) {
  Json j = header(cfg, s);
  const ClassReport cls = class_membership(s, cfg.M, cfg.eps, cfg.grid);
  j["nonlinearity"] = nonlinearity(s, cfg.grid).value;
  Json c;
  c["M"] = cls.M;
  c["eps"] = cls.eps;
  c["alpha"] = cls.alpha;
  c["holder_constant"] = cls.holder_constant;
  c["sigma"] = cls.sigma;
  c["in_class"] = cls.in_class;
  c["grid"] = cls.grid;
  j["class"] = c;

  const BoundedDistortion bd = bounded_distortion_depth(s, cfg.delta, depth);
  Json b;
  b["delta"] = bd.delta;
  b["max_level"] = bd.max_level;
  b["certified"] = bd.certified();
  if (bd.certified()) {
    b["N"] = bd.N;
  } else {
    b["N"] = nullptr;
  }
  b["worst"] = bd.worst;
  b["blocks_scanned"] = bd.blocks_scanned;
  j["bounded_distortion"] = b;

  const BranchSystem r = s.affine_model();
  const LevelBound lb = cfg.level_delta ? gap_level_bound(r, *cfg.level_delta) : gap_level_bound(r);
  Json l;
  l["mu"] = lb.mu;
  l["delta"] = lb.delta;
  l["beta"] = lb.beta;
  l["l"] = lb.l;
  j["level_bound"] = l;

  const GapComparison gc = compare_gaps(s, r, depth);
  Json g;
  g["level"] = gc.level;
  g["c"] = gc.c;
  g["gaps_compared"] = gc.gaps_compared;
  j["gap_comparison"] = g;
  return j;
}

template <Scalar T>
std::vector<T> sample_points(const RunConfig& cfg, const BranchSystem& s) {
  std::vector<T> xs;
  if (!cfg.points_path.empty()) {
    std::istringstream in(io::read_file(cfg.points_path));
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      const Rational v = parse_rational(line);
      xs.push_back(from_rational<T>(v));
    }
  } else {
    // 53-bit dyadic draws straight from the raw generator output.
    std::mt19937_64 gen(cfg.seed);
    const Rational lo = s.ambient().lo, len = s.ambient().length();
    for (std::size_t q = 0; q < cfg.samples; ++q) {
      const Rational u(BigInt(gen() >> 11), BigInt(1) << 53);
      xs.push_back(from_rational<T>(lo + len * u));
    }
  }
  std::sort(xs.begin(), xs.end());
  return xs;
}

template <Scalar T>
Json run_conjugate_as(const RunConfig& cfg, const BranchSystem& s, std::size_t depth) {
  const ConjugacyMap psi = ConjugacyMap::to_affine_model(s, depth);
  const std::vector<T> xs = sample_points<T>(cfg, s);
  Json j = header(cfg, s);
  j["depth"] = depth;
  j["seed"] = cfg.seed;
  Json rows = Json::array();
  std::size_t resolved = 0;
  bool monotone = true;
  double max_width = 0.0;
  std::optional<PsiValue> prev;
  std::ofstream csv;
  if (!cfg.csv_path.empty()) {
    csv.open(cfg.csv_path);
    csv << "x,psi_lo,psi_hi,resolved,word,gap\n";
  }
  for (const T& x : xs) {
    PsiValue v = psi_eval(psi, x);
    if (v.resolved) ++resolved;
    max_width = std::max(max_width, v.width());
    if (prev && (v.lo < prev->lo || v.hi < prev->hi)) monotone = false;
    Json e;
    e["x"] = io::to_json(x);
    e["psi_lo"] = to_string(v.lo);
    e["psi_hi"] = to_string(v.hi);
    e["resolved"] = v.resolved;
    e["word"] = v.word.to_string();
    e["gap"] = v.gap_index;
    rows.push_back(e);
    if (csv.is_open())
      csv << io::csv_number(x) << ',' << to_string(v.lo) << ',' << to_string(v.hi) << ',' << (v.resolved ? 1 : 0)
          << ',' << v.word.to_string() << ',' << v.gap_index << '\n';
    prev = std::move(v);
  }
  j["count"] = xs.size();
  j["resolved"] = resolved;
  j["monotone"] = monotone;
  j["max_bracket_width"] = max_width;
  j["samples"] = rows;
  return j;
}

template <Scalar T>
Json run_return_as(const RunConfig& cfg, const BranchSystem& s, std::size_t depth_m) {
  if (cfg.map_path.empty()) fail(ErrorKind::parse, "return-analysis needs --map");
  const PiecewiseMap f = io::load_map(cfg.map_path);
  const std::size_t depth_r = cfg.depth_r ? *cfg.depth_r : depth_m + 4;
  const auto records = extract_triples<T>(s, f, depth_m, depth_r);
  Json j = header(cfg, s);
  j["depth_m"] = depth_m;
  j["depth_r"] = depth_r;
  Json rs = Json::array();
  std::size_t max_p = 0;
  for (const auto& r : records) {
    Json e;
    e["block"] = r.block.word.to_string();
    e["u"] = r.u;
    e["sign"] = r.sign;
    if (r.triple) {
      e["triple"] = r.triple->to_string();
      max_p = std::max(max_p, r.triple->p());
    } else {
      e["triple"] = nullptr;
    }
    if (r.ok()) {
      e["return_depth"] = Json::array();
      for (Symbol j1 = 1; j1 <= static_cast<Symbol>(s.k()); ++j1)
        e["return_depth"].push_back(return_depth(s, f, r.block, j1));
    }
    Json gi = Json::array();
    for (const auto& g : r.gap_images) {
      Json x;
      x["gap"] = gap_label(g.gap.index, g.gap.word);
      x["image"] = g.image ? Json(gap_label(g.image->index, g.image->word)) : Json(nullptr);
      gi.push_back(x);
    }
    e["gap_images"] = gi;
    e["failure"] = r.failure;
    rs.push_back(e);
  }
  j["records"] = rs;
  Json rec = Json::array();
  for (const auto& t : recurring_triples(records)) rec.push_back(t.to_string());
  j["recurring_triples"] = rec;
  j["max_p"] = max_p;
  return j;
}

inline Json run_selfmaps(const RunConfig& cfg, const BranchSystem& r, std::size_t verify_depth) {
  if (!r.is_affine()) fail(ErrorKind::precondition, "selfmaps needs an affine system");
  Json j = header(cfg, r);
  j["verify_depth"] = verify_depth;
  const auto oracle = selfmap_oracle(r, cfg.depth_a, verify_depth);
  if (!cfg.triple.empty()) {
    const Triple t = Triple::parse(cfg.triple);
    j["triple"] = t.to_string();
    if (auto h = solve_affine_selfmap(r, t, verify_depth)) {
      j["map"] = map_json(h->map);
      j["in_oracle"] = std::find(oracle.begin(), oracle.end(), *h) != oracle.end();
    } else {
      j["map"] = "none";
    }
  }
  j["oracle_depth_a"] = cfg.depth_a;
  Json os = Json::array();
  for (const auto& h : oracle) os.push_back(map_json(h.map));
  j["oracle"] = os;
  return j;
}

inline Json run_model(const RunConfig& cfg, const BranchSystem& r, std::size_t verify_depth) {
  if (cfg.cover_path.empty()) fail(ErrorKind::parse, "model needs --cover");
  const io::CoverSpec spec =
      io::cover_from_json(r, io::parse_json(io::read_file(cfg.cover_path), cfg.cover_path), verify_depth);
  const PiecewiseMap F = assemble_model_diffeo(r, spec.entries);
  Json j = io::to_json(F);
  Json cover = Json::array();
  for (std::size_t q = 0; q < spec.entries.size(); ++q) {
    Json e;
    e["block"] = spec.entries[q].block.to_string();
    e["word_t"] = spec.entries[q].word_t.to_string();
    e["h"] = map_json(spec.entries[q].h.map);
    e["triple"] = spec.triples[q] ? Json(spec.triples[q]->to_string()) : Json(nullptr);
    cover.push_back(e);
  }
  j["cover"] = cover;
  j["verify_depth"] = verify_depth;
  return j;
}

inline void emit(const RunConfig& cfg, std::ostream& out, const std::string& text) {
  if (cfg.output_path.empty()) {
    out << text;
    return;
  }
  std::ofstream os(cfg.output_path, std::ios::binary);
  if (!os) fail(ErrorKind::parse, "cannot write '" + cfg.output_path + "'");
  os << text;
}

}  // namespace detail

inline io::Json error_json(ErrorKind kind, const std::string& message) {
  io::Json j;
  j["error"]["kind"] = hcantor::to_string(kind);
  j["error"]["message"] = message;
  return j;
}

inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    const BranchSystem s = detail::load(cfg);
    const std::size_t depth = cfg.depth ? *cfg.depth : default_depth(cfg.command);
    if (cfg.command == Command::gaps) {
      const std::size_t m = cfg.level ? *cfg.level : depth;
      check_level_cap(s.k(), m);
      std::ostringstream os;
      if (s.is_affine()) {
        io::write_gaps_csv(os, gaps<Rational>(s, m));
      } else {
        io::write_gaps_csv(os, gaps<double>(s, m));
      }
      detail::emit(cfg, out, os.str());
      return 0;
    }
    io::Json report;
    switch (cfg.command) {
      case Command::build:
        check_level_cap(s.k(), depth);
        report = detail::run_build(cfg, s, depth);
        break;
      case Command::distortion:
        report = detail::run_distortion(cfg, s, depth);
        break;
      case Command::conjugate:
        report = s.is_affine() ? detail::run_conjugate_as<Rational>(cfg, s, depth)
                               : detail::run_conjugate_as<double>(cfg, s, depth);
        break;
      case Command::return_analysis:
        check_level_cap(s.k(), cfg.depth_r.value_or(depth + 4));
        report = s.is_affine() ? detail::run_return_as<Rational>(cfg, s, depth)
                               : detail::run_return_as<double>(cfg, s, depth);
        break;
      case Command::selfmaps:
        check_level_cap(s.k(), depth);
        report = detail::run_selfmaps(cfg, s, depth);
        break;
      case Command::model:
        report = detail::run_model(cfg, s, depth);
        break;
      case Command::gaps:
        break;
    }
    detail::emit(cfg, out, report.dump(2) + "\n");
    return 0;
  } catch (const Error& e) {
    err << error_json(e.kind(), e.what()).dump() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << error_json(ErrorKind::invariant, e.what()).dump() << "\n";
    return exit_code(ErrorKind::invariant);
  }
}

}  // namespace hcantor::cli
