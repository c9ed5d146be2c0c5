#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include "hcantor/error.hpp"

namespace hcantor {

/// Finite word over the branch alphabet {1..k}; printed dash-separated ("2-1").
class Word {
 public:
  Word() = default;
  Word(std::initializer_list<int> symbols) : symbols_(symbols) {}
  explicit Word(std::vector<int> symbols) : symbols_(std::move(symbols)) {}

  /// Parses "2-1-1"; the empty string (or "-", "e") is the empty word.
  static Word parse(std::string_view text) {
    Word w;
    if (text.empty() || text == "-" || text == "e") return w;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const std::size_t next = text.find('-', pos);
      const std::string_view tok = text.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos);
      if (tok.empty()) fail(ErrorKind::parse, "empty symbol in word '" + std::string(text) + "'");
      int v = 0;
      for (char c : tok) {
        if (c < '0' || c > '9') fail(ErrorKind::parse, "bad symbol in word '" + std::string(text) + "'");
        v = v * 10 + (c - '0');
      }
      w.symbols_.push_back(v);
      if (next == std::string_view::npos) break;
      pos = next + 1;
    }
    return w;
  }

  std::size_t size() const { return symbols_.size(); }
  bool empty() const { return symbols_.empty(); }
  int operator[](std::size_t i) const { return symbols_[i]; }
  int front() const { return symbols_.front(); }
  int back() const { return symbols_.back(); }
  auto begin() const { return symbols_.begin(); }
  auto end() const { return symbols_.end(); }
  const std::vector<int>& symbols() const { return symbols_; }

  void push_back(int s) { symbols_.push_back(s); }

  Word prefix(std::size_t n) const { return Word(std::vector<int>(symbols_.begin(), symbols_.begin() + static_cast<std::ptrdiff_t>(n))); }
  Word suffix_from(std::size_t n) const { return Word(std::vector<int>(symbols_.begin() + static_cast<std::ptrdiff_t>(n), symbols_.end())); }
  bool starts_with(const Word& p) const {
    return p.size() <= size() && std::equal(p.begin(), p.end(), begin());
  }

  friend Word operator+(Word a, const Word& b) {
    a.symbols_.insert(a.symbols_.end(), b.symbols_.begin(), b.symbols_.end());
    return a;
  }
  friend Word operator+(int s, const Word& w) {
    Word r;
    r.symbols_.reserve(w.size() + 1);
    r.symbols_.push_back(s);
    r.symbols_.insert(r.symbols_.end(), w.symbols_.begin(), w.symbols_.end());
    return r;
  }

  std::string to_string() const {
    std::string out;
    for (std::size_t i = 0; i < symbols_.size(); ++i) {
      if (i) out += '-';
      out += std::to_string(symbols_[i]);
    }
    return out;
  }

  /// Every symbol lies in 1..k.
  bool valid_for(std::size_t k) const {
    for (int s : symbols_)
      if (s < 1 || static_cast<std::size_t>(s) > k) return false;
    return true;
  }

  friend auto operator<=>(const Word&, const Word&) = default;
  friend bool operator==(const Word&, const Word&) = default;

 private:
  std::vector<int> symbols_;
};

}  // namespace hcantor
