#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hcantor {

enum class ErrorKind {
  parse,         // malformed input file or argument
  invariant,     // a BranchSystem / PiecewiseMap invariant does not hold
  domain,        // argument outside the set where the operation is defined
  depth_cap,     // enumeration would exceed the configured size cap
  precondition,  // operation-specific precondition violated
  inconsistent,  // two routes to the same quantity disagree
  not_found,     // a search came back empty where a result is required
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parse: return "parse";
    case ErrorKind::invariant: return "invariant";
    case ErrorKind::domain: return "domain";
    case ErrorKind::depth_cap: return "depth_cap";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::inconsistent: return "inconsistent";
    case ErrorKind::not_found: return "not_found";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace hcantor
