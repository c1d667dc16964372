#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace liffig {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class FaultKind {
  overflow,
  div_by_zero,
  index_out_of_bounds,
  fuel_exhausted,
  domain_error,
  write_conflict,
  undefined_variable,
  opaque_guard,
};

inline std::string_view to_string(FaultKind kind) {
  switch (kind) {
    case FaultKind::overflow: return "overflow";
    case FaultKind::div_by_zero: return "div_by_zero";
    case FaultKind::index_out_of_bounds: return "index_out_of_bounds";
    case FaultKind::fuel_exhausted: return "fuel_exhausted";
    case FaultKind::domain_error: return "domain_error";
    case FaultKind::write_conflict: return "write_conflict";
    case FaultKind::undefined_variable: return "undefined_variable";
    case FaultKind::opaque_guard: return "opaque_guard";
  }
  return "unknown";
}

/// Raised while evaluating terms, formulas or commands.
class FaultError : public Error {
 public:
  FaultError(FaultKind kind, const std::string& what)
      : Error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(what) {}

  FaultKind kind() const noexcept { return kind_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  FaultKind kind_;
  std::string detail_;
};

/// A formula could not be evaluated because it is prose or still refers to a label.
class NotEvaluable : public Error {
 public:
  using Error::Error;
};

class ResolveError : public Error {
 public:
  enum class Kind { cyclic_reference, unknown_label };

  ResolveError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

}  // namespace liffig
