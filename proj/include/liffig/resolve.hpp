#pragma once

// Expansion of label references inside assertions ("B: A & x>y").

#include <functional>
#include <string>
#include <vector>

#include "liffig/ast.hpp"
#include "liffig/errors.hpp"

namespace liffig {

/// Looks up the raw (unresolved) assertion of a label; returns nullptr if unknown.
using AssertionLookup = std::function<const Formula*(std::string_view)>;

namespace detail {

inline Formula expand(const Formula& f, const AssertionLookup& lookup,
                      std::vector<std::string>& active) {
  return std::visit(
      [&](const auto& n) -> Formula {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, LabelRef>) {
          for (const auto& a : active) {
            if (a == n.label) {
              throw ResolveError(ResolveError::Kind::cyclic_reference,
                                 "cyclic assertion reference through label " + n.label);
            }
          }
          const Formula* target = lookup(n.label);
          if (target == nullptr) {
            throw ResolveError(ResolveError::Kind::unknown_label,
                               "assertion refers to unknown label " + n.label);
          }
          active.push_back(n.label);
          Formula out = expand(*target, lookup, active);
          active.pop_back();
          return out;
        } else if constexpr (std::is_same_v<N, Not>) {
          return Formula(Not{expand(n.operand, lookup, active)}, f.span());
        } else if constexpr (std::is_same_v<N, And> || std::is_same_v<N, Or> ||
                             std::is_same_v<N, Implies>) {
          return Formula(N{expand(n.lhs, lookup, active), expand(n.rhs, lookup, active)},
                         f.span());
        } else if constexpr (std::is_same_v<N, ForAll> || std::is_same_v<N, Exists>) {
          return Formula(N{n.var, n.lo, n.hi, expand(n.body, lookup, active)}, f.span());
        } else {
          return f;
        }
      },
      f.node());
}

}  // namespace detail

/// Replaces every LabelRef in `f` by the referenced assertion, recursively.
/// `origin` (if non-empty) is the label that owns `f`, so that self-reference is
/// reported as a cycle.
inline Formula resolve_formula(const Formula& f, const AssertionLookup& lookup,
                               const std::string& origin = {}) {
  std::vector<std::string> active;
  if (!origin.empty()) active.push_back(origin);
  return detail::expand(f, lookup, active);
}

inline AssertionLookup assertions_of(const Program& program) {
  return [&program](std::string_view label) -> const Formula* {
    const Block* b = program.find_block(label);
    return b ? &b->assertion : nullptr;
  };
}

/// The assertion of `label` with all label references expanded. Opaque parts stay opaque.
inline Formula resolve_assertion(const Program& program, std::string_view label) {
  const Block* b = program.find_block(label);
  if (b == nullptr) {
    throw ResolveError(ResolveError::Kind::unknown_label, "unknown label " + std::string(label));
  }
  return resolve_formula(b->assertion, assertions_of(program), b->label);
}

}  // namespace liffig
