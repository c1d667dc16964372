#pragma once

// Abstract syntax of Liffig programs: terms, assertion formulas, commands,
// guarded commands, blocks and whole programs.
//
// Nodes are immutable and shared: copying a Term, Formula or Command copies a
// pointer. Structural equality (operator==) ignores source spans.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

namespace liffig {

struct SourceSpan {
  std::size_t line = 0;  // 1-based; 0 means "synthesized"
  std::size_t column = 0;
  std::size_t length = 0;
};

inline constexpr std::array<std::string_view, 13> kReservedWords = {
    "if", "fi", "goto", "return", "abort", "int", "all",
    "some", "in", "or", "swap", "true", "false"};

inline bool is_reserved(std::string_view word) {
  return std::find(kReservedWords.begin(), kReservedWords.end(), word) != kReservedWords.end();
}

inline bool is_valid_ident(std::string_view name) {
  if (name.empty()) return false;
  auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); };
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  if (!alpha(name.front())) return false;
  for (char c : name) {
    if (!alpha(c) && !digit(c) && c != '_') return false;
  }
  return !is_reserved(name);
}

template <class Tag>
struct NodeTraits;

template <class T, class Variant>
struct is_alternative : std::false_type {};
template <class T, class... Ts>
struct is_alternative<T, std::variant<Ts...>> : std::bool_constant<(std::is_same_v<T, Ts> || ...)> {};
template <class T, class Variant>
inline constexpr bool is_alternative_v = is_alternative<T, Variant>::value;

/// Immutable, shared AST node. `Tag` selects the set of alternatives.
template <class Tag>
class Node {
 public:
  template <class Alt>
    requires is_alternative_v<std::remove_cvref_t<Alt>, typename NodeTraits<Tag>::Variant>
  Node(Alt&& alt, SourceSpan span = {})  // NOLINT(google-explicit-constructor)
      : rep_(std::make_shared<const Rep>(
            Rep{typename NodeTraits<Tag>::Variant(std::forward<Alt>(alt)), span})) {}

  // Alternatives are only known once NodeTraits<Tag> is specialized, hence the
  // deduced return types.
  const auto& node() const { return rep_->node; }
  const SourceSpan& span() const { return rep_->span; }

  template <class Alt>
  bool is() const {
    return std::holds_alternative<Alt>(rep_->node);
  }
  template <class Alt>
  const Alt* as() const {
    return std::get_if<Alt>(&rep_->node);
  }

  friend bool operator==(const Node& a, const Node& b) {
    return a.rep_ == b.rep_ || a.rep_->node == b.rep_->node;
  }

 private:
  struct Rep {
    typename NodeTraits<Tag>::Variant node;
    SourceSpan span;
  };
  std::shared_ptr<const Rep> rep_;
};

struct TermTag;
struct FormulaTag;
struct CommandTag;
using Term = Node<TermTag>;
using Formula = Node<FormulaTag>;
using Command = Node<CommandTag>;

// ---------------------------------------------------------------- terms

enum class BinaryOp { add, sub, mul, div, pow, mod };
enum class Function { gcd };

struct IntLit {
  std::int64_t value;
  bool operator==(const IntLit&) const = default;
};
struct Var {
  std::string name;
  bool operator==(const Var&) const = default;
};
struct ArrayRef {
  std::string array;
  Term index;
  bool operator==(const ArrayRef&) const = default;
};
struct BinOp {
  BinaryOp op;
  Term lhs;
  Term rhs;
  bool operator==(const BinOp&) const = default;
};
struct Apply {
  Function fn;
  std::vector<Term> args;
  bool operator==(const Apply&) const = default;
};

template <>
struct NodeTraits<TermTag> {
  using Variant = std::variant<IntLit, Var, ArrayRef, BinOp, Apply>;
};

// ---------------------------------------------------------------- formulas

enum class CompareOp { eq, ne, lt, le, gt, ge };
enum class Predicate { even, odd, div };  // div(a, b): b divides a

struct TrueF {
  bool operator==(const TrueF&) const = default;
};
struct FalseF {
  bool operator==(const FalseF&) const = default;
};
struct Compare {
  CompareOp op;
  Term lhs;
  Term rhs;
  bool operator==(const Compare&) const = default;
};
struct Pred {
  Predicate pred;
  std::vector<Term> args;
  bool operator==(const Pred&) const = default;
};
struct Not {
  Formula operand;
  bool operator==(const Not&) const = default;
};
struct And {
  Formula lhs;
  Formula rhs;
  bool operator==(const And&) const = default;
};
struct Or {
  Formula lhs;
  Formula rhs;
  bool operator==(const Or&) const = default;
};
struct Implies {
  Formula lhs;
  Formula rhs;
  bool operator==(const Implies&) const = default;
};
/// all var in lo..hi : body  (inclusive bounds)
struct ForAll {
  std::string var;
  Term lo;
  Term hi;
  Formula body;
  bool operator==(const ForAll&) const = default;
};
/// some var in lo..hi : body
struct Exists {
  std::string var;
  Term lo;
  Term hi;
  Formula body;
  bool operator==(const Exists&) const = default;
};
/// Stands for the assertion attached to another block.
struct LabelRef {
  std::string label;
  bool operator==(const LabelRef&) const = default;
};
/// Prose outside the formal fragment; documented, never evaluated.
struct Opaque {
  std::string prose;
  bool operator==(const Opaque&) const = default;
};

template <>
struct NodeTraits<FormulaTag> {
  using Variant = std::variant<TrueF, FalseF, Compare, Pred, Not, And, Or, Implies, ForAll,
                               Exists, LabelRef, Opaque>;
};

// ---------------------------------------------------------------- commands

/// t1, ..., tn := e1, ..., en. Targets are Var or ArrayRef terms.
struct ParAssign {
  std::vector<Term> targets;
  std::vector<Term> sources;
  bool operator==(const ParAssign&) const = default;
};
struct Swap {
  std::string a;
  std::string b;
  bool operator==(const Swap&) const = default;
};
struct Guard {
  Formula condition;
  bool operator==(const Guard&) const = default;
};
/// A refinement still to be done, written as a string literal.
struct Hole {
  std::string prose;
  bool operator==(const Hole&) const = default;
};
struct Seq {
  std::vector<Command> items;
  bool operator==(const Seq&) const = default;
};
/// Inline `{...}` assertion.
struct Annot {
  Formula claim;
  bool operator==(const Annot&) const = default;
};

template <>
struct NodeTraits<CommandTag> {
  using Variant = std::variant<ParAssign, Swap, Guard, Hole, Seq, Annot>;
};

// ---------------------------------------------------------------- program

struct GotoLabel {
  std::string label;
  bool operator==(const GotoLabel&) const = default;
};
struct ReturnValue {
  Term value;
  bool operator==(const ReturnValue&) const = default;
};
/// Allowed only directly after a Hole: the refinement has not chosen a target yet.
struct OpenEnd {
  bool operator==(const OpenEnd&) const = default;
};
using Terminal = std::variant<GotoLabel, ReturnValue, OpenEnd>;

struct GuardedCommand {
  Formula guard;
  Command body;  // always a Seq
  Terminal terminal;
  SourceSpan span;

  bool operator==(const GuardedCommand& o) const {
    return guard == o.guard && body == o.body && terminal == o.terminal;
  }
};

struct IfFi {
  std::vector<GuardedCommand> arms;
  bool operator==(const IfFi&) const = default;
};
struct Straight {
  Command body;  // always a Seq
  Terminal terminal;
  bool operator==(const Straight&) const = default;
};
struct AbortBody {
  bool operator==(const AbortBody&) const = default;
};
struct ReturnBody {
  Term value;
  bool operator==(const ReturnBody&) const = default;
};
using BlockBody = std::variant<IfFi, Straight, AbortBody, ReturnBody>;

struct Block {
  std::string label;
  Formula assertion;
  BlockBody body;
  SourceSpan span;

  bool operator==(const Block& o) const {
    return label == o.label && assertion == o.assertion && body == o.body;
  }
};

struct Decl {
  std::string name;
  std::optional<std::size_t> array_size;  // set for arrays
  std::optional<std::int64_t> init;
  bool implicit = false;  // scalar used without a declaration
  SourceSpan span;

  bool is_array() const { return array_size.has_value(); }
  bool operator==(const Decl& o) const {
    return name == o.name && array_size == o.array_size && init == o.init &&
           implicit == o.implicit;
  }
};

struct Program {
  std::vector<Decl> decls;
  std::vector<Block> blocks;
  std::string start;
  std::string halt;

  const Block* find_block(std::string_view label) const {
    for (const auto& b : blocks) {
      if (b.label == label) return &b;
    }
    return nullptr;
  }
  const Decl* find_decl(std::string_view name) const {
    for (const auto& d : decls) {
      if (d.name == name) return &d;
    }
    return nullptr;
  }

  bool operator==(const Program&) const = default;
};

// ---------------------------------------------------------------- builders

inline Term int_lit(std::int64_t v) { return IntLit{v}; }
inline Term var(std::string name) { return Var{std::move(name)}; }
inline Formula true_f() { return TrueF{}; }
inline Formula false_f() { return FalseF{}; }
inline Command seq(std::vector<Command> items) { return Seq{std::move(items)}; }

/// Flattens nested Seq nodes into a single item list.
inline void flatten_into(const Command& c, std::vector<Command>& out) {
  if (const auto* s = c.as<Seq>()) {
    for (const auto& item : s->items) flatten_into(item, out);
  } else {
    out.push_back(c);
  }
}
inline std::vector<Command> flatten(const Command& c) {
  std::vector<Command> out;
  flatten_into(c, out);
  return out;
}

// ---------------------------------------------------------------- free variables

/// Variables read or written by a node, split by kind. Quantifier-bound
/// variables are excluded; LabelRef and Opaque contribute nothing.
struct VarSet {
  std::set<std::string> scalars;
  std::set<std::string> arrays;

  void merge(const VarSet& o) {
    scalars.insert(o.scalars.begin(), o.scalars.end());
    arrays.insert(o.arrays.begin(), o.arrays.end());
  }
  bool operator==(const VarSet&) const = default;
};

namespace detail {

inline void collect(const Term& t, const std::set<std::string>& bound, VarSet& out) {
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Var>) {
          if (!bound.contains(n.name)) out.scalars.insert(n.name);
        } else if constexpr (std::is_same_v<N, ArrayRef>) {
          out.arrays.insert(n.array);
          collect(n.index, bound, out);
        } else if constexpr (std::is_same_v<N, BinOp>) {
          collect(n.lhs, bound, out);
          collect(n.rhs, bound, out);
        } else if constexpr (std::is_same_v<N, Apply>) {
          for (const auto& a : n.args) collect(a, bound, out);
        }
      },
      t.node());
}

inline void collect(const Formula& f, std::set<std::string>& bound, VarSet& out) {
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Compare>) {
          collect(n.lhs, bound, out);
          collect(n.rhs, bound, out);
        } else if constexpr (std::is_same_v<N, Pred>) {
          for (const auto& a : n.args) collect(a, bound, out);
        } else if constexpr (std::is_same_v<N, Not>) {
          collect(n.operand, bound, out);
        } else if constexpr (std::is_same_v<N, And> || std::is_same_v<N, Or> ||
                             std::is_same_v<N, Implies>) {
          collect(n.lhs, bound, out);
          collect(n.rhs, bound, out);
        } else if constexpr (std::is_same_v<N, ForAll> || std::is_same_v<N, Exists>) {
          collect(n.lo, bound, out);
          collect(n.hi, bound, out);
          const bool fresh = bound.insert(n.var).second;
          collect(n.body, bound, out);
          if (fresh) bound.erase(n.var);
        }
      },
      f.node());
}

inline void collect(const Command& c, VarSet& out) {
  std::set<std::string> bound;
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, ParAssign>) {
          for (const auto& t : n.targets) collect(t, bound, out);
          for (const auto& t : n.sources) collect(t, bound, out);
        } else if constexpr (std::is_same_v<N, Swap>) {
          out.scalars.insert(n.a);
          out.scalars.insert(n.b);
        } else if constexpr (std::is_same_v<N, Guard>) {
          collect(n.condition, bound, out);
        } else if constexpr (std::is_same_v<N, Annot>) {
          collect(n.claim, bound, out);
        } else if constexpr (std::is_same_v<N, Seq>) {
          for (const auto& item : n.items) collect(item, out);
        }
      },
      c.node());
}

}  // namespace detail

inline VarSet free_vars(const Term& t) {
  VarSet out;
  detail::collect(t, {}, out);
  return out;
}
inline VarSet free_vars(const Formula& f) {
  VarSet out;
  std::set<std::string> bound;
  detail::collect(f, bound, out);
  return out;
}
inline VarSet free_vars(const Command& c) {
  VarSet out;
  detail::collect(c, out);
  return out;
}

/// Quantifier-bound variable names occurring anywhere in `f`.
inline std::set<std::string> bound_vars(const Formula& f) {
  std::set<std::string> out;
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Not>) {
          out.merge(bound_vars(n.operand));
        } else if constexpr (std::is_same_v<N, And> || std::is_same_v<N, Or> ||
                             std::is_same_v<N, Implies>) {
          out.merge(bound_vars(n.lhs));
          out.merge(bound_vars(n.rhs));
        } else if constexpr (std::is_same_v<N, ForAll> || std::is_same_v<N, Exists>) {
          out.insert(n.var);
          out.merge(bound_vars(n.body));
        }
      },
      f.node());
  return out;
}

inline bool contains_opaque(const Formula& f) {
  return std::visit(
      [](const auto& n) -> bool {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Opaque>) {
          return true;
        } else if constexpr (std::is_same_v<N, Not>) {
          return contains_opaque(n.operand);
        } else if constexpr (std::is_same_v<N, And> || std::is_same_v<N, Or> ||
                             std::is_same_v<N, Implies>) {
          return contains_opaque(n.lhs) || contains_opaque(n.rhs);
        } else if constexpr (std::is_same_v<N, ForAll> || std::is_same_v<N, Exists>) {
          return contains_opaque(n.body);
        } else {
          return false;
        }
      },
      f.node());
}

inline bool contains_label_ref(const Formula& f) {
  return std::visit(
      [](const auto& n) -> bool {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, LabelRef>) {
          return true;
        } else if constexpr (std::is_same_v<N, Not>) {
          return contains_label_ref(n.operand);
        } else if constexpr (std::is_same_v<N, And> || std::is_same_v<N, Or> ||
                             std::is_same_v<N, Implies>) {
          return contains_label_ref(n.lhs) || contains_label_ref(n.rhs);
        } else if constexpr (std::is_same_v<N, ForAll> || std::is_same_v<N, Exists>) {
          return contains_label_ref(n.body);
        } else {
          return false;
        }
      },
      f.node());
}

inline bool contains_hole(const Command& c) {
  if (c.is<Hole>()) return true;
  if (const auto* s = c.as<Seq>()) {
    return std::any_of(s->items.begin(), s->items.end(),
                       [](const Command& item) { return contains_hole(item); });
  }
  return false;
}

/// Labels referenced by LabelRef nodes inside `f`, in order of appearance.
inline void label_refs(const Formula& f, std::vector<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, LabelRef>) {
          out.push_back(n.label);
        } else if constexpr (std::is_same_v<N, Not>) {
          label_refs(n.operand, out);
        } else if constexpr (std::is_same_v<N, And> || std::is_same_v<N, Or> ||
                             std::is_same_v<N, Implies>) {
          label_refs(n.lhs, out);
          label_refs(n.rhs, out);
        } else if constexpr (std::is_same_v<N, ForAll> || std::is_same_v<N, Exists>) {
          label_refs(n.body, out);
        }
      },
      f.node());
}

inline const Terminal* terminal_of(const Block& b) {
  if (const auto* s = std::get_if<Straight>(&b.body)) return &s->terminal;
  return nullptr;
}

inline bool block_returns(const Block& b) {
  if (std::holds_alternative<ReturnBody>(b.body)) return true;
  if (const auto* s = std::get_if<Straight>(&b.body)) {
    return std::holds_alternative<ReturnValue>(s->terminal);
  }
  return false;
}

}  // namespace liffig
