#pragma once

// Pretty printing back to Liffig concrete syntax. Output of print_program
// parses back to a structurally identical Program.

#include <string>
#include <vector>

#include "liffig/ast.hpp"

namespace liffig {

inline std::string to_string(BinaryOp op) {
  switch (op) {
    case BinaryOp::add: return "+";
    case BinaryOp::sub: return "-";
    case BinaryOp::mul: return "*";
    case BinaryOp::div: return "/";
    case BinaryOp::pow: return "^";
    case BinaryOp::mod: return "mod";
  }
  return "?";
}

inline std::string to_string(CompareOp op) {
  switch (op) {
    case CompareOp::eq: return "=";
    case CompareOp::ne: return "!=";
    case CompareOp::lt: return "<";
    case CompareOp::le: return "<=";
    case CompareOp::gt: return ">";
    case CompareOp::ge: return ">=";
  }
  return "?";
}

inline std::string to_string(Predicate p) {
  switch (p) {
    case Predicate::even: return "even";
    case Predicate::odd: return "odd";
    case Predicate::div: return "div";
  }
  return "?";
}

namespace detail {

inline int term_level(const Term& t) {
  if (const auto* b = t.as<BinOp>()) {
    switch (b->op) {
      case BinaryOp::add:
      case BinaryOp::sub: return 1;
      case BinaryOp::mul:
      case BinaryOp::div: return 2;
      case BinaryOp::pow: return 3;
      case BinaryOp::mod: return 5;
    }
  }
  if (const auto* lit = t.as<IntLit>(); lit && lit->value < 0) return 3;
  return 5;
}

inline std::string term_text(const Term& t);

inline std::string wrap_term(const Term& t, int min_level) {
  std::string s = term_text(t);
  return term_level(t) < min_level ? "(" + s + ")" : s;
}

inline std::string join_terms(const std::vector<Term>& ts) {
  std::string out;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (i) out += ", ";
    out += term_text(ts[i]);
  }
  return out;
}

inline std::string term_text(const Term& t) {
  return std::visit(
      [](const auto& n) -> std::string {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, IntLit>) {
          return std::to_string(n.value);
        } else if constexpr (std::is_same_v<N, Var>) {
          return n.name;
        } else if constexpr (std::is_same_v<N, ArrayRef>) {
          return n.array + "[" + term_text(n.index) + "]";
        } else if constexpr (std::is_same_v<N, Apply>) {
          return "gcd(" + join_terms(n.args) + ")";
        } else {
          switch (n.op) {
            case BinaryOp::add:
            case BinaryOp::sub:
              return wrap_term(n.lhs, 1) + " " + to_string(n.op) + " " + wrap_term(n.rhs, 2);
            case BinaryOp::mul:
            case BinaryOp::div:
              return wrap_term(n.lhs, 2) + to_string(n.op) + wrap_term(n.rhs, 3);
            case BinaryOp::pow:
              return wrap_term(n.lhs, 4) + "^" + wrap_term(n.rhs, 3);
            case BinaryOp::mod:
              return "mod(" + term_text(n.lhs) + ", " + term_text(n.rhs) + ")";
          }
          return {};
        }
      },
      t.node());
}

inline int formula_level(const Formula& f) {
  if (f.is<Implies>()) return 1;
  if (f.is<Or>()) return 2;
  if (f.is<And>()) return 3;
  if (f.is<ForAll>() || f.is<Exists>()) return 0;
  return 4;
}

inline std::string formula_text(const Formula& f, bool top);

inline std::string wrap_formula(const Formula& f, int min_level) {
  std::string s = formula_text(f, false);
  return formula_level(f) < min_level ? "(" + s + ")" : s;
}

inline std::string formula_text(const Formula& f, bool top) {
  return std::visit(
      [&](const auto& n) -> std::string {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, TrueF>) {
          return "true";
        } else if constexpr (std::is_same_v<N, FalseF>) {
          return "false";
        } else if constexpr (std::is_same_v<N, Compare>) {
          return term_text(n.lhs) + " " + to_string(n.op) + " " + term_text(n.rhs);
        } else if constexpr (std::is_same_v<N, Pred>) {
          return to_string(n.pred) + "(" + join_terms(n.args) + ")";
        } else if constexpr (std::is_same_v<N, Not>) {
          const Formula& o = n.operand;
          if (o.is<Compare>() || formula_level(o) < 4) return "!(" + formula_text(o, false) + ")";
          return "!" + formula_text(o, false);
        } else if constexpr (std::is_same_v<N, And>) {
          return wrap_formula(n.lhs, 3) + " & " + wrap_formula(n.rhs, 4);
        } else if constexpr (std::is_same_v<N, Or>) {
          return wrap_formula(n.lhs, 2) + " or " + wrap_formula(n.rhs, 3);
        } else if constexpr (std::is_same_v<N, Implies>) {
          return wrap_formula(n.lhs, 2) + " => " + wrap_formula(n.rhs, 1);
        } else if constexpr (std::is_same_v<N, ForAll> || std::is_same_v<N, Exists>) {
          return std::string(std::is_same_v<N, ForAll> ? "all " : "some ") + n.var + " in " +
                 term_text(n.lo) + ".." + term_text(n.hi) + " : " + formula_text(n.body, true);
        } else if constexpr (std::is_same_v<N, LabelRef>) {
          return n.label;
        } else {
          return top ? n.prose : "[[" + n.prose + "]]";
        }
      },
      f.node());
}

}  // namespace detail

inline std::string print_term(const Term& t) { return detail::term_text(t); }

/// Formula text. Opaque prose is printed raw at top level, `[[...]]` when nested.
inline std::string print_formula(const Formula& f) { return detail::formula_text(f, true); }

namespace detail {

inline std::string print_item(const Command& c) {
  return std::visit(
      [](const auto& n) -> std::string {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, ParAssign>) {
          return join_terms(n.targets) + " := " + join_terms(n.sources);
        } else if constexpr (std::is_same_v<N, Swap>) {
          return "swap(" + n.a + ", " + n.b + ")";
        } else if constexpr (std::is_same_v<N, Guard>) {
          return print_formula(n.condition);
        } else if constexpr (std::is_same_v<N, Hole>) {
          return "\"" + n.prose + "\"";
        } else if constexpr (std::is_same_v<N, Annot>) {
          return "{" + print_formula(n.claim) + "}";
        } else {
          return {};
        }
      },
      c.node());
}

}  // namespace detail

/// Statement list `a; b; c` (flattened). An annotation is followed by a space only.
inline std::string print_command(const Command& c) {
  std::string out;
  const auto items = flatten(c);
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += items[i - 1].is<Annot>() ? " " : "; ";
    out += detail::print_item(items[i]);
  }
  return out;
}

inline std::string print_terminal(const Terminal& t) {
  if (const auto* g = std::get_if<GotoLabel>(&t)) return "goto " + g->label;
  if (const auto* r = std::get_if<ReturnValue>(&t)) return "return " + print_term(r->value);
  return {};
}

namespace detail {

/// Body items followed by the terminal, with separators the parser accepts.
inline std::string print_tail(const Command& body, const Terminal& terminal) {
  std::string out = print_command(body);
  const std::string term = print_terminal(terminal);
  if (term.empty()) return out;
  const auto items = flatten(body);
  if (!items.empty()) out += items.back().is<Annot>() ? " " : "; ";
  return out + term;
}

inline std::string indent_continuations(const std::string& text, const std::string& pad) {
  std::string out;
  for (char c : text) {
    out += c;
    if (c == '\n') out += pad;
  }
  return out;
}

}  // namespace detail

inline std::string print_block(const Block& b) {
  std::string out = b.label + ": " + detail::indent_continuations(print_formula(b.assertion), "   ") + "\n";
  std::visit(
      [&](const auto& body) {
        using B = std::decay_t<decltype(body)>;
        if constexpr (std::is_same_v<B, IfFi>) {
          for (std::size_t i = 0; i < body.arms.size(); ++i) {
            const auto& gc = body.arms[i];
            out += (i == 0 ? "  if " : "   | ") + print_formula(gc.guard) + " -> " +
                   detail::print_tail(gc.body, gc.terminal) + "\n";
          }
          out += "  fi\n";
        } else if constexpr (std::is_same_v<B, Straight>) {
          out += "  " + detail::print_tail(body.body, body.terminal) + "\n";
        } else if constexpr (std::is_same_v<B, AbortBody>) {
          out += "  abort\n";
        } else {
          out += "  return " + print_term(body.value) + "\n";
        }
      },
      b.body);
  return out;
}

inline std::string print_decl(const Decl& d) {
  std::string out = "int " + d.name;
  if (d.array_size) out += "[" + std::to_string(*d.array_size) + "]";
  if (d.init) out += " := " + std::to_string(*d.init);
  return out + ";";
}

/// Liffig source for `program`. Implicit declarations are left implicit.
inline std::string print_program(const Program& program) {
  std::string out;
  for (const auto& d : program.decls) {
    if (!d.implicit) out += print_decl(d) + "\n";
  }
  for (const auto& b : program.blocks) out += print_block(b);
  return out;
}

}  // namespace liffig
