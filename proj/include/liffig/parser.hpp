#pragma once

// Recursive-descent parser for Liffig source text.
//
//   program    := decl* block+
//   decl       := "int" item ("," item)* [";"]
//   item       := Ident ["[" Int "]"] [":=" Int]
//   block      := Ident ":" assertion-text NEWLINE body
//   body       := "if" gc ("|" gc)* "fi" | "abort" | "return" term | stmtlist terminal
//   gc         := formula [Annotation] "->" stmtlist terminal
//   stmtlist   := (stmt ";")*           (";" is optional after holes and annotations)
//   stmt       := lhslist ":=" termlist | lhs ("+=" | "-=" | "*=") term
//               | "swap" "(" Ident "," Ident ")" | Hole | Annotation
//   terminal   := "goto" Ident | "return" term     (may be omitted right after a hole)
//
// Formulas, loosest binding first: "=>" (right assoc), "or", "&", "!", then
// comparisons (chains such as `2 <= k < n` become conjunctions), predicates
// even/odd/div, bounded quantifiers `all i in lo..hi : F` / `some ...`, and
// bare labels, which refer to another block's assertion.

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "liffig/ast.hpp"
#include "liffig/errors.hpp"
#include "liffig/lexer.hpp"
#include "liffig/resolve.hpp"

namespace liffig {

struct Diagnostic {
  enum class Severity { error, warning };

  Severity severity = Severity::error;
  SourceSpan span;
  std::string message;

  bool is_error() const { return severity == Severity::error; }
};

inline std::string format_diagnostic(const Diagnostic& d, std::string_view file = {}) {
  std::string out;
  if (!file.empty()) out += std::string(file) + ":";
  out += std::to_string(d.span.line) + ":" + std::to_string(d.span.column) + ": ";
  out += d.is_error() ? "error: " : "warning: ";
  out += d.message;
  return out;
}

class SyntaxError : public Error {
 public:
  SyntaxError(SourceSpan span, const std::string& what) : Error(what), span_(span) {}
  const SourceSpan& span() const noexcept { return span_; }

 private:
  SourceSpan span_;
};

struct ParseResult {
  std::optional<Program> program;  // absent iff diagnostics contain an error
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return program.has_value(); }
  std::size_t error_count() const {
    std::size_t n = 0;
    for (const auto& d : diagnostics) n += d.is_error() ? 1 : 0;
    return n;
  }
  std::size_t warning_count() const { return diagnostics.size() - error_count(); }
};

namespace detail {

/// Buffered token stream with backtracking.
class Cursor {
 public:
  explicit Cursor(Lexer lexer) : lexer_(std::move(lexer)) {}

  const Token& peek(std::size_t k = 0) {
    while (toks_.size() <= pos_ + k) {
      try {
        toks_.push_back(lexer_.next());
      } catch (const LexError& e) {
        throw SyntaxError(e.span(), e.what());
      }
    }
    return toks_[pos_ + k];
  }
  Token next() {
    peek();
    Token t = toks_[pos_];
    if (t.kind != TokenKind::end) ++pos_;
    return t;
  }
  bool at_end() { return peek().kind == TokenKind::end; }

  std::size_t mark() const { return pos_; }
  void reset(std::size_t m) { pos_ = m; }

  /// Drops lookahead and continues lexing at `offset`.
  void resync(std::size_t offset, std::size_t line, std::size_t column) {
    toks_.resize(pos_);
    lexer_.restore(offset, line, column);
  }

  bool accept_op(std::string_view op) {
    if (peek().is_op(op)) {
      next();
      return true;
    }
    return false;
  }
  bool accept_keyword(std::string_view kw) {
    if (peek().is_keyword(kw)) {
      next();
      return true;
    }
    return false;
  }
  Token expect_op(std::string_view op) {
    if (!peek().is_op(op)) fail("expected '" + std::string(op) + "'");
    return next();
  }
  Token expect_keyword(std::string_view kw) {
    if (!peek().is_keyword(kw)) fail("expected '" + std::string(kw) + "'");
    return next();
  }
  Token expect_ident(std::string_view what = "identifier") {
    if (peek().kind != TokenKind::ident) fail("expected " + std::string(what));
    return next();
  }

  [[noreturn]] void fail(const std::string& message) {
    const Token& t = peek();
    std::string found = t.kind == TokenKind::end ? "end of input" : "'" + t.text + "'";
    if (t.kind == TokenKind::annotation) found = "annotation";
    if (t.kind == TokenKind::hole) found = "string";
    throw SyntaxError(t.span, message + ", found " + found);
  }

  Lexer& lexer() { return lexer_; }

 private:
  Lexer lexer_;
  std::deque<Token> toks_;
  std::size_t pos_ = 0;
};

inline bool is_compare_op(const Token& t) {
  return t.kind == TokenKind::op &&
         (t.text == "=" || t.text == "!=" || t.text == "<" || t.text == "<=" || t.text == ">" ||
          t.text == ">=");
}

inline CompareOp compare_op_of(const std::string& text) {
  if (text == "=") return CompareOp::eq;
  if (text == "!=") return CompareOp::ne;
  if (text == "<") return CompareOp::lt;
  if (text == "<=") return CompareOp::le;
  if (text == ">") return CompareOp::gt;
  return CompareOp::ge;
}

/// Tokens that may follow an identifier inside a term.
inline bool continues_term(const Token& t) {
  if (t.kind != TokenKind::op) return false;
  static const std::set<std::string, std::less<>> ops = {"(", "[", "+", "-", "*", "/", "^", ".."};
  return ops.contains(t.text) || is_compare_op(t);
}

class ExprParser {
 public:
  explicit ExprParser(Cursor& c) : c_(c) {}

  Term term() { return additive(); }

  Formula formula() {
    const SourceSpan span = c_.peek().span;
    Formula lhs = disjunction();
    if (c_.accept_op("=>")) return Formula(Implies{lhs, formula()}, span);
    return lhs;
  }

  /// A Var or ArrayRef term usable as an assignment target.
  Term lvalue() {
    const Token name = c_.expect_ident("assignment target");
    if (c_.accept_op("[")) {
      Term index = term();
      c_.expect_op("]");
      return Term(ArrayRef{name.text, index}, name.span);
    }
    return Term(Var{name.text}, name.span);
  }

 private:
  Term additive() {
    Term lhs = multiplicative();
    for (;;) {
      const Token& t = c_.peek();
      if (t.is_op("+") || t.is_op("-")) {
        const SourceSpan span = t.span;
        const BinaryOp op = t.text == "+" ? BinaryOp::add : BinaryOp::sub;
        c_.next();
        lhs = Term(BinOp{op, lhs, multiplicative()}, span);
      } else {
        return lhs;
      }
    }
  }

  Term multiplicative() {
    Term lhs = unary();
    for (;;) {
      const Token& t = c_.peek();
      if (t.is_op("*") || t.is_op("/")) {
        const SourceSpan span = t.span;
        const BinaryOp op = t.text == "*" ? BinaryOp::mul : BinaryOp::div;
        c_.next();
        lhs = Term(BinOp{op, lhs, unary()}, span);
      } else {
        return lhs;
      }
    }
  }

  Term unary() {
    if (c_.peek().is_op("-")) {
      const SourceSpan span = c_.next().span;
      Term operand = unary();
      if (const auto* lit = operand.as<IntLit>(); lit && lit->value > 0) {
        return Term(IntLit{-lit->value}, span);
      }
      return Term(BinOp{BinaryOp::sub, Term(IntLit{0}, span), operand}, span);
    }
    return power();
  }

  Term power() {
    Term base = primary();
    if (c_.peek().is_op("^")) {
      const SourceSpan span = c_.next().span;
      return Term(BinOp{BinaryOp::pow, base, unary()}, span);
    }
    return base;
  }

  Term primary() {
    const Token& t = c_.peek();
    if (t.kind == TokenKind::integer) {
      const Token lit = c_.next();
      return Term(IntLit{lit.value}, lit.span);
    }
    if (t.is_op("(")) {
      c_.next();
      Term inner = term();
      c_.expect_op(")");
      return inner;
    }
    if (t.kind == TokenKind::ident) {
      const Token name = c_.next();
      if (c_.accept_op("[")) {
        Term index = term();
        c_.expect_op("]");
        return Term(ArrayRef{name.text, index}, name.span);
      }
      if (c_.peek().is_op("(")) {
        std::vector<Term> args = arguments();
        if (name.text == "gcd") {
          if (args.size() != 2) throw SyntaxError(name.span, "gcd takes exactly 2 arguments");
          return Term(Apply{Function::gcd, std::move(args)}, name.span);
        }
        if (name.text == "mod") {
          if (args.size() != 2) throw SyntaxError(name.span, "mod takes exactly 2 arguments");
          return Term(BinOp{BinaryOp::mod, args[0], args[1]}, name.span);
        }
        throw SyntaxError(name.span, "unknown function '" + name.text + "'");
      }
      return Term(Var{name.text}, name.span);
    }
    c_.fail("expected a term");
  }

  std::vector<Term> arguments() {
    c_.expect_op("(");
    std::vector<Term> args;
    if (!c_.peek().is_op(")")) {
      args.push_back(term());
      while (c_.accept_op(",")) args.push_back(term());
    }
    c_.expect_op(")");
    return args;
  }

  Formula disjunction() {
    Formula lhs = conjunction();
    while (c_.peek().is_keyword("or")) {
      const SourceSpan span = c_.next().span;
      lhs = Formula(Or{lhs, conjunction()}, span);
    }
    return lhs;
  }

  Formula conjunction() {
    Formula lhs = negation();
    while (c_.peek().is_op("&")) {
      const SourceSpan span = c_.next().span;
      lhs = Formula(And{lhs, negation()}, span);
    }
    return lhs;
  }

  Formula negation() {
    const Token& t = c_.peek();
    if (t.is_op("!")) {
      const SourceSpan span = c_.next().span;
      return Formula(Not{negation()}, span);
    }
    if (t.is_keyword("all") || t.is_keyword("some")) return quantifier();
    return atom();
  }

  Formula quantifier() {
    const Token kw = c_.next();
    const Token v = c_.expect_ident("quantified variable");
    c_.expect_keyword("in");
    Term lo = term();
    c_.expect_op("..");
    Term hi = term();
    c_.expect_op(":");
    Formula body = formula();
    if (kw.text == "all") return Formula(ForAll{v.text, lo, hi, body}, kw.span);
    return Formula(Exists{v.text, lo, hi, body}, kw.span);
  }

  Formula atom() {
    const Token& t = c_.peek();
    if (t.is_keyword("true")) return Formula(TrueF{}, c_.next().span);
    if (t.is_keyword("false")) return Formula(FalseF{}, c_.next().span);
    if (t.kind == TokenKind::ident && c_.peek(1).is_op("(") &&
        (t.text == "even" || t.text == "odd" || t.text == "div")) {
      const Token name = c_.next();
      std::vector<Term> args = arguments();
      const Predicate p = name.text == "even"  ? Predicate::even
                          : name.text == "odd" ? Predicate::odd
                                               : Predicate::div;
      const std::size_t arity = p == Predicate::div ? 2 : 1;
      if (args.size() != arity) {
        throw SyntaxError(name.span, name.text + " takes " + std::to_string(arity) + " argument" +
                                         (arity == 1 ? "" : "s"));
      }
      return Formula(Pred{p, std::move(args)}, name.span);
    }
    if (t.kind == TokenKind::ident && !continues_term(c_.peek(1))) {
      const Token name = c_.next();
      return Formula(LabelRef{name.text}, name.span);
    }
    if (t.is_op("(")) {
      const std::size_t m = c_.mark();
      try {
        return comparison();
      } catch (const SyntaxError&) {
        c_.reset(m);
      }
      c_.next();
      Formula inner = formula();
      c_.expect_op(")");
      return inner;
    }
    return comparison();
  }

  Formula comparison() {
    Term lhs = term();
    if (!is_compare_op(c_.peek())) c_.fail("expected a comparison operator");
    Token op = c_.next();
    Term rhs = term();
    Formula out(Compare{compare_op_of(op.text), lhs, rhs}, op.span);
    while (is_compare_op(c_.peek())) {
      op = c_.next();
      Term next = term();
      out = Formula(And{out, Formula(Compare{compare_op_of(op.text), rhs, next}, op.span)},
                    op.span);
      rhs = next;
    }
    return out;
  }

  Cursor& c_;
};

template <class T, class F>
T parse_complete(std::string_view source, F&& body) {
  Cursor cursor{Lexer(source)};
  ExprParser p(cursor);
  T out = body(p);
  if (!cursor.at_end()) cursor.fail("unexpected trailing input");
  return out;
}

}  // namespace detail

/// Parses a complete term; throws SyntaxError.
inline Term parse_term(std::string_view source) {
  return detail::parse_complete<Term>(source, [](detail::ExprParser& p) { return p.term(); });
}

/// Parses a complete assertion formula; throws SyntaxError.
inline Formula parse_formula(std::string_view source) {
  return detail::parse_complete<Formula>(source,
                                         [](detail::ExprParser& p) { return p.formula(); });
}

/// Formal formula when `text` parses, otherwise Opaque prose.
inline Formula formula_or_opaque(const std::string& text, SourceSpan span = {}) {
  try {
    return parse_formula(text);
  } catch (const SyntaxError&) {
    return Formula(Opaque{text}, span);
  }
}

namespace detail {

inline bool starts_statement(Cursor& c) {
  const Token& t = c.peek();
  return t.kind == TokenKind::hole || t.kind == TokenKind::annotation || t.is_keyword("swap");
}

inline Command parse_annotation(const Token& t) {
  return Command(Annot{formula_or_opaque(t.text, t.span)}, t.span);
}

/// Parses one non-guard statement (assignment, swap, hole or annotation).
inline Command parse_statement(Cursor& c, ExprParser& p) {
  const Token& t = c.peek();
  if (t.kind == TokenKind::hole) {
    const Token h = c.next();
    return Command(Hole{h.text}, h.span);
  }
  if (t.kind == TokenKind::annotation) return parse_annotation(c.next());
  if (t.is_keyword("swap")) {
    const SourceSpan span = c.next().span;
    c.expect_op("(");
    const Token a = c.expect_ident();
    c.expect_op(",");
    const Token b = c.expect_ident();
    c.expect_op(")");
    return Command(Swap{a.text, b.text}, span);
  }
  const SourceSpan span = t.span;
  std::vector<Term> targets{p.lvalue()};
  const Token& op = c.peek();
  if (op.is_op("+=") || op.is_op("-=") || op.is_op("*=")) {
    const BinaryOp bop = op.text == "+=" ? BinaryOp::add : op.text == "-=" ? BinaryOp::sub : BinaryOp::mul;
    const SourceSpan op_span = c.next().span;
    Term rhs = p.term();
    return Command(ParAssign{targets, {Term(BinOp{bop, targets[0], rhs}, op_span)}}, span);
  }
  while (c.accept_op(",")) targets.push_back(p.lvalue());
  c.expect_op(":=");
  std::vector<Term> sources{p.term()};
  while (c.accept_op(",")) sources.push_back(p.term());
  if (sources.size() != targets.size()) {
    throw SyntaxError(span, "assignment has " + std::to_string(targets.size()) + " targets but " +
                                std::to_string(sources.size()) + " sources");
  }
  return Command(ParAssign{std::move(targets), std::move(sources)}, span);
}

/// True when the upcoming tokens before the next top-level ';' form a statement
/// rather than a guard formula.
inline bool item_is_statement(Cursor& c) {
  if (starts_statement(c)) return true;
  int depth = 0;
  for (std::size_t k = 0;; ++k) {
    const Token& t = c.peek(k);
    if (t.kind == TokenKind::end) return false;
    if (t.is_op("(") || t.is_op("[")) ++depth;
    if (t.is_op(")") || t.is_op("]")) --depth;
    if (depth == 0 && t.is_op(";")) return false;
    if (t.is_op(":=") || t.is_op("+=") || t.is_op("-=") || t.is_op("*=")) return true;
  }
}

}  // namespace detail

/// Parses a command in verification-condition form: items separated by ';',
/// each a statement or a guard formula. An empty text yields an empty Seq.
inline Command parse_command(std::string_view source) {
  detail::Cursor c{Lexer(source)};
  detail::ExprParser p(c);
  std::vector<Command> items;
  while (!c.at_end()) {
    if (detail::item_is_statement(c)) {
      items.push_back(detail::parse_statement(c, p));
    } else {
      const SourceSpan span = c.peek().span;
      items.push_back(Command(Guard{p.formula()}, span));
    }
    if (!c.accept_op(";") && !c.at_end()) {
      const Command& last = items.back();
      if (!last.is<Annot>() && !last.is<Hole>()) c.fail("expected ';'");
    }
  }
  return Command(Seq{std::move(items)});
}

// ------------------------------------------------------------------ analysis

/// Adds implicit scalar declarations for every undeclared scalar the program
/// uses (alphabetical order) and reports misuse of names. Only scalars that no
/// assertion mentions draw a warning.
inline std::vector<Diagnostic> complete_declarations(Program& program) {
  std::vector<Diagnostic> diags;
  std::map<std::string, SourceSpan> scalars;
  std::map<std::string, SourceSpan> arrays;
  std::set<std::string> asserted;  // scalars named by some assertion
  auto add = [&](const VarSet& vs, SourceSpan span) {
    for (const auto& n : vs.scalars) scalars.try_emplace(n, span);
    for (const auto& n : vs.arrays) arrays.try_emplace(n, span);
  };
  auto add_terminal = [&](const Terminal& t, SourceSpan span) {
    if (const auto* r = std::get_if<ReturnValue>(&t)) add(free_vars(r->value), span);
  };
  for (const auto& b : program.blocks) {
    const VarSet in_assertion = free_vars(b.assertion);
    asserted.insert(in_assertion.scalars.begin(), in_assertion.scalars.end());
    add(in_assertion, b.span);
    std::visit(
        [&](const auto& body) {
          using B = std::decay_t<decltype(body)>;
          if constexpr (std::is_same_v<B, IfFi>) {
            for (const auto& gc : body.arms) {
              add(free_vars(gc.guard), gc.span);
              add(free_vars(gc.body), gc.span);
              add_terminal(gc.terminal, gc.span);
            }
          } else if constexpr (std::is_same_v<B, Straight>) {
            add(free_vars(body.body), b.span);
            add_terminal(body.terminal, b.span);
          } else if constexpr (std::is_same_v<B, ReturnBody>) {
            add(free_vars(body.value), b.span);
          }
        },
        b.body);
  }
  for (const auto& [name, span] : arrays) {
    const Decl* d = program.find_decl(name);
    if (d == nullptr) {
      diags.push_back({Diagnostic::Severity::error, span,
                       "array '" + name + "' is used but not declared"});
    } else if (!d->is_array()) {
      diags.push_back({Diagnostic::Severity::error, span,
                       "'" + name + "' is declared as a scalar but indexed as an array"});
    }
  }
  for (const auto& [name, span] : scalars) {
    const Decl* d = program.find_decl(name);
    if (d == nullptr) {
      Decl implicit;
      implicit.name = name;
      implicit.implicit = true;
      implicit.span = span;
      program.decls.push_back(implicit);
      if (asserted.contains(name)) continue;
      diags.push_back({Diagnostic::Severity::warning, span,
                       "variable '" + name + "' is not declared; assuming a scalar initialized to 0"});
    } else if (d->is_array()) {
      diags.push_back({Diagnostic::Severity::error, span,
                       "'" + name + "' is an array but is used as a scalar"});
    }
  }
  return diags;
}

/// Structural well-formedness: unique labels, resolvable gotos and label
/// references, a halt block. Sets `program.start`/`program.halt` when empty.
inline std::vector<Diagnostic> check_structure(Program& program) {
  std::vector<Diagnostic> diags;
  auto error = [&](SourceSpan span, std::string msg) {
    diags.push_back({Diagnostic::Severity::error, span, std::move(msg)});
  };
  if (program.blocks.empty()) {
    error({1, 1, 0}, "program has no blocks");
    return diags;
  }
  std::set<std::string> seen;
  for (const auto& b : program.blocks) {
    if (!seen.insert(b.label).second) error(b.span, "duplicate label '" + b.label + "'");
    if (!is_valid_ident(b.label)) error(b.span, "invalid label '" + b.label + "'");
  }
  auto check_goto = [&](const Terminal& t, SourceSpan span) {
    if (const auto* g = std::get_if<GotoLabel>(&t); g && !seen.contains(g->label)) {
      error(span, "goto target '" + g->label + "' is not a label of this program");
    }
  };
  for (const auto& b : program.blocks) {
    if (const auto* ifs = std::get_if<IfFi>(&b.body)) {
      if (ifs->arms.empty()) error(b.span, "if...fi of block '" + b.label + "' has no guarded command");
      for (const auto& gc : ifs->arms) check_goto(gc.terminal, gc.span);
    } else if (const auto* s = std::get_if<Straight>(&b.body)) {
      check_goto(s->terminal, b.span);
    }
    std::vector<std::string> refs;
    label_refs(b.assertion, refs);
    for (const auto& r : refs) {
      if (!seen.contains(r)) error(b.span, "assertion of '" + b.label + "' refers to unknown label '" + r + "'");
    }
  }
  for (const auto& b : program.blocks) {
    try {
      (void)resolve_assertion(program, b.label);
    } catch (const ResolveError& e) {
      if (e.kind() == ResolveError::Kind::cyclic_reference) error(b.span, e.what());
    }
  }
  if (program.start.empty()) program.start = program.blocks.front().label;
  if (!program.find_block(program.start)) error({1, 1, 0}, "start label '" + program.start + "' does not exist");
  if (program.halt.empty()) {
    const Block* h = program.find_block("H");
    if (h && block_returns(*h)) {
      program.halt = "H";
    } else {
      for (auto it = program.blocks.rbegin(); it != program.blocks.rend(); ++it) {
        if (block_returns(*it)) {
          program.halt = it->label;
          break;
        }
      }
    }
  }
  const Block* halt = program.halt.empty() ? nullptr : program.find_block(program.halt);
  if (halt == nullptr) {
    error(program.blocks.back().span, "no halt block: some block must end in 'return'");
  } else if (!block_returns(*halt)) {
    error(halt->span, "halt block '" + program.halt + "' does not return");
  }
  return diags;
}

/// Warnings for prose assertions and annotations.
inline std::vector<Diagnostic> prose_warnings(const Program& program) {
  std::vector<Diagnostic> diags;
  auto annotations = [&](const Command& body, const std::string& label) {
    for (const auto& item : flatten(body)) {
      if (const auto* a = item.as<Annot>(); a && contains_opaque(a->claim)) {
        diags.push_back({Diagnostic::Severity::warning, item.span(),
                         "annotation in block '" + label + "' is prose and will not be checked"});
      }
    }
  };
  for (const auto& b : program.blocks) {
    if (contains_opaque(b.assertion)) {
      diags.push_back({Diagnostic::Severity::warning, b.span,
                       "assertion of '" + b.label + "' is prose and will not be evaluated"});
    }
    if (const auto* ifs = std::get_if<IfFi>(&b.body)) {
      for (const auto& gc : ifs->arms) annotations(gc.body, b.label);
    } else if (const auto* s = std::get_if<Straight>(&b.body)) {
      annotations(s->body, b.label);
    }
  }
  return diags;
}

/// Runs every well-formedness check, completing declarations in place.
inline std::vector<Diagnostic> validate_program(Program& program) {
  std::vector<Diagnostic> diags = check_structure(program);
  auto more = complete_declarations(program);
  diags.insert(diags.end(), more.begin(), more.end());
  return diags;
}

// ------------------------------------------------------------------ programs

namespace detail {

class ProgramParser {
 public:
  explicit ProgramParser(std::string_view source)
      : src_(source), cursor_(Lexer(source)), expr_(cursor_) {}

  Program parse() {
    Program program;
    skip_comments();
    while (cursor_.peek().is_keyword("int")) {
      parse_decl(program);
      skip_comments();
    }
    if (cursor_.at_end()) throw SyntaxError(cursor_.peek().span, "program has no blocks");
    while (!cursor_.at_end()) {
      program.blocks.push_back(parse_block());
      skip_comments();
    }
    return program;
  }

  std::vector<Decl> parse_declarations() {
    Program program;
    skip_comments();
    while (cursor_.peek().is_keyword("int")) {
      parse_decl(program);
      skip_comments();
    }
    if (!cursor_.at_end()) cursor_.fail("expected a declaration");
    for (const auto& d : diags_) {
      if (d.is_error()) throw SyntaxError(d.span, d.message);
    }
    return program.decls;
  }

  std::vector<Diagnostic>& diagnostics() { return diags_; }

 private:
  void skip_comments() {
    while (cursor_.peek().kind == TokenKind::annotation) cursor_.next();
  }

  void parse_decl(Program& program) {
    cursor_.expect_keyword("int");
    do {
      const Token name = cursor_.expect_ident("variable name");
      Decl d;
      d.name = name.text;
      d.span = name.span;
      if (cursor_.accept_op("[")) {
        if (cursor_.peek().kind != TokenKind::integer || cursor_.peek().value <= 0) {
          cursor_.fail("expected a positive array size");
        }
        d.array_size = static_cast<std::size_t>(cursor_.next().value);
        cursor_.expect_op("]");
      }
      if (cursor_.accept_op(":=")) {
        const bool negative = cursor_.accept_op("-");
        if (cursor_.peek().kind != TokenKind::integer) cursor_.fail("expected an integer initializer");
        const std::int64_t v = cursor_.next().value;
        d.init = negative ? -v : v;
      }
      if (program.find_decl(d.name)) {
        diags_.push_back({Diagnostic::Severity::error, name.span,
                          "variable '" + d.name + "' declared twice"});
      }
      program.decls.push_back(d);
    } while (cursor_.accept_op(","));
    cursor_.accept_op(";");
  }

  bool at_label() {
    return cursor_.peek().kind == TokenKind::ident && cursor_.peek(1).is_op(":");
  }

  struct LineInfo {
    std::size_t begin;
    std::size_t end;  // exclusive, before '\n'
  };

  LineInfo line_at(std::size_t offset) const {
    std::size_t end = src_.find('\n', offset);
    if (end == std::string_view::npos) end = src_.size();
    return {offset, end};
  }

  enum class LineKind { blank, continuation, body };

  static LineKind classify(std::string_view line) {
    std::vector<Token> toks;
    try {
      toks = tokenize(line);
    } catch (const LexError&) {
      return LineKind::continuation;
    }
    if (toks.empty()) return LineKind::blank;
    const Token& first = toks.front();
    if (first.kind == TokenKind::keyword &&
        (first.text == "if" || first.text == "fi" || first.text == "abort" ||
         first.text == "goto" || first.text == "return" || first.text == "swap")) {
      return LineKind::body;
    }
    if (first.kind == TokenKind::hole || first.kind == TokenKind::annotation || first.is_op("|")) {
      return LineKind::body;
    }
    if (first.kind == TokenKind::ident && toks.size() > 1 && toks[1].is_op(":")) return LineKind::body;
    for (const auto& t : toks) {
      if (t.is_op(":=") || t.is_op("+=") || t.is_op("-=") || t.is_op("*=")) return LineKind::body;
    }
    return LineKind::continuation;
  }

  Formula parse_assertion(const Token& colon, const std::string& label, SourceSpan label_span) {
    const std::size_t begin = colon.offset + 1;
    LineInfo first = line_at(begin);
    std::vector<std::string> lines{trim(src_.substr(first.begin, first.end - first.begin))};
    std::size_t text_end = first.end;
    std::size_t line_no = colon.span.line;
    std::size_t next = first.end;
    std::size_t body_line = line_no;
    for (;;) {
      if (next >= src_.size()) {
        next = src_.size();
        break;
      }
      const LineInfo li = line_at(next + 1);
      const std::string_view text = src_.substr(li.begin, li.end - li.begin);
      const LineKind kind = classify(text);
      if (kind == LineKind::body) {
        next = li.begin;
        body_line = line_no + 1;
        break;
      }
      ++line_no;
      if (kind == LineKind::continuation) {
        lines.push_back(trim(text));
        text_end = li.end;
      }
      next = li.end;
      body_line = line_no + 1;
    }
    // Position the cursor at the start of the body.
    cursor_.resync(next, next >= src_.size() ? line_no : body_line, 1);

    std::vector<std::string> kept;
    for (auto& l : lines) {
      if (!l.empty()) kept.push_back(std::move(l));
    }
    std::string prose;
    for (std::size_t i = 0; i < kept.size(); ++i) {
      if (i) prose += '\n';
      prose += kept[i];
    }
    if (prose.empty()) {
      diags_.push_back({Diagnostic::Severity::warning, label_span,
                        "block '" + label + "' has an empty assertion; assuming true"});
      return Formula(TrueF{}, label_span);
    }
    if (prose.size() >= 2 && prose.front() == '{' && prose.back() == '}' &&
        prose.find('}') == prose.size() - 1) {
      return formula_or_opaque(trim(prose.substr(1, prose.size() - 2)), label_span);
    }
    try {
      Cursor sub{Lexer(src_, begin, text_end, colon.span.line, colon.span.column + 1)};
      ExprParser p(sub);
      Formula f = p.formula();
      if (!sub.at_end()) sub.fail("unexpected trailing input");
      return f;
    } catch (const SyntaxError&) {
      return Formula(Opaque{prose}, label_span);
    }
  }

  Block parse_block() {
    if (!at_label()) cursor_.fail("expected a block label 'L:'");
    const Token label = cursor_.next();
    if (!is_valid_ident(label.text)) throw SyntaxError(label.span, "invalid label '" + label.text + "'");
    const Token colon = cursor_.next();
    Block block{label.text, Formula(TrueF{}), AbortBody{}, label.span};
    block.assertion = parse_assertion(colon, label.text, label.span);
    if (cursor_.at_end() || at_label()) {
      throw SyntaxError(label.span, "block '" + label.text + "' has no body");
    }
    const Token& t = cursor_.peek();
    if (t.is_keyword("if")) {
      cursor_.next();
      IfFi ifs;
      ifs.arms.push_back(parse_guarded_command());
      while (cursor_.accept_op("|")) ifs.arms.push_back(parse_guarded_command());
      cursor_.expect_keyword("fi");
      block.body = std::move(ifs);
    } else if (t.is_keyword("abort")) {
      cursor_.next();
      block.body = AbortBody{};
    } else if (t.is_keyword("return")) {
      cursor_.next();
      block.body = ReturnBody{expr_.term()};
    } else {
      auto [body, terminal] = parse_tail();
      block.body = Straight{body, terminal};
    }
    return block;
  }

  GuardedCommand parse_guarded_command() {
    const SourceSpan span = cursor_.peek().span;
    Formula guard = expr_.formula();
    std::vector<Command> prefix;
    while (cursor_.peek().kind == TokenKind::annotation) {
      prefix.push_back(parse_annotation(cursor_.next()));
    }
    cursor_.expect_op("->");
    auto [body, terminal] = parse_tail();
    if (!prefix.empty()) {
      std::vector<Command> items = std::move(prefix);
      for (const auto& c : body.as<Seq>()->items) items.push_back(c);
      body = Command(Seq{std::move(items)}, body.span());
    }
    return GuardedCommand{guard, body, terminal, span};
  }

  bool at_body_end() {
    const Token& t = cursor_.peek();
    return t.kind == TokenKind::end || t.is_keyword("fi") || t.is_op("|") || at_label();
  }

  std::pair<Command, Terminal> parse_tail() {
    const SourceSpan span = cursor_.peek().span;
    std::vector<Command> items;
    for (;;) {
      const Token& t = cursor_.peek();
      if (t.is_op(";")) {
        cursor_.next();
        continue;
      }
      if (t.is_keyword("goto")) {
        cursor_.next();
        const Token target = cursor_.expect_ident("goto target");
        return {Command(Seq{std::move(items)}, span), GotoLabel{target.text}};
      }
      if (t.is_keyword("return")) {
        cursor_.next();
        return {Command(Seq{std::move(items)}, span), ReturnValue{expr_.term()}};
      }
      if (t.kind == TokenKind::hole || t.kind == TokenKind::annotation) {
        items.push_back(parse_statement(cursor_, expr_));
        cursor_.accept_op(";");
        if (items.back().is<Hole>() && at_body_end()) {
          return {Command(Seq{std::move(items)}, span), OpenEnd{}};
        }
        continue;
      }
      if (at_body_end()) cursor_.fail("expected 'goto' or 'return' to end the command");
      items.push_back(parse_statement(cursor_, expr_));
      cursor_.expect_op(";");
    }
  }

  std::string_view src_;
  Cursor cursor_;
  ExprParser expr_;
  std::vector<Diagnostic> diags_;
};

}  // namespace detail

/// Parses and validates a Liffig program. Warnings do not prevent a Program.
inline ParseResult parse_program(std::string_view source) {
  ParseResult result;
  detail::ProgramParser parser(source);
  Program program;
  try {
    program = parser.parse();
  } catch (const SyntaxError& e) {
    result.diagnostics = std::move(parser.diagnostics());
    result.diagnostics.push_back({Diagnostic::Severity::error, e.span(), e.what()});
    return result;
  }
  result.diagnostics = std::move(parser.diagnostics());
  for (auto& d : validate_program(program)) result.diagnostics.push_back(std::move(d));
  for (auto& d : prose_warnings(program)) result.diagnostics.push_back(std::move(d));
  if (result.error_count() == 0) result.program = std::move(program);
  return result;
}

/// Parses a sequence of `int` declarations; throws SyntaxError.
inline std::vector<Decl> parse_declarations(std::string_view source) {
  detail::ProgramParser parser(source);
  return parser.parse_declarations();
}

/// Parses a program, throwing SyntaxError with the first error's span on failure.
inline Program parse_program_or_throw(std::string_view source) {
  ParseResult r = parse_program(source);
  if (!r.ok()) {
    for (const auto& d : r.diagnostics) {
      if (d.is_error()) throw SyntaxError(d.span, d.message);
    }
  }
  return std::move(*r.program);
}

}  // namespace liffig
