#pragma once

// C code generation. Blocks keep their labels, assertions become comments
// (or runtime asserts), guarded commands become `if (g) { ...; goto M; }`
// chains closed by `assert(0);`.

#include <set>
#include <string>
#include <vector>

#include "liffig/ast.hpp"
#include "liffig/errors.hpp"
#include "liffig/printer.hpp"
#include "liffig/resolve.hpp"

namespace liffig {

class TranspileError : public Error {
 public:
  enum class Kind { hole_present, opaque_guard, opaque_assertion, bad_parameter, unsupported };

  TranspileError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

struct COptions {
  std::string function_name = "f";
  std::vector<std::string> params;
  bool wide = false;     // long long instead of int
  bool checked = false;  // assert every label's assertion
  std::string indent = "  ";
};

namespace detail {

class CEmitter {
 public:
  CEmitter(const Program& program, COptions opts) : program_(program), opts_(std::move(opts)) {
    type_ = opts_.wide ? "long long" : "int";
  }

  std::string emit() {
    check_params();
    std::string body;
    for (const auto& b : program_.blocks) body += block(b);

    std::string out;
    out += "/* Generated from a Liffig program. Declarations are hoisted to the top of\n";
    out += "   the function, so blocks assign initial values instead of declaring. */\n";
    out += "#include <assert.h>\n\n";
    out += helpers();
    out += type_ + " " + opts_.function_name + "(";
    for (std::size_t i = 0; i < opts_.params.size(); ++i) {
      if (i) out += ", ";
      out += type_ + " " + opts_.params[i];
    }
    out += ") {\n";
    out += locals();
    out += body;
    out += "}\n";
    return out;
  }

 private:
  // ---------------------------------------------------------------- setup

  void check_params() {
    std::set<std::string> seen;
    for (const auto& p : opts_.params) {
      const Decl* d = program_.find_decl(p);
      if (d == nullptr || d->is_array()) {
        throw TranspileError(TranspileError::Kind::bad_parameter, "parameter " + p + " is not a declared scalar");
      }
      if (!seen.insert(p).second) {
        throw TranspileError(TranspileError::Kind::bad_parameter, "parameter " + p + " listed twice");
      }
    }
  }

  bool is_param(const std::string& name) const {
    return std::find(opts_.params.begin(), opts_.params.end(), name) != opts_.params.end();
  }

  std::string helpers() const {
    std::string out;
    const std::string& t = type_;
    if (use_swap_) {
      out += "static void swap(" + t + " *a, " + t + " *b) {\n  " + t + " t = *a;\n  *a = *b;\n  *b = t;\n}\n\n";
    }
    if (use_gcd_) {
      out += "static " + t + " gcd0(" + t + " a, " + t + " b) {\n  while (b != 0) {\n    " + t +
             " r = a % b;\n    a = b;\n    b = r;\n  }\n  return a;\n}\n\n";
    }
    if (use_pow_) {
      out += "static " + t + " ipow(" + t + " b, " + t + " e) {\n  " + t +
             " r = 1;\n  while (e-- > 0) r *= b;\n  return r;\n}\n\n";
    }
    if (use_mod_) {
      out += "static " + t + " mod0(" + t + " a, " + t + " b) {\n  " + t +
             " r = a % b;\n  if (r < 0) r += b < 0 ? -b : b;\n  return r;\n}\n\n";
    }
    return out;
  }

  std::string locals() const {
    std::string out;
    for (const auto& d : program_.decls) {
      if (is_param(d.name) || !used_.contains(d.name)) continue;
      if (d.is_array()) {
        out += opts_.indent + type_ + " " + d.name + "[" + std::to_string(*d.array_size) + "] = {0};\n";
        if (d.init && *d.init != 0) {
          out += opts_.indent + "for (int __i = 0; __i < " + std::to_string(*d.array_size) + "; ++__i) " + d.name +
                 "[__i] = " + std::to_string(*d.init) + ";\n";
        }
        continue;
      }
      std::string init = d.init ? std::to_string(*d.init) : "0";
      // Ghost variables v0 start out equal to parameter v.
      if (!d.init && d.name.size() > 1 && d.name.back() == '0' && is_param(d.name.substr(0, d.name.size() - 1))) {
        init = d.name.substr(0, d.name.size() - 1);
      }
      out += opts_.indent + type_ + " " + d.name + " = " + init + ";\n";
    }
    for (int i = 0; i < temps_; ++i) out += opts_.indent + type_ + " __t" + std::to_string(i) + ";\n";
    if (checked_flag_) out += opts_.indent + "int __ok;\n";
    return out;
  }

  void note_vars(const VarSet& vs) {
    used_.insert(vs.scalars.begin(), vs.scalars.end());
    used_.insert(vs.arrays.begin(), vs.arrays.end());
  }

  // ---------------------------------------------------------------- expressions

  static int term_prec(const Term& t) {
    if (const auto* b = t.as<BinOp>()) {
      switch (b->op) {
        case BinaryOp::add:
        case BinaryOp::sub: return 4;
        case BinaryOp::mul:
        case BinaryOp::div: return 5;
        default: return 7;
      }
    }
    if (const auto* lit = t.as<IntLit>(); lit && lit->value < 0) return 6;
    return 7;
  }

  std::string wrap(const Term& t, int min) {
    const std::string s = term(t);
    return term_prec(t) < min ? "(" + s + ")" : s;
  }

  std::string term(const Term& t) {
    return std::visit(
        [&](const auto& n) -> std::string {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, IntLit>) {
            return std::to_string(n.value) + (opts_.wide && (n.value > 2147483647 || n.value < -2147483647) ? "LL" : "");
          } else if constexpr (std::is_same_v<N, Var>) {
            if (!bound_.contains(n.name)) used_.insert(n.name);
            return n.name;
          } else if constexpr (std::is_same_v<N, ArrayRef>) {
            used_.insert(n.array);
            return n.array + "[" + term(n.index) + "]";
          } else if constexpr (std::is_same_v<N, Apply>) {
            use_gcd_ = true;
            return "gcd0(" + term(n.args.at(0)) + ", " + term(n.args.at(1)) + ")";
          } else {
            switch (n.op) {
              case BinaryOp::add:
              case BinaryOp::sub:
                return wrap(n.lhs, 4) + (n.op == BinaryOp::add ? " + " : " - ") + wrap(n.rhs, 5);
              case BinaryOp::mul:
              case BinaryOp::div:
                return wrap(n.lhs, 5) + (n.op == BinaryOp::mul ? " * " : " / ") + wrap(n.rhs, 6);
              case BinaryOp::pow:
                use_pow_ = true;
                return "ipow(" + term(n.lhs) + ", " + term(n.rhs) + ")";
              case BinaryOp::mod:
                use_mod_ = true;
                return "mod0(" + term(n.lhs) + ", " + term(n.rhs) + ")";
            }
            return {};
          }
        },
        t.node());
  }

  static int formula_prec(const Formula& f) {
    if (f.is<Or>() || f.is<Implies>()) return 1;
    if (f.is<And>()) return 2;
    if (f.is<Compare>() || f.is<Pred>()) return 3;
    return 4;
  }

  std::string wrap(const Formula& f, int min) {
    const std::string s = expr(f);
    return formula_prec(f) < min ? "(" + s + ")" : s;
  }

  std::string expr(const Formula& f) {
    return std::visit(
        [&](const auto& n) -> std::string {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, TrueF>) {
            return "1";
          } else if constexpr (std::is_same_v<N, FalseF>) {
            return "0";
          } else if constexpr (std::is_same_v<N, Compare>) {
            const char* op = "==";
            switch (n.op) {
              case CompareOp::eq: op = "=="; break;
              case CompareOp::ne: op = "!="; break;
              case CompareOp::lt: op = "<"; break;
              case CompareOp::le: op = "<="; break;
              case CompareOp::gt: op = ">"; break;
              case CompareOp::ge: op = ">="; break;
            }
            return term(n.lhs) + " " + op + " " + term(n.rhs);
          } else if constexpr (std::is_same_v<N, Pred>) {
            const std::string a = wrap(n.args.at(0), 6);
            switch (n.pred) {
              case Predicate::even: return a + " % 2 == 0";
              case Predicate::odd: return a + " % 2 != 0";
              case Predicate::div: return a + " % " + wrap(n.args.at(1), 6) + " == 0";
            }
            return {};
          } else if constexpr (std::is_same_v<N, Not>) {
            return "!" + wrap(n.operand, 4);
          } else if constexpr (std::is_same_v<N, And>) {
            return wrap(n.lhs, 2) + " && " + wrap(n.rhs, 3);
          } else if constexpr (std::is_same_v<N, Or>) {
            return wrap(n.lhs, 1) + " || " + wrap(n.rhs, 2);
          } else if constexpr (std::is_same_v<N, Implies>) {
            return "!" + wrap(n.lhs, 4) + " || " + wrap(n.rhs, 2);
          } else if constexpr (std::is_same_v<N, ForAll> || std::is_same_v<N, Exists>) {
            throw TranspileError(TranspileError::Kind::unsupported, "quantifier outside an assertion: " + print_formula(f));
          } else if constexpr (std::is_same_v<N, LabelRef>) {
            throw TranspileError(TranspileError::Kind::opaque_guard, "label reference " + n.label + " in a guard");
          } else {
            throw TranspileError(TranspileError::Kind::opaque_guard, "prose guard: " + n.prose);
          }
        },
        f.node());
  }

  static bool has_quantifier(const Formula& f) {
    if (f.is<ForAll>() || f.is<Exists>()) return true;
    if (const auto* n = f.as<Not>()) return has_quantifier(n->operand);
    if (const auto* a = f.as<And>()) return has_quantifier(a->lhs) || has_quantifier(a->rhs);
    if (const auto* o = f.as<Or>()) return has_quantifier(o->lhs) || has_quantifier(o->rhs);
    if (const auto* i = f.as<Implies>()) return has_quantifier(i->lhs) || has_quantifier(i->rhs);
    return false;
  }

  /// Statements leaving the truth value of `f` in __ok.
  std::string truth(const Formula& f, const std::string& pad) {
    if (!has_quantifier(f)) return pad + "__ok = " + expr(f) + ";\n";
    const std::string in = pad + opts_.indent;
    if (const auto* a = f.as<And>()) {
      return truth(a->lhs, pad) + pad + "if (__ok) {\n" + truth(a->rhs, in) + pad + "}\n";
    }
    if (const auto* o = f.as<Or>()) {
      return truth(o->lhs, pad) + pad + "if (!__ok) {\n" + truth(o->rhs, in) + pad + "}\n";
    }
    if (const auto* i = f.as<Implies>()) {
      return truth(i->lhs, pad) + pad + "if (__ok) {\n" + truth(i->rhs, in) + pad + "} else {\n" + in +
             "__ok = 1;\n" + pad + "}\n";
    }
    if (const auto* n = f.as<Not>()) return truth(n->operand, pad) + pad + "__ok = !__ok;\n";
    const bool all = f.is<ForAll>();
    const std::string& var = all ? f.as<ForAll>()->var : f.as<Exists>()->var;
    const Term& lo = all ? f.as<ForAll>()->lo : f.as<Exists>()->lo;
    const Term& hi = all ? f.as<ForAll>()->hi : f.as<Exists>()->hi;
    const Formula& body = all ? f.as<ForAll>()->body : f.as<Exists>()->body;
    std::string out = pad + "__ok = " + (all ? "1" : "0") + ";\n";
    out += pad + "for (" + type_ + " " + var + " = " + term(lo) + "; " + (all ? "__ok" : "!__ok") + " && " + var +
           " <= " + term(hi) + "; ++" + var + ") {\n";
    const bool fresh = bound_.insert(var).second;
    out += truth(body, in);
    if (fresh) bound_.erase(var);
    return out + pad + "}\n";
  }

  // ---------------------------------------------------------------- statements

  static bool reads(const Term& t, const std::set<std::string>& names) {
    const VarSet vs = free_vars(t);
    for (const auto& n : vs.scalars) {
      if (names.contains(n)) return true;
    }
    for (const auto& n : vs.arrays) {
      if (names.contains(n)) return true;
    }
    return false;
  }

  static const std::string& target_name(const Term& t) {
    if (const auto* v = t.as<Var>()) return v->name;
    return t.as<ArrayRef>()->array;
  }

  std::string lvalue(const Term& t, const std::string& index_override = {}) {
    if (const auto* r = t.as<ArrayRef>()) {
      used_.insert(r->array);
      return r->array + "[" + (index_override.empty() ? term(r->index) : index_override) + "]";
    }
    return term(t);
  }

  std::string assign(const ParAssign& a) {
    // Hazard: a later source or index reads a location written earlier.
    bool hazard = false;
    std::set<std::string> written;
    for (std::size_t i = 0; i < a.targets.size(); ++i) {
      if (i > 0 && reads(a.sources[i], written)) hazard = true;
      if (const auto* r = a.targets[i].as<ArrayRef>(); r && reads(r->index, written)) hazard = true;
      written.insert(target_name(a.targets[i]));
    }
    std::string out;
    if (!hazard) {
      for (std::size_t i = 0; i < a.targets.size(); ++i) {
        out += (i ? " " : "") + lvalue(a.targets[i]) + " = " + term(a.sources[i]) + ";";
      }
      return out;
    }
    std::vector<std::string> src_tmp, idx_tmp;
    for (const auto& s : a.sources) {
      const std::string t = "__t" + std::to_string(temps_++);
      out += (out.empty() ? "" : " ") + t + " = " + term(s) + ";";
      src_tmp.push_back(t);
    }
    for (const auto& tg : a.targets) {
      std::string it;
      if (const auto* r = tg.as<ArrayRef>(); r && reads(r->index, written)) {
        it = "__t" + std::to_string(temps_++);
        out += " " + it + " = " + term(r->index) + ";";
      }
      idx_tmp.push_back(it);
    }
    for (std::size_t i = 0; i < a.targets.size(); ++i) {
      out += " " + lvalue(a.targets[i], idx_tmp[i]) + " = " + src_tmp[i] + ";";
    }
    return out;
  }

  std::string item(const Command& c) {
    return std::visit(
        [&](const auto& n) -> std::string {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, ParAssign>) {
            return assign(n);
          } else if constexpr (std::is_same_v<N, Swap>) {
            use_swap_ = true;
            used_.insert(n.a);
            used_.insert(n.b);
            return "swap(&" + n.a + ", &" + n.b + ");";
          } else if constexpr (std::is_same_v<N, Guard>) {
            return "if (!(" + expr(n.condition) + ")) assert(0);";
          } else if constexpr (std::is_same_v<N, Hole>) {
            throw TranspileError(TranspileError::Kind::hole_present, "program contains the hole \"" + n.prose + "\"");
          } else if constexpr (std::is_same_v<N, Annot>) {
            std::string text = print_formula(n.claim);
            std::replace(text.begin(), text.end(), '\n', ' ');
            return "/* " + text + " */";
          } else {
            std::string out;
            for (const auto& i : n.items) {
              const std::string s = item(i);
              if (!s.empty()) out += (out.empty() ? "" : " ") + s;
            }
            return out;
          }
        },
        c.node());
  }

  std::string terminal(const Terminal& t) {
    if (const auto* g = std::get_if<GotoLabel>(&t)) return "goto " + g->label + ";";
    if (const auto* r = std::get_if<ReturnValue>(&t)) return "return " + term(r->value) + ";";
    throw TranspileError(TranspileError::Kind::hole_present, "command ends without goto or return");
  }

  std::string sequence(const Command& body, const Terminal& t) {
    const std::string b = item(body);
    return b.empty() ? terminal(t) : b + " " + terminal(t);
  }

  std::string comment(const Formula& f) const {
    const std::string text = print_formula(f);
    std::string out = "// ";
    for (char c : text) {
      out += c;
      if (c == '\n') out += opts_.indent + "// ";
    }
    return out;
  }

  std::string block(const Block& b) {
    const std::string& in = opts_.indent;
    std::string out = b.label + ": " + comment(b.assertion) + "\n";
    if (opts_.checked) {
      const Formula f = resolve_assertion(program_, b.label);
      if (contains_opaque(f)) {
        throw TranspileError(TranspileError::Kind::opaque_assertion, "assertion of " + b.label + " is prose");
      }
      if (has_quantifier(f)) {
        checked_flag_ = true;
        out += truth(f, in) + in + "assert(__ok);\n";
      } else {
        out += in + "assert(" + expr(f) + ");\n";
      }
    }
    std::visit(
        [&](const auto& body) {
          using B = std::decay_t<decltype(body)>;
          if constexpr (std::is_same_v<B, IfFi>) {
            if (body.arms.size() == 1 && body.arms[0].guard.template is<TrueF>()) {
              out += in + sequence(body.arms[0].body, body.arms[0].terminal) + "\n";
              return;
            }
            for (const auto& gc : body.arms) {
              out += in + "if (" + expr(gc.guard) + ") { " + sequence(gc.body, gc.terminal) + " }\n";
            }
            out += in + "assert(0);\n";
          } else if constexpr (std::is_same_v<B, Straight>) {
            out += in + sequence(body.body, body.terminal) + "\n";
          } else if constexpr (std::is_same_v<B, AbortBody>) {
            out += in + "assert(0);\n";
          } else {
            out += in + "return " + term(body.value) + ";\n";
          }
        },
        b.body);
    return out;
  }

  const Program& program_;
  COptions opts_;
  std::string type_;
  std::set<std::string> used_;
  std::set<std::string> bound_;
  int temps_ = 0;
  bool use_swap_ = false;
  bool use_gcd_ = false;
  bool use_pow_ = false;
  bool use_mod_ = false;
  bool checked_flag_ = false;
};

}  // namespace detail

/// C translation unit with one function mirroring the program's blocks.
/// Assertions appear as comments. Throws TranspileError on holes or prose guards.
inline std::string to_c(const Program& program, COptions opts) {
  opts.checked = false;
  return detail::CEmitter(program, std::move(opts)).emit();
}

/// As to_c, with `assert(...)` of each label's resolved assertion after the label.
inline std::string emit_runtime_checked(const Program& program, COptions opts) {
  opts.checked = true;
  return detail::CEmitter(program, std::move(opts)).emit();
}

}  // namespace liffig
