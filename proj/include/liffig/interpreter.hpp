#pragma once

// Execution of Liffig programs: term and formula evaluation over the integers,
// the command relation, and runs that check every label's assertion on arrival.

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "liffig/ast.hpp"
#include "liffig/errors.hpp"
#include "liffig/printer.hpp"
#include "liffig/resolve.hpp"
#include "liffig/state.hpp"

namespace liffig {

/// Quantifier-bound variables, innermost last.
using Env = std::vector<std::pair<std::string_view, std::int64_t>>;

// ------------------------------------------------------------------ arithmetic

namespace arith {

inline std::int64_t add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw FaultError(FaultKind::overflow, std::to_string(a) + " + " + std::to_string(b));
  return r;
}

inline std::int64_t sub(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_sub_overflow(a, b, &r)) throw FaultError(FaultKind::overflow, std::to_string(a) + " - " + std::to_string(b));
  return r;
}

inline std::int64_t mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw FaultError(FaultKind::overflow, std::to_string(a) + " * " + std::to_string(b));
  return r;
}

/// Floor division.
inline std::int64_t div(std::int64_t a, std::int64_t b) {
  if (b == 0) throw FaultError(FaultKind::div_by_zero, std::to_string(a) + " / 0");
  if (a == std::numeric_limits<std::int64_t>::min() && b == -1) {
    throw FaultError(FaultKind::overflow, std::to_string(a) + " / -1");
  }
  std::int64_t q = a / b;
  if (a % b != 0 && ((a < 0) != (b < 0))) --q;
  return q;
}

/// Remainder with 0 <= mod(a, b) < |b|.
inline std::int64_t mod(std::int64_t a, std::int64_t b) {
  if (b == 0) throw FaultError(FaultKind::div_by_zero, "mod(" + std::to_string(a) + ", 0)");
  if (b == -1) return 0;
  std::int64_t r = a % b;
  if (r < 0) r += b < 0 ? -b : b;
  return r;
}

inline std::int64_t pow(std::int64_t base, std::int64_t exp) {
  if (exp < 0) throw FaultError(FaultKind::domain_error, "negative exponent " + std::to_string(exp));
  if (base == 0) return exp == 0 ? 1 : 0;
  if (base == 1) return 1;
  if (base == -1) return exp % 2 == 0 ? 1 : -1;
  std::int64_t result = 1;
  for (std::int64_t i = 0; i < exp; ++i) {
    if (__builtin_mul_overflow(result, base, &result)) {
      throw FaultError(FaultKind::overflow, std::to_string(base) + "^" + std::to_string(exp));
    }
  }
  return result;
}

inline std::int64_t gcd(std::int64_t a, std::int64_t b) {
  if (a <= 0 || b <= 0) {
    throw FaultError(FaultKind::domain_error,
                     "gcd(" + std::to_string(a) + ", " + std::to_string(b) + ") needs positive arguments");
  }
  while (b != 0) {
    const std::int64_t t = a % b;
    a = b;
    b = t;
  }
  return a;
}

}  // namespace arith

// ------------------------------------------------------------------ terms

namespace detail {

inline std::int64_t lookup(const State& s, const Env& env, std::string_view name) {
  for (auto it = env.rbegin(); it != env.rend(); ++it) {
    if (it->first == name) return it->second;
  }
  return s.scalar(name);
}

inline std::size_t checked_index(std::span<const std::int64_t> arr, std::string_view name, std::int64_t i) {
  if (i < 0 || static_cast<std::uint64_t>(i) >= arr.size()) {
    throw FaultError(FaultKind::index_out_of_bounds,
                     std::string(name) + "[" + std::to_string(i) + "] outside 0.." +
                         std::to_string(static_cast<std::int64_t>(arr.size()) - 1));
  }
  return static_cast<std::size_t>(i);
}

}  // namespace detail

inline std::int64_t eval_term(const State& s, const Term& t, Env& env) {
  return std::visit(
      [&](const auto& n) -> std::int64_t {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, IntLit>) {
          return n.value;
        } else if constexpr (std::is_same_v<N, Var>) {
          return detail::lookup(s, env, n.name);
        } else if constexpr (std::is_same_v<N, ArrayRef>) {
          const auto arr = s.array(n.array);
          return arr[detail::checked_index(arr, n.array, eval_term(s, n.index, env))];
        } else if constexpr (std::is_same_v<N, Apply>) {
          return arith::gcd(eval_term(s, n.args.at(0), env), eval_term(s, n.args.at(1), env));
        } else {
          const std::int64_t a = eval_term(s, n.lhs, env);
          const std::int64_t b = eval_term(s, n.rhs, env);
          switch (n.op) {
            case BinaryOp::add: return arith::add(a, b);
            case BinaryOp::sub: return arith::sub(a, b);
            case BinaryOp::mul: return arith::mul(a, b);
            case BinaryOp::div: return arith::div(a, b);
            case BinaryOp::pow: return arith::pow(a, b);
            case BinaryOp::mod: return arith::mod(a, b);
          }
          return 0;
        }
      },
      t.node());
}

inline std::int64_t eval_term(const State& s, const Term& t) {
  Env env;
  return eval_term(s, t, env);
}

// ------------------------------------------------------------------ formulas

namespace detail {

inline bool compare(CompareOp op, std::int64_t a, std::int64_t b) {
  switch (op) {
    case CompareOp::eq: return a == b;
    case CompareOp::ne: return a != b;
    case CompareOp::lt: return a < b;
    case CompareOp::le: return a <= b;
    case CompareOp::gt: return a > b;
    case CompareOp::ge: return a >= b;
  }
  return false;
}

inline bool predicate(const State& s, const Pred& p, Env& env) {
  const std::int64_t a = eval_term(s, p.args.at(0), env);
  switch (p.pred) {
    case Predicate::even: return arith::mod(a, 2) == 0;
    case Predicate::odd: return arith::mod(a, 2) != 0;
    case Predicate::div: {
      const std::int64_t b = eval_term(s, p.args.at(1), env);
      if (b == 0) throw FaultError(FaultKind::div_by_zero, "div(" + std::to_string(a) + ", 0)");
      return arith::mod(a, b) == 0;
    }
  }
  return false;
}

}  // namespace detail

/// Kleene evaluation: nullopt stands for "unknown" (prose or label reference).
inline std::optional<bool> eval_partial(const State& s, const Formula& f, Env& env) {
  using R = std::optional<bool>;
  return std::visit(
      [&](const auto& n) -> R {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, TrueF>) {
          return true;
        } else if constexpr (std::is_same_v<N, FalseF>) {
          return false;
        } else if constexpr (std::is_same_v<N, Compare>) {
          return detail::compare(n.op, eval_term(s, n.lhs, env), eval_term(s, n.rhs, env));
        } else if constexpr (std::is_same_v<N, Pred>) {
          return detail::predicate(s, n, env);
        } else if constexpr (std::is_same_v<N, Not>) {
          const R r = eval_partial(s, n.operand, env);
          return r ? R(!*r) : R();
        } else if constexpr (std::is_same_v<N, And>) {
          const R l = eval_partial(s, n.lhs, env);
          if (l == false) return false;
          const R r = eval_partial(s, n.rhs, env);
          if (r == false) return false;
          return l && r ? R(true) : R();
        } else if constexpr (std::is_same_v<N, Or>) {
          const R l = eval_partial(s, n.lhs, env);
          if (l == true) return true;
          const R r = eval_partial(s, n.rhs, env);
          if (r == true) return true;
          return l && r ? R(false) : R();
        } else if constexpr (std::is_same_v<N, Implies>) {
          const R l = eval_partial(s, n.lhs, env);
          if (l == false) return true;
          const R r = eval_partial(s, n.rhs, env);
          if (r == true) return true;
          return l && r ? R(false) : R();
        } else if constexpr (std::is_same_v<N, ForAll> || std::is_same_v<N, Exists>) {
          constexpr bool all = std::is_same_v<N, ForAll>;
          const std::int64_t lo = eval_term(s, n.lo, env);
          const std::int64_t hi = eval_term(s, n.hi, env);
          bool unknown = false;
          for (std::int64_t i = lo; i <= hi; ++i) {
            env.emplace_back(n.var, i);
            R r;
            try {
              r = eval_partial(s, n.body, env);
            } catch (...) {
              env.pop_back();
              throw;
            }
            env.pop_back();
            if (!r) {
              unknown = true;
            } else if (*r != all) {
              return !all;
            }
            if (i == std::numeric_limits<std::int64_t>::max()) break;
          }
          return unknown ? R() : R(all);
        } else {
          return R();
        }
      },
      f.node());
}

inline std::optional<bool> eval_partial(const State& s, const Formula& f) {
  Env env;
  return eval_partial(s, f, env);
}

/// Two-valued evaluation; throws NotEvaluable on prose or unresolved label references.
inline bool eval_formula(const State& s, const Formula& f, Env& env) {
  if (contains_opaque(f)) throw NotEvaluable("formula contains prose: " + print_formula(f));
  if (contains_label_ref(f)) throw NotEvaluable("formula refers to a label: " + print_formula(f));
  return *eval_partial(s, f, env);
}

inline bool eval_formula(const State& s, const Formula& f) {
  Env env;
  return eval_formula(s, f, env);
}

// ------------------------------------------------------------------ commands

enum class Signal { ok, blocked, hole, annotation_false };

struct ExecInfo {
  std::string hole_prose;
  std::optional<Formula> failed_claim;
};

namespace detail {

struct Location {
  const std::string* array = nullptr;  // null for scalars
  const std::string* name = nullptr;
  std::size_t index = 0;

  bool operator==(const Location& o) const {
    return *name == *o.name && index == o.index && (array == nullptr) == (o.array == nullptr);
  }
};

inline void exec_assign(State& s, const ParAssign& a) {
  if (a.targets.size() != a.sources.size()) {
    throw Error("assignment with " + std::to_string(a.targets.size()) + " targets and " +
                std::to_string(a.sources.size()) + " sources");
  }
  Env env;
  if (a.targets.size() == 1) {
    const std::int64_t v = eval_term(s, a.sources[0], env);
    if (const auto* var = a.targets[0].as<Var>()) {
      s.scalar_ref(var->name) = v;
    } else {
      const auto& ref = *a.targets[0].as<ArrayRef>();
      const std::int64_t i = eval_term(s, ref.index, env);
      auto arr = s.array_ref(ref.array);
      arr[checked_index(arr, ref.array, i)] = v;
    }
    return;
  }
  std::vector<std::int64_t> values;
  values.reserve(a.sources.size());
  for (const auto& src : a.sources) values.push_back(eval_term(s, src, env));
  std::vector<Location> locs;
  locs.reserve(a.targets.size());
  for (const auto& t : a.targets) {
    Location loc;
    if (const auto* var = t.as<Var>()) {
      if (!s.has_scalar(var->name)) throw FaultError(FaultKind::undefined_variable, var->name);
      loc.name = &var->name;
    } else {
      const auto& ref = *t.as<ArrayRef>();
      const std::int64_t i = eval_term(s, ref.index, env);
      loc.array = &ref.array;
      loc.name = &ref.array;
      loc.index = checked_index(s.array(ref.array), ref.array, i);
    }
    for (const auto& prev : locs) {
      if (prev == loc) {
        throw FaultError(FaultKind::write_conflict,
                         "location " + *loc.name +
                             (loc.array ? "[" + std::to_string(loc.index) + "]" : std::string()) +
                             " assigned twice");
      }
    }
    locs.push_back(loc);
  }
  for (std::size_t i = 0; i < locs.size(); ++i) {
    if (locs[i].array) {
      s.array_ref(*locs[i].array)[locs[i].index] = values[i];
    } else {
      s.scalar_ref(*locs[i].name) = values[i];
    }
  }
}

}  // namespace detail

/// Applies `c` to `s` in place. On `blocked`, `hole` or `annotation_false`
/// the state holds whatever was written before the signalling item.
inline Signal exec_command(State& s, const Command& c, bool check_annotations, ExecInfo& info) {
  return std::visit(
      [&](const auto& n) -> Signal {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, ParAssign>) {
          detail::exec_assign(s, n);
          return Signal::ok;
        } else if constexpr (std::is_same_v<N, Swap>) {
          std::int64_t& a = s.scalar_ref(n.a);
          std::int64_t& b = s.scalar_ref(n.b);
          std::swap(a, b);
          return Signal::ok;
        } else if constexpr (std::is_same_v<N, Guard>) {
          if (contains_opaque(n.condition) || contains_label_ref(n.condition)) {
            throw FaultError(FaultKind::opaque_guard, print_formula(n.condition));
          }
          return eval_partial(s, n.condition).value_or(false) ? Signal::ok : Signal::blocked;
        } else if constexpr (std::is_same_v<N, Hole>) {
          info.hole_prose = n.prose;
          return Signal::hole;
        } else if constexpr (std::is_same_v<N, Annot>) {
          if (!check_annotations) return Signal::ok;
          if (eval_partial(s, n.claim) == false) {
            info.failed_claim = n.claim;
            return Signal::annotation_false;
          }
          return Signal::ok;
        } else {
          for (const auto& item : n.items) {
            const Signal sig = exec_command(s, item, check_annotations, info);
            if (sig != Signal::ok) return sig;
          }
          return Signal::ok;
        }
      },
      c.node());
}

struct Blocked {
  bool operator==(const Blocked&) const = default;
};
struct HoleHit {
  std::string prose;
  bool operator==(const HoleHit&) const = default;
};
using ApplyResult = std::variant<State, Blocked, HoleHit>;

/// The command relation applied to one state. A false annotation (when checked)
/// blocks like a guard. Faults are raised as FaultError.
inline ApplyResult apply_command(const State& s, const Command& c, bool check_annotations = true) {
  State out = s;
  ExecInfo info;
  switch (exec_command(out, c, check_annotations, info)) {
    case Signal::ok: return out;
    case Signal::hole: return HoleHit{info.hole_prose};
    case Signal::blocked:
    case Signal::annotation_false: return Blocked{};
  }
  return Blocked{};
}

// ------------------------------------------------------------------ runs

enum class GuardPolicy { first_true, fail_on_overlap };
enum class TraceDetail { full, summary };

struct RunConfig {
  std::size_t fuel = 10'000'000;
  bool check_assertions = true;
  bool check_annotations = true;
  GuardPolicy guard_policy = GuardPolicy::first_true;
  std::optional<Term> variant;
  TraceDetail detail = TraceDetail::full;
  std::function<void(const std::string& label, const State&)> on_visit;
};

struct Halted {
  std::int64_t value;
  bool operator==(const Halted&) const = default;
};
struct Aborted {
  std::string label;
  bool operator==(const Aborted&) const = default;
};
struct AssertionViolation {
  std::string label;
  Formula formula;
  bool operator==(const AssertionViolation&) const = default;
};
struct HoleReached {
  std::string label;
  std::string prose;
  bool operator==(const HoleReached&) const = default;
};
struct Fault {
  FaultKind kind;
  std::string label;
  std::string detail;
  bool operator==(const Fault& o) const { return kind == o.kind && label == o.label; }
};
struct GuardOverlap {
  std::string label;
  std::vector<std::size_t> arms;  // 0-based indices of the true guards
  bool operator==(const GuardOverlap&) const = default;
};
using Outcome = std::variant<Halted, Aborted, AssertionViolation, HoleReached, Fault, GuardOverlap>;

inline std::string to_string(const Outcome& o) {
  return std::visit(
      [](const auto& n) -> std::string {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Halted>) {
          return "Halted(" + std::to_string(n.value) + ")";
        } else if constexpr (std::is_same_v<N, Aborted>) {
          return "Aborted(" + n.label + ")";
        } else if constexpr (std::is_same_v<N, AssertionViolation>) {
          return "AssertionViolation(" + n.label + ", " + print_formula(n.formula) + ")";
        } else if constexpr (std::is_same_v<N, HoleReached>) {
          return "HoleReached(" + n.label + ", \"" + n.prose + "\")";
        } else if constexpr (std::is_same_v<N, Fault>) {
          return "Fault(" + std::string(to_string(n.kind)) + ", " + n.label +
                 (n.detail.empty() ? "" : ", " + n.detail) + ")";
        } else {
          std::string arms;
          for (std::size_t i = 0; i < n.arms.size(); ++i) arms += (i ? "," : "") + std::to_string(n.arms[i] + 1);
          return "GuardOverlap(" + n.label + ", guards " + arms + ")";
        }
      },
      o);
}

struct Visit {
  std::string label;
  State state;
};

struct VariantVerdict {
  bool ok = true;
  std::optional<std::size_t> violation_index;  // index into the visit sequence
  std::string detail;
};

struct Trace {
  std::vector<Visit> visits;  // with TraceDetail::summary only the first visit
  Outcome result = Halted{0};
  std::size_t visit_count = 0;
  State final_state;
  std::vector<std::string> warnings;
  std::optional<VariantVerdict> variant;

  template <class T>
  bool ended_with() const {
    return std::holds_alternative<T>(result);
  }
};

/// Result of executing one block.
struct StepNext {
  std::string label;
  State state;
};
struct StepReturn {
  std::int64_t value;
  State state;
};
struct StepAbort {};
struct StepHole {
  std::string prose;
};
struct StepOverlap {
  std::vector<std::size_t> arms;
};
struct StepClaimFailed {
  Formula claim;
};
using StepResult = std::variant<StepNext, StepReturn, StepAbort, StepHole, StepOverlap, StepClaimFailed>;

namespace detail {

inline StepResult finish_arm(const Command& body, const Terminal& terminal, State state,
                             const RunConfig& cfg) {
  ExecInfo info;
  switch (exec_command(state, body, cfg.check_annotations, info)) {
    case Signal::ok: break;
    case Signal::hole: return StepHole{info.hole_prose};
    case Signal::annotation_false: return StepClaimFailed{*info.failed_claim};
    case Signal::blocked: return StepAbort{};
  }
  if (const auto* g = std::get_if<GotoLabel>(&terminal)) return StepNext{g->label, std::move(state)};
  if (const auto* r = std::get_if<ReturnValue>(&terminal)) {
    const std::int64_t v = eval_term(state, r->value);
    return StepReturn{v, std::move(state)};
  }
  return StepAbort{};
}

inline bool guard_true(const State& s, const Formula& g) {
  if (contains_opaque(g) || contains_label_ref(g)) {
    throw FaultError(FaultKind::opaque_guard, print_formula(g));
  }
  return eval_partial(s, g).value_or(false);
}

}  // namespace detail

/// Executes the block labelled `label` from `state`.
inline StepResult step(const Block& block, const State& state, const RunConfig& cfg) {
  return std::visit(
      [&](const auto& body) -> StepResult {
        using B = std::decay_t<decltype(body)>;
        if constexpr (std::is_same_v<B, IfFi>) {
          std::optional<std::size_t> chosen;
          std::vector<std::size_t> all_true;
          for (std::size_t i = 0; i < body.arms.size(); ++i) {
            if (detail::guard_true(state, body.arms[i].guard)) {
              if (!chosen) chosen = i;
              all_true.push_back(i);
              if (cfg.guard_policy == GuardPolicy::first_true) break;
            }
          }
          if (!chosen) return StepAbort{};
          if (all_true.size() > 1) return StepOverlap{all_true};
          const auto& gc = body.arms[*chosen];
          return detail::finish_arm(gc.body, gc.terminal, state, cfg);
        } else if constexpr (std::is_same_v<B, Straight>) {
          return detail::finish_arm(body.body, body.terminal, state, cfg);
        } else if constexpr (std::is_same_v<B, AbortBody>) {
          return StepAbort{};
        } else {
          return StepReturn{eval_term(state, body.value), state};
        }
      },
      block.body);
}

inline StepResult step(const Program& program, std::string_view label, const State& state,
                       const RunConfig& cfg = {}) {
  const Block* b = program.find_block(label);
  if (b == nullptr) throw std::invalid_argument("unknown label " + std::string(label));
  return step(*b, state, cfg);
}

/// Initial state: declarations, then `inputs`. Unknown input names are rejected.
inline State initial_state(const Program& program, const std::map<std::string, std::int64_t>& inputs) {
  State s = State::initial(program);
  for (const auto& [name, value] : inputs) {
    if (!s.has_scalar(name)) {
      throw std::invalid_argument(s.has_array(name) ? "'" + name + "' is an array, not a scalar input"
                                                    : "unknown variable '" + name + "'");
    }
    s.set_scalar(name, value);
  }
  return s;
}

namespace detail {

/// Per-label variant bookkeeping shared by run and check_variant.
class VariantTracker {
 public:
  explicit VariantTracker(Term variant) : variant_(std::move(variant)) {}

  /// Returns false once a violation has been recorded.
  bool observe(std::size_t index, const std::string& label, const State& s) {
    if (!verdict_.ok) return false;
    std::int64_t v;
    try {
      v = eval_term(s, variant_);
    } catch (const FaultError& e) {
      return fail(index, "variant cannot be evaluated at " + label + ": " + e.what());
    }
    if (v < 0) return fail(index, "variant is " + std::to_string(v) + " < 0 at " + label);
    auto [it, fresh] = last_.try_emplace(label, v);
    if (!fresh) {
      if (v >= it->second) {
        return fail(index, "variant did not decrease around " + label + ": " +
                               std::to_string(it->second) + " then " + std::to_string(v));
      }
      it->second = v;
    }
    return true;
  }

  const VariantVerdict& verdict() const { return verdict_; }

 private:
  bool fail(std::size_t index, std::string detail) {
    verdict_.ok = false;
    verdict_.violation_index = index;
    verdict_.detail = std::move(detail);
    return false;
  }

  Term variant_;
  std::unordered_map<std::string, std::int64_t> last_;
  VariantVerdict verdict_;
};

}  // namespace detail

/// Runs `program` from its start label. Outcomes (including faults) are
/// reported in the Trace; only invalid inputs raise.
inline Trace run(const Program& program, const std::map<std::string, std::int64_t>& inputs,
                 const RunConfig& cfg = {}) {
  Trace trace;
  State state = initial_state(program, inputs);

  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < program.blocks.size(); ++i) index.emplace(program.blocks[i].label, i);
  std::vector<std::optional<Formula>> resolved(program.blocks.size());
  std::vector<bool> warned(program.blocks.size(), false);
  auto assertion_of = [&](std::size_t i) -> const Formula& {
    if (!resolved[i]) resolved[i] = resolve_assertion(program, program.blocks[i].label);
    return *resolved[i];
  };
  // Checks the assertion of block i; returns false on a definite violation.
  auto holds = [&](std::size_t i, const State& s) {
    const Formula& f = assertion_of(i);
    const std::optional<bool> r = eval_partial(s, f);
    if (!r && !warned[i]) {
      warned[i] = true;
      trace.warnings.push_back("assertion of " + program.blocks[i].label +
                               " contains prose; checked only in its formal parts");
    }
    return r != false;
  };

  std::optional<detail::VariantTracker> tracker;
  if (cfg.variant) tracker.emplace(*cfg.variant);

  std::size_t current = index.at(program.start);
  for (;;) {
    const std::string& label = program.blocks[current].label;
    if (trace.visit_count >= cfg.fuel) {
      trace.result = Fault{FaultKind::fuel_exhausted, label, std::to_string(cfg.fuel) + " visits"};
      break;
    }
    if (cfg.detail == TraceDetail::full || trace.visits.empty()) trace.visits.push_back({label, state});
    const std::size_t visit_index = trace.visit_count++;
    if (cfg.on_visit) cfg.on_visit(label, state);
    try {
      if (tracker) tracker->observe(visit_index, label, state);
      if (cfg.check_assertions && !holds(current, state)) {
        trace.result = AssertionViolation{label, assertion_of(current)};
        break;
      }
      StepResult r = step(program.blocks[current], state, cfg);
      if (auto* next = std::get_if<StepNext>(&r)) {
        state = std::move(next->state);
        current = index.at(next->label);
        continue;
      }
      if (auto* ret = std::get_if<StepReturn>(&r)) {
        state = std::move(ret->state);
        const auto halt = index.find(program.halt);
        if (cfg.check_assertions && halt != index.end() && halt->second != current &&
            !holds(halt->second, state)) {
          trace.result = AssertionViolation{program.halt, assertion_of(halt->second)};
        } else {
          trace.result = Halted{ret->value};
        }
      } else if (std::holds_alternative<StepAbort>(r)) {
        trace.result = Aborted{label};
      } else if (auto* hole = std::get_if<StepHole>(&r)) {
        trace.result = HoleReached{label, hole->prose};
      } else if (auto* overlap = std::get_if<StepOverlap>(&r)) {
        trace.result = GuardOverlap{label, overlap->arms};
      } else if (auto* claim = std::get_if<StepClaimFailed>(&r)) {
        trace.result = AssertionViolation{label, claim->claim};
      }
      break;
    } catch (const FaultError& e) {
      trace.result = Fault{e.kind(), label, e.detail()};
      break;
    } catch (const ResolveError& e) {
      trace.result = Fault{FaultKind::undefined_variable, label, e.what()};
      break;
    }
  }
  trace.final_state = std::move(state);
  if (tracker) trace.variant = tracker->verdict();
  return trace;
}

/// Checks `variant` over a recorded trace: nonnegative at every visit and
/// strictly smaller at each revisit of a label than at that label's previous visit.
inline VariantVerdict check_variant(const Trace& trace, const Term& variant) {
  detail::VariantTracker tracker(variant);
  for (std::size_t i = 0; i < trace.visits.size(); ++i) {
    if (!tracker.observe(i, trace.visits[i].label, trace.visits[i].state)) break;
  }
  return tracker.verdict();
}

inline VariantVerdict check_variant(const Program&, const Trace& trace, const Term& variant) {
  return check_variant(trace, variant);
}

inline std::string to_string(const VariantVerdict& v) {
  if (v.ok) return "VARIANT Ok";
  return "VARIANT ViolationAt(" + std::to_string(v.violation_index.value_or(0)) + ") " + v.detail;
}

/// One line per visit, `label<TAB>vars`, then `RESULT <outcome>`.
inline std::string trace_text(const Trace& trace) {
  std::string out;
  for (const auto& v : trace.visits) out += v.label + "\t" + v.state.to_string() + "\n";
  out += "RESULT " + to_string(trace.result) + "\n";
  return out;
}

}  // namespace liffig
