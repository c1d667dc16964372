#pragma once

// Verification conditions: extraction from programs, brute-force checking over
// a finite window of states, the VC list text format, and the way back from
// VC lists to programs (synthesis and snippet merging).

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "liffig/ast.hpp"
#include "liffig/errors.hpp"
#include "liffig/interpreter.hpp"
#include "liffig/parser.hpp"
#include "liffig/printer.hpp"
#include "liffig/resolve.hpp"
#include "liffig/state.hpp"

namespace liffig {

struct VerificationCondition {
  std::string pre_label;
  Formula pre;  // resolved
  Command command;
  std::string post_label;  // "?" when the command ends in an open hole
  Formula post;            // resolved
  bool incomplete = false;  // command contains a hole

  bool operator==(const VerificationCondition&) const = default;
};

inline constexpr std::string_view kOpenLabel = "?";

/// `{Pre} command {Post}`. A leading `true` guard is left out unless it is the whole command.
inline std::string command_text(const Command& c) {
  std::vector<Command> items = flatten(c);
  if (items.size() > 1) {
    if (const auto* g = items.front().as<Guard>(); g && g->condition.is<TrueF>()) {
      items.erase(items.begin());
    }
  }
  return print_command(Command(Seq{std::move(items)}));
}

inline std::string to_string(const VerificationCondition& vc) {
  const std::string cmd = command_text(vc.command);
  return "{" + vc.pre_label + "} " + cmd + (cmd.empty() ? "" : " ") + "{" + vc.post_label + "}";
}

// ------------------------------------------------------------------ extraction

namespace detail {

inline Command guarded(const Formula& guard, const Command& body) {
  std::vector<Command> items{Command(Guard{guard}, guard.span())};
  for (const auto& c : flatten(body)) items.push_back(c);
  return Command(Seq{std::move(items)});
}

}  // namespace detail

/// One condition per guarded command (and per straight-line block), in block
/// order, then arm order.
inline std::vector<VerificationCondition> extract_vcs(const Program& program) {
  std::vector<VerificationCondition> out;
  auto post_of = [&](const Terminal& t) -> std::pair<std::string, Formula> {
    if (const auto* g = std::get_if<GotoLabel>(&t)) return {g->label, resolve_assertion(program, g->label)};
    if (std::holds_alternative<ReturnValue>(t)) return {program.halt, resolve_assertion(program, program.halt)};
    return {std::string(kOpenLabel), Formula(FalseF{})};
  };
  for (const auto& b : program.blocks) {
    const Formula pre = resolve_assertion(program, b.label);
    auto add = [&](const Command& cmd, const Terminal& t) {
      auto [label, post] = post_of(t);
      out.push_back({b.label, pre, cmd, label, post, contains_hole(cmd)});
    };
    if (const auto* ifs = std::get_if<IfFi>(&b.body)) {
      for (const auto& gc : ifs->arms) add(detail::guarded(gc.guard, gc.body), gc.terminal);
    } else if (const auto* s = std::get_if<Straight>(&b.body)) {
      add(s->body, s->terminal);
    }
  }
  return out;
}

// ------------------------------------------------------------------ checking

struct Range {
  std::int64_t lo = 1;
  std::int64_t hi = 12;

  std::uint64_t size() const { return hi < lo ? 0 : static_cast<std::uint64_t>(hi - lo) + 1; }
  bool operator==(const Range&) const = default;
};

struct DomainWindow {
  Range scalars{1, 12};
  std::map<std::string, Range> per_variable;
  Range array_elements{1, 12};
  std::size_t array_length_cap = 4;
  std::map<std::string, std::size_t> array_lengths;
  std::uint64_t state_cap = 10'000'000;
  unsigned workers = 1;

  Range range_of(const std::string& name) const {
    auto it = per_variable.find(name);
    return it == per_variable.end() ? scalars : it->second;
  }
  std::size_t length_of(const std::string& name) const {
    auto it = array_lengths.find(name);
    return it == array_lengths.end() ? array_length_cap : std::min(it->second, array_length_cap);
  }
};

struct Valid {
  std::uint64_t states_checked = 0;
  std::uint64_t faults = 0;  // states skipped because evaluation faulted
};
struct CounterExample {
  State state;
  std::optional<State> post_state;
  std::string note;
};
enum class NotCheckableReason { opaque, hole, too_large };
struct NotCheckable {
  NotCheckableReason reason;
  std::string detail;
};
using VcVerdict = std::variant<Valid, CounterExample, NotCheckable>;

inline std::string_view to_string(NotCheckableReason r) {
  switch (r) {
    case NotCheckableReason::opaque: return "opaque";
    case NotCheckableReason::hole: return "hole";
    case NotCheckableReason::too_large: return "too_large";
  }
  return "?";
}

class StateSpaceTooLarge : public Error {
 public:
  StateSpaceTooLarge(std::uint64_t needed, std::uint64_t cap)
      : Error("state space too large: " + (needed == 0 ? std::string("more than 2^64") : std::to_string(needed)) +
              " states exceed the cap of " + std::to_string(cap)),
        needed_(needed) {}
  std::uint64_t needed() const noexcept { return needed_; }

 private:
  std::uint64_t needed_;  // 0 when it does not fit in 64 bits
};

namespace detail {

/// Mixed-radix enumeration of the states over a VC's free variables. The first
/// scalar (in name order) is the most significant digit; arrays follow scalars.
class StateSpace {
 public:
  StateSpace(const VarSet& vars, const DomainWindow& w) {
    for (const auto& name : vars.scalars) {
      const Range r = w.range_of(name);
      digits_.push_back({name, false, 0, r});
      base_.set_scalar(name, r.lo);
    }
    for (const auto& name : vars.arrays) {
      const std::size_t len = w.length_of(name);
      base_.add_array(name, len, w.array_elements.lo);
      for (std::size_t i = 0; i < len; ++i) digits_.push_back({name, true, i, w.array_elements});
    }
    total_ = 1;
    for (const auto& d : digits_) {
      if (d.range.size() == 0) {
        total_ = 0;
        break;
      }
      if (__builtin_mul_overflow(total_, d.range.size(), &total_)) {
        overflow_ = true;
        break;
      }
    }
  }

  std::uint64_t size() const { return total_; }
  bool overflowed() const { return overflow_; }

  State at(std::uint64_t index) const {
    State s = base_;
    for (std::size_t k = digits_.size(); k-- > 0;) {
      const auto& d = digits_[k];
      const std::uint64_t n = d.range.size();
      const std::int64_t v = d.range.lo + static_cast<std::int64_t>(index % n);
      index /= n;
      if (d.array) {
        s.array_ref(d.name)[d.index] = v;
      } else {
        s.scalar_ref(d.name) = v;
      }
    }
    return s;
  }

 private:
  struct Digit {
    std::string name;
    bool array;
    std::size_t index;
    Range range;
  };
  std::vector<Digit> digits_;
  State base_;
  std::uint64_t total_ = 1;
  bool overflow_ = false;
};

struct ScanResult {
  std::optional<std::uint64_t> witness;
  CounterExample example;
  std::uint64_t checked = 0;
  std::uint64_t faults = 0;
};

/// Classifies one state. Returns a counterexample when `s` satisfies pre and
/// the command reaches a state violating post (or a false inline claim).
inline std::optional<CounterExample> examine(const VerificationCondition& vc, const State& s,
                                             std::uint64_t& faults) {
  try {
    if (eval_partial(s, vc.pre) != true) return std::nullopt;
    State t = s;
    ExecInfo info;
    switch (exec_command(t, vc.command, true, info)) {
      case Signal::blocked:
      case Signal::hole: return std::nullopt;
      case Signal::annotation_false:
        return CounterExample{s, t, "inline claim {" + print_formula(*info.failed_claim) + "} is false"};
      case Signal::ok: break;
    }
    if (eval_partial(t, vc.post) == false) return CounterExample{s, t, "post-state violates " + vc.post_label};
  } catch (const FaultError&) {
    ++faults;
  }
  return std::nullopt;
}

inline void scan(const VerificationCondition& vc, const StateSpace& space, std::uint64_t begin,
                 std::uint64_t end, std::atomic<std::uint64_t>& best, ScanResult& out) {
  for (std::uint64_t i = begin; i < end; ++i) {
    if (i > best.load(std::memory_order_relaxed)) return;
    ++out.checked;
    if (auto ce = examine(vc, space.at(i), out.faults)) {
      out.witness = i;
      out.example = std::move(*ce);
      std::uint64_t cur = best.load();
      while (i < cur && !best.compare_exchange_weak(cur, i)) {
      }
      return;
    }
  }
}

}  // namespace detail

/// Variables a VC ranges over: free variables of pre, command and post.
inline VarSet vc_free_vars(const VerificationCondition& vc) {
  VarSet vs = free_vars(vc.pre);
  vs.merge(free_vars(vc.command));
  vs.merge(free_vars(vc.post));
  return vs;
}

/// Number of states check_vc would enumerate; 0 if it overflows 64 bits.
inline std::uint64_t state_count(const VerificationCondition& vc, const DomainWindow& window) {
  detail::StateSpace space(vc_free_vars(vc), window);
  return space.overflowed() ? 0 : space.size();
}

/// Window-relative validity of `vc`: every state of the window satisfying pre
/// leads only to states satisfying post. Throws StateSpaceTooLarge.
/// The reported counterexample is the first one in enumeration order,
/// whatever the number of workers.
inline VcVerdict check_vc(const VerificationCondition& vc, const DomainWindow& window) {
  if (vc.incomplete || contains_hole(vc.command)) {
    return NotCheckable{NotCheckableReason::hole, "command contains a hole"};
  }
  if (contains_opaque(vc.pre) || contains_opaque(vc.post) || contains_label_ref(vc.pre) ||
      contains_label_ref(vc.post)) {
    return NotCheckable{NotCheckableReason::opaque, "assertion is prose"};
  }
  for (const auto& item : flatten(vc.command)) {
    if (const auto* g = item.as<Guard>(); g && contains_opaque(g->condition)) {
      return NotCheckable{NotCheckableReason::opaque, "guard is prose"};
    }
  }
  const detail::StateSpace space(vc_free_vars(vc), window);
  if (space.overflowed() || space.size() > window.state_cap) {
    throw StateSpaceTooLarge(space.overflowed() ? 0 : space.size(), window.state_cap);
  }
  const std::uint64_t n = space.size();
  const unsigned workers = std::max(1u, std::min<unsigned>(window.workers, static_cast<unsigned>(std::min<std::uint64_t>(n, 64))));
  std::atomic<std::uint64_t> best{std::numeric_limits<std::uint64_t>::max()};
  std::vector<detail::ScanResult> parts(workers);
  if (workers == 1) {
    detail::scan(vc, space, 0, n, best, parts[0]);
  } else {
    std::vector<std::thread> threads;
    for (unsigned k = 0; k < workers; ++k) {
      const std::uint64_t begin = n / workers * k + std::min<std::uint64_t>(k, n % workers);
      const std::uint64_t end = begin + n / workers + (k < n % workers ? 1 : 0);
      threads.emplace_back([&, k, begin, end] { detail::scan(vc, space, begin, end, best, parts[k]); });
    }
    for (auto& t : threads) t.join();
  }
  const detail::ScanResult* found = nullptr;
  Valid valid;
  for (const auto& p : parts) {
    valid.states_checked += p.checked;
    valid.faults += p.faults;
    if (p.witness && (!found || *p.witness < *found->witness)) found = &p;
  }
  if (found) return found->example;
  return valid;
}

inline std::string verdict_text(const VcVerdict& v) {
  if (std::holds_alternative<Valid>(v)) return "VALID";
  if (const auto* ce = std::get_if<CounterExample>(&v)) return "COUNTEREXAMPLE " + ce->state.to_string();
  return "NOTCHECKABLE " + std::string(to_string(std::get<NotCheckable>(v).reason));
}

struct CheckedVc {
  VerificationCondition vc;
  VcVerdict verdict;
};

struct ProgramReport {
  std::vector<CheckedVc> entries;

  std::size_t count_valid() const { return count<Valid>(); }
  std::size_t count_counterexamples() const { return count<CounterExample>(); }
  std::size_t count_not_checkable() const { return count<NotCheckable>(); }

  std::string summary() const {
    return std::to_string(count_valid()) + " VALID, " + std::to_string(count_counterexamples()) +
           " COUNTEREXAMPLE, " + std::to_string(count_not_checkable()) + " NOTCHECKABLE";
  }

  /// One line per condition, then the summary line.
  std::string text() const {
    std::string out;
    for (const auto& e : entries) {
      out += verdict_text(e.verdict) + "  " + to_string(e.vc);
      if (const auto* v = std::get_if<Valid>(&e.verdict); v && v->faults > 0) {
        out += "  (" + std::to_string(v->faults) + " faulting states skipped)";
      }
      out += "\n";
    }
    return out + summary() + "\n";
  }

 private:
  template <class T>
  std::size_t count() const {
    return static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(), [](const CheckedVc& e) {
      return std::holds_alternative<T>(e.verdict);
    }));
  }
};

inline ProgramReport check_vcs(const std::vector<VerificationCondition>& vcs, const DomainWindow& window) {
  ProgramReport report;
  for (const auto& vc : vcs) {
    VcVerdict verdict;
    try {
      verdict = check_vc(vc, window);
    } catch (const StateSpaceTooLarge& e) {
      verdict = NotCheckable{NotCheckableReason::too_large, e.what()};
    }
    report.entries.push_back({vc, std::move(verdict)});
  }
  return report;
}

inline ProgramReport check_program(const Program& program, const DomainWindow& window) {
  DomainWindow w = window;
  for (const auto& d : program.decls) {
    if (d.is_array()) w.array_lengths.try_emplace(d.name, *d.array_size);
  }
  return check_vcs(extract_vcs(program), w);
}

// ------------------------------------------------------------------ VC list files

struct VcEntry {
  std::string pre_label;
  Command command;
  std::string post_label;

  bool operator==(const VcEntry&) const = default;
};

/// Text form of a VC list: assertions by label plus `{Pre} command {Post}` lines.
struct VcList {
  std::string start;
  std::string halt;
  std::optional<Term> return_term;
  std::vector<Decl> decls;
  std::vector<std::pair<std::string, Formula>> assertions;  // unresolved, in order
  std::vector<VcEntry> conditions;

  const Formula* assertion(std::string_view label) const {
    for (const auto& [l, f] : assertions) {
      if (l == label) return &f;
    }
    return nullptr;
  }

  bool operator==(const VcList&) const = default;
};

class VcFormatError : public Error {
 public:
  VcFormatError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// The VC list of a program: every block's assertion as written, and its conditions.
inline VcList to_vc_list(const Program& program) {
  VcList list;
  list.start = program.start;
  list.halt = program.halt;
  if (const Block* h = program.find_block(program.halt)) {
    if (const auto* r = std::get_if<ReturnBody>(&h->body)) {
      list.return_term = r->value;
    } else if (const auto* t = terminal_of(*h)) {
      if (const auto* rv = std::get_if<ReturnValue>(t)) list.return_term = rv->value;
    }
  }
  for (const auto& d : program.decls) {
    if (!d.implicit) list.decls.push_back(d);
  }
  for (const auto& b : program.blocks) list.assertions.emplace_back(b.label, b.assertion);
  for (const auto& vc : extract_vcs(program)) list.conditions.push_back({vc.pre_label, vc.command, vc.post_label});
  return list;
}

inline std::string format_vc_list(const VcList& list) {
  std::string out;
  out += "start: " + list.start + "\n";
  out += "halt: " + list.halt + "\n";
  if (list.return_term) out += "return: " + print_term(*list.return_term) + "\n";
  if (!list.decls.empty()) {
    out += "declarations:\n";
    for (const auto& d : list.decls) out += "  " + print_decl(d) + "\n";
  }
  out += "assertions:\n";
  for (const auto& [label, f] : list.assertions) {
    out += label + ": " + detail::indent_continuations(print_formula(f), "   ") + "\n";
  }
  out += "conditions:\n";
  for (const auto& c : list.conditions) {
    const std::string cmd = command_text(c.command);
    out += "{" + c.pre_label + "} " + cmd + (cmd.empty() ? "" : " ") + "{" + c.post_label + "}\n";
  }
  return out;
}

inline VcList parse_vc_list(std::string_view text) {
  enum class Section { header, declarations, assertions, conditions };
  static const std::regex header_re(R"(^(start|halt|return)\s*:\s*(.*)$)");
  static const std::regex label_re(R"(^([A-Za-z][A-Za-z0-9_]*)\s*:(?!=)(.*)$)");
  static const std::regex cond_re(R"(^\{\s*([A-Za-z][A-Za-z0-9_]*)\s*\}(.*)\{\s*([A-Za-z][A-Za-z0-9_]*|\?)\s*\}\s*$)");

  VcList list;
  Section section = Section::header;
  std::string decl_text;
  std::vector<std::pair<std::string, std::vector<std::string>>> raw;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (t == "declarations:") {
      section = Section::declarations;
      continue;
    }
    if (t == "assertions:") {
      section = Section::assertions;
      continue;
    }
    if (t == "conditions:") {
      section = Section::conditions;
      continue;
    }
    std::smatch m;
    switch (section) {
      case Section::header:
        if (!std::regex_match(t, m, header_re)) throw VcFormatError(line_no, "expected start:, halt:, return: or a section name");
        if (m[1] == "start") {
          list.start = trim(m[2].str());
        } else if (m[1] == "halt") {
          list.halt = trim(m[2].str());
        } else {
          try {
            list.return_term = parse_term(m[2].str());
          } catch (const SyntaxError& e) {
            throw VcFormatError(line_no, std::string("bad return term: ") + e.what());
          }
        }
        break;
      case Section::declarations:
        decl_text += line + "\n";
        break;
      case Section::assertions:
        if (line.front() != ' ' && line.front() != '\t' && std::regex_match(line, m, label_re)) {
          raw.push_back({m[1].str(), {trim(m[2].str())}});
        } else if (raw.empty()) {
          throw VcFormatError(line_no, "expected 'Label: assertion'");
        } else {
          raw.back().second.push_back(t);
        }
        break;
      case Section::conditions: {
        if (!std::regex_match(t, m, cond_re)) throw VcFormatError(line_no, "expected '{Pre} command {Post}'");
        Command cmd(Seq{});
        try {
          cmd = parse_command(m[2].str());
        } catch (const SyntaxError& e) {
          throw VcFormatError(line_no, std::string("bad command: ") + e.what());
        }
        list.conditions.push_back({m[1].str(), cmd, m[3].str()});
        break;
      }
    }
  }
  if (!decl_text.empty()) {
    try {
      list.decls = parse_declarations(decl_text);
    } catch (const SyntaxError& e) {
      throw VcFormatError(line_no, std::string("bad declaration: ") + e.what());
    }
  }
  for (const auto& [label, lines] : raw) {
    std::string joined;
    for (const auto& l : lines) {
      if (l.empty()) continue;
      if (!joined.empty()) joined += '\n';
      joined += l;
    }
    list.assertions.emplace_back(label, joined.empty() ? Formula(TrueF{}) : formula_or_opaque(joined));
  }
  if (list.start.empty() && !list.assertions.empty()) list.start = list.assertions.front().first;
  return list;
}

/// Conditions of a list with assertions resolved through the list's own labels.
inline std::vector<VerificationCondition> vcs_of(const VcList& list) {
  AssertionLookup lookup = [&list](std::string_view label) { return list.assertion(label); };
  std::vector<VerificationCondition> out;
  for (const auto& c : list.conditions) {
    const Formula* pre = list.assertion(c.pre_label);
    if (pre == nullptr) throw Error("no assertion for label " + c.pre_label);
    Formula post(FalseF{});
    if (c.post_label != kOpenLabel) {
      const Formula* p = list.assertion(c.post_label);
      if (p == nullptr) throw Error("no assertion for label " + c.post_label);
      post = resolve_formula(*p, lookup, c.post_label);
    }
    out.push_back({c.pre_label, resolve_formula(*pre, lookup, c.pre_label), c.command, c.post_label, post,
                   contains_hole(c.command)});
  }
  return out;
}

// ------------------------------------------------------------------ synthesis

class SynthError : public Error {
 public:
  enum class Kind { missing_assertion, inconsistent_grouping, halt_has_conditions, invalid_program };

  SynthError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Guard-prefix form: a command that does not start with a guard gets `true` prepended.
inline std::vector<Command> normalize_command(const Command& c) {
  std::vector<Command> items = flatten(c);
  if (items.empty() || !items.front().is<Guard>()) items.insert(items.begin(), Command(Guard{Formula(TrueF{})}));
  return items;
}

inline bool same_condition(const VcEntry& a, const VcEntry& b) {
  return a.pre_label == b.pre_label && a.post_label == b.post_label &&
         normalize_command(a.command) == normalize_command(b.command);
}

inline std::string join_errors(const std::vector<Diagnostic>& diags) {
  std::string out;
  for (const auto& d : diags) {
    if (!d.is_error()) continue;
    if (!out.empty()) out += "; ";
    out += d.message;
  }
  return out;
}

/// Builds a program from a VC list: one if...fi block per precondition label,
/// abort blocks for labels without conditions, and a returning halt block.
inline Program vcs_to_liffig(const VcList& list) {
  const std::string halt = list.halt.empty() ? std::string("H") : list.halt;
  auto need = [&](const std::string& label) {
    if (label != kOpenLabel && list.assertion(label) == nullptr) {
      throw SynthError(SynthError::Kind::missing_assertion, "no assertion for label " + label);
    }
  };
  std::map<std::string, std::vector<GuardedCommand>> arms;
  std::set<std::string> closed;
  std::string previous;
  for (const auto& c : list.conditions) {
    need(c.pre_label);
    need(c.post_label);
    if (c.pre_label == halt) {
      throw SynthError(SynthError::Kind::halt_has_conditions, "halt label " + halt + " has outgoing conditions");
    }
    if (c.pre_label != previous) {
      if (closed.contains(c.pre_label)) {
        throw SynthError(SynthError::Kind::inconsistent_grouping,
                         "conditions with precondition " + c.pre_label + " are not next to each other");
      }
      if (!previous.empty()) closed.insert(previous);
      previous = c.pre_label;
    }
    std::vector<Command> items = normalize_command(c.command);
    Formula guard = items.front().as<Guard>()->condition;
    items.erase(items.begin());
    Terminal terminal = c.post_label == kOpenLabel ? Terminal(OpenEnd{}) : Terminal(GotoLabel{c.post_label});
    arms[c.pre_label].push_back({guard, Command(Seq{std::move(items)}), terminal, {}});
  }
  need(halt);

  Program program;
  program.decls = list.decls;
  for (const auto& [label, f] : list.assertions) {
    Block b{label, f, AbortBody{}, {}};
    if (label == halt) {
      b.body = ReturnBody{list.return_term.value_or(Term(IntLit{0}))};
    } else if (auto it = arms.find(label); it != arms.end()) {
      b.body = IfFi{it->second};
    }
    program.blocks.push_back(std::move(b));
  }
  program.start = list.start.empty() ? program.blocks.front().label : list.start;
  program.halt = halt;
  const auto diags = validate_program(program);
  if (const std::string errs = join_errors(diags); !errs.empty()) {
    throw SynthError(SynthError::Kind::invalid_program, errs);
  }
  return program;
}

/// Convenience overload taking the pieces separately.
inline Program vcs_to_liffig(const std::vector<VcEntry>& conditions,
                             const std::vector<std::pair<std::string, Formula>>& assertions,
                             const std::string& start, const std::string& halt, std::optional<Term> return_term) {
  VcList list;
  list.conditions = conditions;
  list.assertions = assertions;
  list.start = start;
  list.halt = halt;
  list.return_term = std::move(return_term);
  return vcs_to_liffig(list);
}

// ------------------------------------------------------------------ snippets

class MergeError : public Error {
 public:
  enum class Kind { assertion_mismatch, unknown_target, unknown_label, not_extensible };

  MergeError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Grows `program`: new blocks are added (or replace abort blocks with the same
/// assertion) and guarded commands are appended to existing blocks.
inline Program merge_snippet(const Program& program, const std::vector<Block>& new_blocks,
                             const std::map<std::string, std::vector<GuardedCommand>>& new_arms) {
  Program out = program;
  auto find = [&](const std::string& label) -> Block* {
    for (auto& b : out.blocks) {
      if (b.label == label) return &b;
    }
    return nullptr;
  };
  for (const auto& nb : new_blocks) {
    if (Block* existing = find(nb.label)) {
      if (!(existing->assertion == nb.assertion)) {
        throw MergeError(MergeError::Kind::assertion_mismatch,
                         "block " + nb.label + " exists with assertion '" + print_formula(existing->assertion) +
                             "', snippet has '" + print_formula(nb.assertion) + "'");
      }
      if (!std::holds_alternative<AbortBody>(existing->body)) {
        throw MergeError(MergeError::Kind::not_extensible, "block " + nb.label + " exists and is not abort");
      }
      existing->body = nb.body;
    } else {
      auto pos = std::find_if(out.blocks.begin(), out.blocks.end(),
                              [&](const Block& b) { return b.label == out.halt; });
      out.blocks.insert(pos, nb);
    }
  }
  for (const auto& [label, gcs] : new_arms) {
    if (gcs.empty()) continue;
    Block* b = find(label);
    if (b == nullptr) throw MergeError(MergeError::Kind::unknown_label, "no block labelled " + label);
    if (std::holds_alternative<AbortBody>(b->body)) {
      b->body = IfFi{gcs};
    } else if (auto* ifs = std::get_if<IfFi>(&b->body)) {
      ifs->arms.insert(ifs->arms.end(), gcs.begin(), gcs.end());
    } else {
      throw MergeError(MergeError::Kind::not_extensible, "block " + label + " has no if...fi to extend");
    }
  }
  std::set<std::string> labels;
  for (const auto& b : out.blocks) labels.insert(b.label);
  auto check_target = [&](const Terminal& t, const std::string& from) {
    if (const auto* g = std::get_if<GotoLabel>(&t); g && !labels.contains(g->label)) {
      throw MergeError(MergeError::Kind::unknown_target, "goto " + g->label + " in block " + from + " has no target");
    }
  };
  for (const auto& b : out.blocks) {
    if (const auto* ifs = std::get_if<IfFi>(&b.body)) {
      for (const auto& gc : ifs->arms) check_target(gc.terminal, b.label);
    } else if (const auto* s = std::get_if<Straight>(&b.body)) {
      check_target(s->terminal, b.label);
    }
  }
  // Implicit declarations are recomputed for the grown program.
  std::erase_if(out.decls, [](const Decl& d) { return d.implicit; });
  const auto diags = validate_program(out);
  if (const std::string errs = join_errors(diags); !errs.empty()) {
    throw MergeError(MergeError::Kind::unknown_target, errs);
  }
  return out;
}

}  // namespace liffig
