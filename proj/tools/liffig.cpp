// liffig: command-line front end.
//
// Exit codes: 0 success, 1 usage or parse error, 2 abort, assertion violation,
// counterexample, guard overlap or variant violation, 3 fault.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "liffig.hpp"

namespace {

using namespace liffig;

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kFailed = 2;
constexpr int kFault = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + out_path);
  out << text;
}

bool is_vc_file(const std::string& path) { return path.size() > 3 && path.ends_with(".vc"); }

/// Parses or prints the diagnostics and throws.
Program load_program(const std::string& path) {
  const std::string source = slurp(path);
  ParseResult r = parse_program(source);
  for (const auto& d : r.diagnostics) {
    if (d.is_error()) std::cerr << format_diagnostic(d, path) << "\n";
  }
  if (!r.ok()) throw UsageError(std::to_string(r.error_count()) + " error(s) in " + path);
  return std::move(*r.program);
}

VcList load_vc_list(const std::string& path) {
  try {
    return parse_vc_list(slurp(path));
  } catch (const VcFormatError& e) {
    throw UsageError(path + ":" + e.what());
  }
}

Range parse_range(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) throw UsageError("window must look like lo..hi, got " + text);
  try {
    return {std::stoll(text.substr(0, dots)), std::stoll(text.substr(dots + 2))};
  } catch (const std::exception&) {
    throw UsageError("window must look like lo..hi, got " + text);
  }
}

std::map<std::string, std::int64_t> parse_bindings(const std::vector<std::string>& items) {
  std::map<std::string, std::int64_t> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("expected var=value, got " + item);
    try {
      std::size_t used = 0;
      const std::string value = item.substr(eq + 1);
      out[item.substr(0, eq)] = std::stoll(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::exception&) {
      throw UsageError("expected an integer in " + item);
    }
  }
  return out;
}

int outcome_code(const Outcome& o) {
  if (std::holds_alternative<Halted>(o)) return kOk;
  if (std::holds_alternative<Fault>(o)) return kFault;
  return kFailed;
}

// ------------------------------------------------------------------ commands

int cmd_check(const std::string& path) {
  const ParseResult r = parse_program(slurp(path));
  for (const auto& d : r.diagnostics) std::cout << format_diagnostic(d, path) << "\n";
  std::cout << r.error_count() << " error(s), " << r.warning_count() << " warning(s)\n";
  return r.ok() ? kOk : kUsage;
}

struct RunOptions {
  std::vector<std::string> set;
  std::size_t fuel = 10'000'000;
  std::string variant;
  std::string trace_out;
  bool bind_ghosts = false;
  std::string policy = "first_true";
  bool no_assertions = false;
};

int cmd_run(const std::string& path, const RunOptions& o) {
  const Program program = load_program(path);
  auto inputs = parse_bindings(o.set);
  if (o.bind_ghosts) {
    for (const auto& [name, value] : std::map(inputs)) {
      const Decl* ghost = program.find_decl(name + "0");
      if (ghost != nullptr && !ghost->is_array()) inputs.try_emplace(name + "0", value);
    }
  }
  RunConfig cfg;
  cfg.fuel = o.fuel;
  cfg.check_assertions = !o.no_assertions;
  if (o.policy == "fail_on_overlap") {
    cfg.guard_policy = GuardPolicy::fail_on_overlap;
  } else if (o.policy != "first_true") {
    throw UsageError("unknown guard policy " + o.policy);
  }
  if (!o.variant.empty()) {
    try {
      cfg.variant = parse_term(o.variant);
    } catch (const SyntaxError& e) {
      throw UsageError(std::string("bad variant: ") + e.what());
    }
  }
  if (o.trace_out.empty()) cfg.detail = TraceDetail::summary;

  Trace trace;
  try {
    trace = run(program, inputs, cfg);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  for (const auto& w : trace.warnings) std::cerr << "warning: " << w << "\n";
  if (!o.trace_out.empty()) emit(trace_text(trace), o.trace_out);
  std::cout << "RESULT " << to_string(trace.result) << "\n";
  std::cout << "STATE " << trace.final_state.to_string() << "\n";
  std::cout << "VISITS " << trace.visit_count << "\n";
  int code = outcome_code(trace.result);
  if (trace.variant) {
    std::cout << to_string(*trace.variant) << "\n";
    if (!trace.variant->ok && code == kOk) code = kFailed;
  }
  return code;
}

int cmd_vcs(const std::string& path, const std::string& out) {
  emit(format_vc_list(to_vc_list(load_program(path))), out);
  return kOk;
}

struct VerifyOptions {
  std::string window = "1..12";
  std::uint64_t cap = 10'000'000;
  unsigned jobs = 0;
  std::size_t array_cap = 4;
};

int cmd_verify(const std::string& path, const VerifyOptions& o) {
  DomainWindow w;
  w.scalars = parse_range(o.window);
  w.array_elements = w.scalars;
  w.state_cap = o.cap;
  w.array_length_cap = o.array_cap;
  w.workers = o.jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : o.jobs;
  ProgramReport report;
  if (is_vc_file(path)) {
    const VcList list = load_vc_list(path);
    for (const auto& d : list.decls) {
      if (d.is_array()) w.array_lengths.try_emplace(d.name, *d.array_size);
    }
    report = check_vcs(vcs_of(list), w);
  } else {
    report = check_program(load_program(path), w);
  }
  std::cout << report.text();
  return report.count_counterexamples() > 0 ? kFailed : kOk;
}

int cmd_synth(const std::string& path, const std::string& out) {
  const VcList list = load_vc_list(path);
  try {
    emit(print_program(vcs_to_liffig(list)), out);
  } catch (const SynthError& e) {
    throw UsageError(std::string("synth: ") + e.what());
  }
  return kOk;
}

struct TranspileOptions {
  std::string name = "f";
  std::vector<std::string> params;
  bool checked = false;
  bool wide = false;
  std::string out;
};

int cmd_transpile(const std::string& path, const TranspileOptions& o) {
  const Program program = load_program(path);
  COptions c;
  c.function_name = o.name;
  c.params = o.params;
  c.wide = o.wide;
  try {
    emit(o.checked ? emit_runtime_checked(program, c) : to_c(program, c), o.out);
  } catch (const TranspileError& e) {
    throw UsageError(std::string("transpile: ") + e.what());
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Liffig toolchain: labeled guarded-command programs with Floyd assertions"};
  app.require_subcommand(1);

  std::string file;
  std::string out;

  auto* check = app.add_subcommand("check", "Parse a program and report diagnostics");
  check->add_option("file", file, "Liffig source")->required();

  RunOptions run_opts;
  auto* run_cmd = app.add_subcommand("run", "Run a program with assertion checking");
  run_cmd->add_option("file", file, "Liffig source")->required();
  run_cmd->add_option("--set", run_opts.set, "Input bindings var=value")->delimiter(',');
  run_cmd->add_option("--fuel", run_opts.fuel, "Maximum number of block visits");
  run_cmd->add_option("--variant", run_opts.variant, "Termination variant to check at every visit");
  run_cmd->add_option("--trace", run_opts.trace_out, "Write the visit trace to this file");
  run_cmd->add_flag("--bind-ghosts", run_opts.bind_ghosts, "Copy each input v into v0 when v0 is declared");
  run_cmd->add_option("--policy", run_opts.policy, "first_true or fail_on_overlap");
  run_cmd->add_flag("--no-assertions", run_opts.no_assertions, "Skip assertion checks at labels");

  auto* vcs = app.add_subcommand("vcs", "Print the verification condition list");
  vcs->add_option("file", file, "Liffig source")->required();
  vcs->add_option("--out", out, "Output file");

  VerifyOptions verify_opts;
  auto* verify = app.add_subcommand("verify", "Check every verification condition over a finite window");
  verify->add_option("file", file, "Liffig source or .vc list")->required();
  verify->add_option("--window", verify_opts.window, "Value range lo..hi for every variable");
  verify->add_option("--cap", verify_opts.cap, "Largest state space to enumerate per condition");
  verify->add_option("--array-cap", verify_opts.array_cap, "Array length used during enumeration");
  verify->add_option("--jobs", verify_opts.jobs, "Worker threads (0 = hardware concurrency)");

  auto* synth = app.add_subcommand("synth", "Build a program from a .vc list");
  synth->add_option("file", file, ".vc list")->required();
  synth->add_option("--out", out, "Output file");

  TranspileOptions tr_opts;
  auto* transpile = app.add_subcommand("transpile", "Emit C source");
  transpile->add_option("file", file, "Liffig source")->required();
  transpile->add_option("--name", tr_opts.name, "Function name");
  transpile->add_option("--params", tr_opts.params, "Parameters, in order")->delimiter(',');
  transpile->add_flag("--checked", tr_opts.checked, "Emit assert() for every label's assertion");
  transpile->add_flag("--wide", tr_opts.wide, "Use long long instead of int");
  transpile->add_option("--out", tr_opts.out, "Output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*check) return cmd_check(file);
    if (*run_cmd) return cmd_run(file, run_opts);
    if (*vcs) return cmd_vcs(file, out);
    if (*verify) return cmd_verify(file, verify_opts);
    if (*synth) return cmd_synth(file, out);
    if (*transpile) return cmd_transpile(file, tr_opts);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
