// Acceptance report: one PASS/FAIL line per criterion. Exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <thread>

#include "support.hpp"

using namespace liffig;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt_secs(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2fs", s);
  return buf;
}

DomainWindow gcd_window() {
  DomainWindow w;
  w.scalars = {1, 12};
  w.workers = std::max(1u, std::thread::hardware_concurrency());
  return w;
}

Program without_z_update() {
  std::string src = support::corpus_text("gcd_stein.lif");
  src.erase(src.find("z := z*x; "), std::string("z := z*x; ").size());
  return parse_program_or_throw(src);
}

// ------------------------------------------------------------------ criteria

Verdict corpus_parse() {
  const auto t0 = Clock::now();
  std::size_t parsed = 0;
  for (auto name : {"gcd_stein.lif", "gcd_growth_1.lif", "gcd_growth_2.lif", "gcd_growth_3.lif", "mult_double.lif",
                    "primes_trial.lif", "primes_sieve.lif"}) {
    if (parse_program(support::corpus_text(name)).ok()) ++parsed;
  }
  try {
    const VcList list = parse_vc_list(support::corpus_text("gcd.vc"));
    if (list.conditions.size() == 12) ++parsed;
  } catch (const Error&) {
  }
  const Program g = support::corpus("gcd_stein.lif");
  std::string labels;
  std::size_t arms = 0;
  for (const auto& b : g.blocks) {
    labels += b.label;
    if (const auto* f = std::get_if<IfFi>(&b.body)) arms += f->arms.size();
  }
  const double secs = seconds_since(t0);
  return {parsed == 8 && labels == "SABECDH" && arms == 12 && secs < 1.0,
          std::to_string(parsed) + "/8 parsed, blocks " + labels + ", " + std::to_string(arms) + " guarded commands, " +
              fmt_secs(secs)};
}

Verdict gcd_oracle() {
  const Program g = support::corpus("gcd_stein.lif");
  const auto t0 = Clock::now();
  std::size_t agree = 0;
  std::string first_bad;
  for (std::int64_t x = 1; x <= 200; ++x) {
    for (std::int64_t y = 1; y <= 200; ++y) {
      const Trace t = support::run_gcd(g, x, y, TraceDetail::summary);
      if (t.result == Outcome(Halted{support::euclid_gcd(x, y)})) {
        ++agree;
      } else if (first_bad.empty()) {
        first_bad = " first mismatch at " + std::to_string(x) + "," + std::to_string(y) + ": " + to_string(t.result);
      }
    }
  }
  const double secs = seconds_since(t0);
  return {agree == 40000 && secs < 10.0, std::to_string(agree) + "/40000 agree, " + fmt_secs(secs) + first_bad};
}

Verdict logarithmic() {
  const Program g = support::corpus("gcd_stein.lif");
  std::size_t worst_slack = SIZE_MAX;
  std::string first_bad;
  std::size_t max_visits = 0;
  for (std::int64_t x = 1; x <= 1024; ++x) {
    for (std::int64_t y = 1; y <= 1024; ++y) {
      const Trace t = support::run_gcd(g, x, y, TraceDetail::summary);
      const auto bound = static_cast<std::size_t>(4 * (support::floor_log2(x) + support::floor_log2(y)) + 16);
      max_visits = std::max(max_visits, t.visit_count);
      if (!t.ended_with<Halted>() || t.visit_count > bound) {
        if (first_bad.empty()) first_bad = " exceeded at " + std::to_string(x) + "," + std::to_string(y);
      } else {
        worst_slack = std::min(worst_slack, bound - t.visit_count);
      }
    }
  }
  return {first_bad.empty(), "max visits " + std::to_string(max_visits) + ", tightest slack " +
                                 std::to_string(worst_slack) + first_bad};
}

Verdict vc_suite() {
  const auto t0 = Clock::now();
  const ProgramReport good = check_program(support::corpus("gcd_stein.lif"), gcd_window());
  const ProgramReport bad = check_program(without_z_update(), gcd_window());
  std::string where;
  for (const auto& e : bad.entries) {
    if (std::holds_alternative<CounterExample>(e.verdict)) where += "(" + e.vc.pre_label + "," + e.vc.post_label + ")";
  }
  const double secs = seconds_since(t0);
  const bool pass = good.count_valid() == 12 && good.entries.size() == 12 && bad.count_counterexamples() == 1 &&
                    where == "(A,H)" && secs < 60.0;
  return {pass, good.summary() + "; mutated: " + bad.summary() + " on " + where + ", " + fmt_secs(secs)};
}

Verdict multiplication() {
  const Program m = support::corpus("mult_double.lif");
  std::size_t agree = 0;
  bool zero_ok = true;
  for (std::int64_t n = 0; n <= 64; ++n) {
    for (std::int64_t a = 0; a <= 64; ++a) {
      const Trace t = run(m, {{"n", n}, {"n0", n}, {"a", a}, {"a0", a}, {"z", 0}});
      const bool ok = t.result == Outcome(Halted{n * a}) && t.final_state.scalar("z") == n * a;
      agree += ok;
      if (n == 0 && !(ok && t.final_state.scalar("z") == 0)) zero_ok = false;
    }
  }
  return {agree == 65 * 65 && zero_ok, std::to_string(agree) + "/4225 give z = n0*a0"};
}

Verdict prime_table() {
  const auto t0 = Clock::now();
  const auto oracle = support::first_primes(1000);
  RunConfig cfg;
  cfg.fuel = 1'000'000'000;
  cfg.detail = TraceDetail::summary;
  const Trace trial = run(support::corpus("primes_trial.lif"), {}, cfg);
  std::int64_t max_j = 0;
  cfg.on_visit = [&](const std::string&, const State& s) { max_j = std::max(max_j, s.scalar("j")); };
  const Trace sieve = run(support::corpus("primes_sieve.lif"), {}, cfg);
  const double secs = seconds_since(t0);
  auto table = [](const Trace& t) {
    const auto p = t.final_state.array("p");
    return std::vector<std::int64_t>(p.begin(), p.end());
  };
  const bool halted = trial.ended_with<Halted>() && sieve.ended_with<Halted>();
  const bool same = halted && table(trial) == table(sieve) && table(trial) == oracle;
  const std::int64_t last = halted ? table(sieve).back() : -1;
  return {same && last == 7919 && max_j <= 29 && secs < 120.0,
          std::string("trial ") + to_string(trial.result) + ", sieve " + to_string(sieve.result) +
              (same ? ", tables equal oracle" : ", tables differ") + ", last " + std::to_string(last) + ", max j " +
              std::to_string(max_j) + ", " + fmt_secs(secs)};
}

Verdict variants() {
  const Program g = support::corpus("gcd_stein.lif");
  const Term sum = parse_term("x+y");
  std::size_t ok = 0;
  for (std::int64_t x = 1; x <= 64; ++x) {
    for (std::int64_t y = 1; y <= 64; ++y) ok += check_variant(g, support::run_gcd(g, x, y), sum).ok;
  }
  const Trace t = support::run_gcd(g, 6, 5);
  const VariantVerdict sq = check_variant(g, t, parse_term("(x-y)^2"));
  const bool witness = !sq.ok && sq.violation_index && t.visits.at(*sq.violation_index).label == "A";
  return {ok == 64 * 64 && witness,
          "x+y ok on " + std::to_string(ok) + "/4096 traces; (x-y)^2 on 6,5: " + to_string(sq)};
}

Verdict round_trips() {
  const std::string text = support::corpus_text("gcd.vc");
  const bool exact = format_vc_list(to_vc_list(vcs_to_liffig(parse_vc_list(text)))) == text;
  const Program original = support::corpus("gcd_stein.lif");
  const Program synth = vcs_to_liffig(to_vc_list(original));
  std::size_t agree = 0;
  for (std::int64_t x = 1; x <= 32; ++x) {
    for (std::int64_t y = 1; y <= 32; ++y) {
      agree += trace_text(support::run_gcd(original, x, y)) == trace_text(support::run_gcd(synth, x, y));
    }
  }
  return {exact && agree == 1024, std::string(exact ? "gcd.vc reproduced exactly" : "gcd.vc differs") + "; " +
                                      std::to_string(agree) + "/1024 runs agree"};
}

Verdict transpiler() {
  const Program g = support::corpus("gcd_stein.lif");
  COptions o;
  o.function_name = "gcd";
  o.params = {"x", "y"};
  const std::string c = to_c(g, o);
  const std::string golden = support::corpus_text("golden/gcd_stein.c");
  const bool match = support::words(c) == support::words(golden);
  bool shape = golden.find("swap(&x, &y)") != std::string::npos && golden.find("assert(0);") != std::string::npos;
  for (auto label : {"S:", "A:", "B:", "E:", "C:", "D:", "H:"}) shape = shape && golden.find(label) != std::string::npos;

  std::string smoke = "cc smoke skipped (no compiler)";
  bool smoke_ok = true;
  if (std::system("cc --version > /dev/null 2>&1") == 0) {
    const auto dir = std::filesystem::temp_directory_path() / ("liffig_accept_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "gcd.c") << c;
    std::ofstream(dir / "main.c") << "#include <stdio.h>\nint gcd(int, int);\nint main(void) {\n"
                                     "  for (int x = 1; x <= 50; ++x)\n    for (int y = 1; y <= 50; ++y) printf(\"%d\\n\", gcd(x, y));\n"
                                     "  return 0;\n}\n";
    const std::string exe = (dir / "gcd").string();
    const std::string build = "cc -O1 -w -o " + exe + " " + (dir / "gcd.c").string() + " " + (dir / "main.c").string();
    std::size_t agree = 0;
    if (std::system(build.c_str()) == 0) {
      FILE* pipe = popen(exe.c_str(), "r");
      for (std::int64_t x = 1; x <= 50 && pipe; ++x) {
        for (std::int64_t y = 1; y <= 50; ++y) {
          long long v = 0;
          if (std::fscanf(pipe, "%lld", &v) != 1) break;
          agree += Outcome(Halted{v}) == support::run_gcd(g, x, y, TraceDetail::summary).result;
        }
      }
      if (pipe) pclose(pipe);
    }
    std::filesystem::remove_all(dir);
    smoke_ok = agree == 2500;
    smoke = "cc smoke " + std::to_string(agree) + "/2500 agree";
  }
  return {match && shape && smoke_ok,
          std::string(match ? "golden matches" : "golden differs") + (shape ? "" : ", golden shape wrong") + "; " + smoke};
}

Verdict soundness_link() {
  const Program g = support::corpus("gcd_stein.lif");
  const ProgramReport report = check_program(g, gcd_window());
  const Formula start = resolve_assertion(g, g.start);
  auto in_window = [](const State& s) {
    for (const auto& [name, v] : s.scalars()) {
      if (v < 1 || v > 12) return false;
    }
    return true;
  };
  std::size_t considered = 0, violations = 0;
  RunConfig cfg;
  for (std::int64_t x = 1; x <= 12; ++x)
    for (std::int64_t y = 1; y <= 12; ++y)
      for (std::int64_t x0 = 1; x0 <= 12; ++x0)
        for (std::int64_t y0 = 1; y0 <= 12; ++y0)
          for (std::int64_t z = 1; z <= 12; ++z) {
            const std::map<std::string, std::int64_t> inputs{{"x", x}, {"y", y}, {"x0", x0}, {"y0", y0}, {"z", z}};
            if (!eval_formula(initial_state(g, inputs), start)) continue;
            const Trace t = run(g, inputs, cfg);
            bool stays = true;
            for (const auto& v : t.visits) stays = stays && in_window(v.state);
            if (!stays) continue;
            ++considered;
            violations += t.ended_with<AssertionViolation>();
          }
  return {report.count_valid() == 12 && considered > 0 && violations == 0,
          report.summary() + "; " + std::to_string(considered) + " in-window runs, " + std::to_string(violations) +
              " assertion violations"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"corpus parse", corpus_parse},
      {"gcd oracle equivalence", gcd_oracle},
      {"logarithmic visit bound", logarithmic},
      {"verification condition suite", vc_suite},
      {"multiplication by doubling", multiplication},
      {"prime table", prime_table},
      {"variant checking", variants},
      {"round trips", round_trips},
      {"transpiler golden output", transpiler},
      {"soundness link", soundness_link},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += !v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << ": " << v.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
