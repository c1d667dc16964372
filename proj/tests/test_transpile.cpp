#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <map>
#include <regex>

#include "support.hpp"

using namespace liffig;

namespace {

COptions gcd_options() {
  COptions o;
  o.function_name = "gcd";
  o.params = {"x", "y"};
  return o;
}

using Edge = std::pair<std::string, std::string>;

/// (label, goto target) pairs found in emitted C.
std::multiset<Edge> c_edges(const std::string& c) {
  static const std::regex label_re(R"(^([A-Za-z][A-Za-z0-9_]*): //)");
  static const std::regex goto_re(R"(goto ([A-Za-z][A-Za-z0-9_]*);)");
  std::multiset<Edge> out;
  std::string current;
  std::istringstream in(c);
  for (std::string line; std::getline(in, line);) {
    std::smatch m;
    if (std::regex_search(line, m, label_re)) current = m[1];
    for (auto it = std::sregex_iterator(line.begin(), line.end(), goto_re); it != std::sregex_iterator(); ++it) {
      out.emplace(current, (*it)[1]);
    }
  }
  return out;
}

std::multiset<Edge> program_edges(const Program& p) {
  std::multiset<Edge> out;
  for (const auto& b : p.blocks) {
    auto add = [&](const Terminal& t) {
      if (const auto* g = std::get_if<GotoLabel>(&t)) out.emplace(b.label, g->label);
    };
    if (const auto* f = std::get_if<IfFi>(&b.body)) {
      for (const auto& gc : f->arms) add(gc.terminal);
    } else if (const auto* s = std::get_if<Straight>(&b.body)) {
      add(s->terminal);
    }
  }
  return out;
}

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
  return n;
}

TranspileError::Kind error_kind(const std::function<void()>& f) {
  try {
    f();
  } catch (const TranspileError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no TranspileError";
  return TranspileError::Kind::unsupported;
}

bool have_cc() { return std::system("cc --version > /dev/null 2>&1") == 0; }

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("liffig_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir;
}

void write(const std::filesystem::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string capture(const std::string& cmd) {
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return out;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  pclose(pipe);
  return out;
}

}  // namespace

TEST(ToC, MatchesGoldenFile) {
  const std::string c = to_c(support::corpus("gcd_stein.lif"), gcd_options());
  const std::string golden = support::corpus_text("golden/gcd_stein.c");
  EXPECT_EQ(support::words(c), support::words(golden));
}

TEST(ToC, GoldenFileShape) {
  const std::string golden = support::corpus_text("golden/gcd_stein.c");
  for (auto label : {"S:", "A:", "B:", "E:", "C:", "D:", "H:"}) EXPECT_NE(golden.find(label), std::string::npos) << label;
  EXPECT_NE(golden.find("swap(&x, &y)"), std::string::npos);
  EXPECT_EQ(count(golden, "assert(0);"), 5u);
  EXPECT_NE(golden.find("int gcd(int x, int y)"), std::string::npos);
  EXPECT_NE(golden.find("#include <assert.h>"), std::string::npos);
  EXPECT_EQ(count(golden, "#include"), 1u);
}

TEST(ToC, StartBlock) {
  const std::string c = to_c(support::corpus("gcd_stein.lif"), gcd_options());
  EXPECT_NE(c.find("S: // x = x0 & y = y0\n  z = 1; goto A;\n"), std::string::npos);
}

TEST(ToC, SwapArm) {
  const std::string c = to_c(support::corpus("gcd_stein.lif"), gcd_options());
  EXPECT_NE(c.find("if (x < y) { swap(&x, &y); goto B; }"), std::string::npos);
  EXPECT_EQ(count(c, "static void swap("), 1u);
}

TEST(ToC, AbortBlock) {
  COptions o = gcd_options();
  const std::string c = to_c(support::corpus("gcd_growth_1.lif"), o);
  EXPECT_NE(c.find("B: // A & x > y\n  assert(0);\n"), std::string::npos);
  EXPECT_EQ(c.find("swap"), std::string::npos);
}

TEST(ToC, PredicatesLowerToRemainder) {
  const std::string c = to_c(support::corpus("gcd_stein.lif"), gcd_options());
  EXPECT_NE(c.find("if (x % 2 == 0) { goto C; }"), std::string::npos);
  EXPECT_NE(c.find("if (x % 2 != 0) { goto D; }"), std::string::npos);
  const std::string t = to_c(support::corpus("primes_trial.lif"), COptions{});
  EXPECT_NE(t.find("if (cand % p[j] == 0)"), std::string::npos);
  EXPECT_NE(t.find("if (!(cand % p[j] == 0))"), std::string::npos);
}

TEST(ToC, PowerUsesHelper) {
  const std::string t = to_c(support::corpus("primes_trial.lif"), COptions{});
  EXPECT_NE(t.find("static int ipow("), std::string::npos);
  EXPECT_NE(t.find("cand < ipow(p[j], 2)"), std::string::npos);
}

TEST(ToC, StructurePreserved) {
  for (auto name : {"gcd_stein.lif", "gcd_growth_2.lif", "mult_double.lif", "primes_trial.lif", "primes_sieve.lif"}) {
    const Program p = support::corpus(name);
    EXPECT_EQ(c_edges(to_c(p, COptions{})), program_edges(p)) << name;
  }
}

TEST(ToC, ParallelAssignmentWithoutOverlapIsSequential) {
  const std::string c = to_c(support::corpus("gcd_stein.lif"), gcd_options());
  EXPECT_NE(c.find("x = x / 2; y = y / 2; z = 2 * z; goto B;"), std::string::npos);
  EXPECT_EQ(c.find("__t"), std::string::npos);
}

TEST(ToC, ParallelAssignmentWithOverlapUsesTemporaries) {
  const Program p = parse_program_or_throw("S: true\n  a, b := b, a + b; goto H\nH: true\n  return a\n");
  const std::string c = to_c(p, COptions{});
  EXPECT_NE(c.find("__t0 = b; __t1 = a + b; a = __t0; b = __t1;"), std::string::npos);
  EXPECT_NE(c.find("int __t0;"), std::string::npos);
}

TEST(ToC, Errors) {
  const Program hole = parse_program_or_throw("S: true\n  if x > 0 -> \"later\"\n   | x <= 0 -> goto H\n  fi\nH: true\n  return x\n");
  EXPECT_EQ(error_kind([&] { to_c(hole, COptions{}); }), TranspileError::Kind::hole_present);
  Program opaque = parse_program_or_throw("S: true\n  if x > 0 -> goto H\n  fi\nH: true\n  return x\n");
  std::get<IfFi>(opaque.blocks[0].body).arms[0].guard = formula_or_opaque("x is lucky");
  EXPECT_EQ(error_kind([&] { to_c(opaque, COptions{}); }), TranspileError::Kind::opaque_guard);
  COptions bad = gcd_options();
  bad.params = {"q"};
  EXPECT_EQ(error_kind([&] { to_c(support::corpus("gcd_stein.lif"), bad); }), TranspileError::Kind::bad_parameter);
}

TEST(ToC, WideUsesLongLong) {
  COptions o = gcd_options();
  o.wide = true;
  const std::string c = to_c(support::corpus("gcd_stein.lif"), o);
  EXPECT_NE(c.find("long long gcd(long long x, long long y)"), std::string::npos);
  EXPECT_EQ(c.find("int "), std::string::npos);
}

TEST(Checked, AssertsEveryLabel) {
  const std::string c = emit_runtime_checked(support::corpus("gcd_stein.lif"), gcd_options());
  EXPECT_NE(c.find("A: // gcd(x0, y0) = z*gcd(x, y)\n  assert(gcd0(x0, y0) == z * gcd0(x, y));\n"), std::string::npos);
  EXPECT_NE(c.find("static int gcd0("), std::string::npos);
  EXPECT_NE(c.find("int x0 = x;"), std::string::npos);
  EXPECT_EQ(count(c, "  assert(") - count(c, "assert(0);"), 7u);
}

TEST(Checked, ProseAssertionRejected) {
  EXPECT_EQ(error_kind([] { emit_runtime_checked(support::corpus("primes_trial.lif"), COptions{}); }),
            TranspileError::Kind::opaque_assertion);
}

TEST(Checked, TrueAssertion) {
  const Program p = parse_program_or_throw("S: true\n  goto H\nH: true\n  return 0\n");
  const std::string c = emit_runtime_checked(p, COptions{});
  EXPECT_NE(c.find("S: // true\n  assert(1);\n"), std::string::npos);
}

TEST(Checked, QuantifierBecomesLoop) {
  const Program p = parse_program_or_throw(
      "int p[3];\nS: all i in 0..2 : p[i] = 0\n  p[0] := 2; goto H\nH: p[0] = 2 & all i in 1..2 : p[i] = 0\n  return p[0]\n");
  const std::string c = emit_runtime_checked(p, COptions{});
  EXPECT_NE(c.find("for (int i = 0; __ok && i <= 2; ++i) {"), std::string::npos);
  EXPECT_NE(c.find("assert(__ok);"), std::string::npos);
}

// ------------------------------------------------------------------ compiled

TEST(Compiled, GcdAgreesWithInterpreter) {
  if (!have_cc()) GTEST_SKIP() << "no C compiler";
  const Program g = support::corpus("gcd_stein.lif");
  const auto dir = scratch_dir("gcd");
  write(dir / "gcd.c", to_c(g, gcd_options()));
  COptions checked = gcd_options();
  checked.function_name = "gcd_checked";
  write(dir / "gcd_checked.c", emit_runtime_checked(g, checked));
  write(dir / "main.c",
        "#include <stdio.h>\nint gcd(int, int);\nint gcd_checked(int, int);\n"
        "int main(void) {\n  for (int x = 1; x <= 50; ++x)\n    for (int y = 1; y <= 50; ++y)\n"
        "      printf(\"%d %d\\n\", gcd(x, y), gcd_checked(x, y));\n  return 0;\n}\n");
  const std::string exe = (dir / "gcd").string();
  ASSERT_EQ(std::system(("cc -O1 -w -o " + exe + " " + (dir / "gcd.c").string() + " " + (dir / "gcd_checked.c").string() +
                         " " + (dir / "main.c").string())
                            .c_str()),
            0);
  std::istringstream out(capture(exe));
  for (std::int64_t x = 1; x <= 50; ++x) {
    for (std::int64_t y = 1; y <= 50; ++y) {
      std::int64_t plain = 0, self_checked = 0;
      ASSERT_TRUE(out >> plain >> self_checked);
      const Trace t = support::run_gcd(g, x, y, TraceDetail::summary);
      ASSERT_TRUE(t.ended_with<Halted>());
      EXPECT_EQ(plain, std::get<Halted>(t.result).value) << x << "," << y;
      EXPECT_EQ(self_checked, plain) << x << "," << y;
    }
  }
  std::filesystem::remove_all(dir);
}

TEST(Compiled, SieveReturnsThousandthPrime) {
  if (!have_cc()) GTEST_SKIP() << "no C compiler";
  const auto dir = scratch_dir("sieve");
  COptions o;
  o.function_name = "primes";
  o.wide = true;
  write(dir / "sieve.c", to_c(support::corpus("primes_sieve.lif"), o));
  write(dir / "main.c", "#include <stdio.h>\nlong long primes(void);\nint main(void) { printf(\"%lld\\n\", primes()); return 0; }\n");
  const std::string exe = (dir / "sieve").string();
  ASSERT_EQ(std::system(("cc -O1 -w -o " + exe + " " + (dir / "sieve.c").string() + " " + (dir / "main.c").string()).c_str()), 0);
  EXPECT_EQ(std::stoll(capture(exe)), support::first_primes(1000).back());
  std::filesystem::remove_all(dir);
}
