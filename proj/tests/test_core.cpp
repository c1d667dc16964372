#include <gtest/gtest.h>

#include "support.hpp"

using namespace liffig;

namespace {

Program two_block(const std::string& s_assert, const std::string& h_assert) {
  return parse_program_or_throw("S: " + s_assert + "\n  goto H\nH: " + h_assert + "\n  return 0\n");
}

}  // namespace

TEST(Ident, ReservedWordsAreNotIdentifiers) {
  for (auto w : {"if", "fi", "goto", "return", "abort", "int", "all", "some", "in", "or", "swap", "true", "false"}) {
    EXPECT_TRUE(is_reserved(w)) << w;
    EXPECT_FALSE(is_valid_ident(w)) << w;
  }
  EXPECT_TRUE(is_valid_ident("x0"));
  EXPECT_TRUE(is_valid_ident("mult_1"));
  EXPECT_FALSE(is_valid_ident("0x"));
  EXPECT_FALSE(is_valid_ident("_x"));
  EXPECT_FALSE(is_valid_ident(""));
}

TEST(Resolve, LabelReferenceExpandsToReferencedAssertion) {
  const Program g = support::corpus("gcd_stein.lif");
  const Formula b = resolve_assertion(g, "B");
  EXPECT_EQ(b, Formula(And{parse_formula("gcd(x0,y0) = z*gcd(x,y)"), parse_formula("x > y")}));
}

TEST(Resolve, NestedReferencesExpandRecursively) {
  const Program g = support::corpus("gcd_stein.lif");
  EXPECT_EQ(resolve_assertion(g, "C"), parse_formula("gcd(x0,y0) = z*gcd(x,y) & x>y & even(x)"));
  EXPECT_FALSE(contains_label_ref(resolve_assertion(g, "E")));
}

TEST(Resolve, TrueStaysTrue) {
  const Program p = two_block("true", "true");
  EXPECT_EQ(resolve_assertion(p, "S"), Formula(TrueF{}));
}

TEST(Resolve, IsIdempotent) {
  const Program g = support::corpus("gcd_stein.lif");
  for (const auto& b : g.blocks) {
    const Formula once = resolve_assertion(g, b.label);
    EXPECT_EQ(resolve_formula(once, assertions_of(g)), once) << b.label;
  }
}

TEST(Resolve, MutualReferenceIsCyclic) {
  Program p = two_block("true", "true");
  p.blocks[0].assertion = parse_formula("H & x > 0");
  p.blocks[1].assertion = parse_formula("S");
  try {
    resolve_assertion(p, "S");
    FAIL() << "expected a cycle";
  } catch (const ResolveError& e) {
    EXPECT_EQ(e.kind(), ResolveError::Kind::cyclic_reference);
  }
}

TEST(Resolve, UnknownLabelIsReported) {
  const Program p = two_block("true", "true");
  try {
    resolve_assertion(p, "Q");
    FAIL();
  } catch (const ResolveError& e) {
    EXPECT_EQ(e.kind(), ResolveError::Kind::unknown_label);
  }
}

TEST(Resolve, OpaquePartsStayOpaque) {
  const Program p = support::corpus("primes_trial.lif");
  const Formula a = resolve_assertion(p, "A");
  EXPECT_TRUE(contains_opaque(a));
  EXPECT_FALSE(contains_label_ref(a));
}

TEST(Resolve, FreeVariablesAreDeclared) {
  for (auto name : {"gcd_stein.lif", "mult_double.lif", "gcd_growth_3.lif"}) {
    const Program p = support::corpus(name);
    for (const auto& b : p.blocks) {
      const VarSet vs = free_vars(resolve_assertion(p, b.label));
      for (const auto& v : vs.scalars) EXPECT_NE(p.find_decl(v), nullptr) << name << " " << v;
    }
  }
}

TEST(FreeVars, QuantifiedVariableIsBound) {
  const Formula f = parse_formula("all i in 0..j-1 : !div(cand, p[i])");
  const VarSet vs = free_vars(f);
  EXPECT_EQ(vs.scalars, (std::set<std::string>{"cand", "j"}));
  EXPECT_EQ(vs.arrays, (std::set<std::string>{"p"}));
  EXPECT_EQ(bound_vars(f), (std::set<std::string>{"i"}));
}

TEST(FreeVars, CommandTargetsAndSources) {
  const VarSet vs = free_vars(parse_command("x, y, z := x/2, y/2, 2*z; swap(a, b); p[k] := cand"));
  EXPECT_EQ(vs.scalars, (std::set<std::string>{"a", "b", "cand", "k", "x", "y", "z"}));
  EXPECT_EQ(vs.arrays, (std::set<std::string>{"p"}));
}

TEST(State, InitialFromDeclarations) {
  const Program p = support::corpus("primes_sieve.lif");
  const State s = State::initial(p);
  EXPECT_EQ(s.scalar("n"), 1000);
  EXPECT_EQ(s.scalar("k"), 0);
  EXPECT_EQ(s.array("p").size(), 1000u);
  EXPECT_EQ(s.array("mult").size(), 30u);
}

TEST(State, UnknownVariableFaults) {
  State s;
  s.set_scalar("x", 1);
  try {
    (void)s.scalar("y");
    FAIL();
  } catch (const FaultError& e) {
    EXPECT_EQ(e.kind(), FaultKind::undefined_variable);
  }
}

TEST(State, TextIsSortedScalarsThenArrays) {
  State s;
  s.set_scalar("y", 2);
  s.set_scalar("x", 1);
  s.set_array("p", {2, 3});
  EXPECT_EQ(s.to_string(), "x=1,y=2,p=[2,3]");
}

TEST(Program, FlattenRemovesNesting) {
  const Command c = seq({seq({Command(Swap{"a", "b"})}), Command(Guard{true_f()})});
  const auto items = flatten(c);
  ASSERT_EQ(items.size(), 2u);
  EXPECT_TRUE(items[0].is<Swap>());
  EXPECT_TRUE(items[1].is<Guard>());
}

TEST(Program, StructuralEqualityIgnoresSpans) {
  const Program a = support::corpus("gcd_stein.lif");
  const Program b = parse_program_or_throw("\n\n" + support::corpus_text("gcd_stein.lif"));
  EXPECT_EQ(a, b);
}
