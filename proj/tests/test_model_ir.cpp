#include <gtest/gtest.h>

#include <random>

#include "stochbench/errors.hpp"
#include "stochbench/lp_format.hpp"
#include "stochbench/model.hpp"
#include "test_support.hpp"

using namespace stochbench;

namespace {

Constraint row(std::map<std::string, double> terms, Sense s, double rhs, std::string name = "c") {
  Constraint c;
  c.name = std::move(name);
  c.lhs.terms = std::move(terms);
  c.sense = s;
  c.rhs = rhs;
  return c;
}

void expect_same_row(const Constraint& a, const Constraint& b) {
  ASSERT_EQ(a.sense, b.sense);
  ASSERT_EQ(a.lhs.terms.size(), b.lhs.terms.size());
  for (const auto& [name, coef] : a.lhs.terms) EXPECT_NEAR(coef, b.lhs.coef(name), 1e-12) << name;
  EXPECT_NEAR(a.rhs, b.rhs, 1e-12);
}

}  // namespace

TEST(Canonicalize, FlipsGeAndScalesByLargestEntry) {
  auto c = canonicalize_constraint(row({{"x", -1}, {"y", -1}}, Sense::ge, -2));
  EXPECT_EQ(c.sense, Sense::le);
  EXPECT_DOUBLE_EQ(c.lhs.coef("x"), 0.5);
  EXPECT_DOUBLE_EQ(c.lhs.coef("y"), 0.5);
  EXPECT_DOUBLE_EQ(c.rhs, 1.0);
}

TEST(Canonicalize, PositiveScalingGivesSameRow) {
  expect_same_row(canonicalize_constraint(row({{"x", 2}, {"y", 2}}, Sense::le, 4)),
                  canonicalize_constraint(row({{"x", 1}, {"y", 1}}, Sense::le, 2)));
}

TEST(Canonicalize, EqualitySignFollowsSmallestName) {
  auto c = canonicalize_constraint(row({{"b", 3}, {"a", -6}}, Sense::eq, 1));
  EXPECT_DOUBLE_EQ(c.lhs.coef("a"), 1.0);
  EXPECT_DOUBLE_EQ(c.lhs.coef("b"), -0.5);
  EXPECT_DOUBLE_EQ(c.rhs, -1.0 / 6.0);
}

TEST(Canonicalize, ConstantFoldsIntoRhs) {
  Constraint c = row({{"x", 1}}, Sense::le, 5);
  c.lhs.constant = 3;
  auto k = canonicalize_constraint(c);
  EXPECT_DOUBLE_EQ(k.lhs.coef("x"), 0.5);
  EXPECT_DOUBLE_EQ(k.rhs, 1.0);  // x <= 2, scaled by 2
  EXPECT_DOUBLE_EQ(k.lhs.constant, 0.0);
}

TEST(Canonicalize, DegenerateRows) {
  EXPECT_THROW(canonicalize_constraint(row({{"x", 0}}, Sense::le, -1)), InfeasibleTautology);
  EXPECT_THROW(canonicalize_constraint(row({}, Sense::eq, 2)), InfeasibleTautology);
  EXPECT_THROW(canonicalize_constraint(row({}, Sense::ge, 1)), InfeasibleTautology);
  auto t = canonicalize_constraint(row({{"x", 0}}, Sense::le, 3));
  EXPECT_TRUE(is_trivial(t));
  EXPECT_TRUE(is_trivial(canonicalize_constraint(row({}, Sense::ge, -1))));
}

TEST(Canonicalize, DropsNegligibleCoefficients) {
  auto c = canonicalize_constraint(row({{"x", 1e-12}, {"y", 1}}, Sense::le, 1));
  EXPECT_EQ(c.lhs.terms.size(), 1u);
  EXPECT_TRUE(c.lhs.terms.contains("y"));
}

TEST(Canonicalize, IdempotentAndScaleInvariantOnRandomRows) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coef(-10, 10);
  std::uniform_real_distribution<double> scale(0.01, 100);
  for (int trial = 0; trial < 500; ++trial) {
    Constraint c;
    c.name = "r";
    for (const char* v : {"a", "b", "c", "d"})
      if (rng() % 3) c.lhs.terms[v] = coef(rng);
    if (c.lhs.terms.empty()) c.lhs.terms["a"] = 1.0;
    c.sense = static_cast<Sense>(rng() % 3);
    c.rhs = coef(rng);
    auto once = canonicalize_constraint(c);
    expect_same_row(once, canonicalize_constraint(once));

    Constraint scaled = c;
    double k = scale(rng);
    for (auto& [n, a] : scaled.lhs.terms) a *= k;
    scaled.rhs *= k;
    auto s = canonicalize_constraint(scaled);
    for (const auto& [n, a] : once.lhs.terms) EXPECT_NEAR(a, s.lhs.coef(n), 1e-9);
    EXPECT_NEAR(once.rhs, s.rhs, 1e-9);

    if (c.sense == Sense::eq) {
      Constraint neg = scaled;
      for (auto& [n, a] : neg.lhs.terms) a = -a;
      neg.rhs = -neg.rhs;
      auto ns = canonicalize_constraint(neg);
      for (const auto& [n, a] : once.lhs.terms) EXPECT_NEAR(a, ns.lhs.coef(n), 1e-9);
      EXPECT_NEAR(once.rhs, ns.rhs, 1e-9);
    }
  }
}

TEST(ParseLp, ReadsMinimalModel) {
  auto m = parse_lp("Minimize\n obj: 2 x + 3 y\nSubject To\n c1: x + y >= 2\nEnd");
  ASSERT_EQ(m.variables.size(), 2u);
  ASSERT_EQ(m.constraints.size(), 1u);
  EXPECT_EQ(m.objective.sense, ObjSense::minimize);
  EXPECT_DOUBLE_EQ(m.objective.expr.coef("x"), 2.0);
  EXPECT_DOUBLE_EQ(m.objective.expr.coef("y"), 3.0);
  EXPECT_EQ(m.constraints[0].name, "c1");
  EXPECT_EQ(m.constraints[0].sense, Sense::ge);
  EXPECT_DOUBLE_EQ(m.constraints[0].rhs, 2.0);
  EXPECT_EQ(m.variables[0].lower, 0.0);
  EXPECT_TRUE(std::isinf(m.variables[0].upper));
  EXPECT_EQ(m.variables[0].kind, VarKind::continuous);
}

TEST(ParseLp, MalformedTermReportsLine) {
  try {
    parse_lp("Minimize\nobj: x\nSubject To\nc1: x + \xE2\x89\xA4 2\nEnd");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4);
  }
  try {
    parse_lp("Minimize\nobj: x\nSubject To\nc1: x + <= 2\nEnd");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4);
  }
}

TEST(ParseLp, DuplicateConstraintLabel) {
  EXPECT_THROW(parse_lp("Minimize\n x\nSubject To\n a: x >= 1\n a: x <= 3\nEnd\n"), DuplicateName);
}

TEST(ParseLp, SectionsBoundsAndKinds) {
  auto m = parse_lp(R"(\ written by hand
MAXIMIZE
  profit: 3 a + 2 b - c + 4
SUBJECT TO
  cap: a + b
       + c <= 10      \ continued over two lines
  -2.5e0 a >= -20
  bal: a - b = 0
BOUNDS
  -5 <= c <= 5
  b <= 4
  d free
  e >= -1
  f = 2
GENERALS
  b
BINARIES
  g
END
)");
  EXPECT_EQ(m.objective.sense, ObjSense::maximize);
  EXPECT_EQ(m.objective.name, "profit");
  EXPECT_DOUBLE_EQ(m.objective.expr.constant, 4.0);
  ASSERT_EQ(m.constraints.size(), 3u);
  EXPECT_EQ(m.constraints[1].name, "c1");
  EXPECT_DOUBLE_EQ(m.constraints[1].lhs.coef("a"), -2.5);
  auto* c = m.find_variable("c");
  EXPECT_EQ(c->lower, -5);
  EXPECT_EQ(c->upper, 5);
  EXPECT_EQ(m.find_variable("b")->upper, 4);
  EXPECT_EQ(m.find_variable("b")->kind, VarKind::integer);
  EXPECT_TRUE(std::isinf(m.find_variable("d")->lower));
  EXPECT_EQ(m.find_variable("e")->lower, -1);
  EXPECT_EQ(m.find_variable("f")->lower, 2);
  EXPECT_EQ(m.find_variable("f")->upper, 2);
  EXPECT_EQ(m.find_variable("g")->kind, VarKind::binary);
  EXPECT_EQ(m.find_variable("g")->upper, 1);
}

TEST(ParseLp, BracketedNamesBecomeIdentifiers) {
  auto m = parse_lp("Minimize\n x[0] + x[1]\nSubject To\n R0: x[0] + x[1] >= 1\nEnd\n");
  ASSERT_EQ(m.variables.size(), 2u);
  EXPECT_EQ(m.variables[0].name, "x_0_");
  EXPECT_EQ(m.variables[1].name, "x_1_");
}

TEST(ParseLp, RejectsMissingEndAndStrayContent) {
  EXPECT_THROW(parse_lp("Minimize\n x\nSubject To\n x >= 1\n"), ParseError);
  EXPECT_THROW(parse_lp("x >= 1\nMinimize\n x\nEnd\n"), ParseError);
  EXPECT_THROW(parse_lp("Minimize\n x\nSubject To\n c: x >= \nEnd\n"), ParseError);
}

TEST(EmitLp, BinariesSectionAndEmptyConstraints) {
  Model m;
  m.variables = {{"x"}, {"z", 0, 1, VarKind::binary}};
  m.objective.expr.terms = {{"x", 1}, {"z", -2}};
  auto text = emit_lp(m);
  EXPECT_NE(text.find("Binaries\n z\n"), std::string::npos);
  EXPECT_NE(text.find("Subject To\n"), std::string::npos);
  auto back = parse_lp(text);
  EXPECT_TRUE(structurally_equal(canonicalize_model(back), canonicalize_model(m)));
}

TEST(EmitLp, ExactText) {
  Model m;
  m.variables = {{"y"}, {"x", -kInfinity, 3}, {"k", 0, kInfinity, VarKind::integer}, {"u"}};
  m.objective.sense = ObjSense::maximize;
  m.objective.expr.terms = {{"x", -1}, {"y", 0.5}};
  m.objective.expr.constant = -2;
  Constraint c;
  c.name = "c1";
  c.lhs.terms = {{"x", 1}, {"k", 1.0 / 3.0}};
  c.sense = Sense::ge;
  c.rhs = 1;
  m.constraints.push_back(c);
  EXPECT_EQ(emit_lp(m),
            "Maximize\n"
            " obj: 0.5 y - x - 2\n"
            "Subject To\n"
            " c1: x + 0.333333333333 k >= 1\n"
            "Bounds\n"
            " -inf <= x <= 3\n"
            " u >= 0\n"
            "Generals\n"
            " k\n"
            "End\n");
}

TEST(EmitLp, RoundTripOnRandomModels) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    Model m = canonicalize_model(testutil::random_model(rng));
    auto text = emit_lp(m);
    Model back = canonicalize_model(parse_lp(text));
    ASSERT_TRUE(structurally_equal(back, m)) << text;
    // emit . parse is a fixed point after one pass
    auto once = emit_lp(parse_lp(text));
    EXPECT_EQ(once, emit_lp(parse_lp(once)));
  }
}

TEST(Fingerprint, DeterministicAndOrderFree) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    Model m = testutil::random_model(rng);
    EXPECT_EQ(fingerprint(m), fingerprint(m));
    Model shuffled = m;
    std::shuffle(shuffled.constraints.begin(), shuffled.constraints.end(), rng);
    std::shuffle(shuffled.variables.begin(), shuffled.variables.end(), rng);
    EXPECT_EQ(fingerprint(m), fingerprint(shuffled));
    if (!m.constraints.empty()) {
      Model changed = m;
      changed.constraints[0].rhs += 1.0;
      EXPECT_NE(fingerprint(m), fingerprint(changed));
    }
  }
  Model a = parse_lp("Minimize\n x\nSubject To\n c: x + 2 y <= 4\nEnd\n");
  Model b = parse_lp("Minimize\n x\nSubject To\n c: x + 2.001 y <= 4\nEnd\n");
  EXPECT_NE(fingerprint(a), fingerprint(b));
  EXPECT_EQ(to_hex(sha256("abc")), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Validate, RejectsBrokenModels) {
  Model m;
  m.variables = {{"x"}, {"x"}};
  EXPECT_THROW(validate(m), ValidationError);
  m.variables = {{"1x"}};
  EXPECT_THROW(validate(m), ValidationError);
  m.variables = {{"x", 2, 1}};
  EXPECT_THROW(validate(m), ValidationError);
  m.variables = {{"x", 0, 2, VarKind::binary}};
  EXPECT_THROW(validate(m), ValidationError);
  m.variables = {{"x"}};
  m.objective.expr.terms["y"] = 1;
  EXPECT_THROW(validate(m), ValidationError);
}
