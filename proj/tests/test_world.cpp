#include <gtest/gtest.h>

#include "rw/errors.hpp"
#include "rw/printer.hpp"
#include "support.hpp"

using namespace rw;

namespace {

World random_world(const Vocabulary& v, unsigned N, std::mt19937& rng) {
  std::vector<bool> bits(table_bits(v, N));
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = rng() & 1;
  std::vector<unsigned> consts;
  for (std::size_t i = 0; i < v.constants().size(); ++i) consts.push_back(1 + rng() % N);
  return World::decode(v, N, bits, consts);
}

const ToleranceVector kTol = ToleranceVector::uniform({1, 2}, Rational(1, 8));

}  // namespace

TEST(World, LayoutAndDenotation) {
  Vocabulary v = rwtest::FormulaGen::vocab();
  EXPECT_EQ(table_bits(v, 3), 3u + 3u + 9u);
  std::vector<bool> bits(table_bits(v, 3));
  bits[1] = true;       // P(2)
  bits[3 + 2] = true;   // Q(3)
  bits[6 + 1 * 3 + 0] = true;  // R(2, 1)
  World w = World::decode(v, 3, bits, {2, 3});
  EXPECT_TRUE(w.holds("P", {2}));
  EXPECT_FALSE(w.holds("P", {1}));
  EXPECT_TRUE(w.holds("Q", {3}));
  EXPECT_TRUE(w.holds("R", {2, 1}));
  EXPECT_FALSE(w.holds("R", {1, 2}));
  EXPECT_EQ(w.denotation("a"), 2u);
  EXPECT_TRUE(eval_formula(w, {}, parse_formula("P(a) and Q(b) and exists x R(a, x)", v)));
}

TEST(World, RejectsFunctionSymbols) {
  Vocabulary v;
  v.add_function("next", 1);
  EXPECT_THROW(World(v, 2), UnsupportedFeature);
}

TEST(World, ClosedFormulaIgnoresValuation) {
  Vocabulary v = rwtest::FormulaGen::vocab();
  rwtest::FormulaGen gen(21);
  std::mt19937 rng(21);
  for (int i = 0; i < 1000; ++i) {
    unsigned N = 1 + i % 4;
    Formula f = ground(gen.formula(3), kTol);
    World w = random_world(v, N, rng);
    bool base = eval_formula(w, {}, f);
    for (int k = 0; k < 3; ++k) {
      Valuation val{{"x", 1 + rng() % N}, {"y", 1 + rng() % N}, {"z", 1 + rng() % N}};
      ASSERT_EQ(eval_formula(w, val, f), base) << print_formula(f);
    }
  }
}

TEST(World, AlphaEquivalence) {
  Vocabulary v = rwtest::FormulaGen::vocab();
  rwtest::FormulaGen a(33, {"x", "y", "z"}), b(33, {"u", "v", "w"});
  std::mt19937 rng(33);
  for (int i = 0; i < 1000; ++i) {
    Formula f = ground(a.formula(3), kTol);
    Formula g = ground(b.formula(3), kTol);
    World w = random_world(v, 1 + i % 4, rng);
    ASSERT_EQ(eval_formula(w, {}, f), eval_formula(w, {}, g)) << print_formula(f) << "\n" << print_formula(g);
  }
}

TEST(World, NegationIsTotal) {
  Vocabulary v = rwtest::FormulaGen::vocab();
  rwtest::FormulaGen gen(45);
  std::mt19937 rng(45);
  for (int i = 0; i < 1000; ++i) {
    Formula f = ground(gen.formula(3), kTol);
    World w = random_world(v, 1 + i % 4, rng);
    ASSERT_NE(eval_formula(w, {}, f), eval_formula(w, {}, Formula::negation(f)));
  }
}

TEST(World, ProportionBounds) {
  Vocabulary v = rwtest::FormulaGen::vocab();
  rwtest::FormulaGen gen(57);
  std::mt19937 rng(57);
  for (int i = 0; i < 1000; ++i) {
    unsigned N = 1 + i % 5;
    std::vector<std::string> scope;
    ExprPtr e = gen.bare_proportion(scope);
    World w = random_world(v, N, rng);
    Rational r = eval_proportion(w, {}, *e);
    ASSERT_GE(r, Rational(0));
    ASSERT_LE(r, Rational(1));
    Rational::Int bound = 1;
    for (std::size_t k = 0; k < e->vars.size(); ++k) bound *= N;
    ASSERT_EQ(bound % r.den(), 0) << print_expr(*e);
  }
}

TEST(World, ProportionAgainstHandCount) {
  Vocabulary v = rwtest::FormulaGen::vocab();
  std::mt19937 rng(5);
  Formula f = parse_formula("P(a)", v);
  for (int i = 0; i < 200; ++i) {
    unsigned N = 1 + i % 5;
    World w = random_world(v, N, rng);
    int pairs = 0, ps = 0;
    for (unsigned x = 1; x <= N; ++x) {
      ps += w.holds("P", {x});
      for (unsigned y = 1; y <= N; ++y) pairs += w.holds("R", {x, y}) && !w.holds("Q", {y});
    }
    Valuation val;
    auto px = Expr::proportion(Formula::predicate("P", {Term::variable("x")}), {"x"});
    auto rxy = Expr::proportion(Formula::conjunction(Formula::predicate("R", {Term::variable("x"), Term::variable("y")}),
                                                     Formula::negation(Formula::predicate("Q", {Term::variable("y")}))),
                                {"x", "y"});
    EXPECT_EQ(eval_proportion(w, val, *px), Rational(ps, N));
    EXPECT_EQ(eval_proportion(w, val, *rxy), Rational(pairs, static_cast<int>(N * N)));
    EXPECT_EQ(eval_formula(w, val, f), w.holds("P", {w.denotation("a")}));
  }
}

TEST(World, LeftoverApproximatePartsAreErrors) {
  Vocabulary v = rwtest::FormulaGen::vocab();
  World w(v, 2);
  EXPECT_THROW(eval_formula(w, {}, parse_formula("prop{P(x)}[x] ~=[1] 1/2", v)), Error);
  EXPECT_THROW(eval_formula(w, {}, Formula::predicate("P", {Term::variable("x")})), Error);
}
