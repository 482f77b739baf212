#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numeric>

#include "rw/corpus.hpp"
#include "rw/counting.hpp"
#include "rw/defaults.hpp"
#include "rw/errors.hpp"
#include "rw/maxent.hpp"
#include "support.hpp"

using namespace rw;

namespace {

double row_value(const LinearConstraint& r, const std::vector<double>& p) {
  double s = 0;
  for (std::size_t j = 0; j < p.size(); ++j) s += r.coeffs[j].get_d() * p[j];
  return s;
}

bool feasible(const ConstraintSet& cs, const std::vector<double>& p, double slack) {
  for (const auto& r : cs.rows) {
    double v = row_value(r, p) - r.rhs.get_d();
    if (r.kind == LinearConstraint::Kind::Eq ? std::abs(v) > slack : v > slack) return false;
  }
  return true;
}

double entropy(const std::vector<double>& p) {
  double h = 0;
  for (double x : p)
    if (x > 0) h -= x * std::log(x);
  return h;
}

std::vector<Rational> taus_to(unsigned k) {
  std::vector<Rational> out;
  Rational t(1, 16);
  for (unsigned i = 2; i <= k; ++i, t = t / Rational(4)) out.push_back(t);
  return out;
}

const char* kGeffnerShared =
    "predicate P/1, S/1, Q/1, R/1;\nconst c;\n"
    "prop{Q(x) | P(x) and S(x)}[x] ~=[1] 1.\nprop{not Q(x) | R(x)}[x] ~=[1] 1.\n"
    "prop{not Q(x) | P(x)}[x] ~=[1] 1.\nP(c) and S(c) and R(c).\n";

const char* kGeffnerDistinct =
    "predicate P/1, S/1, Q/1, R/1;\nconst c;\n"
    "prop{Q(x) | P(x) and S(x)}[x] ~=[1] 1.\nprop{not Q(x) | R(x)}[x] ~=[2] 1.\n"
    "prop{not Q(x) | P(x)}[x] ~=[3] 1.\nP(c) and S(c) and R(c).\n";

}  // namespace

TEST(Maxent, AtomsAreOrderedAndExhaustive) {
  KnowledgeBase kb = rwtest::corpus_kb("tweety");
  auto as = atoms(kb.vocab);
  ASSERT_EQ(as.size(), 8u);
  std::set<std::vector<bool>> seen;
  for (std::size_t j = 0; j < as.size(); ++j) {
    EXPECT_EQ(as[j].index, j);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(as[j].positive[i], ((j >> (2 - i)) & 1) == 0);
    seen.insert(as[j].positive);
  }
  EXPECT_EQ(seen.size(), 8u);
  EXPECT_EQ(as[0].label(kb.vocab), "Bird and Penguin and Fly");
}

TEST(Maxent, WorkedExample) {
  KnowledgeBase kb = rwtest::corpus_kb("maxent_example");
  ConstraintSet cs = constraints_from_kb(kb.vocab, kb.formula);
  AtomDistribution d = maxent_point(cs);
  const std::vector<double> want = {0.3, 0.7, 0, 0};
  for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(d.p[j], want[j], 1e-6);
  EXPECT_TRUE(d.forced_zero[2]);
  EXPECT_TRUE(d.forced_zero[3]);
  MaxentAnswer a = maxent_degree(kb.vocab, kb.formula, parse_formula("P2(c)", kb.vocab));
  EXPECT_NEAR(a.value, 0.3, 1e-6);
  EXPECT_LT(d.stationarity, 1e-6);
  EXPECT_LT(d.feasibility, 1e-9);
}

TEST(Maxent, CorpusAnswers) {
  struct Case {
    const char* kb;
    const char* query;
    double want;
    double tol;
  };
  for (const Case& c : {Case{"black_clyde", "Black(Clyde)", 0.47, 1e-3}, Case{"hepatitis", "Hep(Eric)", 0.8, 1e-6},
                        Case{"tay_sachs", "TS(Eric)", 0.02, 1e-3}, Case{"flying_bird", "Bird(Opus)", 2.0 / 3, 1e-6},
                        Case{"flying_bird", "FlyingBird(Tweety)", 0.5, 1e-6}, Case{"white", "White(c)", 0.5, 1e-9},
                        Case{"red_blue", "White(c)", 1.0 / 3, 1e-6}}) {
    KnowledgeBase kb = rwtest::corpus_kb(c.kb);
    EXPECT_NEAR(maxent_degree(kb.vocab, kb.formula, parse_formula(c.query, kb.vocab)).value, c.want, c.tol) << c.kb;
  }
  KnowledgeBase chirps = rwtest::corpus_kb("chirps");
  double v = maxent_degree(chirps.vocab, chirps.formula, parse_formula("Chirps(Tweety)", chirps.vocab)).value;
  EXPECT_GE(v, 0.7 - 1e-9);
  EXPECT_LE(v, 0.8 + 1e-9);
}

TEST(Maxent, PointIsFeasibleAndBeatsSampledPoints) {
  std::mt19937_64 rng(0);
  std::exponential_distribution<double> expo(1.0);
  for (const char* name : {"hepatitis", "black_clyde", "chirps", "tay_sachs"}) {
    KnowledgeBase kb = rwtest::corpus_kb(name);
    ConstraintSet cs = constraints_from_kb(kb.vocab, kb.formula, ToleranceVector::uniform(tolerance_indices(kb.formula), Rational(1, 10)));
    AtomDistribution d = maxent_point(cs);
    EXPECT_NEAR(std::accumulate(d.p.begin(), d.p.end(), 0.0), 1.0, 1e-9);
    EXPECT_TRUE(feasible(cs, d.p, 1e-9)) << name;
    double h = entropy(d.p);
    EXPECT_NEAR(h, d.entropy, 1e-9);
    // Equality rows with a single atom pin it to zero; sample the rest.
    std::vector<bool> pinned(cs.atom_count, false);
    for (const auto& r : cs.rows) {
      if (r.kind != LinearConstraint::Kind::Eq || r.rhs != 0) continue;
      int nz = 0;
      std::size_t at = 0;
      for (std::size_t j = 0; j < cs.atom_count; ++j)
        if (r.coeffs[j] != 0) ++nz, at = j;
      if (nz == 1) pinned[at] = true;
    }
    int accepted = 0;
    std::vector<double> p(cs.atom_count);
    for (long tries = 0; accepted < 10000 && tries < 20000000; ++tries) {
      double s = 0;
      for (std::size_t j = 0; j < p.size(); ++j) s += (p[j] = pinned[j] ? 0.0 : expo(rng));
      for (auto& x : p) x /= s;
      if (!feasible(cs, p, 0)) continue;
      ++accepted;
      ASSERT_LE(entropy(p), h + 1e-9) << name;
    }
    EXPECT_EQ(accepted, 10000) << name;
  }
}

TEST(Maxent, EntropyBounds) {
  for (const char* name : {"white", "red_blue", "hepatitis", "black_clyde", "maxent_example", "tweety"}) {
    KnowledgeBase kb = rwtest::corpus_kb(name);
    ConstraintSet cs = constraints_from_kb(kb.vocab, kb.formula);
    AtomDistribution d = maxent_point(cs);
    double k = static_cast<double>(kb.vocab.predicates().size());
    EXPECT_GE(d.entropy, 0);
    EXPECT_LE(d.entropy, k * std::log(2.0) + 1e-12);
    if (cs.rows.empty())
      EXPECT_NEAR(d.entropy, k * std::log(2.0), 1e-9) << name;
    else
      EXPECT_LT(d.entropy, k * std::log(2.0) - 1e-6) << name;
  }
}

TEST(Maxent, PermutationEquivariance) {
  const std::string body =
      "const Clyde;\nprop{Black(x) | Bird(x)}[x] ~=[1] 0.2.\nprop{Bird(x)}[x] ~=[2] 0.1.\nprop{Big(x) | Black(x)}[x] ~=[3] 0.3.\n";
  KnowledgeBase a = parse_kb("predicate Bird/1, Black/1, Big/1;\n" + body);
  KnowledgeBase b = parse_kb("predicate Big/1, Black/1, Bird/1;\n" + body);
  AtomDistribution pa = maxent_point(constraints_from_kb(a.vocab, a.formula));
  AtomDistribution pb = maxent_point(constraints_from_kb(b.vocab, b.formula));
  auto aa = atoms(a.vocab), ab = atoms(b.vocab);
  for (const auto& x : aa) {
    std::vector<bool> flipped(x.positive.rbegin(), x.positive.rend());
    for (const auto& y : ab)
      if (y.positive == flipped) EXPECT_NEAR(pa.p[x.index], pb.p[y.index], 1e-9);
  }
  for (const char* q : {"Black(Clyde)", "Big(Clyde)", "Bird(Clyde) and not Big(Clyde)"})
    EXPECT_NEAR(maxent_degree(a.vocab, a.formula, parse_formula(q, a.vocab)).value,
                maxent_degree(b.vocab, b.formula, parse_formula(q, b.vocab)).value, 1e-9)
        << q;
}

TEST(Maxent, InfeasibleAndZeroMass) {
  KnowledgeBase bad = parse_kb("predicate P/1;\nconst c;\nprop{P(x)}[x] ~=[1] 0.3.\nprop{P(x)}[x] ~=[2] 0.6.\n");
  EXPECT_THROW(maxent_point(constraints_from_kb(bad.vocab, bad.formula)), Infeasible);
  KnowledgeBase zero = parse_kb("predicate P/1, Q/1;\nconst c;\nprop{P(x)}[x] ~=[1] 0.\nP(c).\n");
  EXPECT_THROW(maxent_degree(zero.vocab, zero.formula, parse_formula("Q(c)", zero.vocab)), ZeroMassContext);
  KnowledgeBase nixon = rwtest::corpus_kb("nixon_neutral");
  EXPECT_THROW(maxent_degree(nixon.vocab, nixon.formula, parse_formula("Pacifist(Nixon)", nixon.vocab)),
               ZeroMassContext);
  KnowledgeBase zoo = rwtest::corpus_kb("zookeeper_eric");
  EXPECT_THROW(constraints_from_kb(zoo.vocab, zoo.formula), UnsupportedFeature);
}

TEST(Maxent, DefaultLimitsThroughTolerances) {
  KnowledgeBase tw = rwtest::corpus_kb("tweety");
  MaxentLimit l = maxent_limit(tw.vocab, tw.formula, parse_formula("not Fly(Tweety)", tw.vocab), std::nullopt,
                               default_maxent_taus());
  EXPECT_TRUE(l.converged);
  ASSERT_TRUE(l.value);
  EXPECT_GT(*l.value, 0.999);
}

TEST(Maxent, GmpTranslationReachesOne) {
  std::vector<std::string> letters = {"Bird", "Penguin", "Fly"};
  std::vector<PropositionalRule> rules = {parse_default_rule("Penguin -> Bird", letters),
                                          parse_default_rule("Bird -> Fly", letters),
                                          parse_default_rule("Penguin -> not Fly", letters)};
  GmpTranslation g = gmp_translate(letters, rules, parse_letters("Penguin", letters));
  Formula q = Formula::negation(Formula::predicate("Fly", {Term::constant(g.constant)}));
  MaxentLimit l = maxent_limit(g.vocab, g.kb, q, g.query_context, taus_to(12));
  ASSERT_TRUE(l.value);
  EXPECT_NEAR(*l.value, 1.0, 1e-6);
}

TEST(Maxent, SharedIndexConflictSettlesAtThreeQuarters) {
  // With one shared tolerance the three rules trade off at fixed ratios and
  // the answer tends to 3/4 rather than to 1.
  KnowledgeBase kb = parse_kb(kGeffnerShared);
  MaxentLimit l = maxent_limit(kb.vocab, kb.formula, parse_formula("Q(c)", kb.vocab), std::nullopt,
                               default_maxent_taus());
  ASSERT_TRUE(l.value);
  EXPECT_NEAR(*l.value, 0.75, 0.01);
}

TEST(Maxent, DistinctIndexConflictIsNonrobust) {
  KnowledgeBase kb = parse_kb(kGeffnerDistinct);
  MaxentVerdict v = maxent_entails(kb.vocab, kb.formula, parse_formula("Q(c)", kb.vocab), std::nullopt,
                                   default_maxent_taus(), {{{1, 1}, {2, 2}, {3, 1}}, {{1, 2}, {2, 1}, {3, 1}}});
  EXPECT_EQ(v.verdict, Verdict::Nonrobust);
}

TEST(Maxent, ConcentrationAgainstCounting) {
  // Kept tolerances make the comparison like for like: the counts at a fixed
  // tolerance concentrate on the maxent point of S(KB[tau]). Tolerances and
  // sizes are picked so every bound of S(KB[tau]) is a lattice point at each
  // N; otherwise the gap oscillates with the rounding of the boundary.
  struct Case {
    const char* kb;
    const char* query;
    std::map<unsigned, Rational> tol;
    std::vector<unsigned> sizes;
  };
  const std::vector<Case> cases = {
      {"hepatitis", "Hep(Eric)", {{1, Rational(1, 8)}}, {40, 48, 56, 64}},
      {"flying_bird", "Bird(Opus)", {{1, Rational(1, 8)}}, {40, 48, 56, 64}},
      {"black_clyde", "Black(Clyde)", {{1, Rational(3, 10)}, {2, Rational(1, 10)}}, {20, 30, 40, 50, 60}},
      {"maxent_example", "P2(c)", {{1, Rational(1, 10)}}, {30, 40, 50, 60}},
      {"chirps", "Chirps(Tweety)", {{1, Rational(1, 10)}, {2, Rational(1, 10)}}, {30, 40, 50, 60}},
      {"tay_sachs", "TS(Eric)", {{1, Rational(2, 25)}}, {10, 20, 30}},
      {"moody_magpie", "Chirps(Tweety)", {{1, Rational(1, 10)}, {2, Rational(1, 5)}}, {10, 15, 20}},
  };
  for (const Case& c : cases) {
    KnowledgeBase kb = rwtest::corpus_kb(c.kb);
    Formula q = parse_formula(c.query, kb.vocab);
    ToleranceVector tol(c.tol);
    double me = maxent_degree(kb.vocab, kb.formula, q, std::nullopt, tol).value;
    std::vector<double> gaps;
    for (unsigned N : c.sizes) {
      CondProb p = conditional_probability(kb.vocab, N, tol, q, kb.formula);
      ASSERT_TRUE(p.defined) << c.kb << " N=" << N;
      gaps.push_back(std::abs(p.value.get_d() - me));
    }
    EXPECT_LE(gaps.back(), 0.1) << c.kb;
    for (std::size_t i = gaps.size() - 3; i + 1 < gaps.size(); ++i)
      EXPECT_LE(gaps[i + 1], gaps[i] + 1e-12) << c.kb << " gaps " << gaps[i] << " -> " << gaps[i + 1];
  }
}
