#include <gtest/gtest.h>

#include <algorithm>

#include "rw/corpus.hpp"
#include "rw/defaults.hpp"
#include "rw/errors.hpp"
#include "rw/printer.hpp"
#include "support.hpp"

using namespace rw;

namespace {

Rational r(long n, long d = 1) { return Rational(n, d); }

// Independent two-argument form of the combination rule.
mpq_class delta2(const mpq_class& a, const mpq_class& b) {
  mpq_class v = a * b / (a * b + (1 - a) * (1 - b));
  v.canonicalize();
  return v;
}

std::vector<Rational> tenths() {
  std::vector<Rational> out;
  for (int k = 0; k <= 10; ++k) out.push_back(r(k, 10));
  return out;
}

}  // namespace

TEST(Dempster, KnownValues) {
  EXPECT_EQ(dempster_combine({r(4, 5), r(4, 5)}), r(16, 17));
  for (const auto& a : tenths()) {
    EXPECT_EQ(dempster_combine({a, r(1, 2)}), a);
    EXPECT_EQ(dempster_combine({a}), a);
  }
  for (const auto& b : tenths())
    if (b > r(0)) EXPECT_EQ(dempster_combine({r(1), b}), r(1));
}

TEST(Dempster, SymmetricMonotoneAndBounded) {
  const auto grid = tenths();
  for (const auto& a : grid)
    for (const auto& b : grid)
      for (const auto& c : grid) {
        std::vector<Rational> v{a, b, c};
        bool mixed = std::count(v.begin(), v.end(), r(0)) && std::count(v.begin(), v.end(), r(1));
        if (mixed) {
          EXPECT_THROW(dempster_combine(v), UndefinedInput);
          continue;
        }
        Rational d = dempster_combine(v);
        EXPECT_GE(d, r(0));
        EXPECT_LE(d, r(1));
        std::sort(v.begin(), v.end());
        do {
          ASSERT_EQ(dempster_combine(v), d);
        } while (std::next_permutation(v.begin(), v.end()));
        // Raising the first argument by a tenth never lowers the value.
        if (a < r(1) && !(b == r(0) || c == r(0))) {
          Rational up = a + r(1, 10);
          EXPECT_GE(dempster_combine({up, b, c}), d) << a.str() << " " << b.str() << " " << c.str();
        }
      }
}

TEST(Dempster, UndefinedInputs) {
  EXPECT_THROW(dempster_combine({}), UndefinedInput);
  EXPECT_THROW(dempster_combine({r(0), r(1)}), UndefinedInput);
  EXPECT_THROW(dempster_combine({r(1, 2), r(1), r(0)}), UndefinedInput);
  EXPECT_THROW(dempster_combine({r(3, 2)}), UndefinedInput);
  EXPECT_THROW(dempster_combine({r(-1, 2)}), UndefinedInput);
}

TEST(Dempster, FiniteDomainIntervalForNixon) {
  // Both statistics at 0.8 on one tolerance index. At every N where the
  // count is defined the belief lies between delta of the lowered and of the
  // raised statistics.
  KnowledgeBase kb = rwtest::corpus_kb("dempster");
  Formula q = parse_formula("Pacifist(Nixon)", kb.vocab);
  int defined = 0;
  for (Rational tau : {r(1, 4), r(1, 5), r(1, 8), r(1, 10)}) {
    ToleranceVector tol = ToleranceVector::uniform({1}, tau);
    mpq_class a = mpq_class(4, 5) - tau.to_mpq();
    mpq_class b = std::min<mpq_class>(mpq_class(4, 5) + tau.to_mpq(), 1);
    mpq_class lo = delta2(a, a), hi = delta2(b, b);
    for (unsigned N = 2; N <= 6; ++N) {
      CondProb p = conditional_probability(kb.vocab, N, tol, q, kb.formula);
      if (!p.defined) continue;
      ++defined;
      EXPECT_GE(p.value, lo) << "N=" << N << " tau=" << tau.str();
      EXPECT_LE(p.value, hi) << "N=" << N << " tau=" << tau.str();
    }
  }
  EXPECT_GT(defined, 0);
}

TEST(Defaults, ParseDefaultRule) {
  std::vector<std::string> letters{"P", "S", "Q"};
  DefaultRule rule = parse_default_rule("P and S -> not Q [2]", letters);
  EXPECT_EQ(rule.index, 2u);
  EXPECT_EQ(print_formula(rule.antecedent), print_formula(parse_letters("P and S", letters)));
  EXPECT_EQ(print_formula(rule.consequent), print_formula(parse_letters("not Q", letters)));
  EXPECT_EQ(parse_default_rule("P -> Q", letters).index, 1u);
  EXPECT_THROW(parse_default_rule("P and Q", letters), ParseError);
  EXPECT_THROW(parse_default_rule("P -> Q [0]", letters), ParseError);
  EXPECT_THROW(parse_default_rule("P -> Q [two]", letters), ParseError);
  EXPECT_THROW(parse_default_rule("P -> R", letters), Error);
}

TEST(Defaults, CountingEntailment) {
  CorpusCase c = load_case(rwtest::corpus_dir(), "nixon_default");
  Schedule s = schedule_for(c);
  EntailmentVerdict yes = default_entails(c.kb.vocab, c.kb.formula, c.query, s);
  EXPECT_EQ(yes.verdict, Verdict::Yes);
  EXPECT_GE(*yes.estimate.value, mpq_class(19, 20));
  EntailmentVerdict no = default_entails(c.kb.vocab, c.kb.formula, Formula::negation(c.query), s);
  EXPECT_EQ(no.verdict, Verdict::No);
}

TEST(Defaults, VerdictConsistency) {
  // yes for phi forces no for not phi on the same schedule.
  struct Item {
    const char* kb;
    const char* phi;
  };
  for (const Item& it : {Item{"nixon_default", "Pacifist(Nixon)"}, Item{"nixon_shared", "Pacifist(Nixon)"},
                         Item{"white", "White(c)"}, Item{"lottery_someone", "exists x Winner(x)"},
                         Item{"hepatitis", "Hep(Eric)"}, Item{"nixon_conflict", "Pacifist(Nixon)"}}) {
    CorpusCase c = load_case(rwtest::corpus_dir(), it.kb);
    Formula phi = parse_formula(it.phi, c.kb.vocab);
    Schedule s = schedule_for(c);
    EntailmentVerdict a = default_entails(c.kb.vocab, c.kb.formula, phi, s);
    EntailmentVerdict b = default_entails(c.kb.vocab, c.kb.formula, Formula::negation(phi), s);
    if (a.verdict == Verdict::Yes) EXPECT_EQ(b.verdict, Verdict::No) << it.kb;
    if (b.verdict == Verdict::Yes) EXPECT_EQ(a.verdict, Verdict::No) << it.kb;
    EXPECT_FALSE(a.verdict == Verdict::Yes && b.verdict == Verdict::Yes) << it.kb;
    // Nonrobustness is symmetric under negation.
    EXPECT_EQ(a.verdict == Verdict::Nonrobust, b.verdict == Verdict::Nonrobust) << it.kb;
  }
}

TEST(Defaults, MaxentEntailment) {
  const auto taus = default_maxent_taus();
  ASSERT_EQ(taus.size(), 6u);
  EXPECT_EQ(taus.front(), r(1, 16));
  EXPECT_EQ(taus.back(), r(1, 16384));

  KnowledgeBase tweety = rwtest::corpus_kb("tweety");
  const Vocabulary& v = tweety.vocab;
  EXPECT_EQ(maxent_entails(v, tweety.formula, parse_formula("not Fly(Tweety)", v), std::nullopt, taus).verdict,
            Verdict::Yes);
  EXPECT_EQ(maxent_entails(v, tweety.formula, parse_formula("Fly(Tweety)", v), std::nullopt, taus).verdict,
            Verdict::No);

  // The drowning problem: irrelevant exceptional status does not block the
  // inheritance of an unrelated default.
  CorpusCase easy = load_case(rwtest::corpus_dir(), "easy_to_see");
  EXPECT_EQ(maxent_entails(easy.kb.vocab, easy.kb.formula, easy.query, easy.context, taus).verdict, Verdict::Yes);

  CorpusCase arm = load_case(rwtest::corpus_dir(), "broken_arm");
  EXPECT_EQ(maxent_entails(arm.kb.vocab, arm.kb.formula, arm.query, arm.context, taus).verdict, Verdict::Yes);
  Formula left = parse_formula("not LeftUsable(Eric)", arm.kb.vocab);
  EXPECT_NE(maxent_entails(arm.kb.vocab, arm.kb.formula, left, arm.context, taus).verdict, Verdict::Yes);
}

TEST(Defaults, SpecificityInterval) {
  KnowledgeBase chirps = rwtest::corpus_kb("chirps");
  double v = maxent_degree(chirps.vocab, chirps.formula, parse_formula("Chirps(Tweety)", chirps.vocab)).value;
  EXPECT_GE(v, 0.7 - 1e-9);
  EXPECT_LE(v, 0.8 + 1e-9);
  KnowledgeBase moody = rwtest::corpus_kb("moody_magpie");
  EXPECT_LT(maxent_degree(moody.vocab, moody.formula, parse_formula("Chirps(Tweety)", moody.vocab)).value, 0.9);
}

TEST(Defaults, KlmSuitePasses) {
  SuiteConfig cfg;
  cfg.corpus_dir = rwtest::corpus_dir().string();
  SuiteReport rep = run_property_suite("klm", cfg);
  EXPECT_EQ(rep.suite, "klm");
  for (const auto& c : rep.checks) EXPECT_TRUE(c.passed) << c.name << ": " << c.detail;
  auto has = [&](const std::string& part) {
    return std::any_of(rep.checks.begin(), rep.checks.end(),
                       [&](const PropertyCheck& c) { return c.name.find(part) != std::string::npos; });
  };
  for (const char* part : {"conditioning identity", "complementarity", "reflexivity: penguin", "right weakening: left broken", "or: ", "cut: ", "cautious monotonicity", "penguin |~ not flying"})
    EXPECT_TRUE(has(part)) << part;
  EXPECT_TRUE(rep.passed());
}

TEST(Defaults, UnknownSuite) {
  EXPECT_THROW(run_property_suite("nope"), Error);
}
