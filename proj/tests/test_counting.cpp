#include <gtest/gtest.h>

#include "rw/counting.hpp"
#include "rw/errors.hpp"
#include "rw/printer.hpp"
#include "support.hpp"

using namespace rw;

namespace {

CountOptions naive(unsigned threads = 1) {
  CountOptions o;
  o.method = Method::Naive;
  o.threads = threads;
  o.budget = std::uint64_t{1} << 26;
  return o;
}

CountOptions unary() {
  CountOptions o;
  o.method = Method::Unary;
  return o;
}

mpq_class frac(long a, long b) {
  mpq_class q(a, b);
  q.canonicalize();
  return q;
}

ToleranceVector uniform(const Formula& f, Rational tau) { return ToleranceVector::uniform(tolerance_indices(f), tau); }

const std::vector<std::string> kUnaryCorpus = {"black_clyde", "chirps",       "dempster",      "flying_bird",
                                               "hepatitis",   "independence", "lottery",       "maxent_example",
                                               "nixon_shared", "poole",       "red_blue",      "tweety",
                                               "white",       "yellow_penguin", "exactly_seven", "nixon_conflict"};

}  // namespace

TEST(Counting, TotalWorlds) {
  Vocabulary v = rwtest::FormulaGen::vocab();
  for (unsigned N = 1; N <= 4; ++N) {
    mpz_class want = 1;
    mpz_pow_ui(want.get_mpz_t(), mpz_class(2).get_mpz_t(), N + N + N * N);
    want *= N * N;
    EXPECT_EQ(total_worlds(v, N), want);
  }
}

TEST(Counting, NaiveMatchesReferenceEvaluator) {
  Vocabulary v = rwtest::FormulaGen::vocab();
  rwtest::FormulaGen gen(101);
  ToleranceVector tol = ToleranceVector::uniform({1, 2}, Rational(1, 4));
  for (int i = 0; i < 150; ++i) {
    Formula f = gen.formula(3);
    for (unsigned N = 1; N <= 2; ++N)
      ASSERT_EQ(count_worlds(v, N, tol, f, naive()).count, rwtest::brute_count(v, N, tol, f)) << print_formula(f);
  }
  for (const char* name : {"hepatitis", "lottery", "unique_names", "white", "tweety"}) {
    KnowledgeBase kb = rwtest::corpus_kb(name);
    ToleranceVector t = uniform(kb.formula, Rational(1, 4));
    for (unsigned N = 1; N <= 3; ++N)
      EXPECT_EQ(count_worlds(kb.vocab, N, t, kb.formula, naive()).count,
                rwtest::brute_count(kb.vocab, N, t, kb.formula))
          << name << " N=" << N;
  }
}

TEST(Counting, UnaryMatchesNaive) {
  const std::vector<Rational> taus = {Rational(1, 4), Rational(1, 8), Rational(1, 16)};
  for (const auto& name : kUnaryCorpus) {
    KnowledgeBase kb = rwtest::corpus_kb(name);
    ASSERT_TRUE(kb.vocab.is_unary()) << name;
    for (unsigned N = 2; N <= 4; ++N)
      for (const auto& tau : taus) {
        ToleranceVector t = uniform(kb.formula, tau);
        WorldCount a = count_worlds(kb.vocab, N, t, kb.formula, naive(4));
        WorldCount b = unary_count(kb.vocab, N, t, kb.formula, unary());
        EXPECT_EQ(a.count, b.count) << name << " N=" << N << " tau=" << tau.str();
        EXPECT_EQ(a.total, b.total);
      }
  }
}

TEST(Counting, UnaryRejectsBinaryVocabulary) {
  KnowledgeBase kb = rwtest::corpus_kb("zookeeper_eric");
  EXPECT_THROW(unary_count(kb.vocab, 2, uniform(kb.formula, Rational(1, 4)), kb.formula), UnsupportedFeature);
}

TEST(Counting, Complementarity) {
  for (const auto& name : rwtest::corpus_names()) {
    KnowledgeBase kb = rwtest::corpus_kb(name);
    ToleranceVector t = uniform(kb.formula, Rational(1, 4));
    for (unsigned N = 1; N <= 4; ++N) {
      CountOptions o = naive(4);
      o.budget = std::uint64_t{1} << 24;
      try {
        WorldCount a = count_worlds(kb.vocab, N, t, kb.formula, o);
        WorldCount b = count_worlds(kb.vocab, N, t, Formula::negation(kb.formula), o);
        EXPECT_EQ(a.count + b.count, a.total) << name << " N=" << N;
        EXPECT_LE(a.count, a.total);
        EXPECT_GE(a.count, 0);
      } catch (const BudgetExceeded&) {
        EXPECT_GE(N, 3u) << name;
      }
    }
  }
}

TEST(Counting, LogicalEquivalenceInvariance) {
  KnowledgeBase kb = rwtest::corpus_kb("tweety");
  const Vocabulary& v = kb.vocab;
  Formula psi = parse_formula("Fly(Tweety)", v);
  Formula taut = Formula::disjunction(psi, Formula::negation(psi));
  std::vector<std::pair<Formula, Formula>> pairs = {
      {kb.formula, Formula::conjunction(kb.formula, taut)},
      {kb.formula, Formula::negation(Formula::negation(kb.formula))},
      {parse_formula("forall x (Penguin(x) => Bird(x))", v), parse_formula("not exists x (Penguin(x) and not Bird(x))", v)},
      {parse_formula("Bird(Tweety) and Fly(Tweety)", v), parse_formula("Fly(Tweety) and Bird(Tweety)", v)},
  };
  ToleranceVector t = ToleranceVector::uniform({1, 2}, Rational(1, 8));
  for (const auto& [a, b] : pairs)
    for (unsigned N = 2; N <= 6; ++N)
      EXPECT_EQ(count_worlds(v, N, t, a).count, count_worlds(v, N, t, b).count) << print_formula(b) << " N=" << N;
}

TEST(Counting, ConditioningIdentity) {
  struct Case {
    const char* kb;
    const char* phi;
    const char* theta;
  };
  for (const Case& c : {Case{"hepatitis", "Hep(Eric)", "exists x (Hep(x) and not Jaun(x))"},
                        Case{"tweety", "Fly(Tweety)", "Bird(Tweety)"},
                        Case{"lottery", "Winner(c)", "exists x (Ticket(x) and not Winner(x))"},
                        Case{"black_clyde", "Black(Clyde)", "Bird(Clyde)"},
                        Case{"unique_names", "c1 = c2", "c2 = c3"}}) {
    KnowledgeBase kb = rwtest::corpus_kb(c.kb);
    const Vocabulary& v = kb.vocab;
    Formula phi = parse_formula(c.phi, v), theta = parse_formula(c.theta, v);
    ToleranceVector t = uniform(kb.formula, Rational(1, 4));
    int checked = 0;
    for (unsigned N = 2; N <= 5; ++N) {
      CondProb pf = conditional_probability(v, N, t, phi, kb.formula);
      CondProb pt = conditional_probability(v, N, t, theta, kb.formula);
      CondProb pnt = conditional_probability(v, N, t, Formula::negation(theta), kb.formula);
      CondProb a = conditional_probability(v, N, t, phi, Formula::conjunction(kb.formula, theta));
      CondProb b = conditional_probability(v, N, t, phi, Formula::conjunction(kb.formula, Formula::negation(theta)));
      if (!pf.defined) continue;
      mpq_class rhs = 0;
      if (a.defined) rhs += a.value * pt.value;
      if (b.defined) rhs += b.value * pnt.value;
      EXPECT_EQ(pf.value, rhs) << c.kb << " N=" << N;
      EXPECT_EQ(pt.value + pnt.value, 1);
      ++checked;
    }
    EXPECT_GT(checked, 0) << c.kb;
  }
}

TEST(Counting, IndependenceFactorizes) {
  // Vocabularies {Hep, Jaun} and {Over60, Patient} share only Eric.
  KnowledgeBase all = rwtest::corpus_kb("independence");
  KnowledgeBase one = parse_kb(
      "predicate Hep/1, Jaun/1;\nconst Eric;\nJaun(Eric).\nprop{Hep(x) | Jaun(x)}[x] ~=[1] 0.8.\n");
  KnowledgeBase two = parse_kb(
      "predicate Over60/1, Patient/1;\nconst Eric;\nprop{Over60(x) | Patient(x)}[x] ~=[5] 0.4.\nPatient(Eric).\n");
  Formula q1 = parse_formula("Hep(Eric)", one.vocab), q2 = parse_formula("Over60(Eric)", two.vocab);
  Formula q = parse_formula("Hep(Eric) and Over60(Eric)", all.vocab);
  for (const auto& tau : {Rational(1, 4), Rational(1, 8)}) {
    ToleranceVector t = ToleranceVector::uniform({1, 5}, tau);
    for (unsigned N = 2; N <= 5; ++N) {
      CondProb joint = conditional_probability(all.vocab, N, t, q, all.formula);
      CondProb p1 = conditional_probability(one.vocab, N, ToleranceVector::uniform({1}, tau), q1, one.formula);
      CondProb p2 = conditional_probability(two.vocab, N, ToleranceVector::uniform({5}, tau), q2, two.formula);
      ASSERT_EQ(joint.defined, p1.defined && p2.defined);
      if (joint.defined) EXPECT_EQ(joint.value, p1.value * p2.value) << "N=" << N << " tau=" << tau.str();
    }
  }
}

TEST(Counting, DirectInferenceInterval) {
  KnowledgeBase kb = rwtest::corpus_kb("hepatitis");
  Formula q = parse_formula("Hep(Eric)", kb.vocab);
  for (const auto& tau : {Rational(1, 8), Rational(1, 16)}) {
    ToleranceVector t = ToleranceVector::uniform({1}, tau);
    mpq_class lo = (Rational(4, 5) - tau).to_mpq(), hi = (Rational(4, 5) + tau).to_mpq();
    for (unsigned N = 2; N <= 12; ++N) {
      CondProb p = conditional_probability(kb.vocab, N, t, q, kb.formula);
      if (p.defined) {
        EXPECT_GE(p.value, lo) << "N=" << N;
        EXPECT_LE(p.value, hi) << "N=" << N;
      }
    }
  }
  KnowledgeBase iv = parse_kb(
      "predicate Hep/1, Jaun/1;\nconst Eric;\nJaun(Eric).\n"
      "0.6 <~[1] prop{Hep(x) | Jaun(x)}[x].\nprop{Hep(x) | Jaun(x)}[x] <~[1] 0.7.\n");
  Rational tau(1, 10);
  for (unsigned N = 2; N <= 12; ++N) {
    CondProb p = conditional_probability(iv.vocab, N, ToleranceVector::uniform({1}, tau), q, iv.formula);
    if (!p.defined) continue;
    EXPECT_GE(p.value, mpq_class(1, 2));
    EXPECT_LE(p.value, mpq_class(4, 5));
  }
}

TEST(Counting, ToleranceMonotonicity) {
  // Every approximate comparison in these KBs is a positive conjunct.
  const std::vector<Rational> taus = {Rational(1, 16), Rational(1, 8), Rational(1, 4), Rational(1, 2)};
  for (const char* name : {"hepatitis", "black_clyde", "chirps", "nixon_shared", "independence", "tweety", "dempster"}) {
    KnowledgeBase kb = rwtest::corpus_kb(name);
    for (unsigned N = 2; N <= 8; ++N) {
      mpz_class prev = 0;
      for (const auto& tau : taus) {
        mpz_class c = count_worlds(kb.vocab, N, uniform(kb.formula, tau), kb.formula).count;
        EXPECT_GE(c, prev) << name << " N=" << N << " tau=" << tau.str();
        prev = c;
      }
    }
  }
}

TEST(Counting, ThreadCountDoesNotChangeResults) {
  KnowledgeBase kb = rwtest::corpus_kb("zookeeper_eric");
  ToleranceVector t = uniform(kb.formula, Rational(1, 2));
  Formula q = parse_formula("Likes(Clyde, Eric)", kb.vocab);
  Formula f = Formula::conjunction(kb.formula, q);
  WorldCount base = count_worlds(kb.vocab, 3, t, f, naive(1));
  for (unsigned threads : {2u, 3u, 7u}) EXPECT_EQ(count_worlds(kb.vocab, 3, t, f, naive(threads)).count, base.count);
  KnowledgeBase h = rwtest::corpus_kb("hepatitis");
  CountOptions o = unary();
  WorldCount u1 = unary_count(h.vocab, 30, uniform(h.formula, Rational(1, 8)), h.formula, o);
  o.threads = 5;
  EXPECT_EQ(unary_count(h.vocab, 30, uniform(h.formula, Rational(1, 8)), h.formula, o).count, u1.count);
}

TEST(Counting, BudgetIsEnforced) {
  KnowledgeBase kb = rwtest::corpus_kb("zookeeper_eric");
  CountOptions o = naive();
  o.budget = 1000;
  try {
    count_worlds(kb.vocab, 3, uniform(kb.formula, Rational(1, 4)), kb.formula, o);
    FAIL() << "expected BudgetExceeded";
  } catch (const BudgetExceeded& e) {
    EXPECT_EQ(e.cap(), "1000");
    EXPECT_EQ(e.required(), naive_cost(kb.vocab, 3).get_str());
  }
  EXPECT_EQ(parse_budget("2^34"), std::uint64_t{1} << 34);
  EXPECT_EQ(parse_budget("12345"), 12345u);
  EXPECT_THROW(parse_budget("2^x"), Error);
  EXPECT_THROW(parse_budget("-5"), Error);
  EXPECT_THROW(parse_budget("0"), Error);
}

TEST(Counting, FunctionSymbolsAreRejected) {
  KnowledgeBase kb = parse_kb("predicate Rises/1;\nfunction next/1;\nconst d;\nRises(next(d)).\n");
  EXPECT_THROW(count_worlds(kb.vocab, 2, {}, kb.formula), UnsupportedFeature);
}

TEST(Counting, UniqueNamesClosedForm) {
  // N / (3N - 2) and 1/N, derived by hand from the equality patterns of
  // three constants.
  KnowledgeBase kb = rwtest::corpus_kb("unique_names");
  Formula q = parse_formula("c1 = c2", kb.vocab);
  for (unsigned N = 2; N <= 6; ++N) {
    EXPECT_EQ(conditional_probability(kb.vocab, N, {}, q, kb.formula).value, frac(N, 3 * N - 2));
    EXPECT_EQ(conditional_probability(kb.vocab, N, {}, q, Formula::truth()).value, frac(1, N));
  }
}
