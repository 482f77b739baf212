#include <gtest/gtest.h>

#include <regex>

#include "rw/corpus.hpp"
#include "rw/report.hpp"
#include "support.hpp"

using namespace rw;

namespace {

std::vector<std::string> keys(const Json& j) {
  std::vector<std::string> out;
  for (auto it = j.begin(); it != j.end(); ++it) out.push_back(it.key());
  return out;
}

bool is_rational(const Json& j) {
  static const std::regex re("^-?[0-9]+(/[0-9]+)?$");
  return j.is_string() && std::regex_match(j.get<std::string>(), re);
}

struct Evaluated {
  Schedule schedule;
  BeliefEstimate estimate;
};

Evaluated run(const std::string& name, unsigned threads) {
  CorpusCase c = load_case(rwtest::corpus_dir(), name);
  CountOptions o;
  o.threads = threads;
  Schedule s = schedule_for(c);
  return {s, degree_of_belief(c.kb.vocab, c.query, c.kb.formula, s, {}, o)};
}

}  // namespace

TEST(Report, RationalJson) {
  Json j = rational_json(mpq_class(4, 5));
  EXPECT_EQ(j["value"], "4/5");
  EXPECT_EQ(j["decimal"], "0.800000");
  EXPECT_EQ(rational_json(mpq_class(3))["value"], "3");
}

TEST(Report, EstimateJsonShape) {
  Evaluated r = run("nixon_conflict", 2);
  Json j = estimate_json("Pacifist(Nixon)", "nixon_conflict.rwkb", r.schedule, r.estimate, Method::Auto);
  EXPECT_EQ(keys(j), (std::vector<std::string>{"query", "kb_file", "method", "schedule", "grid", "stages", "probes",
                                               "estimate", "diagnostics"}));
  EXPECT_EQ(j["estimate"]["status"], "nonrobust");
  EXPECT_EQ(j["grid"].size(), r.schedule.sizes.size() * r.schedule.stages.size());
  for (const auto& g : j["grid"]) {
    EXPECT_EQ(keys(g).front(), "N");
    if (g["defined"].get<bool>()) {
      EXPECT_TRUE(is_rational(g["value"])) << g.dump();
      // The value is joint/kb reduced.
      mpq_class v(g["joint_count"].get<std::string>() + "/" + g["kb_count"].get<std::string>());
      v.canonicalize();
      EXPECT_EQ(mpq_class(g["value"].get<std::string>()), v);
    } else {
      EXPECT_TRUE(g["value"].is_null());
    }
  }
  EXPECT_EQ(j["probes"].size(), 2u);
  for (const auto& p : j["probes"]) EXPECT_EQ(keys(p).front(), "label");
}

TEST(Report, EstimateJsonIsDeterministic) {
  for (const char* name : {"hepatitis", "independence", "nixon_conflict"}) {
    Evaluated a = run(name, 1), b = run(name, 4), c = run(name, 1);
    std::string ja = estimate_json("q", "kb", a.schedule, a.estimate, Method::Auto).dump(2);
    EXPECT_EQ(ja, estimate_json("q", "kb", b.schedule, b.estimate, Method::Auto).dump(2)) << name;
    EXPECT_EQ(ja, estimate_json("q", "kb", c.schedule, c.estimate, Method::Auto).dump(2)) << name;
    EXPECT_EQ(estimate_text("q", a.schedule, a.estimate), estimate_text("q", b.schedule, b.estimate)) << name;
  }
}

TEST(Report, CountJson) {
  KnowledgeBase kb = rwtest::corpus_kb("white");
  ToleranceVector tol;
  WorldCount wc = count_worlds(kb.vocab, 3, tol, kb.formula);
  Json j = count_json(3, tol, wc, Method::Naive);
  EXPECT_EQ(keys(j), (std::vector<std::string>{"N", "tolerances", "method", "count", "total", "defined"}));
  EXPECT_EQ(j["method"], "exact");
  EXPECT_EQ(j["count"], wc.count.get_str());
  EXPECT_EQ(j["total"], total_worlds(kb.vocab, 3).get_str());
}

TEST(Report, MaxentJson) {
  KnowledgeBase kb = rwtest::corpus_kb("maxent_example");
  MaxentAnswer ans = maxent_degree(kb.vocab, kb.formula, parse_formula("P2(c)", kb.vocab));
  Json j = maxent_json(kb.vocab, "P2(c)", ans);
  EXPECT_EQ(keys(j), (std::vector<std::string>{"atoms", "constraints", "point", "forced_zero", "entropy", "query",
                                               "constant", "context", "context_mass", "query_answer", "kkt"}));
  ASSERT_EQ(j["point"].size(), 4u);
  double sum = 0;
  for (const auto& p : j["point"]) sum += p.get<double>();
  EXPECT_NEAR(sum, 1.0, 1e-9);
  EXPECT_NEAR(j["query_answer"].get<double>(), 0.3, 1e-6);
  EXPECT_EQ(j["atoms"][0]["label"], "P1 and P2");
  EXPECT_EQ(j.dump(), maxent_json(kb.vocab, "P2(c)", maxent_degree(kb.vocab, kb.formula, parse_formula("P2(c)", kb.vocab))).dump());
  EXPECT_NE(maxent_text(kb.vocab, "P2(c)", ans).find("0.3"), std::string::npos);
}

TEST(Report, SuiteJson) {
  SuiteReport rep;
  rep.suite = "klm";
  rep.checks = {{"a", true, "fine"}, {"b", false, "broken"}};
  Json j = suite_json(rep);
  EXPECT_EQ(keys(j), (std::vector<std::string>{"suite", "passed", "checks"}));
  EXPECT_FALSE(j["passed"].get<bool>());
  EXPECT_EQ(j["checks"][1]["detail"], "broken");
  std::string text = suite_text(rep);
  EXPECT_NE(text.find("FAIL b"), std::string::npos);
  EXPECT_NE(text.find("1/2 passed"), std::string::npos);
}
