#pragma once

// Golden corpus: corpus/<name>.rwkb plus corpus/<name>.expect.json.
//
//   {
//     "query": "Hep(Eric)",
//     "method": "count" | "entails" | "maxent" | "maxent-limit" | "consistency",
//     "context": "Jaun(Eric)",                      (maxent methods, optional)
//     "expected": {
//       "value": "4/5", "tolerance": "1/20",        (estimate within tolerance)
//       "interval": ["7/10", "4/5"],                (estimate inside, closed)
//       "below": "9/10",                            (estimate strictly below)
//       "status": "converged",                      (count)
//       "verdict": "yes",                           (entails, maxent-limit)
//       "consistency": "inconsistent-evidence"      (consistency)
//     },
//     "schedule": {"sizes": [2, 3, 4], "taus": ["1/4", "1/8"]},
//     "taus": ["1/16", "1/64"],                     (maxent-limit)
//     "probes": [{"1": 1, "2": 2}],                 (maxent-limit powers)
//     "note": "free text"
//   }

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "rw/defaults.hpp"
#include "rw/limits.hpp"
#include "rw/parser.hpp"

namespace rw {

struct Expectation {
  std::optional<mpq_class> value;
  mpq_class tolerance{1, 20};
  std::optional<std::pair<mpq_class, mpq_class>> interval;
  std::optional<mpq_class> below;
  std::optional<std::string> status;
  std::optional<std::string> verdict;
  std::optional<std::string> consistency;
};

struct CorpusCase {
  std::string name;
  std::filesystem::path kb_path;
  std::string kb_text;
  KnowledgeBase kb;
  std::string query_text;
  Formula query;
  std::optional<std::string> context_text;
  std::optional<Formula> context;
  std::string method = "count";
  std::optional<Schedule> schedule;  // overrides the default schedule
  std::vector<Rational> taus;        // maxent-limit sequence
  std::vector<std::map<unsigned, unsigned>> probes;
  Expectation expected;
  std::string note;
};

/// Loads <dir>/<name>.rwkb and its expectation. Throws Error on bad input.
CorpusCase load_case(const std::filesystem::path& dir, const std::string& name);

/// Every case in the directory, sorted by name.
std::vector<CorpusCase> load_corpus(const std::filesystem::path& dir);

struct CaseResult {
  std::string name;
  std::string method;
  bool passed = false;
  std::optional<mpq_class> value;   // exact estimate when counting
  std::optional<double> real_value; // maxent value
  std::string outcome;              // status, verdict or consistency name
  std::string detail;
};

CaseResult run_case(const CorpusCase& c, const CountOptions& opts = {}, const Thresholds& thresholds = {});

/// The case's schedule override, or default_schedule.
Schedule schedule_for(const CorpusCase& c);

}  // namespace rw
