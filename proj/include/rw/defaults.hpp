#pragma once

// Default reasoning on top of degrees of belief: |~ entailment, Dempster's
// combination function, and the property harness over the golden corpus.

#include <optional>
#include <string>
#include <vector>

#include "rw/limits.hpp"
#include "rw/maxent.hpp"
#include "rw/rational.hpp"

namespace rw {

using DefaultRule = PropositionalRule;

/// Parses "P and S -> not Q" over the given letters. "[i]" after the arrow
/// sets the rule's index ("P -> Q [2]"); the default is 1.
DefaultRule parse_default_rule(const std::string& text, const std::vector<std::string>& letters);

/// Parses a propositional formula over the letters as a formula in x.
Formula parse_letters(const std::string& text, const std::vector<std::string>& letters);

enum class Verdict { Yes, No, Nonrobust, Unknown };

const char* verdict_name(Verdict v);

struct EntailmentVerdict {
  Verdict verdict = Verdict::Unknown;
  BeliefEstimate estimate;
  std::vector<std::string> diagnostics;
};

/// kb |~ phi by counting: yes when the estimate converges to a value within
/// delta_eps of 1, no when it converges elsewhere, nonrobust when the probes
/// disagree, unknown otherwise.
EntailmentVerdict default_entails(const Vocabulary& vocab, const Formula& kb, const Formula& phi,
                                  const Schedule& schedule, const Thresholds& thresholds = {},
                                  const CountOptions& opts = {});

struct MaxentVerdict {
  Verdict verdict = Verdict::Unknown;
  MaxentLimit limit;
  std::vector<MaxentLimit> probes;
  std::vector<std::string> diagnostics;
};

/// kb |~ phi through maxent_limit, with one extra run per entry of `probes`
/// (tolerance powers per index). Disagreeing probes give nonrobust.
MaxentVerdict maxent_entails(const Vocabulary& vocab, const Formula& kb, const Formula& phi,
                             const std::optional<Formula>& context, const std::vector<Rational>& taus,
                             const std::vector<std::map<unsigned, unsigned>>& probes = {},
                             const Thresholds& thresholds = {});

/// The tolerance sequence 4^-2, 4^-3, ..., 4^-(k+1).
std::vector<Rational> default_maxent_taus(unsigned k = 6);

/// prod a_i / (prod a_i + prod (1 - a_i)). Throws UndefinedInput when some
/// a_i is 0 and another is 1, or when the list is empty.
Rational dempster_combine(const std::vector<Rational>& alphas);

struct PropertyCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  std::vector<PropertyCheck> checks;
  bool passed() const;
};

struct SuiteConfig {
  std::string corpus_dir = "corpus";
  CountOptions count;
  Thresholds thresholds;
};

/// "klm": KLM properties and exact finite-N identities over curated corpus
/// triples. "corpus": every golden case against its expectation. Throws
/// Error for another suite name.
SuiteReport run_property_suite(const std::string& suite, const SuiteConfig& config = {});

}  // namespace rw
