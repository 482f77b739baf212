#pragma once

// Evidence about Pr_inf(query | kb) from a grid of exact values. The domain
// limit is taken inside each tolerance stage; stages then shrink tolerances.

#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "rw/counting.hpp"
#include "rw/translate.hpp"

namespace rw {

struct Schedule {
  std::vector<unsigned> sizes;                // strictly increasing
  std::vector<ToleranceVector> stages;        // pointwise strictly decreasing

  /// Throws Error unless nonempty and monotone as documented.
  void validate() const;

  /// The same tau for every index, one stage per entry of `taus`. With no
  /// indices the result has a single empty stage.
  static Schedule uniform(std::vector<unsigned> sizes, const std::vector<Rational>& taus,
                          const std::set<unsigned>& indices);
};

/// N in 2..8 for unary vocabularies and 2..5 otherwise; tau in 1/4, 1/8, 1/16
/// on every index used by kb or query.
Schedule default_schedule(const Vocabulary& vocab, const Formula& kb, const Formula& query);

struct Thresholds {
  Rational delta_n{1, 20};    // max spread inside a stage
  Rational delta_eps{1, 20};  // max drift between stages, and probe spread
};

enum class Status { Converged, Nonrobust, Undefined, BudgetLimited, Unconverged };

const char* status_name(Status s);

struct GridCell {
  unsigned n = 0;
  std::size_t stage = 0;
  CondProb p;
  bool budget_limited = false;
};

struct StageSummary {
  bool defined = false;       // some top-half cell defined
  mpq_class min, max;         // liminf / limsup proxies over the top half
  mpq_class representative;   // value at the largest defined N of the top half
  unsigned representative_n = 0;
};

struct Probe {
  std::string label;          // e.g. "eps2 x4"
  ToleranceVector tol;
  bool defined = false;
  mpq_class representative;
  unsigned representative_n = 0;
};

struct BeliefEstimate {
  std::vector<GridCell> grid;
  std::vector<StageSummary> stages;
  std::vector<Probe> probes;
  std::optional<mpq_class> value;
  Status status = Status::Undefined;
  std::vector<std::string> diagnostics;
};

BeliefEstimate degree_of_belief(const Vocabulary& vocab, const Formula& query, const Formula& kb,
                                const Schedule& schedule, const Thresholds& thresholds = {},
                                const CountOptions& opts = {});

enum class Consistency { ConsistentEvidence, InconsistentEvidence, Inconclusive };

const char* consistency_name(Consistency c);

struct ConsistencyReport {
  Consistency verdict = Consistency::Inconclusive;
  std::vector<GridCell> grid;     // p.kb_count holds #worlds(kb)
  std::vector<std::string> diagnostics;
};

ConsistencyReport eventually_consistent(const Vocabulary& vocab, const Formula& kb, const Schedule& schedule,
                                        const CountOptions& opts = {});

/// Decimal rendering with `digits` places (rounded toward zero).
std::string decimal(const mpq_class& q, int digits = 6);

}  // namespace rw
