#pragma once

// Maximum-entropy fast path for unary vocabularies: constraints on atom
// proportions, the entropy maximizer, and degrees of belief read off it.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "rw/logic.hpp"
#include "rw/translate.hpp"

namespace rw {

/// Atom j (0-based) asserts predicate i positively iff bit (k-1-i) of j is
/// clear: binary counting on predicate order with P before not-P.
struct Atom {
  std::size_t index = 0;
  std::vector<bool> positive;  // one entry per predicate, declaration order
  std::string label(const Vocabulary& vocab) const;
};

/// The 2^k atoms of a unary vocabulary with k >= 1 predicates.
std::vector<Atom> atoms(const Vocabulary& vocab);

/// sum_j coeffs[j] * p_j  (<= or =)  rhs
struct LinearConstraint {
  enum class Kind { Le, Eq };
  std::vector<mpq_class> coeffs;
  Kind kind = Kind::Eq;
  mpq_class rhs;
  std::string source;  // the KB conjunct it came from
};

struct ConstraintSet {
  Vocabulary vocab;                           // predicates only
  std::size_t atom_count = 0;
  std::vector<LinearConstraint> rows;         // simplex constraints implied
  std::map<std::string, Formula> facts;       // constant -> ground facts

  /// "p1 + p2 <= 3/10", atoms numbered from 1.
  std::string describe(const LinearConstraint& c) const;
};

/// Extracts S(KB). With `keep` unset the tolerances are dropped (each
/// approximate comparison becomes exact); with `keep` set the comparisons
/// keep their tau_i, giving S(KB[tau]). Throws UnsupportedFeature naming the
/// conjunct when a statement has another shape.
ConstraintSet constraints_from_kb(const Vocabulary& vocab, const Formula& kb,
                                  const std::optional<ToleranceVector>& keep = std::nullopt);

struct AtomDistribution {
  std::vector<double> p;
  double entropy = 0;
  std::vector<bool> forced_zero;       // p_j = 0 on every feasible point
  std::vector<bool> active;            // per constraint row: tight at p
  double stationarity = 0;             // KKT residual (max norm)
  double feasibility = 0;              // max constraint violation
  double complementarity = 0;          // max lambda_i * slack_i
  bool unique = true;                  // strict concavity of H
};

/// Entropy maximizer over the constraint set. Throws Infeasible.
AtomDistribution maxent_point(const ConstraintSet& c);

struct MaxentAnswer {
  double value = 0;
  double context_mass = 0;
  std::string constant;         // the individual the query is about
  Formula context;              // over the individual
  AtomDistribution point;
  ConstraintSet constraints;
};

/// sum over atoms of (query and context) / sum over atoms of context at the
/// maxent point. The context defaults to the KB's ground facts about the
/// query's constant. Throws ZeroMassContext when the context has no mass.
MaxentAnswer maxent_degree(const Vocabulary& vocab, const Formula& kb, const Formula& query,
                           const std::optional<Formula>& context = std::nullopt,
                           const std::optional<ToleranceVector>& keep = std::nullopt);

struct MaxentLimit {
  std::vector<Rational> taus;
  std::vector<std::optional<double>> values;   // nullopt on zero mass
  std::optional<double> value;                 // last defined value
  bool converged = false;                      // last two within tolerance
};

/// maxent_degree on S(KB[tau]) along a decreasing tau sequence (the same tau
/// on every index, or tau^power[i] on index i when `powers` is given).
MaxentLimit maxent_limit(const Vocabulary& vocab, const Formula& kb, const Formula& query,
                         const std::optional<Formula>& context, const std::vector<Rational>& taus, const std::map<unsigned, unsigned>& powers = {},
                         double tolerance = 1e-3);

/// One default rule "antecedent -> consequent" over propositional letters.
struct PropositionalRule {
  Formula antecedent;   // over 0-ary letters written as predicates of x
  Formula consequent;
  unsigned index = 1;
};

struct GmpTranslation {
  Vocabulary vocab;
  Formula kb;
  Formula query_context;   // psi_B(c)
  std::string constant;
};

/// Each letter p becomes a unary predicate P(x); each rule B -> C becomes
/// ||psi_C(x) | psi_B(x)||_x ~=_i 1 with the rule's index; the context
/// becomes a fact about the constant c.
GmpTranslation gmp_translate(const std::vector<std::string>& letters, const std::vector<PropositionalRule>& rules,
                             const Formula& context);

}  // namespace rw
