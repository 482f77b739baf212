#pragma once

// From the approximate language to the exact one, and from there to ground
// formulas with concrete tolerances.

#include <map>
#include <set>
#include <string>

#include "rw/logic.hpp"

namespace rw {

/// tau_i for each tolerance index i; every value strictly positive.
class ToleranceVector {
 public:
  ToleranceVector() = default;
  explicit ToleranceVector(std::map<unsigned, Rational> values);

  /// The same tau for every index in `indices`.
  static ToleranceVector uniform(const std::set<unsigned>& indices, Rational tau);

  void set(unsigned index, Rational tau);
  bool has(unsigned index) const { return values_.count(index) != 0; }
  const Rational& at(unsigned index) const;
  const std::map<unsigned, Rational>& values() const noexcept { return values_; }

  /// "1:1/4,2:1/16"
  std::string str() const;

  bool operator==(const ToleranceVector&) const = default;

 private:
  std::map<unsigned, Rational> values_;
};

/// Rewrites every ~=_i / <~_i comparison into <= against eps_i, then clears
/// the conditional proportions of each comparison by multiplying both sides
/// with the denominators. Applied recursively inside proportion bodies.
ExactFormula translate_to_exact(const Formula& f);

/// Replaces every eps_i leaf by the literal tau_i. Throws SymbolError when
/// an index has no tolerance.
ExactFormula instantiate_tolerances(const ExactFormula& f, const ToleranceVector& tol);

/// translate_to_exact followed by instantiate_tolerances.
Formula ground(const Formula& f, const ToleranceVector& tol);

/// Replaces exists! and exists_exactly by first-order formulas over
/// equality. Fresh variables are named "%1", "%2", ... and never clash with
/// parsed names.
Formula desugar(const Formula& f);

}  // namespace rw
