#pragma once

// Abstract syntax of the statistical language: first-order formulas extended
// with proportion expressions ||psi||_X, ||psi | theta||_X and the approximate
// comparisons ~=_i and <~_i. The same node types carry the exact language that
// comparisons are translated into (=, <=, tolerance leaves eps_i).

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rw/rational.hpp"

namespace rw {

struct Symbol {
  std::string name;
  unsigned arity = 0;
  bool operator==(const Symbol&) const = default;
};

/// Finite vocabulary. Declaration order is preserved and is significant: it
/// fixes the atom numbering of unary vocabularies and the world layout.
class Vocabulary {
 public:
  void add_predicate(const std::string& name, unsigned arity);
  void add_function(const std::string& name, unsigned arity);
  void add_constant(const std::string& name);

  std::optional<unsigned> predicate_arity(const std::string& name) const;
  std::optional<unsigned> function_arity(const std::string& name) const;
  bool has_constant(const std::string& name) const;
  bool declares(const std::string& name) const;

  const std::vector<Symbol>& predicates() const noexcept { return predicates_; }
  const std::vector<Symbol>& functions() const noexcept { return functions_; }
  const std::vector<std::string>& constants() const noexcept { return constants_; }

  /// Only unary predicates and constants.
  bool is_unary() const;

  /// Union with `other`; shared names must agree on category and arity.
  Vocabulary merged_with(const Vocabulary& other) const;

  /// Restriction to the given symbol names (order preserved).
  Vocabulary restricted_to(const std::set<std::string>& names) const;

  bool operator==(const Vocabulary&) const = default;

 private:
  std::vector<Symbol> predicates_;
  std::vector<Symbol> functions_;
  std::vector<std::string> constants_;
};

struct Term {
  enum class Kind { Variable, Constant, Apply };
  Kind kind = Kind::Variable;
  std::string name;
  std::vector<Term> args;

  static Term variable(std::string name);
  static Term constant(std::string name);
  static Term apply(std::string function, std::vector<Term> args);

  bool operator==(const Term&) const = default;
};

enum class FormulaKind {
  True,
  False,
  Predicate,      // symbol(args)
  Equal,          // args[0] = args[1]
  Not,
  And,
  Or,
  Implies,
  Iff,
  Forall,         // var, sub[0]
  Exists,
  ExistsUnique,
  ExistsExactly,  // count, var, sub[0]
  Compare,        // lhs op rhs
};

enum class CompareOp {
  ApproxEq,  // ~=_i
  ApproxLe,  // <~_i
  Eq,        // exact language only
  Le,        // exact language only
};

enum class ExprKind {
  Literal,
  Tolerance,    // eps_i, exact language only
  Proportion,   // ||body[0]||_vars
  Conditional,  // ||body[0] | body[1]||_vars
  Sum,
  Product,
  Difference,   // exact language only
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Formula {
  FormulaKind kind = FormulaKind::True;
  std::string symbol;
  std::vector<Term> args;
  std::vector<Formula> sub;
  std::string var;
  unsigned count = 0;
  CompareOp op = CompareOp::ApproxEq;
  unsigned index = 0;
  ExprPtr lhs;
  ExprPtr rhs;

  static Formula truth();
  static Formula falsity();
  static Formula predicate(std::string name, std::vector<Term> args);
  static Formula equal(Term a, Term b);
  static Formula negation(Formula f);
  static Formula conjunction(Formula a, Formula b);
  static Formula disjunction(Formula a, Formula b);
  static Formula implication(Formula a, Formula b);
  static Formula biconditional(Formula a, Formula b);
  static Formula forall(std::string var, Formula body);
  static Formula exists(std::string var, Formula body);
  static Formula exists_unique(std::string var, Formula body);
  static Formula exists_exactly(unsigned n, std::string var, Formula body);
  static Formula compare(ExprPtr lhs, CompareOp op, ExprPtr rhs, unsigned index = 0);

  /// Left-folded conjunction; `true` when empty.
  static Formula all_of(const std::vector<Formula>& parts);
  /// Left-folded disjunction; `false` when empty.
  static Formula any_of(const std::vector<Formula>& parts);

  bool is_quantifier() const noexcept;
  bool is_binary_connective() const noexcept;
};

bool operator==(const Formula& a, const Formula& b);

struct Expr {
  ExprKind kind = ExprKind::Literal;
  Rational value;
  unsigned index = 0;
  std::vector<Formula> body;       // [psi] or [psi, theta]
  std::vector<std::string> vars;   // bound by the subscript, in written order
  ExprPtr a;
  ExprPtr b;

  static ExprPtr literal(Rational v);
  static ExprPtr tolerance(unsigned index);
  static ExprPtr proportion(Formula psi, std::vector<std::string> vars);
  static ExprPtr conditional(Formula psi, Formula theta, std::vector<std::string> vars);
  static ExprPtr sum(ExprPtr a, ExprPtr b);
  static ExprPtr product(ExprPtr a, ExprPtr b);
  static ExprPtr difference(ExprPtr a, ExprPtr b);
};

bool operator==(const Expr& a, const Expr& b);
bool same_expr(const ExprPtr& a, const ExprPtr& b);

/// A formula of the exact language: no ~= / <~ comparisons and no conditional
/// proportions anywhere (including inside proportion bodies).
class ExactFormula {
 public:
  ExactFormula() = default;
  /// Checks the invariant; throws rw::Error when violated.
  explicit ExactFormula(Formula f);

  const Formula& root() const noexcept { return root_; }
  bool operator==(const ExactFormula& o) const { return root_ == o.root_; }

 private:
  Formula root_;
};

/// Free variables (proportion subscripts and quantifiers bind).
std::set<std::string> free_variables(const Formula& f);
std::set<std::string> free_variables(const Expr& e);

std::set<std::string> constants_of(const Formula& f);
std::set<std::string> predicates_of(const Formula& f);
std::set<std::string> functions_of(const Formula& f);
/// Every symbol name (predicates, functions, constants).
std::set<std::string> symbols_of(const Formula& f);

/// Tolerance indices used by ~= / <~ comparisons or eps leaves.
std::set<unsigned> tolerance_indices(const Formula& f);

/// True when a ~= or <~ comparison or a conditional proportion occurs
/// anywhere. eps leaves belong to the exact language and do not count.
bool has_approximate_parts(const Formula& f);

/// Top-level conjuncts of a left- or right-nested conjunction.
std::vector<Formula> conjuncts(const Formula& f);

/// Replaces free occurrences of variable `var` with `replacement`.
Formula substitute(const Formula& f, const std::string& var, const Term& replacement);

}  // namespace rw
