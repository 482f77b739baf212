#include "rw/translate.hpp"

#include <algorithm>
#include <sstream>

#include "rw/errors.hpp"

namespace rw {

// ---------------------------------------------------------------- tolerances

ToleranceVector::ToleranceVector(std::map<unsigned, Rational> values) {
  for (const auto& [i, tau] : values) set(i, tau);
}

ToleranceVector ToleranceVector::uniform(const std::set<unsigned>& indices, Rational tau) {
  ToleranceVector out;
  for (unsigned i : indices) out.set(i, tau);
  return out;
}

void ToleranceVector::set(unsigned index, Rational tau) {
  if (index == 0) throw SymbolError("tolerance index must be positive");
  if (tau <= Rational(0)) throw UndefinedInput("tolerance for index " + std::to_string(index) + " must be positive");
  values_[index] = tau;
}

const Rational& ToleranceVector::at(unsigned index) const {
  auto it = values_.find(index);
  if (it == values_.end()) throw SymbolError("no tolerance given for index " + std::to_string(index));
  return it->second;
}

std::string ToleranceVector::str() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [i, tau] : values_) {
    os << (first ? "" : ",") << i << ':' << tau.str();
    first = false;
  }
  return os.str();
}

// ---------------------------------------------------------------- translation

namespace {

Formula translate(const Formula& f);

// An expression as numerator / product(denominators). Denominators are the
// condition proportions ||theta||_X of the conditionals that were cleared.
struct Fraction {
  ExprPtr num;
  std::vector<ExprPtr> dens;
};

bool is_zero_literal(const ExprPtr& e) { return e->kind == ExprKind::Literal && e->value.is_zero(); }

ExprPtr times(ExprPtr e, const std::vector<ExprPtr>& factors) {
  if (is_zero_literal(e)) return e;
  for (const auto& d : factors) e = Expr::product(e, d);
  return e;
}

// Multiset difference a \ b under structural equality.
std::vector<ExprPtr> minus(std::vector<ExprPtr> a, const std::vector<ExprPtr>& b) {
  for (const auto& x : b) {
    auto it = std::find_if(a.begin(), a.end(), [&](const ExprPtr& y) { return same_expr(x, y); });
    if (it != a.end()) a.erase(it);
  }
  return a;
}

// Least common multiple of two denominator multisets.
std::vector<ExprPtr> lcm(const std::vector<ExprPtr>& a, const std::vector<ExprPtr>& b) {
  std::vector<ExprPtr> out = a;
  for (const auto& x : minus(b, a)) out.push_back(x);
  return out;
}

ExprPtr translate_expr(const ExprPtr& e);

Fraction fraction(const ExprPtr& e) {
  switch (e->kind) {
    case ExprKind::Literal:
    case ExprKind::Tolerance:
    case ExprKind::Proportion:
      return {translate_expr(e), {}};
    case ExprKind::Conditional: {
      Formula psi = translate(e->body[0]);
      Formula theta = translate(e->body[1]);
      return {Expr::proportion(Formula::conjunction(psi, theta), e->vars), {Expr::proportion(theta, e->vars)}};
    }
    case ExprKind::Product: {
      Fraction a = fraction(e->a), b = fraction(e->b);
      std::vector<ExprPtr> dens = a.dens;
      dens.insert(dens.end(), b.dens.begin(), b.dens.end());
      return {Expr::product(a.num, b.num), dens};
    }
    case ExprKind::Sum:
    case ExprKind::Difference: {
      Fraction a = fraction(e->a), b = fraction(e->b);
      std::vector<ExprPtr> m = lcm(a.dens, b.dens);
      ExprPtr l = times(a.num, minus(m, a.dens));
      ExprPtr r = times(b.num, minus(m, b.dens));
      ExprPtr n = e->kind == ExprKind::Sum ? Expr::sum(l, r) : Expr::difference(l, r);
      return {n, m};
    }
  }
  throw Error("unreachable expression kind");
}

// Translation of an expression that has no conditional at its top level:
// only the formulas inside proportion bodies change.
ExprPtr translate_expr(const ExprPtr& e) {
  switch (e->kind) {
    case ExprKind::Literal:
    case ExprKind::Tolerance:
      return e;
    case ExprKind::Proportion:
      return Expr::proportion(translate(e->body[0]), e->vars);
    default:
      throw Error("conditional proportion outside a comparison");
  }
}

// lhs <= rhs or lhs = rhs with denominators cleared.
Formula cleared(const ExprPtr& lhs, CompareOp op, const ExprPtr& rhs) {
  Fraction l = fraction(lhs), r = fraction(rhs);
  std::vector<ExprPtr> m = lcm(l.dens, r.dens);
  return Formula::compare(times(l.num, minus(m, l.dens)), op, times(r.num, minus(m, r.dens)));
}

Formula translate(const Formula& f) {
  if (f.kind == FormulaKind::Compare) {
    switch (f.op) {
      case CompareOp::ApproxLe:
        return cleared(Expr::difference(f.lhs, f.rhs), CompareOp::Le, Expr::tolerance(f.index));
      case CompareOp::ApproxEq:
        return Formula::conjunction(
            cleared(Expr::difference(f.lhs, f.rhs), CompareOp::Le, Expr::tolerance(f.index)),
            cleared(Expr::difference(f.rhs, f.lhs), CompareOp::Le, Expr::tolerance(f.index)));
      default:
        return cleared(f.lhs, f.op, f.rhs);
    }
  }
  Formula out = f;
  for (auto& s : out.sub) s = translate(s);
  return out;
}

ExprPtr instantiate_expr(const ExprPtr& e, const ToleranceVector& tol);

Formula instantiate(const Formula& f, const ToleranceVector& tol) {
  Formula out = f;
  for (auto& s : out.sub) s = instantiate(s, tol);
  if (out.lhs) out.lhs = instantiate_expr(out.lhs, tol);
  if (out.rhs) out.rhs = instantiate_expr(out.rhs, tol);
  return out;
}

ExprPtr instantiate_expr(const ExprPtr& e, const ToleranceVector& tol) {
  switch (e->kind) {
    case ExprKind::Literal:
      return e;
    case ExprKind::Tolerance:
      return Expr::literal(tol.at(e->index));
    case ExprKind::Proportion:
    case ExprKind::Conditional: {
      auto out = std::make_shared<Expr>(*e);
      for (auto& b : out->body) b = instantiate(b, tol);
      return out;
    }
    default: {
      auto out = std::make_shared<Expr>(*e);
      out->a = instantiate_expr(e->a, tol);
      out->b = instantiate_expr(e->b, tol);
      return out;
    }
  }
}

// ---------------------------------------------------------------- desugaring

struct Desugarer {
  unsigned next = 0;
  std::string fresh() { return "%" + std::to_string(++next); }

  Formula run(const Formula& f) {
    if (f.kind == FormulaKind::ExistsUnique || f.kind == FormulaKind::ExistsExactly) {
      unsigned n = f.kind == FormulaKind::ExistsUnique ? 1 : f.count;
      Formula body = run(f.sub[0]);
      std::vector<std::string> xs;
      for (unsigned i = 0; i < n; ++i) xs.push_back(fresh());
      std::vector<Formula> parts;
      for (unsigned i = 0; i < n; ++i) {
        parts.push_back(substitute(body, f.var, Term::variable(xs[i])));
        for (unsigned j = 0; j < i; ++j)
          parts.push_back(Formula::negation(Formula::equal(Term::variable(xs[j]), Term::variable(xs[i]))));
      }
      std::string y = fresh();
      std::vector<Formula> alternatives;
      for (const auto& x : xs) alternatives.push_back(Formula::equal(Term::variable(y), Term::variable(x)));
      parts.push_back(Formula::forall(
          y, Formula::implication(substitute(body, f.var, Term::variable(y)), Formula::any_of(alternatives))));
      Formula out = Formula::all_of(parts);
      for (auto it = xs.rbegin(); it != xs.rend(); ++it) out = Formula::exists(*it, out);
      return out;
    }
    Formula out = f;
    for (auto& s : out.sub) s = run(s);
    if (out.lhs) out.lhs = run_expr(out.lhs);
    if (out.rhs) out.rhs = run_expr(out.rhs);
    return out;
  }

  ExprPtr run_expr(const ExprPtr& e) {
    if (e->kind == ExprKind::Literal || e->kind == ExprKind::Tolerance) return e;
    auto out = std::make_shared<Expr>(*e);
    for (auto& b : out->body) b = run(b);
    if (out->a) out->a = run_expr(e->a);
    if (out->b) out->b = run_expr(e->b);
    return out;
  }
};

}  // namespace

ExactFormula translate_to_exact(const Formula& f) { return ExactFormula(translate(f)); }

ExactFormula instantiate_tolerances(const ExactFormula& f, const ToleranceVector& tol) {
  return ExactFormula(instantiate(f.root(), tol));
}

Formula ground(const Formula& f, const ToleranceVector& tol) {
  return instantiate_tolerances(translate_to_exact(f), tol).root();
}

Formula desugar(const Formula& f) {
  Desugarer d;
  return d.run(f);
}

}  // namespace rw
