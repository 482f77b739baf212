#include "rw/logic.hpp"

#include <algorithm>

#include "rw/errors.hpp"

namespace rw {

// ---------------------------------------------------------------- Vocabulary

void Vocabulary::add_predicate(const std::string& name, unsigned arity) {
  if (arity == 0) throw SymbolError("predicate '" + name + "' must have positive arity");
  if (declares(name)) throw SymbolError("symbol '" + name + "' declared twice");
  predicates_.push_back({name, arity});
}

void Vocabulary::add_function(const std::string& name, unsigned arity) {
  if (arity == 0) throw SymbolError("function '" + name + "' must have positive arity; use const");
  if (declares(name)) throw SymbolError("symbol '" + name + "' declared twice");
  functions_.push_back({name, arity});
}

void Vocabulary::add_constant(const std::string& name) {
  if (declares(name)) throw SymbolError("symbol '" + name + "' declared twice");
  constants_.push_back(name);
}

std::optional<unsigned> Vocabulary::predicate_arity(const std::string& name) const {
  for (const auto& s : predicates_)
    if (s.name == name) return s.arity;
  return std::nullopt;
}

std::optional<unsigned> Vocabulary::function_arity(const std::string& name) const {
  for (const auto& s : functions_)
    if (s.name == name) return s.arity;
  return std::nullopt;
}

bool Vocabulary::has_constant(const std::string& name) const {
  return std::find(constants_.begin(), constants_.end(), name) != constants_.end();
}

bool Vocabulary::declares(const std::string& name) const {
  return predicate_arity(name) || function_arity(name) || has_constant(name);
}

bool Vocabulary::is_unary() const {
  if (!functions_.empty()) return false;
  return std::all_of(predicates_.begin(), predicates_.end(), [](const Symbol& s) { return s.arity == 1; });
}

Vocabulary Vocabulary::merged_with(const Vocabulary& other) const {
  Vocabulary out = *this;
  for (const auto& p : other.predicates_) {
    auto a = out.predicate_arity(p.name);
    if (a && *a == p.arity) continue;
    out.add_predicate(p.name, p.arity);
  }
  for (const auto& f : other.functions_) {
    auto a = out.function_arity(f.name);
    if (a && *a == f.arity) continue;
    out.add_function(f.name, f.arity);
  }
  for (const auto& c : other.constants_) {
    if (out.has_constant(c)) continue;
    out.add_constant(c);
  }
  return out;
}

Vocabulary Vocabulary::restricted_to(const std::set<std::string>& names) const {
  Vocabulary out;
  for (const auto& p : predicates_)
    if (names.count(p.name)) out.predicates_.push_back(p);
  for (const auto& f : functions_)
    if (names.count(f.name)) out.functions_.push_back(f);
  for (const auto& c : constants_)
    if (names.count(c)) out.constants_.push_back(c);
  return out;
}

// ---------------------------------------------------------------- Term

Term Term::variable(std::string name) { return Term{Kind::Variable, std::move(name), {}}; }
Term Term::constant(std::string name) { return Term{Kind::Constant, std::move(name), {}}; }
Term Term::apply(std::string function, std::vector<Term> args) {
  return Term{Kind::Apply, std::move(function), std::move(args)};
}

// ---------------------------------------------------------------- Formula

namespace {

Formula node(FormulaKind k) {
  Formula f;
  f.kind = k;
  return f;
}

Formula binary(FormulaKind k, Formula a, Formula b) {
  Formula f = node(k);
  f.sub.push_back(std::move(a));
  f.sub.push_back(std::move(b));
  return f;
}

Formula quantifier(FormulaKind k, std::string var, Formula body) {
  Formula f = node(k);
  f.var = std::move(var);
  f.sub.push_back(std::move(body));
  return f;
}

}  // namespace

Formula Formula::truth() { return node(FormulaKind::True); }
Formula Formula::falsity() { return node(FormulaKind::False); }

Formula Formula::predicate(std::string name, std::vector<Term> args) {
  Formula f = node(FormulaKind::Predicate);
  f.symbol = std::move(name);
  f.args = std::move(args);
  return f;
}

Formula Formula::equal(Term a, Term b) {
  Formula f = node(FormulaKind::Equal);
  f.args.push_back(std::move(a));
  f.args.push_back(std::move(b));
  return f;
}

Formula Formula::negation(Formula g) {
  Formula f = node(FormulaKind::Not);
  f.sub.push_back(std::move(g));
  return f;
}

Formula Formula::conjunction(Formula a, Formula b) { return binary(FormulaKind::And, std::move(a), std::move(b)); }
Formula Formula::disjunction(Formula a, Formula b) { return binary(FormulaKind::Or, std::move(a), std::move(b)); }
Formula Formula::implication(Formula a, Formula b) { return binary(FormulaKind::Implies, std::move(a), std::move(b)); }
Formula Formula::biconditional(Formula a, Formula b) { return binary(FormulaKind::Iff, std::move(a), std::move(b)); }

Formula Formula::forall(std::string var, Formula body) {
  return quantifier(FormulaKind::Forall, std::move(var), std::move(body));
}
Formula Formula::exists(std::string var, Formula body) {
  return quantifier(FormulaKind::Exists, std::move(var), std::move(body));
}
Formula Formula::exists_unique(std::string var, Formula body) {
  return quantifier(FormulaKind::ExistsUnique, std::move(var), std::move(body));
}
Formula Formula::exists_exactly(unsigned n, std::string var, Formula body) {
  if (n == 0) throw SymbolError("exists_exactly needs a positive count");
  Formula f = quantifier(FormulaKind::ExistsExactly, std::move(var), std::move(body));
  f.count = n;
  return f;
}

Formula Formula::compare(ExprPtr lhs, CompareOp op, ExprPtr rhs, unsigned index) {
  bool approx = op == CompareOp::ApproxEq || op == CompareOp::ApproxLe;
  if (approx && index == 0) throw SymbolError("approximate comparison needs a positive index");
  Formula f = node(FormulaKind::Compare);
  f.lhs = std::move(lhs);
  f.rhs = std::move(rhs);
  f.op = op;
  f.index = approx ? index : 0;
  return f;
}

Formula Formula::all_of(const std::vector<Formula>& parts) {
  if (parts.empty()) return truth();
  Formula acc = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) acc = conjunction(std::move(acc), parts[i]);
  return acc;
}

Formula Formula::any_of(const std::vector<Formula>& parts) {
  if (parts.empty()) return falsity();
  Formula acc = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) acc = disjunction(std::move(acc), parts[i]);
  return acc;
}

bool Formula::is_quantifier() const noexcept {
  return kind == FormulaKind::Forall || kind == FormulaKind::Exists || kind == FormulaKind::ExistsUnique ||
         kind == FormulaKind::ExistsExactly;
}

bool Formula::is_binary_connective() const noexcept {
  return kind == FormulaKind::And || kind == FormulaKind::Or || kind == FormulaKind::Implies ||
         kind == FormulaKind::Iff;
}

bool operator==(const Formula& a, const Formula& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case FormulaKind::True:
    case FormulaKind::False:
      return true;
    case FormulaKind::Predicate:
      return a.symbol == b.symbol && a.args == b.args;
    case FormulaKind::Equal:
      return a.args == b.args;
    case FormulaKind::Not:
    case FormulaKind::And:
    case FormulaKind::Or:
    case FormulaKind::Implies:
    case FormulaKind::Iff:
      return a.sub == b.sub;
    case FormulaKind::Forall:
    case FormulaKind::Exists:
    case FormulaKind::ExistsUnique:
      return a.var == b.var && a.sub == b.sub;
    case FormulaKind::ExistsExactly:
      return a.count == b.count && a.var == b.var && a.sub == b.sub;
    case FormulaKind::Compare:
      return a.op == b.op && a.index == b.index && same_expr(a.lhs, b.lhs) && same_expr(a.rhs, b.rhs);
  }
  return false;
}

// ---------------------------------------------------------------- Expr

namespace {

std::shared_ptr<Expr> make_expr(ExprKind k) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  return e;
}

void check_subscript(const std::vector<std::string>& vars) {
  if (vars.empty()) throw SymbolError("proportion subscript must bind at least one variable");
  std::set<std::string> seen;
  for (const auto& v : vars)
    if (!seen.insert(v).second) throw SymbolError("variable '" + v + "' repeated in proportion subscript");
}

}  // namespace

ExprPtr Expr::literal(Rational v) {
  auto e = make_expr(ExprKind::Literal);
  e->value = v;
  return e;
}

ExprPtr Expr::tolerance(unsigned index) {
  if (index == 0) throw SymbolError("tolerance index must be positive");
  auto e = make_expr(ExprKind::Tolerance);
  e->index = index;
  return e;
}

ExprPtr Expr::proportion(Formula psi, std::vector<std::string> vars) {
  check_subscript(vars);
  auto e = make_expr(ExprKind::Proportion);
  e->body.push_back(std::move(psi));
  e->vars = std::move(vars);
  return e;
}

ExprPtr Expr::conditional(Formula psi, Formula theta, std::vector<std::string> vars) {
  check_subscript(vars);
  auto e = make_expr(ExprKind::Conditional);
  e->body.push_back(std::move(psi));
  e->body.push_back(std::move(theta));
  e->vars = std::move(vars);
  return e;
}

ExprPtr Expr::sum(ExprPtr a, ExprPtr b) {
  auto e = make_expr(ExprKind::Sum);
  e->a = std::move(a);
  e->b = std::move(b);
  return e;
}

ExprPtr Expr::product(ExprPtr a, ExprPtr b) {
  auto e = make_expr(ExprKind::Product);
  e->a = std::move(a);
  e->b = std::move(b);
  return e;
}

ExprPtr Expr::difference(ExprPtr a, ExprPtr b) {
  auto e = make_expr(ExprKind::Difference);
  e->a = std::move(a);
  e->b = std::move(b);
  return e;
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case ExprKind::Literal:
      return a.value == b.value;
    case ExprKind::Tolerance:
      return a.index == b.index;
    case ExprKind::Proportion:
    case ExprKind::Conditional:
      return a.vars == b.vars && a.body == b.body;
    case ExprKind::Sum:
    case ExprKind::Product:
    case ExprKind::Difference:
      return same_expr(a.a, b.a) && same_expr(a.b, b.b);
  }
  return false;
}

bool same_expr(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

// ---------------------------------------------------------------- ExactFormula

ExactFormula::ExactFormula(Formula f) : root_(std::move(f)) {
  if (has_approximate_parts(root_))
    throw Error("exact formula still contains approximate comparisons or conditional proportions");
}

// ---------------------------------------------------------------- traversals

namespace {

void collect_free(const Formula& f, std::set<std::string>& bound, std::set<std::string>& out);

void collect_free_term(const Term& t, const std::set<std::string>& bound, std::set<std::string>& out) {
  if (t.kind == Term::Kind::Variable) {
    if (!bound.count(t.name)) out.insert(t.name);
  }
  for (const auto& a : t.args) collect_free_term(a, bound, out);
}

void collect_free_expr(const Expr& e, std::set<std::string>& bound, std::set<std::string>& out) {
  switch (e.kind) {
    case ExprKind::Literal:
    case ExprKind::Tolerance:
      return;
    case ExprKind::Proportion:
    case ExprKind::Conditional: {
      std::set<std::string> inner = bound;
      inner.insert(e.vars.begin(), e.vars.end());
      for (const auto& b : e.body) collect_free(b, inner, out);
      return;
    }
    case ExprKind::Sum:
    case ExprKind::Product:
    case ExprKind::Difference:
      collect_free_expr(*e.a, bound, out);
      collect_free_expr(*e.b, bound, out);
      return;
  }
}

void collect_free(const Formula& f, std::set<std::string>& bound, std::set<std::string>& out) {
  for (const auto& t : f.args) collect_free_term(t, bound, out);
  if (f.is_quantifier()) {
    bool added = bound.insert(f.var).second;
    collect_free(f.sub[0], bound, out);
    if (added) bound.erase(f.var);
    return;
  }
  for (const auto& s : f.sub) collect_free(s, bound, out);
  if (f.kind == FormulaKind::Compare) {
    collect_free_expr(*f.lhs, bound, out);
    collect_free_expr(*f.rhs, bound, out);
  }
}

template <class Visit>
void walk(const Formula& f, Visit&& visit);

template <class Visit>
void walk_expr(const Expr& e, Visit&& visit) {
  visit.expr(e);
  for (const auto& b : e.body) walk(b, visit);
  if (e.a) walk_expr(*e.a, visit);
  if (e.b) walk_expr(*e.b, visit);
}

template <class Visit>
void walk_term(const Term& t, Visit&& visit) {
  visit.term(t);
  for (const auto& a : t.args) walk_term(a, visit);
}

template <class Visit>
void walk(const Formula& f, Visit&& visit) {
  visit.formula(f);
  for (const auto& t : f.args) walk_term(t, visit);
  for (const auto& s : f.sub) walk(s, visit);
  if (f.lhs) walk_expr(*f.lhs, visit);
  if (f.rhs) walk_expr(*f.rhs, visit);
}

struct SymbolCollector {
  std::set<std::string> constants, predicates, functions;
  std::set<unsigned> indices;
  bool approximate = false;
  void formula(const Formula& f) {
    if (f.kind == FormulaKind::Predicate) predicates.insert(f.symbol);
    if (f.kind == FormulaKind::Compare) {
      if (f.op == CompareOp::ApproxEq || f.op == CompareOp::ApproxLe) {
        indices.insert(f.index);
        approximate = true;
      }
    }
  }
  void term(const Term& t) {
    if (t.kind == Term::Kind::Constant) constants.insert(t.name);
    if (t.kind == Term::Kind::Apply) functions.insert(t.name);
  }
  void expr(const Expr& e) {
    if (e.kind == ExprKind::Tolerance) indices.insert(e.index);
    if (e.kind == ExprKind::Conditional) approximate = true;
  }
};

SymbolCollector collect(const Formula& f) {
  SymbolCollector c;
  walk(f, c);
  return c;
}

}  // namespace

std::set<std::string> free_variables(const Formula& f) {
  std::set<std::string> bound, out;
  collect_free(f, bound, out);
  return out;
}

std::set<std::string> free_variables(const Expr& e) {
  std::set<std::string> bound, out;
  collect_free_expr(e, bound, out);
  return out;
}

std::set<std::string> constants_of(const Formula& f) { return collect(f).constants; }
std::set<std::string> predicates_of(const Formula& f) { return collect(f).predicates; }
std::set<std::string> functions_of(const Formula& f) { return collect(f).functions; }

std::set<std::string> symbols_of(const Formula& f) {
  auto c = collect(f);
  std::set<std::string> out = c.constants;
  out.insert(c.predicates.begin(), c.predicates.end());
  out.insert(c.functions.begin(), c.functions.end());
  return out;
}

std::set<unsigned> tolerance_indices(const Formula& f) { return collect(f).indices; }

bool has_approximate_parts(const Formula& f) { return collect(f).approximate; }

std::vector<Formula> conjuncts(const Formula& f) {
  std::vector<Formula> out;
  std::vector<const Formula*> stack{&f};
  while (!stack.empty()) {
    const Formula* g = stack.back();
    stack.pop_back();
    if (g->kind == FormulaKind::And) {
      stack.push_back(&g->sub[1]);
      stack.push_back(&g->sub[0]);
    } else if (g->kind != FormulaKind::True) {
      out.push_back(*g);
    }
  }
  return out;
}

namespace {

Term substitute_term(const Term& t, const std::string& var, const Term& rep) {
  if (t.kind == Term::Kind::Variable) return t.name == var ? rep : t;
  Term out = t;
  for (auto& a : out.args) a = substitute_term(a, var, rep);
  return out;
}

ExprPtr substitute_expr(const ExprPtr& e, const std::string& var, const Term& rep) {
  switch (e->kind) {
    case ExprKind::Literal:
    case ExprKind::Tolerance:
      return e;
    case ExprKind::Proportion:
    case ExprKind::Conditional: {
      if (std::find(e->vars.begin(), e->vars.end(), var) != e->vars.end()) return e;
      auto out = std::make_shared<Expr>(*e);
      for (auto& b : out->body) b = substitute(b, var, rep);
      return out;
    }
    default: {
      auto out = std::make_shared<Expr>(*e);
      out->a = substitute_expr(e->a, var, rep);
      out->b = substitute_expr(e->b, var, rep);
      return out;
    }
  }
}

}  // namespace

Formula substitute(const Formula& f, const std::string& var, const Term& rep) {
  if (f.is_quantifier() && f.var == var) return f;
  Formula out = f;
  for (auto& t : out.args) t = substitute_term(t, var, rep);
  for (auto& s : out.sub) s = substitute(s, var, rep);
  if (out.lhs) out.lhs = substitute_expr(out.lhs, var, rep);
  if (out.rhs) out.rhs = substitute_expr(out.rhs, var, rep);
  return out;
}

}  // namespace rw
