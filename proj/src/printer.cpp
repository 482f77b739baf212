#include "rw/printer.hpp"

#include <sstream>

namespace rw {
namespace {

void put(std::ostream& os, const Formula& f);

void put(std::ostream& os, const Term& t) {
  os << t.name;
  if (t.kind == Term::Kind::Apply) {
    os << '(';
    for (std::size_t i = 0; i < t.args.size(); ++i) {
      if (i) os << ", ";
      put(os, t.args[i]);
    }
    os << ')';
  }
}

void put(std::ostream& os, const Expr& e) {
  switch (e.kind) {
    case ExprKind::Literal:
      os << e.value.str();
      return;
    case ExprKind::Tolerance:
      os << "eps[" << e.index << ']';
      return;
    case ExprKind::Proportion:
    case ExprKind::Conditional:
      os << "prop{";
      put(os, e.body[0]);
      if (e.kind == ExprKind::Conditional) {
        os << " | ";
        put(os, e.body[1]);
      }
      os << "}[";
      for (std::size_t i = 0; i < e.vars.size(); ++i) os << (i ? ", " : "") << e.vars[i];
      os << ']';
      return;
    case ExprKind::Sum:
    case ExprKind::Product:
    case ExprKind::Difference: {
      const char* op = e.kind == ExprKind::Sum ? " + " : e.kind == ExprKind::Product ? " * " : " - ";
      os << '(';
      put(os, *e.a);
      os << op;
      put(os, *e.b);
      os << ')';
      return;
    }
  }
}

const char* connective(FormulaKind k) {
  switch (k) {
    case FormulaKind::And: return " and ";
    case FormulaKind::Or: return " or ";
    case FormulaKind::Implies: return " => ";
    default: return " <=> ";
  }
}

const char* comparator(CompareOp op) {
  switch (op) {
    case CompareOp::ApproxEq: return " ~=";
    case CompareOp::ApproxLe: return " <~";
    case CompareOp::Eq: return " ==";
    default: return " <=";
  }
}

void put(std::ostream& os, const Formula& f) {
  switch (f.kind) {
    case FormulaKind::True:
      os << "true";
      return;
    case FormulaKind::False:
      os << "false";
      return;
    case FormulaKind::Predicate:
      os << f.symbol << '(';
      for (std::size_t i = 0; i < f.args.size(); ++i) {
        if (i) os << ", ";
        put(os, f.args[i]);
      }
      os << ')';
      return;
    case FormulaKind::Equal:
      os << '(';
      put(os, f.args[0]);
      os << " = ";
      put(os, f.args[1]);
      os << ')';
      return;
    case FormulaKind::Not:
      os << "(not ";
      put(os, f.sub[0]);
      os << ')';
      return;
    case FormulaKind::And:
    case FormulaKind::Or:
    case FormulaKind::Implies:
    case FormulaKind::Iff:
      os << '(';
      put(os, f.sub[0]);
      os << connective(f.kind);
      put(os, f.sub[1]);
      os << ')';
      return;
    case FormulaKind::Forall:
    case FormulaKind::Exists:
    case FormulaKind::ExistsUnique:
    case FormulaKind::ExistsExactly:
      os << '(';
      if (f.kind == FormulaKind::Forall) os << "forall ";
      if (f.kind == FormulaKind::Exists) os << "exists ";
      if (f.kind == FormulaKind::ExistsUnique) os << "exists! ";
      if (f.kind == FormulaKind::ExistsExactly) os << "exists_exactly[" << f.count << "] ";
      os << f.var << ' ';
      put(os, f.sub[0]);
      os << ')';
      return;
    case FormulaKind::Compare:
      os << '(';
      put(os, *f.lhs);
      os << comparator(f.op);
      if (f.op == CompareOp::ApproxEq || f.op == CompareOp::ApproxLe) os << '[' << f.index << ']';
      os << ' ';
      put(os, *f.rhs);
      os << ')';
      return;
  }
}

}  // namespace

std::string print_formula(const Formula& f) {
  std::ostringstream os;
  put(os, f);
  return os.str();
}

std::string print_expr(const Expr& e) {
  std::ostringstream os;
  put(os, e);
  return os.str();
}

std::string print_term(const Term& t) {
  std::ostringstream os;
  put(os, t);
  return os.str();
}

std::string print_exact(const ExactFormula& f) { return print_formula(f.root()); }

std::string print_vocabulary(const Vocabulary& v) {
  std::ostringstream os;
  for (const auto& p : v.predicates()) os << "predicate " << p.name << '/' << p.arity << ";\n";
  for (const auto& fn : v.functions()) os << "function " << fn.name << '/' << fn.arity << ";\n";
  if (!v.constants().empty()) {
    os << "const ";
    for (std::size_t i = 0; i < v.constants().size(); ++i) os << (i ? ", " : "") << v.constants()[i];
    os << ";\n";
  }
  return os.str();
}

std::string print_kb(const Vocabulary& v, const Formula& f) {
  std::ostringstream os;
  os << print_vocabulary(v);
  for (const auto& c : conjuncts(f)) os << print_formula(c) << ".\n";
  return os.str();
}

}  // namespace rw
