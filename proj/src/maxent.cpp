#include "rw/maxent.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "rw/counting.hpp"
#include "rw/errors.hpp"
#include "rw/printer.hpp"
#include "rw/simplex.hpp"

namespace rw {

std::string Atom::label(const Vocabulary& vocab) const {
  std::string out;
  for (std::size_t i = 0; i < positive.size(); ++i) {
    if (i) out += " and ";
    if (!positive[i]) out += "not ";
    out += vocab.predicates()[i].name;
  }
  return out;
}

namespace {

void require_unary(const Vocabulary& vocab) {
  if (!vocab.is_unary()) throw UnsupportedFeature("maximum entropy needs a vocabulary of unary predicates");
}

}  // namespace

std::vector<Atom> atoms(const Vocabulary& vocab) {
  require_unary(vocab);
  std::size_t k = vocab.predicates().size();
  if (k == 0) throw UnsupportedFeature("maximum entropy needs at least one predicate");
  std::vector<Atom> out;
  for (std::size_t j = 0; j < (std::size_t{1} << k); ++j) {
    Atom a;
    a.index = j;
    for (std::size_t i = 0; i < k; ++i) a.positive.push_back(!((j >> (k - 1 - i)) & 1));
    out.push_back(a);
  }
  return out;
}

std::string ConstraintSet::describe(const LinearConstraint& c) const {
  std::ostringstream os;
  bool first = true;
  for (std::size_t j = 0; j < c.coeffs.size(); ++j) {
    const mpq_class& v = c.coeffs[j];
    if (v == 0) continue;
    mpq_class mag = abs(v);
    if (first)
      os << (v < 0 ? "-" : "");
    else
      os << (v < 0 ? " - " : " + ");
    if (mag != 1) os << mpq_str(mag) << "*";
    os << "p" << j + 1;
    first = false;
  }
  if (first) os << "0";
  os << (c.kind == LinearConstraint::Kind::Eq ? " = " : " <= ") << mpq_str(c.rhs);
  return os.str();
}

// ---------------------------------------------------------------- extraction

namespace {

// A linear form over atom proportions plus a constant.
struct Linear {
  std::vector<mpq_class> coef;
  mpq_class constant;

  bool is_constant() const {
    return std::all_of(coef.begin(), coef.end(), [](const mpq_class& v) { return v == 0; });
  }
  bool operator==(const Linear& o) const { return coef == o.coef && constant == o.constant; }
};

Linear scaled(const Linear& a, const mpq_class& f) {
  Linear out = a;
  for (auto& v : out.coef) v *= f;
  out.constant *= f;
  return out;
}

Linear added(const Linear& a, const Linear& b, int sign) {
  Linear out = a;
  for (std::size_t j = 0; j < out.coef.size(); ++j) out.coef[j] += sign * b.coef[j];
  out.constant += sign * b.constant;
  return out;
}

// num / product(dens); every den is the proportion of a condition class.
struct LinearFraction {
  Linear num;
  std::vector<Linear> dens;
};

class Linearizer {
 public:
  Linearizer(const Vocabulary& vocab, std::string source) : vocab_(vocab), source_(std::move(source)) {
    atoms_ = std::size_t{1} << vocab.predicates().size();
  }

  Linear constant(const mpq_class& c) const {
    Linear l;
    l.coef.assign(atoms_, 0);
    l.constant = c;
    return l;
  }

  Linear class_of(const Formula& body, const std::vector<std::string>& vars) const {
    if (vars.size() != 1) fail("proportions over several variables are outside the unary fast path");
    auto mask = atom_mask(vocab_, body, vars[0]);
    if (!mask) fail("proportion body is not a Boolean combination of unary predicates of its variable");
    Linear l = constant(0);
    for (std::size_t j = 0; j < atoms_; ++j)
      if ((*mask)[j]) l.coef[j] = 1;
    return l;
  }

  Linear times(const Linear& a, const Linear& b) const {
    if (a.is_constant()) return scaled(b, a.constant);
    if (b.is_constant()) return scaled(a, b.constant);
    fail("product of two proportions is not linear");
  }

  Linear times_all(Linear a, const std::vector<Linear>& fs) const {
    for (const auto& f : fs) a = times(a, f);
    return a;
  }

  static std::vector<Linear> minus(std::vector<Linear> a, const std::vector<Linear>& b) {
    for (const auto& x : b) {
      auto it = std::find(a.begin(), a.end(), x);
      if (it != a.end()) a.erase(it);
    }
    return a;
  }

  static std::vector<Linear> lcm(const std::vector<Linear>& a, const std::vector<Linear>& b) {
    std::vector<Linear> out = a;
    for (const auto& x : minus(b, a)) out.push_back(x);
    return out;
  }

  LinearFraction fraction(const Expr& e) const {
    switch (e.kind) {
      case ExprKind::Literal:
        return {constant(e.value.to_mpq()), {}};
      case ExprKind::Tolerance:
        fail("eps leaves are not expected in a KB");
      case ExprKind::Proportion:
        return {class_of(e.body[0], e.vars), {}};
      case ExprKind::Conditional: {
        Formula both = Formula::conjunction(e.body[0], e.body[1]);
        return {class_of(both, e.vars), {class_of(e.body[1], e.vars)}};
      }
      case ExprKind::Product: {
        LinearFraction a = fraction(*e.a), b = fraction(*e.b);
        std::vector<Linear> dens = a.dens;
        dens.insert(dens.end(), b.dens.begin(), b.dens.end());
        return {times(a.num, b.num), dens};
      }
      case ExprKind::Sum:
      case ExprKind::Difference: {
        LinearFraction a = fraction(*e.a), b = fraction(*e.b);
        std::vector<Linear> m = lcm(a.dens, b.dens);
        Linear l = times_all(a.num, minus(m, a.dens));
        Linear r = times_all(b.num, minus(m, b.dens));
        return {added(l, r, e.kind == ExprKind::Sum ? 1 : -1), m};
      }
    }
    fail("unknown expression");
  }

  // Rows for lhs - rhs (<= or =) tau * product(dens), dens cleared.
  void rows(const Formula& cmp, const std::optional<ToleranceVector>& keep,
            std::vector<LinearConstraint>& out) const {
    LinearFraction l = fraction(*cmp.lhs), r = fraction(*cmp.rhs);
    std::vector<Linear> m = lcm(l.dens, r.dens);
    Linear diff = added(times_all(l.num, minus(m, l.dens)), times_all(r.num, minus(m, r.dens)), -1);
    bool approx = cmp.op == CompareOp::ApproxEq || cmp.op == CompareOp::ApproxLe;
    bool eq = cmp.op == CompareOp::ApproxEq || cmp.op == CompareOp::Eq;
    if (approx && keep) {
      Linear slack = times_all(constant(keep->at(cmp.index).to_mpq()), m);
      out.push_back(row(added(diff, slack, -1), LinearConstraint::Kind::Le));
      if (eq) out.push_back(row(added(scaled(diff, -1), slack, -1), LinearConstraint::Kind::Le));
      return;
    }
    out.push_back(row(diff, eq ? LinearConstraint::Kind::Eq : LinearConstraint::Kind::Le));
  }

  LinearConstraint row(const Linear& l, LinearConstraint::Kind kind) const {
    LinearConstraint c;
    c.coeffs = l.coef;
    c.kind = kind;
    c.rhs = -l.constant;
    c.source = source_;
    return c;
  }

  [[noreturn]] void fail(const std::string& why) const {
    throw UnsupportedFeature("statement '" + source_ + "' is outside the maximum-entropy fragment: " + why);
  }

 private:
  const Vocabulary& vocab_;
  std::string source_;
  std::size_t atoms_;
};

bool is_ground_fact(const Formula& f) {
  switch (f.kind) {
    case FormulaKind::True:
    case FormulaKind::False:
      return true;
    case FormulaKind::Predicate:
      return f.args.size() == 1 && f.args[0].kind == Term::Kind::Constant;
    case FormulaKind::Not:
    case FormulaKind::And:
    case FormulaKind::Or:
    case FormulaKind::Implies:
    case FormulaKind::Iff:
      return std::all_of(f.sub.begin(), f.sub.end(), is_ground_fact);
    default:
      return false;
  }
}

Term constant_to_var(const Term& t, const std::string& c, const std::string& var) {
  if (t.kind == Term::Kind::Constant && t.name == c) return Term::variable(var);
  return t;
}

// Rewrites constant c as variable var (ground facts only).
Formula about(const Formula& f, const std::string& c, const std::string& var) {
  Formula out = f;
  for (auto& t : out.args) t = constant_to_var(t, c, var);
  for (auto& s : out.sub) s = about(s, c, var);
  return out;
}

}  // namespace

ConstraintSet constraints_from_kb(const Vocabulary& vocab, const Formula& kb, const std::optional<ToleranceVector>& keep) {
  require_unary(vocab);
  ConstraintSet cs;
  for (const auto& p : vocab.predicates()) cs.vocab.add_predicate(p.name, p.arity);
  cs.atom_count = std::size_t{1} << vocab.predicates().size();
  for (const auto& c : conjuncts(kb)) {
    std::string text = print_formula(c);
    Linearizer lin(vocab, text);
    if (is_ground_fact(c)) {
      auto cs_of = constants_of(c);
      if (cs_of.empty()) {
        if (c.kind == FormulaKind::False) {
          LinearConstraint r = lin.row(lin.constant(1), LinearConstraint::Kind::Eq);
          cs.rows.push_back(r);
        }
        continue;
      }
      if (cs_of.size() > 1) lin.fail("facts relating several individuals are not supported");
      const std::string& name = *cs_of.begin();
      auto it = cs.facts.find(name);
      if (it == cs.facts.end())
        cs.facts.emplace(name, c);
      else
        it->second = Formula::conjunction(it->second, c);
      continue;
    }
    const Formula* universal = nullptr;
    bool negated = false;
    if (c.kind == FormulaKind::Forall) universal = &c;
    if (c.kind == FormulaKind::Not && c.sub[0].kind == FormulaKind::Exists) {
      universal = &c.sub[0];
      negated = true;
    }
    if (universal) {
      auto mask = atom_mask(vocab, universal->sub[0], universal->var);
      if (!mask) lin.fail("quantified body is not a Boolean combination of unary predicates");
      for (std::size_t j = 0; j < cs.atom_count; ++j) {
        if ((*mask)[j] != negated) continue;
        Linear l = lin.constant(0);
        l.coef[j] = 1;
        cs.rows.push_back(lin.row(l, LinearConstraint::Kind::Eq));
      }
      continue;
    }
    if (c.kind == FormulaKind::Exists) {
      // Nonemptiness of a class leaves every proportion vector possible in
      // the limit, so it adds no constraint.
      if (!atom_mask(vocab, c.sub[0], c.var)) lin.fail("quantified body is not a Boolean combination");
      continue;
    }
    if (c.kind == FormulaKind::ExistsUnique || c.kind == FormulaKind::ExistsExactly) {
      // A class of fixed size has proportion c/N or less, so it vanishes in
      // the limit; a context inside it then has zero mass.
      auto mask = atom_mask(vocab, c.sub[0], c.var);
      if (!mask) lin.fail("quantified body is not a Boolean combination");
      for (std::size_t j = 0; j < cs.atom_count; ++j) {
        if (!(*mask)[j]) continue;
        Linear l = lin.constant(0);
        l.coef[j] = 1;
        cs.rows.push_back(lin.row(l, LinearConstraint::Kind::Eq));
      }
      continue;
    }
    if (c.kind == FormulaKind::Compare) {
      lin.rows(c, keep, cs.rows);
      continue;
    }
    lin.fail("unsupported statement shape");
  }
  return cs;
}

// ---------------------------------------------------------------- solver

namespace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct Reduced {
  std::vector<std::size_t> support;     // atoms that can be positive
  std::vector<std::size_t> inequality;  // rows kept as inequalities
  std::vector<bool> implicit_eq;        // per row
  std::vector<mpq_class> interior;      // a relative-interior point (all atoms)
};

// One LP finds which atoms can be positive, which inequalities can be
// strict, and a point doing both at once: maximize sum z subject to
// x = z + w, slack = zs + ws, A x (=, +slack =) b t, sum x = t, z <= 1, t >= 1.
Reduced identify(const ConstraintSet& c) {
  const std::size_t n = c.atom_count;
  std::vector<std::size_t> le;
  for (std::size_t i = 0; i < c.rows.size(); ++i)
    if (c.rows[i].kind == LinearConstraint::Kind::Le) le.push_back(i);
  const std::size_t q = le.size();
  // Layout: z[n], w[n], zs[q], ws[q], t.
  const std::size_t Z = 0, W = n, ZS = 2 * n, WS = 2 * n + q, T = 2 * n + 2 * q;
  LinearProgram lp;
  lp.variables = T + 1;
  lp.objective.assign(lp.variables, 0);
  for (std::size_t j = 0; j < n; ++j) lp.objective[Z + j] = 1;
  for (std::size_t i = 0; i < q; ++i) lp.objective[ZS + i] = 1;
  std::size_t slack_no = 0;
  for (std::size_t i = 0; i < c.rows.size(); ++i) {
    const auto& r = c.rows[i];
    std::vector<mpq_class> row(lp.variables, 0);
    for (std::size_t j = 0; j < n; ++j) row[Z + j] = row[W + j] = r.coeffs[j];
    if (r.kind == LinearConstraint::Kind::Le) {
      row[ZS + slack_no] = row[WS + slack_no] = 1;
      ++slack_no;
    }
    row[T] = -r.rhs;
    lp.add_row(row, LinearProgram::Sense::Eq, 0);
  }
  std::vector<mpq_class> sum(lp.variables, 0);
  for (std::size_t j = 0; j < n; ++j) sum[Z + j] = sum[W + j] = 1;
  sum[T] = -1;
  lp.add_row(sum, LinearProgram::Sense::Eq, 0);
  for (std::size_t v = 0; v < n + q; ++v) {
    std::vector<mpq_class> bound(lp.variables, 0);
    bound[v < n ? Z + v : ZS + (v - n)] = 1;
    lp.add_row(bound, LinearProgram::Sense::Le, 1);
  }
  std::vector<mpq_class> t_bound(lp.variables, 0);
  t_bound[T] = 1;
  lp.add_row(t_bound, LinearProgram::Sense::Ge, 1);

  LpResult res = solve_lp(lp);
  if (res.status != LpResult::Status::Optimal) throw Infeasible("the constraint set S(KB) is empty");

  Reduced out;
  out.implicit_eq.assign(c.rows.size(), false);
  const mpq_class& t = res.x[T];
  for (std::size_t j = 0; j < n; ++j) {
    mpq_class x = res.x[Z + j] + res.x[W + j];
    out.interior.push_back(x / t);
    if (res.x[Z + j] > 0) out.support.push_back(j);
  }
  for (std::size_t i = 0; i < q; ++i) {
    if (res.x[ZS + i] > 0)
      out.inequality.push_back(le[i]);
    else
      out.implicit_eq[le[i]] = true;
  }
  return out;
}

double entropy_of(const std::vector<double>& p) {
  double h = 0;
  for (double v : p)
    if (v > 0) h -= v * std::log(v);
  return h;
}

}  // namespace

// The entropy maximizer is exp-linear on its support, so we solve the dual
//   min_y  log sum_j exp(-(M^T y)_j) + y.r   with y >= 0 on inequality rows
// by damped Newton on a log barrier for those rows. The dual stays well
// scaled when the optimum puts tiny mass on some atoms, where a primal
// barrier does not.
AtomDistribution maxent_point(const ConstraintSet& c) {
  const std::size_t n = c.atom_count;
  Reduced red = identify(c);
  const std::size_t s = red.support.size();

  AtomDistribution out;
  out.p.assign(n, 0.0);
  out.forced_zero.assign(n, true);
  for (std::size_t j : red.support) out.forced_zero[j] = false;

  // Rows on the support: equalities (explicit and implicit) first.
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < c.rows.size(); ++i)
    if (c.rows[i].kind == LinearConstraint::Kind::Eq || red.implicit_eq[i]) rows.push_back(i);
  const std::size_t e = rows.size();
  rows.insert(rows.end(), red.inequality.begin(), red.inequality.end());
  const Eigen::Index R = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index S = static_cast<Eigen::Index>(s);
  const Eigen::Index E = static_cast<Eigen::Index>(e);

  Mat M(R, S);
  Vec r(R);
  for (Eigen::Index i = 0; i < R; ++i) {
    const auto& row = c.rows[rows[static_cast<std::size_t>(i)]];
    for (Eigen::Index k = 0; k < S; ++k) M(i, k) = row.coeffs[red.support[static_cast<std::size_t>(k)]].get_d();
    r(i) = row.rhs.get_d();
  }

  auto distribution = [&](const Vec& y, double* log_z) {
    Vec a = -(M.transpose() * y);
    double top = S ? a.maxCoeff() : 0.0;
    Vec w = (a.array() - top).exp().matrix();
    double z = w.sum();
    if (log_z) *log_z = top + std::log(z);
    return Vec(w / z);
  };
  auto barrier = [&](const Vec& y, double t, double& value) {
    for (Eigen::Index i = E; i < R; ++i)
      if (!(y(i) > 0)) return false;
    double log_z;
    distribution(y, &log_z);
    value = log_z + y.dot(r);
    for (Eigen::Index i = E; i < R; ++i) value -= t * std::log(y(i));
    return std::isfinite(value);
  };

  Vec y = Vec::Zero(R);
  for (Eigen::Index i = E; i < R; ++i) y(i) = 1.0;
  double t = R > E ? 1.0 : 0.0;
  const double t_final = 1e-15;
  if (S > 0 && R > 0) {
    while (true) {
      for (int iter = 0; iter < 500; ++iter) {
        Vec p = distribution(y, nullptr);
        Vec g = r - M * p;
        Mat cov = Mat(p.asDiagonal()) - p * p.transpose();
        Mat H = M * cov * M.transpose();
        for (Eigen::Index i = E; i < R; ++i) {
          g(i) -= t / y(i);
          H(i, i) += t / (y(i) * y(i));
        }
        Eigen::CompleteOrthogonalDecomposition<Mat> cod(H);
        cod.setThreshold(1e-15);
        Vec dir = cod.solve(-g);
        double slope = g.dot(dir);
        if (!(slope < 0)) {
          dir = -g;
          slope = -g.squaredNorm();
        }
        if (!(-slope > 1e-26)) break;
        double f0 = 0, f1 = 0;
        barrier(y, t, f0);
        double step = 1.0;
        for (Eigen::Index i = E; i < R; ++i)
          if (dir(i) < 0) step = std::min(step, -0.99 * y(i) / dir(i));
        bool moved = false;
        for (int ls = 0; ls < 80; ++ls) {
          Vec trial = y + step * dir;
          if (barrier(trial, t, f1) && f1 <= f0 + 1e-4 * step * slope) {
            moved = trial != y;
            y = trial;
            break;
          }
          step *= 0.5;
        }
        if (!moved) break;
      }
      if (t <= t_final) break;
      t = std::max(t * 0.1, t_final);
    }
  }

  double log_z = 0;
  Vec p = S ? distribution(y, &log_z) : Vec();
  for (std::size_t k = 0; k < s; ++k) out.p[red.support[k]] = p(static_cast<Eigen::Index>(k));
  out.entropy = entropy_of(out.p);

  // Diagnostics on the full problem.
  out.active.assign(c.rows.size(), false);
  double feas = 0;
  for (std::size_t i = 0; i < c.rows.size(); ++i) {
    double lhs = 0;
    for (std::size_t j = 0; j < n; ++j) lhs += c.rows[i].coeffs[j].get_d() * out.p[j];
    double gap = c.rows[i].rhs.get_d() - lhs;
    if (c.rows[i].kind == LinearConstraint::Kind::Eq) {
      feas = std::max(feas, std::abs(gap));
      out.active[i] = true;
    } else {
      feas = std::max(feas, -gap);
      out.active[i] = red.implicit_eq[i] || gap < 1e-9;
    }
  }
  double total = 0;
  for (double v : out.p) total += v;
  out.feasibility = std::max(feas, std::abs(total - 1.0));

  // Lagrangian stationarity -ln p - 1 - M^T y - nu = 0 with nu = ln Z - 1,
  // and complementarity y_i * slack_i on inequality rows.
  if (S > 0) {
    Vec res = -(p.array().log()).matrix() - M.transpose() * y;
    res.array() -= log_z;
    out.stationarity = res.cwiseAbs().maxCoeff();
    double comp = 0;
    Vec slack = r - M * p;
    for (Eigen::Index i = E; i < R; ++i) comp = std::max(comp, std::abs(y(i) * slack(i)));
    out.complementarity = comp;
  }
  return out;
}

// ---------------------------------------------------------------- queries

namespace {

const char* kVar = "%x";

}  // namespace

MaxentAnswer maxent_degree(const Vocabulary& vocab, const Formula& kb, const Formula& query,
                           const std::optional<Formula>& context, const std::optional<ToleranceVector>& keep) {
  MaxentAnswer ans;
  ans.constraints = constraints_from_kb(vocab, kb, keep);
  auto cs = constants_of(query);
  if (cs.size() != 1) throw UnsupportedFeature("a maximum-entropy query must be about exactly one individual");
  ans.constant = *cs.begin();
  if (!is_ground_fact(query)) throw UnsupportedFeature("a maximum-entropy query must be a Boolean combination of facts");
  if (context) {
    auto cc = constants_of(*context);
    if (!is_ground_fact(*context) || cc.size() > 1 || (cc.size() == 1 && *cc.begin() != ans.constant))
      throw UnsupportedFeature("the context must be a Boolean combination of facts about " + ans.constant);
    ans.context = *context;
  } else {
    auto it = ans.constraints.facts.find(ans.constant);
    ans.context = it == ans.constraints.facts.end() ? Formula::truth() : it->second;
  }
  auto qmask = atom_mask(vocab, about(query, ans.constant, kVar), kVar);
  auto kmask = atom_mask(vocab, about(ans.context, ans.constant, kVar), kVar);
  if (!qmask || !kmask) throw UnsupportedFeature("query or context is not a Boolean combination of unary facts");

  ans.point = maxent_point(ans.constraints);
  bool reachable = false;
  double mass = 0, joint = 0;
  for (std::size_t j = 0; j < ans.point.p.size(); ++j) {
    if (!(*kmask)[j]) continue;
    if (!ans.point.forced_zero[j]) reachable = true;
    mass += ans.point.p[j];
    if ((*qmask)[j]) joint += ans.point.p[j];
  }
  ans.context_mass = mass;
  if (!reachable || !(mass > 0))
    throw ZeroMassContext("context '" + print_formula(ans.context) + "' has zero mass at the maximum-entropy point");
  ans.value = joint / mass;
  return ans;
}

MaxentLimit maxent_limit(const Vocabulary& vocab, const Formula& kb, const Formula& query,
                         const std::optional<Formula>& context, const std::vector<Rational>& taus,
                         const std::map<unsigned, unsigned>& powers, double tolerance) {
  MaxentLimit out;
  out.taus = taus;
  std::set<unsigned> indices = tolerance_indices(kb);
  for (const auto& tau : taus) {
    ToleranceVector tol;
    for (unsigned i : indices) {
      unsigned power = powers.count(i) ? powers.at(i) : 1;
      Rational v = 1;
      for (unsigned k = 0; k < power; ++k) v *= tau;
      tol.set(i, v);
    }
    try {
      out.values.push_back(maxent_degree(vocab, kb, query, context, tol).value);
      out.value = out.values.back();
    } catch (const ZeroMassContext&) {
      out.values.push_back(std::nullopt);
    }
  }
  std::size_t n = out.values.size();
  if (n >= 2 && out.values[n - 1] && out.values[n - 2])
    out.converged = std::abs(*out.values[n - 1] - *out.values[n - 2]) <= tolerance;
  return out;
}

GmpTranslation gmp_translate(const std::vector<std::string>& letters, const std::vector<PropositionalRule>& rules,
                             const Formula& context) {
  GmpTranslation out;
  for (const auto& l : letters) out.vocab.add_predicate(l, 1);
  out.constant = "c";
  out.vocab.add_constant(out.constant);
  std::vector<Formula> parts;
  for (const auto& r : rules)
    parts.push_back(Formula::compare(Expr::conditional(r.consequent, r.antecedent, {"x"}), CompareOp::ApproxEq,
                                     Expr::literal(1), r.index));
  out.query_context = substitute(context, "x", Term::constant(out.constant));
  parts.push_back(out.query_context);
  out.kb = Formula::all_of(parts);
  return out;
}

}  // namespace rw
