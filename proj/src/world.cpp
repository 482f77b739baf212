#include "rw/world.hpp"

#include <optional>

#include "json.hpp"

#include "rw/errors.hpp"

namespace rw {

namespace {

std::size_t ipow(std::size_t base, unsigned exp) {
  std::size_t out = 1;
  for (unsigned i = 0; i < exp; ++i) out *= base;
  return out;
}

}  // namespace

std::size_t table_bits(const Vocabulary& vocab, unsigned N) {
  std::size_t bits = 0;
  for (const auto& p : vocab.predicates()) bits += ipow(N, p.arity);
  return bits;
}

World::World(Vocabulary vocab, unsigned N) : vocab_(std::move(vocab)), n_(N) {
  if (N == 0) throw Error("domain size must be at least 1");
  if (!vocab_.functions().empty())
    throw UnsupportedFeature("function symbol '" + vocab_.functions().front().name +
                             "' is not supported by the world model");
  for (const auto& p : vocab_.predicates()) tables_[p.name].assign(ipow(N, p.arity), false);
  for (const auto& c : vocab_.constants()) constants_[c] = 1;
}

World World::decode(const Vocabulary& vocab, unsigned N, const std::vector<bool>& bits,
                    const std::vector<unsigned>& constants) {
  World w(vocab, N);
  if (bits.size() != table_bits(vocab, N)) throw Error("world encoding has the wrong number of bits");
  if (constants.size() != vocab.constants().size()) throw Error("world encoding has the wrong number of constants");
  std::size_t at = 0;
  for (const auto& p : vocab.predicates()) {
    auto& t = w.tables_[p.name];
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = bits[at++];
  }
  for (std::size_t i = 0; i < constants.size(); ++i) w.assign(vocab.constants()[i], constants[i]);
  return w;
}

std::size_t World::tuple_index(const std::string& predicate, const std::vector<unsigned>& tuple) const {
  auto arity = vocab_.predicate_arity(predicate);
  if (!arity) throw SymbolError("unknown predicate '" + predicate + "'");
  if (tuple.size() != *arity) throw SymbolError("arity mismatch for '" + predicate + "'");
  std::size_t idx = 0;
  for (unsigned e : tuple) {
    if (e < 1 || e > n_) throw Error("element " + std::to_string(e) + " outside the domain");
    idx = idx * n_ + (e - 1);
  }
  return idx;
}

bool World::holds(const std::string& predicate, const std::vector<unsigned>& tuple) const {
  return tables_.at(predicate)[tuple_index(predicate, tuple)];
}

void World::set(const std::string& predicate, const std::vector<unsigned>& tuple, bool value) {
  tables_.at(predicate)[tuple_index(predicate, tuple)] = value;
}

unsigned World::denotation(const std::string& constant) const {
  auto it = constants_.find(constant);
  if (it == constants_.end()) throw SymbolError("unknown constant '" + constant + "'");
  return it->second;
}

void World::assign(const std::string& constant, unsigned element) {
  if (!vocab_.has_constant(constant)) throw SymbolError("unknown constant '" + constant + "'");
  if (element < 1 || element > n_) throw Error("element " + std::to_string(element) + " outside the domain");
  constants_[constant] = element;
}

std::string World::to_json() const {
  nlohmann::ordered_json j;
  j["N"] = n_;
  nlohmann::ordered_json preds = nlohmann::ordered_json::object();
  for (const auto& p : vocab_.predicates()) {
    nlohmann::ordered_json tuples = nlohmann::ordered_json::array();
    const auto& t = tables_.at(p.name);
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (!t[i]) continue;
      std::vector<unsigned> tuple(p.arity);
      std::size_t rest = i;
      for (unsigned k = p.arity; k-- > 0;) {
        tuple[k] = static_cast<unsigned>(rest % n_) + 1;
        rest /= n_;
      }
      tuples.push_back(tuple);
    }
    preds[p.name] = tuples;
  }
  j["predicates"] = preds;
  nlohmann::ordered_json consts = nlohmann::ordered_json::object();
  for (const auto& c : vocab_.constants()) consts[c] = constants_.at(c);
  j["constants"] = consts;
  return j.dump();
}

// ---------------------------------------------------------------- evaluation

namespace {

unsigned term_value(const World& w, const Valuation& v, const Term& t) {
  switch (t.kind) {
    case Term::Kind::Constant:
      return w.denotation(t.name);
    case Term::Kind::Variable: {
      auto it = v.find(t.name);
      if (it == v.end()) throw Error("variable '" + t.name + "' has no value");
      return it->second;
    }
    case Term::Kind::Apply:
      break;
  }
  throw UnsupportedFeature("function symbol '" + t.name + "' cannot be evaluated");
}

// Number of tuples over `vars` (from position i on) satisfying psi.
std::size_t count_tuples(const World& w, Valuation& v, const std::vector<std::string>& vars, std::size_t i,
                         const Formula& psi) {
  if (i == vars.size()) return eval_formula(w, v, psi) ? 1 : 0;
  auto saved = v.find(vars[i]) != v.end() ? std::optional<unsigned>(v[vars[i]]) : std::nullopt;
  std::size_t total = 0;
  for (unsigned d = 1; d <= w.size(); ++d) {
    v[vars[i]] = d;
    total += count_tuples(w, v, vars, i + 1, psi);
  }
  if (saved)
    v[vars[i]] = *saved;
  else
    v.erase(vars[i]);
  return total;
}

}  // namespace

Rational eval_proportion(const World& w, const Valuation& v, const Expr& e) {
  switch (e.kind) {
    case ExprKind::Literal:
      return e.value;
    case ExprKind::Proportion: {
      Valuation inner = v;
      std::size_t hits = count_tuples(w, inner, e.vars, 0, e.body[0]);
      Rational::Int den = 1;
      for (std::size_t i = 0; i < e.vars.size(); ++i) den *= w.size();
      return Rational(static_cast<Rational::Int>(hits), den);
    }
    case ExprKind::Sum:
      return eval_proportion(w, v, *e.a) + eval_proportion(w, v, *e.b);
    case ExprKind::Product:
      return eval_proportion(w, v, *e.a) * eval_proportion(w, v, *e.b);
    case ExprKind::Difference:
      return eval_proportion(w, v, *e.a) - eval_proportion(w, v, *e.b);
    case ExprKind::Tolerance:
      throw Error("tolerance eps[" + std::to_string(e.index) + "] must be instantiated before evaluation");
    case ExprKind::Conditional:
      throw Error("conditional proportions must be translated before evaluation");
  }
  throw Error("unreachable expression kind");
}

bool eval_formula(const World& w, const Valuation& v, const Formula& f) {
  switch (f.kind) {
    case FormulaKind::True:
      return true;
    case FormulaKind::False:
      return false;
    case FormulaKind::Predicate: {
      std::vector<unsigned> tuple;
      for (const auto& t : f.args) tuple.push_back(term_value(w, v, t));
      return w.holds(f.symbol, tuple);
    }
    case FormulaKind::Equal:
      return term_value(w, v, f.args[0]) == term_value(w, v, f.args[1]);
    case FormulaKind::Not:
      return !eval_formula(w, v, f.sub[0]);
    case FormulaKind::And:
      return eval_formula(w, v, f.sub[0]) && eval_formula(w, v, f.sub[1]);
    case FormulaKind::Or:
      return eval_formula(w, v, f.sub[0]) || eval_formula(w, v, f.sub[1]);
    case FormulaKind::Implies:
      return !eval_formula(w, v, f.sub[0]) || eval_formula(w, v, f.sub[1]);
    case FormulaKind::Iff:
      return eval_formula(w, v, f.sub[0]) == eval_formula(w, v, f.sub[1]);
    case FormulaKind::Forall:
    case FormulaKind::Exists:
    case FormulaKind::ExistsUnique:
    case FormulaKind::ExistsExactly: {
      Valuation inner = v;
      unsigned hits = 0;
      for (unsigned d = 1; d <= w.size(); ++d) {
        inner[f.var] = d;
        if (eval_formula(w, inner, f.sub[0])) ++hits;
      }
      if (f.kind == FormulaKind::Forall) return hits == w.size();
      if (f.kind == FormulaKind::Exists) return hits > 0;
      if (f.kind == FormulaKind::ExistsUnique) return hits == 1;
      return hits == f.count;
    }
    case FormulaKind::Compare: {
      if (f.op == CompareOp::ApproxEq || f.op == CompareOp::ApproxLe)
        throw Error("approximate comparisons must be translated before evaluation");
      Rational a = eval_proportion(w, v, *f.lhs);
      Rational b = eval_proportion(w, v, *f.rhs);
      return f.op == CompareOp::Eq ? a == b : a <= b;
    }
  }
  throw Error("unreachable formula kind");
}

bool eval_formula(const World& w, const Valuation& v, const ExactFormula& f) { return eval_formula(w, v, f.root()); }

}  // namespace rw
