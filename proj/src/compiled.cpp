#include "rw/compiled.hpp"

#include <algorithm>
#include <numeric>

#include "rw/errors.hpp"
#include "rw/world.hpp"

namespace rw {

namespace {

using Int = __int128;

Int abs128(Int v) { return v < 0 ? -v : v; }

Int gcd128(Int a, Int b) {
  a = abs128(a);
  b = abs128(b);
  while (b != 0) {
    Int t = a % b;
    a = b;
    b = t;
  }
  return a;
}

bool mul(Int a, Int b, Int& out) { return !__builtin_mul_overflow(a, b, &out); }
bool add(Int a, Int b, Int& out) { return !__builtin_add_overflow(a, b, &out); }

std::uint64_t bit(unsigned i) { return std::uint64_t{1} << i; }

std::uint64_t extract(const std::uint64_t* words, std::size_t offset, unsigned n, std::uint64_t full) {
  std::size_t w = offset >> 6;
  unsigned sh = offset & 63;
  std::uint64_t v = words[w] >> sh;
  if (sh != 0 && sh + n > 64) v |= words[w + 1] << (64 - sh);
  return v & full;
}

bool test(const std::uint64_t* words, std::size_t i) { return (words[i >> 6] >> (i & 63)) & 1; }

}  // namespace

CompiledFormula::CompiledFormula(const Vocabulary& vocab, unsigned N, const Formula& f) : vocab_(&vocab), n_(N) {
  if (N == 0 || N > kMaxDomain) throw UnsupportedFeature("domain size " + std::to_string(N) + " outside 1..64");
  if (auto fs = functions_of(f); !fs.empty())
    throw UnsupportedFeature("function symbol '" + *fs.begin() + "' is not supported by the counting engine");
  if (auto fv = free_variables(f); !fv.empty()) throw Error("formula has free variable '" + *fv.begin() + "'");
  full_ = N == 64 ? ~std::uint64_t{0} : bit(N) - 1;
  std::size_t off = 0;
  for (const auto& p : vocab.predicates()) {
    pred_offset_.push_back(off);
    pred_arity_.push_back(p.arity);
    std::size_t size = 1;
    for (unsigned i = 0; i < p.arity; ++i) size *= N;
    off += size;
  }
  std::vector<std::pair<std::string, unsigned>> scope;
  root_ = compile(f, scope);
  if (slots_ > 64) throw UnsupportedFeature("formula binds more than 64 variables");
}

int CompiledFormula::compile(const Formula& f, std::vector<std::pair<std::string, unsigned>>& scope) {
  Node node{};
  auto term = [&](const rw::Term& t) -> Term {
    if (t.kind == rw::Term::Kind::Constant) {
      const auto& cs = vocab_->constants();
      auto it = std::find(cs.begin(), cs.end(), t.name);
      if (it == cs.end()) throw SymbolError("constant '" + t.name + "' is not in the vocabulary");
      constant_free_ = false;
      return {true, static_cast<unsigned>(it - cs.begin())};
    }
    if (t.kind == rw::Term::Kind::Apply)
      throw UnsupportedFeature("function symbol '" + t.name + "' is not supported by the counting engine");
    for (auto it = scope.rbegin(); it != scope.rend(); ++it)
      if (it->first == t.name) {
        node.deps |= bit(it->second);
        return {false, it->second};
      }
    throw Error("variable '" + t.name + "' is unbound");
  };
  switch (f.kind) {
    case FormulaKind::True:
      node.op = Node::True;
      break;
    case FormulaKind::False:
      node.op = Node::False;
      break;
    case FormulaKind::Predicate: {
      node.op = Node::Pred;
      const auto& ps = vocab_->predicates();
      auto it = std::find_if(ps.begin(), ps.end(), [&](const Symbol& s) { return s.name == f.symbol; });
      if (it == ps.end()) throw SymbolError("predicate '" + f.symbol + "' is not in the vocabulary");
      if (it->arity != f.args.size()) throw SymbolError("arity mismatch for predicate '" + f.symbol + "'");
      node.pred = static_cast<unsigned>(it - ps.begin());
      for (const auto& t : f.args) node.args.push_back(term(t));
      break;
    }
    case FormulaKind::Equal:
      node.op = Node::Eq;
      for (const auto& t : f.args) node.args.push_back(term(t));
      break;
    case FormulaKind::Not:
      node.op = Node::Not;
      node.a = compile(f.sub[0], scope);
      break;
    case FormulaKind::And:
    case FormulaKind::Or:
    case FormulaKind::Implies:
    case FormulaKind::Iff:
      node.op = f.kind == FormulaKind::And      ? Node::And
                : f.kind == FormulaKind::Or     ? Node::Or
                : f.kind == FormulaKind::Implies ? Node::Implies
                                                 : Node::Iff;
      node.a = compile(f.sub[0], scope);
      node.b = compile(f.sub[1], scope);
      break;
    case FormulaKind::Forall:
    case FormulaKind::Exists:
    case FormulaKind::ExistsUnique:
    case FormulaKind::ExistsExactly:
      node.op = f.kind == FormulaKind::Forall ? Node::Forall : f.kind == FormulaKind::Exists ? Node::Exists : Node::Count;
      node.count = f.kind == FormulaKind::ExistsUnique ? 1 : f.count;
      node.slot = slots_++;
      scope.emplace_back(f.var, node.slot);
      node.a = compile(f.sub[0], scope);
      scope.pop_back();
      break;
    case FormulaKind::Compare:
      if (f.op == CompareOp::ApproxEq || f.op == CompareOp::ApproxLe)
        throw Error("approximate comparisons must be translated before counting");
      node.op = Node::Compare;
      node.is_eq = f.op == CompareOp::Eq;
      node.a = compile_expr(*f.lhs, scope);
      node.b = compile_expr(*f.rhs, scope);
      break;
  }
  if (node.a >= 0) node.deps |= node.op == Node::Compare ? exprs_[node.a].deps : nodes_[node.a].deps;
  if (node.b >= 0) node.deps |= node.op == Node::Compare ? exprs_[node.b].deps : nodes_[node.b].deps;
  if (node.op == Node::Forall || node.op == Node::Exists || node.op == Node::Count) node.deps &= ~bit(node.slot);
  nodes_.push_back(std::move(node));
  return static_cast<int>(nodes_.size() - 1);
}

int CompiledFormula::compile_expr(const rw::Expr& e, std::vector<std::pair<std::string, unsigned>>& scope) {
  Expr out{};
  switch (e.kind) {
    case ExprKind::Literal:
      out.op = Expr::Literal;
      out.num = e.value.num();
      out.den = e.value.den();
      break;
    case ExprKind::Proportion: {
      out.op = Expr::Prop;
      for (const auto& v : e.vars) {
        out.slots.push_back(slots_++);
        scope.emplace_back(v, out.slots.back());
      }
      out.body = compile(e.body[0], scope);
      scope.resize(scope.size() - e.vars.size());
      out.deps = nodes_[out.body].deps;
      for (unsigned s : out.slots) out.deps &= ~bit(s);
      break;
    }
    case ExprKind::Sum:
    case ExprKind::Product:
    case ExprKind::Difference:
      out.op = e.kind == ExprKind::Sum ? Expr::Sum : e.kind == ExprKind::Product ? Expr::Product : Expr::Difference;
      out.a = compile_expr(*e.a, scope);
      out.b = compile_expr(*e.b, scope);
      out.deps = exprs_[out.a].deps | exprs_[out.b].deps;
      break;
    case ExprKind::Tolerance:
      throw Error("tolerance eps[" + std::to_string(e.index) + "] must be instantiated before counting");
    case ExprKind::Conditional:
      throw Error("conditional proportions must be translated before counting");
  }
  exprs_.push_back(std::move(out));
  return static_cast<int>(exprs_.size() - 1);
}

bool CompiledFormula::eval(const PackedWorld& w) const {
  unsigned env[64] = {};
  return eval_node(root_, w, env);
}

bool CompiledFormula::eval_node(int n, const PackedWorld& w, unsigned* env) const {
  const Node& node = nodes_[n];
  auto val = [&](const Term& t) { return t.is_constant ? w.constants[t.index] : env[t.index]; };
  switch (node.op) {
    case Node::True:
      return true;
    case Node::False:
      return false;
    case Node::Pred: {
      std::size_t idx = 0;
      for (const auto& t : node.args) idx = idx * n_ + val(t);
      return test(w.bits, pred_offset_[node.pred] + idx);
    }
    case Node::Eq:
      return val(node.args[0]) == val(node.args[1]);
    case Node::Not:
      return !eval_node(node.a, w, env);
    case Node::And:
      return eval_node(node.a, w, env) && eval_node(node.b, w, env);
    case Node::Or:
      return eval_node(node.a, w, env) || eval_node(node.b, w, env);
    case Node::Implies:
      return !eval_node(node.a, w, env) || eval_node(node.b, w, env);
    case Node::Iff:
      return eval_node(node.a, w, env) == eval_node(node.b, w, env);
    case Node::Forall:
      return set_of(node.a, w, env, node.slot) == full_;
    case Node::Exists:
      return set_of(node.a, w, env, node.slot) != 0;
    case Node::Count:
      return static_cast<unsigned>(__builtin_popcountll(set_of(node.a, w, env, node.slot))) == node.count;
    case Node::Compare: {
      Fraction x = value(node.a, w, env), y = value(node.b, w, env);
      Int l, r;
      if (!mul(x.num, y.den, l) || !mul(y.num, x.den, r))
        throw ArithmeticOverflow("comparison exceeds 128-bit range");
      return node.is_eq ? l == r : l <= r;
    }
  }
  return false;
}

std::uint64_t CompiledFormula::set_of(int n, const PackedWorld& w, unsigned* env, unsigned slot) const {
  const Node& node = nodes_[n];
  if (!(node.deps & bit(slot))) return eval_node(n, w, env) ? full_ : 0;
  auto val = [&](const Term& t) { return t.is_constant ? w.constants[t.index] : env[t.index]; };
  switch (node.op) {
    case Node::Pred: {
      // Contiguous when only the last argument is the varying slot.
      bool last_only = !node.args.back().is_constant && node.args.back().index == slot;
      for (std::size_t i = 0; i + 1 < node.args.size() && last_only; ++i)
        if (!node.args[i].is_constant && node.args[i].index == slot) last_only = false;
      if (last_only) {
        std::size_t idx = 0;
        for (std::size_t i = 0; i + 1 < node.args.size(); ++i) idx = idx * n_ + val(node.args[i]);
        return extract(w.bits, pred_offset_[node.pred] + idx * n_, n_, full_);
      }
      break;
    }
    case Node::Eq: {
      const Term& x = node.args[0];
      const Term& y = node.args[1];
      bool xs = !x.is_constant && x.index == slot, ys = !y.is_constant && y.index == slot;
      if (xs && ys) return full_;
      return bit(xs ? val(y) : val(x));
    }
    case Node::Not:
      return ~set_of(node.a, w, env, slot) & full_;
    case Node::And: {
      std::uint64_t m = set_of(node.a, w, env, slot);
      return m ? m & set_of(node.b, w, env, slot) : 0;
    }
    case Node::Or: {
      std::uint64_t m = set_of(node.a, w, env, slot);
      return m == full_ ? m : m | set_of(node.b, w, env, slot);
    }
    case Node::Implies: {
      std::uint64_t m = ~set_of(node.a, w, env, slot) & full_;
      return m == full_ ? m : m | set_of(node.b, w, env, slot);
    }
    case Node::Iff:
      return ~(set_of(node.a, w, env, slot) ^ set_of(node.b, w, env, slot)) & full_;
    case Node::Forall: {
      std::uint64_t m = full_;
      for (unsigned e = 0; e < n_ && m; ++e) {
        env[node.slot] = e;
        m &= set_of(node.a, w, env, slot);
      }
      return m;
    }
    case Node::Exists: {
      std::uint64_t m = 0;
      for (unsigned e = 0; e < n_ && m != full_; ++e) {
        env[node.slot] = e;
        m |= set_of(node.a, w, env, slot);
      }
      return m;
    }
    default:
      break;
  }
  std::uint64_t m = 0;
  unsigned saved = env[slot];
  for (unsigned d = 0; d < n_; ++d) {
    env[slot] = d;
    if (eval_node(n, w, env)) m |= bit(d);
  }
  env[slot] = saved;
  return m;
}

std::uint64_t CompiledFormula::count_tuples(int body, const std::vector<unsigned>& slots, std::size_t i,
                                            const PackedWorld& w, unsigned* env) const {
  if (i + 1 == slots.size()) return __builtin_popcountll(set_of(body, w, env, slots[i]));
  std::uint64_t total = 0;
  for (unsigned d = 0; d < n_; ++d) {
    env[slots[i]] = d;
    total += count_tuples(body, slots, i + 1, w, env);
  }
  return total;
}

CompiledFormula::Fraction CompiledFormula::value(int e, const PackedWorld& w, unsigned* env) const {
  const Expr& x = exprs_[e];
  switch (x.op) {
    case Expr::Literal:
      return {x.num, x.den};
    case Expr::Prop: {
      Int den = 1;
      for (std::size_t i = 0; i < x.slots.size(); ++i) den *= n_;
      return {static_cast<Int>(count_tuples(x.body, x.slots, 0, w, env)), den};
    }
    default:
      break;
  }
  Fraction a = value(x.a, w, env), b = value(x.b, w, env);
  for (int attempt = 0; attempt < 2; ++attempt) {
    Fraction out;
    bool ok;
    if (x.op == Expr::Product) {
      ok = mul(a.num, b.num, out.num) && mul(a.den, b.den, out.den);
    } else {
      Int l, r;
      ok = mul(a.num, b.den, l) && mul(b.num, a.den, r) && mul(a.den, b.den, out.den);
      if (ok) ok = x.op == Expr::Sum ? add(l, r, out.num) : !__builtin_sub_overflow(l, r, &out.num);
    }
    if (ok) {
      if (abs128(out.den) > (Int{1} << 60)) {
        Int g = gcd128(out.num, out.den);
        if (g > 1) {
          out.num /= g;
          out.den /= g;
        }
      }
      return out;
    }
    for (Fraction* f : {&a, &b}) {
      Int g = gcd128(f->num, f->den);
      if (g > 1) {
        f->num /= g;
        f->den /= g;
      }
    }
  }
  throw ArithmeticOverflow("proportion expression exceeds 128-bit range");
}

}  // namespace rw
