#pragma once

// Shared helpers for the test binaries: corpus access, a brute-force world
// counter built on the tree-walking evaluator, and a seeded generator of
// random closed formulas.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "rw/logic.hpp"
#include "rw/parser.hpp"
#include "rw/translate.hpp"
#include "rw/world.hpp"

namespace rwtest {

inline std::filesystem::path corpus_dir() { return RW_CORPUS_DIR; }

inline rw::KnowledgeBase corpus_kb(const std::string& name) {
  std::ifstream in(corpus_dir() / (name + ".rwkb"));
  std::stringstream ss;
  ss << in.rdbuf();
  return rw::parse_kb(ss.str());
}

inline std::vector<std::string> corpus_names() {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(corpus_dir()))
    if (e.path().extension() == ".rwkb") out.push_back(e.path().stem().string());
  std::sort(out.begin(), out.end());
  return out;
}

// Calls fn(world) for every world of size N over vocab.
template <class Fn>
void for_each_world(const rw::Vocabulary& vocab, unsigned N, Fn fn) {
  std::size_t bits = rw::table_bits(vocab, N);
  std::size_t k = vocab.constants().size();
  std::vector<bool> table(bits);
  std::vector<unsigned> consts(k, 1);
  for (std::uint64_t t = 0; t < (std::uint64_t{1} << bits); ++t) {
    for (std::size_t i = 0; i < bits; ++i) table[i] = (t >> i) & 1;
    std::fill(consts.begin(), consts.end(), 1u);
    while (true) {
      fn(rw::World::decode(vocab, N, table, consts));
      std::size_t i = 0;
      while (i < k && consts[i] == N) consts[i++] = 1;
      if (i == k) break;
      ++consts[i];
    }
  }
}

// #worlds_N^tol(f) by walking every world with the reference evaluator.
inline mpz_class brute_count(const rw::Vocabulary& vocab, unsigned N, const rw::ToleranceVector& tol,
                             const rw::Formula& f) {
  rw::Formula g = rw::desugar(rw::ground(f, tol));
  mpz_class n = 0;
  for_each_world(vocab, N, [&](const rw::World& w) {
    if (rw::eval_formula(w, {}, g)) ++n;
  });
  return n;
}

// Random closed formulas over P/1, Q/1, R/2 and constants a, b. Bound
// variables are drawn from `names` by position, so two generators with the
// same seed and different name pools give alpha-equivalent formulas.
class FormulaGen {
 public:
  explicit FormulaGen(unsigned seed, std::vector<std::string> names = {"x", "y", "z"}, bool approximate = true)
      : rng_(seed), names_(std::move(names)), approximate_(approximate) {}

  static rw::Vocabulary vocab() {
    rw::Vocabulary v;
    v.add_predicate("P", 1);
    v.add_predicate("Q", 1);
    v.add_predicate("R", 2);
    v.add_constant("a");
    v.add_constant("b");
    return v;
  }

  rw::Formula formula(int depth) {
    std::vector<std::string> scope;
    return formula(depth, scope);
  }

  // Conditional-free proportion over one or two bound variables.
  rw::ExprPtr bare_proportion(std::vector<std::string>& scope) {
    auto vars = fresh_vars(1 + pick(2), scope);
    auto inner = scope;
    inner.insert(inner.end(), vars.begin(), vars.end());
    return rw::Expr::proportion(formula(1, inner, false), vars);
  }

  unsigned pick(unsigned n) { return std::uniform_int_distribution<unsigned>(0, n - 1)(rng_); }

 private:
  std::vector<std::string> fresh_vars(unsigned count, const std::vector<std::string>& scope) {
    std::vector<std::string> out;
    for (unsigned i = 0; i < count; ++i) out.push_back(names_[(scope.size() + i) % names_.size()]);
    return out;
  }

  rw::Term term(const std::vector<std::string>& scope) {
    unsigned choice = pick(static_cast<unsigned>(scope.size()) + 2);
    if (choice == 0) return rw::Term::constant("a");
    if (choice == 1) return rw::Term::constant("b");
    return rw::Term::variable(scope[choice - 2]);
  }

  rw::Formula atom(const std::vector<std::string>& scope) {
    switch (pick(4)) {
      case 0: return rw::Formula::predicate("P", {term(scope)});
      case 1: return rw::Formula::predicate("Q", {term(scope)});
      case 2: return rw::Formula::predicate("R", {term(scope), term(scope)});
      default: return rw::Formula::equal(term(scope), term(scope));
    }
  }

  rw::Rational literal() {
    static const std::vector<rw::Rational> values = {rw::Rational(0), rw::Rational(1, 4), rw::Rational(1, 2),
                                                     rw::Rational(3, 4), rw::Rational(1), rw::Rational(4, 5),
                                                     rw::Rational(3, 10)};
    return values[pick(static_cast<unsigned>(values.size()))];
  }

  rw::ExprPtr expr(int depth, std::vector<std::string>& scope, bool approx) {
    unsigned choice = pick(depth > 0 ? 5 : 3);
    if (choice == 0) return rw::Expr::literal(literal());
    if (choice == 1 || (choice == 2 && !approx)) return bare_proportion(scope);
    if (choice == 2) {
      auto vars = fresh_vars(1, scope);
      auto inner = scope;
      inner.insert(inner.end(), vars.begin(), vars.end());
      rw::Formula psi = formula(1, inner, false);
      rw::Formula theta = formula(1, inner, false);
      return rw::Expr::conditional(psi, theta, vars);
    }
    auto a = expr(depth - 1, scope, approx);
    auto b = expr(depth - 1, scope, approx);
    return choice == 3 ? rw::Expr::sum(a, b) : rw::Expr::product(a, b);
  }

  rw::Formula formula(int depth, std::vector<std::string>& scope, bool allow_compare = true) {
    if (depth <= 0) return pick(8) == 0 ? (pick(2) ? rw::Formula::truth() : rw::Formula::falsity()) : atom(scope);
    unsigned choice = pick(allow_compare ? 11 : 10);
    auto sub = [&] { return formula(depth - 1, scope, allow_compare); };
    auto quantified = [&](auto make) {
      auto v = fresh_vars(1, scope).front();
      scope.push_back(v);
      rw::Formula body = formula(depth - 1, scope, allow_compare);
      scope.pop_back();
      return make(v, body);
    };
    switch (choice) {
      case 0: return atom(scope);
      case 1: return rw::Formula::negation(sub());
      case 2: return rw::Formula::conjunction(sub(), sub());
      case 3: return rw::Formula::disjunction(sub(), sub());
      case 4: return rw::Formula::implication(sub(), sub());
      case 5: return rw::Formula::biconditional(sub(), sub());
      case 6: return quantified([](auto v, auto b) { return rw::Formula::forall(v, b); });
      case 7: return quantified([](auto v, auto b) { return rw::Formula::exists(v, b); });
      case 8: return quantified([](auto v, auto b) { return rw::Formula::exists_unique(v, b); });
      case 9: {
        unsigned n = 1 + pick(3);
        return quantified([n](auto v, auto b) { return rw::Formula::exists_exactly(n, v, b); });
      }
      default: {
        bool approx = approximate_;
        auto lhs = expr(1, scope, approx);
        auto rhs = expr(1, scope, approx);
        rw::CompareOp op = approx ? (pick(2) ? rw::CompareOp::ApproxEq : rw::CompareOp::ApproxLe)
                                  : (pick(2) ? rw::CompareOp::Eq : rw::CompareOp::Le);
        return rw::Formula::compare(lhs, op, rhs, approx ? 1 + pick(2) : 0);
      }
    }
  }

  std::mt19937 rng_;
  std::vector<std::string> names_;
  bool approximate_;
};

}  // namespace rwtest
