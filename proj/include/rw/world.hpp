#pragma once

// Finite models over {1..N} and the reference (tree-walking) evaluator of the
// exact language. Elements are 1-based at this interface.

#include <map>
#include <string>
#include <vector>

#include "rw/logic.hpp"

namespace rw {

/// Number of bits that store the tables of `vocab` at domain size N, laid out
/// predicate by predicate (declaration order), tuples in lexicographic order.
std::size_t table_bits(const Vocabulary& vocab, unsigned N);

class World {
 public:
  /// All tables empty, every constant denoting element 1. Throws
  /// UnsupportedFeature when the vocabulary declares function symbols.
  World(Vocabulary vocab, unsigned N);

  /// Decodes the packed layout of table_bits(): bit i of `bits` is tuple i.
  /// `constants` are 1-based, in declaration order.
  static World decode(const Vocabulary& vocab, unsigned N, const std::vector<bool>& bits,
                      const std::vector<unsigned>& constants);

  unsigned size() const noexcept { return n_; }
  const Vocabulary& vocab() const noexcept { return vocab_; }

  bool holds(const std::string& predicate, const std::vector<unsigned>& tuple) const;
  void set(const std::string& predicate, const std::vector<unsigned>& tuple, bool value = true);
  unsigned denotation(const std::string& constant) const;
  void assign(const std::string& constant, unsigned element);

  /// {"N": n, "predicates": {name: [[1,2], ...]}, "constants": {name: e}}
  std::string to_json() const;

 private:
  std::size_t tuple_index(const std::string& predicate, const std::vector<unsigned>& tuple) const;

  Vocabulary vocab_;
  unsigned n_;
  std::map<std::string, std::vector<bool>> tables_;
  std::map<std::string, unsigned> constants_;
};

/// Variable assignment; elements 1-based.
using Valuation = std::map<std::string, unsigned>;

/// Exact value of a conditional-free, tolerance-free expression.
Rational eval_proportion(const World& w, const Valuation& v, const Expr& e);

/// Tarskian truth of a translated, tolerance-instantiated formula. Throws
/// UnsupportedFeature on function terms and Error on leftover ~= / <~ /
/// conditional / eps nodes or variables missing from the valuation.
bool eval_formula(const World& w, const Valuation& v, const Formula& f);
bool eval_formula(const World& w, const Valuation& v, const ExactFormula& f);

}  // namespace rw
