#pragma once

// Slot-indexed evaluator used by the counting engine. Worlds are packed bit
// tables (the table_bits layout) plus constant denotations, elements 0-based.
// Sets of elements are evaluated 64 at a time as bit masks, so N <= 64.

#include <cstdint>
#include <vector>

#include "rw/logic.hpp"

namespace rw {

struct PackedWorld {
  unsigned n = 0;
  const std::uint64_t* bits = nullptr;   // at least table_bits/64 + 1 words
  const unsigned* constants = nullptr;   // 0-based, declaration order
};

class CompiledFormula {
 public:
  static constexpr unsigned kMaxDomain = 64;

  CompiledFormula() = default;
  /// `f` must be closed and ground (translated, tolerances instantiated).
  /// Throws UnsupportedFeature on function symbols, SymbolError on symbols
  /// missing from `vocab`, Error on leftover approximate parts.
  CompiledFormula(const Vocabulary& vocab, unsigned N, const Formula& f);

  bool eval(const PackedWorld& w) const;

  /// True when no constant occurs, so the value depends only on the tables.
  bool constant_free() const noexcept { return constant_free_; }

  struct Node;
  struct Term;
  struct Expr;

 private:
  struct Fraction {
    __int128 num;
    __int128 den;
  };

  bool eval_node(int n, const PackedWorld& w, unsigned* env) const;
  std::uint64_t set_of(int n, const PackedWorld& w, unsigned* env, unsigned slot) const;
  Fraction value(int e, const PackedWorld& w, unsigned* env) const;
  std::uint64_t count_tuples(int body, const std::vector<unsigned>& slots, std::size_t i, const PackedWorld& w,
                             unsigned* env) const;

  int compile(const Formula& f, std::vector<std::pair<std::string, unsigned>>& scope);
  int compile_expr(const rw::Expr& e, std::vector<std::pair<std::string, unsigned>>& scope);

  const Vocabulary* vocab_ = nullptr;
  unsigned n_ = 0;
  std::uint64_t full_ = 0;
  std::vector<Node> nodes_;
  std::vector<Expr> exprs_;
  std::vector<std::size_t> pred_offset_;
  std::vector<unsigned> pred_arity_;
  unsigned slots_ = 0;
  int root_ = -1;
  bool constant_free_ = true;
};

struct CompiledFormula::Term {
  bool is_constant;
  unsigned index;  // slot or constant position
};

struct CompiledFormula::Node {
  enum Op { True, False, Pred, Eq, Not, And, Or, Implies, Iff, Forall, Exists, Count, Compare } op;
  unsigned pred = 0;
  std::vector<Term> args;
  int a = -1, b = -1;            // children (formulas) or operands (expressions)
  unsigned slot = 0;
  unsigned count = 0;
  bool is_eq = false;            // Compare: == rather than <=
  std::uint64_t deps = 0;        // free slots
};

struct CompiledFormula::Expr {
  enum Op { Literal, Prop, Sum, Product, Difference } op;
  __int128 num = 0, den = 1;     // Literal
  int body = -1;                 // Prop
  std::vector<unsigned> slots;   // Prop
  int a = -1, b = -1;
  std::uint64_t deps = 0;
};

}  // namespace rw
