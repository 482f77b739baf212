#pragma once

// Exact world counting: #worlds_N(f) over W_N(vocab), where constants range
// over the domain, so |W_N| = prod_P 2^(N^arity(P)) * N^#constants.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "rw/logic.hpp"
#include "rw/translate.hpp"

namespace rw {

enum class Method {
  Auto,   // unary fast path when the vocabulary is unary, naive otherwise
  Naive,  // enumerate every world
  Unary,  // atom-count vectors with multinomial weights
};

const char* method_name(Method m);

struct CountOptions {
  static constexpr std::uint64_t kDefaultBudget = std::uint64_t{1} << 34;

  std::uint64_t budget = kDefaultBudget;  // cap on evaluated worlds or classes
  unsigned threads = 1;
  Method method = Method::Auto;
};

/// "17179869184" or "2^34". Throws Error on anything else.
std::uint64_t parse_budget(const std::string& text);

/// Budget from RW_BUDGET when set (decimal or 2^k), otherwise `fallback`.
std::uint64_t budget_from_env(std::uint64_t fallback = CountOptions::kDefaultBudget);

struct WorldCount {
  mpz_class count;
  mpz_class total;
};

struct CondProb {
  mpq_class value;   // meaningful only when defined
  bool defined = false;
  mpz_class kb_count;
  mpz_class joint_count;

  /// "p/q", or "undefined".
  std::string str() const;
};

/// Atoms (0-based, binary counting on predicate order with P before not-P)
/// at which a quantifier-free formula in the single variable `var` over
/// unary predicates holds; nullopt for any other shape.
std::optional<std::vector<bool>> atom_mask(const Vocabulary& vocab, const Formula& f, const std::string& var);

/// |W_N(vocab)|.
mpz_class total_worlds(const Vocabulary& vocab, unsigned N);

/// Number of enumeration steps the naive enumerator needs (= total worlds).
mpz_class naive_cost(const Vocabulary& vocab, unsigned N);

/// Number of (atom-count vector, constant pattern) classes the unary path
/// visits before pruning, for a vocabulary with `atoms` usable atoms.
mpz_class unary_cost(std::size_t atoms, std::size_t constants, unsigned N);

/// Counts for several ground KBs at once. `query_of[i]` names the query (an
/// index into `queries`, or -1) whose joint count with KB i is wanted. Every
/// formula must be ground (see ground()).
struct BatchCounts {
  std::vector<mpz_class> kb;
  std::vector<mpz_class> joint;
  mpz_class total;
  Method method = Method::Naive;
};

BatchCounts count_batch(const Vocabulary& vocab, unsigned N, const std::vector<Formula>& ground_kbs,
                        const std::vector<Formula>& ground_queries, const std::vector<int>& query_of,
                        const CountOptions& opts);

/// #worlds_N^tol(f) with translation and instantiation applied internally.
WorldCount count_worlds(const Vocabulary& vocab, unsigned N, const ToleranceVector& tol, const Formula& f,
                        const CountOptions& opts = {});

/// Same value through the atom-count path; throws UnsupportedFeature on a
/// non-unary vocabulary.
WorldCount unary_count(const Vocabulary& vocab, unsigned N, const ToleranceVector& tol, const Formula& f,
                       const CountOptions& opts = {});

/// Pr_N^tol(query | kb).
CondProb conditional_probability(const Vocabulary& vocab, unsigned N, const ToleranceVector& tol,
                                 const Formula& query, const Formula& kb, const CountOptions& opts = {});

/// Pr_N for several tolerance vectors in one enumeration pass.
std::vector<CondProb> conditional_probabilities(const Vocabulary& vocab, unsigned N,
                                                const std::vector<ToleranceVector>& stages, const Formula& query,
                                                const Formula& kb, const CountOptions& opts = {});

}  // namespace rw
