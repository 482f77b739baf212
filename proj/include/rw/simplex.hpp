#pragma once

// Dense two-phase simplex over exact rationals with Bland's rule. Small
// problems only (a few hundred variables).

#include <vector>

#include <gmpxx.h>

namespace rw {

struct LinearProgram {
  enum class Sense { Le, Eq, Ge };

  std::size_t variables = 0;                 // all variables are >= 0
  std::vector<std::vector<mpq_class>> rows;  // each of length `variables`
  std::vector<Sense> senses;
  std::vector<mpq_class> rhs;
  std::vector<mpq_class> objective;          // maximized

  void add_row(std::vector<mpq_class> coeffs, Sense sense, mpq_class b);
};

struct LpResult {
  enum class Status { Optimal, Infeasible, Unbounded } status = Status::Infeasible;
  std::vector<mpq_class> x;
  mpq_class value;
};

LpResult solve_lp(const LinearProgram& lp);

}  // namespace rw
