#include "rw/simplex.hpp"

#include "rw/errors.hpp"

namespace rw {

void LinearProgram::add_row(std::vector<mpq_class> coeffs, Sense sense, mpq_class b) {
  if (coeffs.size() != variables) throw Error("constraint row has the wrong width");
  rows.push_back(std::move(coeffs));
  senses.push_back(sense);
  rhs.push_back(std::move(b));
}

namespace {

// Tableau: m constraint rows plus one objective row; last column is the rhs.
struct Tableau {
  std::size_t m, cols;
  std::vector<std::vector<mpq_class>> t;
  std::vector<std::size_t> basis;

  void pivot(std::size_t r, std::size_t c) {
    mpq_class p = t[r][c];
    for (auto& v : t[r]) v /= p;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == r || t[i][c] == 0) continue;
      mpq_class f = t[i][c];
      for (std::size_t j = 0; j <= cols; ++j)
        if (t[r][j] != 0) t[i][j] -= f * t[r][j];
    }
    basis[r] = c;
  }

  // Maximizes the objective row (stored as reduced costs: entering columns
  // have negative entries). `allowed` masks columns that may enter.
  bool optimize(const std::vector<bool>& allowed) {
    while (true) {
      std::size_t enter = cols;
      for (std::size_t j = 0; j < cols; ++j)
        if (allowed[j] && t[m][j] < 0) {
          enter = j;
          break;
        }
      if (enter == cols) return true;
      std::size_t leave = m;
      mpq_class best;
      for (std::size_t i = 0; i < m; ++i) {
        if (t[i][enter] <= 0) continue;
        mpq_class ratio = t[i][cols] / t[i][enter];
        if (leave == m || ratio < best || (ratio == best && basis[i] < basis[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave == m) return false;
      pivot(leave, enter);
    }
  }
};

}  // namespace

LpResult solve_lp(const LinearProgram& lp) {
  const std::size_t n = lp.variables;
  const std::size_t m = lp.rows.size();
  // Normalize to nonnegative right-hand sides.
  std::vector<std::vector<mpq_class>> a = lp.rows;
  std::vector<mpq_class> b = lp.rhs;
  std::vector<LinearProgram::Sense> s = lp.senses;
  for (std::size_t i = 0; i < m; ++i) {
    if (b[i] < 0) {
      for (auto& v : a[i]) v = -v;
      b[i] = -b[i];
      if (s[i] == LinearProgram::Sense::Le)
        s[i] = LinearProgram::Sense::Ge;
      else if (s[i] == LinearProgram::Sense::Ge)
        s[i] = LinearProgram::Sense::Le;
    }
  }
  std::size_t slacks = 0, artificials = 0;
  for (auto sense : s) {
    if (sense != LinearProgram::Sense::Eq) ++slacks;
    if (sense != LinearProgram::Sense::Le) ++artificials;
  }
  Tableau tab;
  tab.m = m;
  tab.cols = n + slacks + artificials;
  tab.t.assign(m + 1, std::vector<mpq_class>(tab.cols + 1));
  tab.basis.assign(m, 0);
  std::size_t next_slack = n, next_art = n + slacks;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) tab.t[i][j] = a[i][j];
    tab.t[i][tab.cols] = b[i];
    if (s[i] == LinearProgram::Sense::Le) {
      tab.t[i][next_slack] = 1;
      tab.basis[i] = next_slack++;
    } else {
      if (s[i] == LinearProgram::Sense::Ge) tab.t[i][next_slack++] = -1;
      tab.t[i][next_art] = 1;
      tab.basis[i] = next_art++;
    }
  }
  std::vector<bool> all(tab.cols, true);
  LpResult out;
  if (artificials) {
    // Phase 1: maximize -sum(artificials).
    for (std::size_t j = n + slacks; j < tab.cols; ++j) tab.t[m][j] = 1;
    for (std::size_t i = 0; i < m; ++i)
      if (tab.basis[i] >= n + slacks)
        for (std::size_t j = 0; j <= tab.cols; ++j) tab.t[m][j] -= tab.t[i][j];
    tab.optimize(all);
    if (tab.t[m][tab.cols] != 0) return out;  // infeasible
    // Drive remaining artificials out of the basis where possible.
    for (std::size_t i = 0; i < m; ++i) {
      if (tab.basis[i] < n + slacks) continue;
      for (std::size_t j = 0; j < n + slacks; ++j)
        if (tab.t[i][j] != 0) {
          tab.pivot(i, j);
          break;
        }
    }
  }
  std::vector<bool> allowed(tab.cols, false);
  for (std::size_t j = 0; j < n + slacks; ++j) allowed[j] = true;
  for (auto& v : tab.t[m]) v = 0;
  for (std::size_t j = 0; j < n; ++j) tab.t[m][j] = -lp.objective[j];
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t bj = tab.basis[i];
    if (bj < n && lp.objective[bj] != 0) {
      mpq_class f = tab.t[m][bj];
      for (std::size_t j = 0; j <= tab.cols; ++j) tab.t[m][j] -= f * tab.t[i][j];
    }
  }
  if (!tab.optimize(allowed)) {
    out.status = LpResult::Status::Unbounded;
    return out;
  }
  out.status = LpResult::Status::Optimal;
  out.x.assign(n, 0);
  for (std::size_t i = 0; i < m; ++i)
    if (tab.basis[i] < n) out.x[tab.basis[i]] = tab.t[i][tab.cols];
  out.value = 0;
  for (std::size_t j = 0; j < n; ++j) out.value += lp.objective[j] * out.x[j];
  return out;
}

}  // namespace rw
