#include "secretgame/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace secretgame {

namespace {

struct Tableau {
  std::size_t width = 0;  // columns excluding RHS
  std::vector<std::vector<double>> rows;  // each of size width + 1
  std::vector<double> cost;               // reduced costs, size width + 1
  std::vector<std::size_t> basis;         // basic column per row
  double tol = 1e-9;

  void pivot(std::size_t prow, std::size_t pcol) {
    std::vector<double>& p = rows[prow];
    const double inv = 1.0 / p[pcol];
    for (double& v : p) v *= inv;
    p[pcol] = 1.0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == prow) continue;
      eliminate(rows[r], pcol, p);
    }
    eliminate(cost, pcol, p);
    basis[prow] = pcol;
  }

  static void eliminate(std::vector<double>& row, std::size_t pcol,
                        const std::vector<double>& p) {
    const double f = row[pcol];
    if (f == 0.0) return;
    const std::size_t n = row.size();
    for (std::size_t k = 0; k < n; ++k) row[k] -= f * p[k];
    row[pcol] = 0.0;
  }

  // Maximization step over columns [0, limit). Returns false at optimality,
  // throws on unboundedness.
  bool step(std::size_t limit, bool bland) {
    std::size_t pcol = width;
    if (bland) {
      for (std::size_t j = 0; j < limit; ++j)
        if (cost[j] > tol) { pcol = j; break; }
    } else {
      double best = tol;
      for (std::size_t j = 0; j < limit; ++j)
        if (cost[j] > best) { best = cost[j]; pcol = j; }
    }
    if (pcol == width) return false;

    std::size_t prow = rows.size();
    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const double a = rows[r][pcol];
      if (a <= tol) continue;
      const double ratio = rows[r][width] / a;
      if (ratio < best_ratio - tol ||
          (ratio < best_ratio + tol &&
           (prow == rows.size() || basis[r] < basis[prow]))) {
        best_ratio = ratio;
        prow = r;
      }
    }
    if (prow == rows.size())
      throw std::runtime_error("LP is unbounded");
    pivot(prow, pcol);
    return true;
  }
};

}  // namespace

LpResult solve_lp(const LpProblem& problem, double tol) {
  const std::size_t n = problem.num_vars;
  const std::size_t m_ub = problem.a_ub.size();
  const std::size_t m_eq = problem.a_eq.size();
  const std::size_t m = m_ub + m_eq;

  // Columns: n structural, m_ub slacks, then one artificial per row that
  // needs it (equality rows and negated inequality rows).
  std::vector<int> slack_sign(m_ub, 1);
  std::vector<bool> needs_art(m, false);
  for (std::size_t r = 0; r < m_ub; ++r) {
    if (problem.b_ub[r] < 0.0) {
      slack_sign[r] = -1;
      needs_art[r] = true;
    }
  }
  for (std::size_t r = 0; r < m_eq; ++r) needs_art[m_ub + r] = true;
  std::size_t n_art = 0;
  for (std::size_t r = 0; r < m; ++r)
    if (needs_art[r]) ++n_art;

  Tableau t;
  t.tol = tol;
  t.width = n + m_ub + n_art;
  t.rows.assign(m, std::vector<double>(t.width + 1, 0.0));
  t.basis.assign(m, 0);

  std::size_t art = n + m_ub;
  for (std::size_t r = 0; r < m; ++r) {
    std::vector<double>& row = t.rows[r];
    const bool is_ub = r < m_ub;
    const std::vector<double>& a =
        is_ub ? problem.a_ub[r] : problem.a_eq[r - m_ub];
    double b = is_ub ? problem.b_ub[r] : problem.b_eq[r - m_ub];
    double sign = 1.0;
    if (b < 0.0) {
      sign = -1.0;
      b = -b;
    }
    if (a.size() != n)
      throw std::invalid_argument("LP row has wrong number of coefficients");
    for (std::size_t j = 0; j < n; ++j) row[j] = sign * a[j];
    if (is_ub) row[n + r] = sign;  // slack (becomes -1 when negated)
    row[t.width] = b;
    if (needs_art[r]) {
      row[art] = 1.0;
      t.basis[r] = art;
      ++art;
    } else {
      t.basis[r] = n + r;
    }
  }

  LpResult out;
  const std::size_t max_dantzig = 20 * (m + t.width) + 1000;
  const std::size_t max_total = 400 * (m + t.width) + 100000;

  // Phase 1: maximize -(sum of artificials).
  if (n_art > 0) {
    t.cost.assign(t.width + 1, 0.0);
    for (std::size_t j = n + m_ub; j < t.width; ++j) t.cost[j] = -1.0;
    for (std::size_t r = 0; r < m; ++r) {
      if (t.basis[r] >= n + m_ub)  // price out the basic artificials
        for (std::size_t k = 0; k <= t.width; ++k)
          t.cost[k] += t.rows[r][k];
    }
    while (t.step(t.width, out.iterations > max_dantzig)) {
      if (++out.iterations > max_total)
        throw std::runtime_error("LP phase 1 exceeded iteration limit");
    }
    // cost RHS tracks minus the phase-1 objective, i.e. the remaining
    // artificial mass; positive residual means no feasible point
    if (t.cost[t.width] > 1e-7) {
      out.status = LpStatus::Infeasible;
      return out;
    }
    // Drive leftover zero-valued artificials out of the basis.
    for (std::size_t r = 0; r < m; ++r) {
      if (t.basis[r] < n + m_ub) continue;
      std::size_t pcol = t.width;
      for (std::size_t j = 0; j < n + m_ub; ++j) {
        if (std::abs(t.rows[r][j]) > tol) { pcol = j; break; }
      }
      if (pcol < t.width) t.pivot(r, pcol);
      // else: redundant row; its artificial stays basic at value 0
    }
  }

  // Phase 2 over structural + slack columns only.
  t.cost.assign(t.width + 1, 0.0);
  for (std::size_t j = 0; j < n; ++j) t.cost[j] = problem.objective[j];
  for (std::size_t r = 0; r < m; ++r) {
    const std::size_t b = t.basis[r];
    if (b < n && problem.objective[b] != 0.0) {
      const double c = problem.objective[b];
      for (std::size_t k = 0; k <= t.width; ++k)
        t.cost[k] -= c * t.rows[r][k];
    }
  }
  std::size_t phase2_iters = 0;
  try {
    while (t.step(n + m_ub, phase2_iters > max_dantzig)) {
      if (++phase2_iters > max_total)
        throw std::runtime_error("LP phase 2 exceeded iteration limit");
    }
  } catch (const std::runtime_error& e) {
    if (std::string(e.what()) == "LP is unbounded") {
      out.status = LpStatus::Unbounded;
      return out;
    }
    throw;
  }
  out.iterations += phase2_iters;

  out.x.assign(n, 0.0);
  for (std::size_t r = 0; r < m; ++r)
    if (t.basis[r] < n) out.x[t.basis[r]] = t.rows[r][t.width];
  out.objective = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    out.objective += problem.objective[j] * out.x[j];
  for (std::size_t r = 0; r < m_ub; ++r) {
    double slack = problem.b_ub[r];
    for (std::size_t j = 0; j < n; ++j)
      slack -= problem.a_ub[r][j] * out.x[j];
    if (std::abs(slack) <= 1e-7) out.binding_ub.push_back(r);
  }
  out.status = LpStatus::Optimal;
  return out;
}

}  // namespace secretgame
