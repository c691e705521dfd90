#ifndef SECRETGAME_SIMPLEX_HPP
#define SECRETGAME_SIMPLEX_HPP

#include <cstddef>
#include <vector>

namespace secretgame {

enum class LpStatus { Optimal, Infeasible, Unbounded };

/// maximize objective . x  subject to  a_ub x <= b_ub, a_eq x = b_eq, x >= 0
struct LpProblem {
  std::size_t num_vars = 0;
  std::vector<double> objective;
  std::vector<std::vector<double>> a_ub;
  std::vector<double> b_ub;
  std::vector<std::vector<double>> a_eq;
  std::vector<double> b_eq;
};

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> x;
  double objective = 0.0;
  std::vector<std::size_t> binding_ub;  // inequality rows tight at the optimum
  std::size_t iterations = 0;
};

/// Dense two-phase tableau simplex. Dantzig pricing with a switch to
/// Bland's rule when stalling, so it cannot cycle.
LpResult solve_lp(const LpProblem& problem, double tol = 1e-9);

}  // namespace secretgame

#endif  // SECRETGAME_SIMPLEX_HPP
