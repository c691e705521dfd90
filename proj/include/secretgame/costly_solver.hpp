#ifndef SECRETGAME_COSTLY_SOLVER_HPP
#define SECRETGAME_COSTLY_SOLVER_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "secretgame/partition_model.hpp"
#include "secretgame/simplex.hpp"

namespace secretgame {

enum class CostlyKind { GuesserQuits, TotalDefeat, BoundedNe };

struct CostlyRegime {
  CostlyKind kind = CostlyKind::GuesserQuits;
  std::optional<std::size_t> M;  // 1-based, present iff BoundedNe
  double ne_picker_utility_or_bound = 0.0;
  bool boundary = false;  // a defining comparison held with equality
};

/// NE regime of the costly game. GuesserQuits and TotalDefeat carry the
/// exact NE picker utility; BoundedNe carries only the -C_M upper bound.
CostlyRegime classify_regime(const PartitionProfile& profile,
                             const CostlyParams& params);

/// Guesser's best response to a within-partition-uniform mix. Optimal
/// plans visit secrets in descending probability and stop only at batch
/// boundaries; ties break toward the shorter plan (and toward quitting).
std::pair<ExplorationPlan, double> best_response(
    const PartitionProfile& profile, const CostlyParams& params,
    const PickerMix& delta);

/// Same search over an arbitrary per-secret distribution; batch groups in
/// the returned plan are secret indices. Used by the oracle cross-checks.
std::pair<ExplorationPlan, double> best_response(
    const std::vector<double>& per_secret, const CostlyParams& params);

/// Deterrence LP: maximize -sum(C_i nu_i) over mixes that keep every
/// prefix-exploration plan at non-positive guesser value, with per-secret
/// mass non-increasing in cost. Rows 0..N-1 are the prefix constraints,
/// rows N..2N-2 the monotonicity constraints.
LpProblem build_sse_lp(const PartitionProfile& profile,
                       const CostlyParams& params);

struct LpSolution {
  std::vector<double> nu;
  double objective = 0.0;
  LpStatus status = LpStatus::Infeasible;
  std::vector<std::string> binding_constraints;
};

LpSolution solve_sse_lp(const PartitionProfile& profile,
                        const CostlyParams& params);

/// Stackelberg commitment for the picker: deterring mix from the LP when
/// it beats giving up, otherwise the cheapest-partition pick.
SolveReport solve_sse(const PartitionProfile& profile,
                      const CostlyParams& params);

struct CostlySweepRow {
  double gamma = 0.0;
  double sigma = 0.0;
  std::string ne_regime;
  double ne_loss = 0.0;   // exact loss, or the -C_M bound in BoundedNe
  bool ne_loss_is_bound = false;
  std::string sse_classification;
  double sse_loss = 0.0;
  std::string error;
};

std::vector<CostlySweepRow> sweep_costly(
    const PartitionProfile& profile, double lambda,
    const std::vector<std::pair<double, double>>& gamma_sigma,
    unsigned threads = 1);

}  // namespace secretgame

#endif  // SECRETGAME_COSTLY_SOLVER_HPP
