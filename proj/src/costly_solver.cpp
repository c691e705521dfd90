#include "secretgame/costly_solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

namespace secretgame {

namespace {

struct RawBatch {
  std::size_t group = 0;
  count_t count = 0;
  double q = 0.0;  // per-secret probability
};

// Optimal stopping over descending-probability batches: utility increments
// within an equal-probability run are increasing, so only run boundaries
// (and quitting) can be optimal.
std::pair<ExplorationPlan, double> best_prefix(std::vector<RawBatch> batches,
                                               const CostlyParams& params) {
  std::stable_sort(batches.begin(), batches.end(),
                   [](const RawBatch& a, const RawBatch& b) { return a.q > b.q; });
  while (!batches.empty() && batches.back().q <= 0.0) batches.pop_back();

  double value = 0.0;
  double found = 0.0;
  double best_value = 0.0;
  std::size_t best_end = 0;
  for (std::size_t i = 0; i < batches.size(); ++i) {
    const double n = to_double(batches[i].count);
    const double q = batches[i].q;
    value += params.gamma * n * q -
             params.sigma * (n * (1.0 - found) - q * n * (n - 1.0) / 2.0);
    found += n * q;
    if (value > best_value + 1e-12) {  // ties break toward the shorter plan
      best_value = value;
      best_end = i + 1;
    }
  }
  ExplorationPlan plan;
  for (std::size_t i = 0; i < best_end; ++i)
    plan.batches.push_back({batches[i].group, batches[i].count});
  return {std::move(plan), best_value};
}

std::string regime_name(CostlyKind kind) {
  switch (kind) {
    case CostlyKind::GuesserQuits: return "guesser_quits";
    case CostlyKind::TotalDefeat: return "total_defeat";
    case CostlyKind::BoundedNe: return "bounded";
  }
  return "unknown";
}

}  // namespace

CostlyRegime classify_regime(const PartitionProfile& profile,
                             const CostlyParams& params) {
  params.validate();
  CostlyRegime out;
  const double c1 = profile.partition(0).cost;
  if (params.gamma <= params.sigma) {
    out.kind = CostlyKind::GuesserQuits;
    out.ne_picker_utility_or_bound = -c1;
    out.boundary = params.gamma == params.sigma;
    return out;
  }

  // Total defeat: every partition a deviating picker could hide in is
  // cheap enough for the guesser to exhaust at a profit.
  bool defeat = true;
  bool boundary = false;
  for (std::size_t i = 0; i < profile.num_partitions(); ++i) {
    if (profile.partition(i).cost >= c1 + params.lambda) continue;
    const double threshold =
        (1.0 + to_double(profile.partition(i).size)) * params.sigma / 2.0;
    if (params.gamma < threshold) {
      defeat = false;
      break;
    }
    if (params.gamma == threshold) boundary = true;
  }
  if (defeat) {
    out.kind = CostlyKind::TotalDefeat;
    out.ne_picker_utility_or_bound = -c1 - params.lambda;
    out.boundary = boundary;
    return out;
  }

  out.kind = CostlyKind::BoundedNe;
  for (std::size_t i = 0; i < profile.num_partitions(); ++i) {
    const double threshold =
        (to_double(profile.partition(i).size) + 1.0) * params.sigma / 2.0;
    if (params.gamma < threshold &&
        profile.partition(i).cost <= c1 + params.lambda) {
      out.M = i + 1;
      out.ne_picker_utility_or_bound = -profile.partition(i).cost;
      return out;
    }
  }
  throw model_error("unreachable: bounded regime without an M partition");
}

std::pair<ExplorationPlan, double> best_response(
    const PartitionProfile& profile, const CostlyParams& params,
    const PickerMix& delta) {
  params.validate();
  std::vector<RawBatch> batches;
  for (std::size_t i = 0; i < profile.num_partitions(); ++i) {
    batches.push_back(
        {i, profile.partition(i).size, delta.per_secret(profile, i)});
  }
  return best_prefix(std::move(batches), params);
}

std::pair<ExplorationPlan, double> best_response(
    const std::vector<double>& per_secret, const CostlyParams& params) {
  params.validate();
  double total = 0.0;
  for (double p : per_secret) {
    if (!(p >= 0.0) || !std::isfinite(p))
      throw model_error("per-secret probabilities must be non-negative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw model_error("per-secret probabilities must sum to 1");
  std::vector<RawBatch> batches;
  for (std::size_t i = 0; i < per_secret.size(); ++i)
    batches.push_back({i, 1, per_secret[i]});
  return best_prefix(std::move(batches), params);
}

LpProblem build_sse_lp(const PartitionProfile& profile,
                       const CostlyParams& params) {
  params.validate();
  const std::size_t n = profile.num_partitions();
  LpProblem lp;
  lp.num_vars = n;
  lp.objective.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    lp.objective[i] = -profile.partition(i).cost;

  // Prefix rows: exploring the cheapest K partitions in full must not be
  // profitable for the guesser.
  for (std::size_t depth = 1; depth <= n; ++depth) {
    std::vector<double> row(n, 0.0);
    double after = 0.0;  // secrets in partitions (i, depth]
    for (std::size_t i = depth; i-- > 0;) {
      const double size = to_double(profile.partition(i).size);
      row[i] = params.gamma + params.sigma * ((size - 1.0) / 2.0 + after);
      after += size;
    }
    lp.a_ub.push_back(std::move(row));
    lp.b_ub.push_back(params.sigma * to_double(profile.prefix_size(depth - 1)));
  }
  // Monotone per-secret mass: nu_{i+1}/|E_{i+1}| <= nu_i/|E_i|.
  for (std::size_t i = 0; i + 1 < n; ++i) {
    std::vector<double> row(n, 0.0);
    row[i] = -1.0 / to_double(profile.partition(i).size);
    row[i + 1] = 1.0 / to_double(profile.partition(i + 1).size);
    lp.a_ub.push_back(std::move(row));
    lp.b_ub.push_back(0.0);
  }
  lp.a_eq.push_back(std::vector<double>(n, 1.0));
  lp.b_eq.push_back(1.0);
  return lp;
}

LpSolution solve_sse_lp(const PartitionProfile& profile,
                        const CostlyParams& params) {
  // The stated LP is badly degenerate at scale (the monotonicity rows all
  // meet at uniform prefixes). Solve an equivalent reduced program in the
  // variables v_j = S_j * (q_j - q_{j+1}), where q_i is the per-secret
  // mass of partition i and S_j the prefix size: monotonicity becomes
  // v >= 0, and the normalization becomes sum(v) = 1. nu_i = |E_i| q_i.
  params.validate();
  const std::size_t n = profile.num_partitions();
  std::vector<double> e(n), s(n);
  for (std::size_t i = 0; i < n; ++i) {
    e[i] = to_double(profile.partition(i).size);
    s[i] = to_double(profile.prefix_size(i));
  }

  LpProblem lp;
  lp.num_vars = n;
  lp.objective.assign(n, 0.0);
  double cost_mass = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    cost_mass += profile.partition(j).cost * e[j];
    lp.objective[j] = -cost_mass / s[j];
  }
  // prefix row K in w-space has coefficient sum_{i<=min(j,K)} of
  // |E_i| * (gamma + sigma((|E_i|-1)/2 + S_K - S_i)); rows are rescaled
  // by their right-hand side sigma*S_K for conditioning.
  for (std::size_t K = 1; K <= n; ++K) {
    std::vector<double> row(n, 0.0);
    const double sk = s[K - 1];
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j < K)
        acc += e[j] * (params.gamma +
                       params.sigma * ((e[j] - 1.0) / 2.0 + sk - s[j]));
      row[j] = acc / (s[j] * params.sigma * sk);
    }
    lp.a_ub.push_back(std::move(row));
    lp.b_ub.push_back(1.0);
  }
  lp.a_eq.push_back(std::vector<double>(n, 1.0));
  lp.b_eq.push_back(1.0);

  const LpResult res = solve_lp(lp);
  LpSolution out;
  out.status = res.status;
  if (res.status != LpStatus::Optimal) return out;

  out.nu.assign(n, 0.0);
  double q = 0.0;
  for (std::size_t j = n; j-- > 0;) {
    q += std::max(0.0, res.x[j]) / s[j];
    out.nu[j] = e[j] * q;
  }
  out.objective = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(out.nu[i]) < 1e-12) out.nu[i] = 0.0;
    out.objective -= profile.partition(i).cost * out.nu[i];
  }
  for (std::size_t r : res.binding_ub)
    out.binding_constraints.push_back("prefix_" + std::to_string(r + 1));
  for (std::size_t j = 0; j + 1 < n; ++j)
    if (res.x[j] <= 1e-9)
      out.binding_constraints.push_back("mass_monotone_" +
                                        std::to_string(j + 1));
  return out;
}

SolveReport solve_sse(const PartitionProfile& profile,
                      const CostlyParams& params) {
  params.validate();
  const double c1 = profile.partition(0).cost;
  Diagnostics diag;

  if (params.gamma < params.sigma) {
    // A single guess already loses money; no LP needed.
    return {Classification::GuesserQuits,
            PickerMix::point_mass(profile, 0),
            std::nullopt,
            ExplorationPlan::quit(),
            -c1,
            0.0,
            std::move(diag)};
  }

  const double give_up_value = -c1 - params.lambda;
  const double total = to_double(profile.total_size());
  const double uniform_threshold = (total + 1.0) * params.sigma / 2.0;

  std::optional<LpSolution> lp;
  if (uniform_threshold >= params.gamma) {
    if (uniform_threshold == params.gamma)
      diag.flags.push_back("deterrence_feasibility_boundary");
    lp = solve_sse_lp(profile, params);
    if (lp->status != LpStatus::Optimal)
      throw model_error("deterrence LP unsolvable although the uniform mix "
                        "is feasible (status " +
                        std::string(lp->status == LpStatus::Infeasible
                                        ? "infeasible"
                                        : "unbounded") +
                        ")");
    diag.lp_status = "optimal";
  } else {
    diag.lp_status = "skipped_uniform_cannot_deter";
  }

  if (lp && lp->objective >= give_up_value - 1e-9) {
    if (lp->objective <= give_up_value + 1e-9)
      diag.flags.push_back("deterrence_ties_give_up");
    // Clean the vertex and renormalize so the mix passes its invariants.
    std::vector<double> nu = lp->nu;
    double sum = std::accumulate(nu.begin(), nu.end(), 0.0);
    for (double& v : nu) v = std::max(0.0, v) / sum;
    PickerMix mix(std::move(nu), profile);
    const auto [plan, value] = best_response(profile, params, mix);
    diag.deterrence_value = value;
    if (!plan.is_quit() || value > 1e-9)
      throw model_error(
          "deterrence certificate failed: guesser best response has value " +
          std::to_string(value));
    double utility = 0.0;
    for (std::size_t i = 0; i < profile.num_partitions(); ++i)
      utility -= profile.partition(i).cost * mix.mass(i);
    return {Classification::SseDeterrence,
            std::move(mix),
            std::nullopt,
            ExplorationPlan::quit(),
            utility,
            0.0,
            std::move(diag)};
  }

  // Deterrence is impossible or costlier than conceding the secret: pick
  // from the cheapest partition and let the guesser explore it.
  PickerMix mix = PickerMix::point_mass(profile, 0);
  auto [plan, value] = best_response(profile, params, mix);
  return {Classification::SseGiveUp,
          std::move(mix),
          std::nullopt,
          std::move(plan),
          give_up_value,
          value,
          std::move(diag)};
}

std::vector<CostlySweepRow> sweep_costly(
    const PartitionProfile& profile, double lambda,
    const std::vector<std::pair<double, double>>& gamma_sigma,
    unsigned threads) {
  std::vector<CostlySweepRow> rows(gamma_sigma.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= gamma_sigma.size()) return;
      CostlySweepRow& row = rows[idx];
      row.gamma = gamma_sigma[idx].first;
      row.sigma = gamma_sigma[idx].second;
      try {
        CostlyParams params{lambda, row.gamma, row.sigma};
        const CostlyRegime regime = classify_regime(profile, params);
        row.ne_regime = regime_name(regime.kind);
        row.ne_loss = -regime.ne_picker_utility_or_bound;
        row.ne_loss_is_bound = regime.kind == CostlyKind::BoundedNe;
        const SolveReport sse = solve_sse(profile, params);
        row.sse_classification = to_string(sse.classification);
        row.sse_loss = -sse.picker_utility;
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return rows;
}

}  // namespace secretgame
