#include "secretgame/bruteforce_oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "secretgame/capped_solver.hpp"
#include "secretgame/costly_solver.hpp"

namespace secretgame {

namespace {

constexpr std::size_t kSubsetGuard = 20;
constexpr std::size_t kSequenceGuard = 7;
constexpr std::size_t kNeGuard = 12;

std::size_t small_size(const PartitionProfile& profile, std::size_t guard,
                       const char* op) {
  if (profile.total_size() > static_cast<count_t>(guard))
    throw model_error(std::string(op) + " limited to " + std::to_string(guard) +
                      " secrets");
  return static_cast<std::size_t>(static_cast<std::uint64_t>(profile.total_size()));
}

// Systematic inclusion sampling for an arbitrary budget (integral or not).
std::vector<std::uint64_t> sample_inclusion(const GuesserMarginals& rho,
                                            const PartitionProfile& profile,
                                            std::mt19937_64& rng) {
  const std::size_t n = profile.num_partitions();
  std::vector<double> cum(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    cum[i + 1] = cum[i] + rho.rho(i) * to_double(profile.partition(i).size);
  const double budget = cum[n];
  std::vector<std::uint64_t> picks;
  if (budget <= 0.0) return picks;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (double g = unit(rng); g < budget; g += 1.0) {
    std::size_t i = static_cast<std::size_t>(
        std::upper_bound(cum.begin(), cum.end(), g) - cum.begin());
    if (i == 0) i = 1;
    if (i > n) i = n;
    --i;
    while (rho.rho(i) <= 0.0 && i + 1 < n) ++i;
    const double r = rho.rho(i);
    std::uint64_t offset =
        r > 0.0 ? static_cast<std::uint64_t>((g - cum[i]) / r) : 0;
    const std::uint64_t size_i =
        static_cast<std::uint64_t>(profile.partition(i).size);
    if (offset >= size_i) offset = size_i - 1;
    const std::uint64_t base =
        i == 0 ? 0 : static_cast<std::uint64_t>(profile.prefix_size(i - 1));
    picks.push_back(base + offset);
  }
  std::sort(picks.begin(), picks.end());
  picks.erase(std::unique(picks.begin(), picks.end()), picks.end());
  return picks;
}

std::uint64_t sample_secret(const PartitionProfile& profile,
                            const PickerMix& delta, std::mt19937_64& rng,
                            std::size_t& partition_out) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double u = unit(rng);
  std::size_t i = 0;
  for (; i + 1 < profile.num_partitions(); ++i) {
    if (u < delta.mass(i)) break;
    u -= delta.mass(i);
  }
  partition_out = i;
  const std::uint64_t size_i =
      static_cast<std::uint64_t>(profile.partition(i).size);
  std::uniform_int_distribution<std::uint64_t> pos(0, size_i - 1);
  const std::uint64_t base =
      i == 0 ? 0 : static_cast<std::uint64_t>(profile.prefix_size(i - 1));
  return base + pos(rng);
}

SimResult summarize(const std::vector<double>& picker,
                    const std::vector<double>& guesser) {
  SimResult out;
  out.episodes = picker.size();
  const double n = static_cast<double>(picker.size());
  out.picker_mean = std::accumulate(picker.begin(), picker.end(), 0.0) / n;
  out.guesser_mean = std::accumulate(guesser.begin(), guesser.end(), 0.0) / n;
  double vp = 0.0;
  double vg = 0.0;
  for (std::size_t k = 0; k < picker.size(); ++k) {
    vp += (picker[k] - out.picker_mean) * (picker[k] - out.picker_mean);
    vg += (guesser[k] - out.guesser_mean) * (guesser[k] - out.guesser_mean);
  }
  if (picker.size() > 1) {
    out.picker_se = std::sqrt(vp / (n - 1.0) / n);
    out.guesser_se = std::sqrt(vg / (n - 1.0) / n);
  }
  return out;
}

// Direct per-guess expansion of a full prefix exploration under an
// unnormalized partition mass vector. Deliberately does not share code
// with the LP construction it is used to check.
double prefix_plan_value(const PartitionProfile& profile,
                         const CostlyParams& params,
                         const std::vector<double>& nu, std::size_t depth) {
  double value = 0.0;
  double found = 0.0;
  for (std::size_t i = 0; i < depth; ++i) {
    const std::uint64_t size =
        static_cast<std::uint64_t>(profile.partition(i).size);
    const double q = nu[i] / to_double(profile.partition(i).size);
    for (std::uint64_t t = 0; t < size; ++t) {
      value += params.gamma * q - params.sigma * (1.0 - found);
      found += q;
    }
  }
  return value;
}

// Solves a dense n x n system in place; returns false when singular.
bool gauss_solve(std::vector<std::vector<double>> a, std::vector<double> b,
                 std::vector<double>& x) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) < 1e-12) return false;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      for (std::size_t k = col; k < n; ++k) a[r][k] -= f * a[col][k];
      b[r] -= f * b[col];
    }
  }
  x.resize(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return true;
}

}  // namespace

PerSecretMix::PerSecretMix(std::vector<double> probs)
    : probs_(std::move(probs)) {
  if (probs_.empty()) throw model_error("per-secret mix must be non-empty");
  double total = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0) || !std::isfinite(p))
      throw model_error("per-secret probability must be non-negative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw model_error("per-secret probabilities must sum to 1");
}

PerSecretMix expand(const PartitionProfile& profile, const PickerMix& delta) {
  if (profile.total_size() > static_cast<count_t>(1 << 20))
    throw model_error("expand limited to small secret spaces");
  std::vector<double> probs;
  probs.reserve(static_cast<std::size_t>(
      static_cast<std::uint64_t>(profile.total_size())));
  for (std::size_t i = 0; i < profile.num_partitions(); ++i) {
    const double q = delta.per_secret(profile, i);
    for (count_t k = 0; k < profile.partition(i).size; ++k) probs.push_back(q);
  }
  // absorb accumulated rounding so the type invariant holds exactly; the
  // largest entry can take a negative correction without going below zero
  const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
  *std::max_element(probs.begin(), probs.end()) += 1.0 - total;
  return PerSecretMix(std::move(probs));
}

std::pair<std::vector<std::size_t>, double> capped_best_dictionary(
    const PerSecretMix& delta, std::uint64_t cap, double gamma) {
  const std::size_t n = delta.size();
  if (n > kSubsetGuard)
    throw model_error("capped_best_dictionary limited to " +
                      std::to_string(kSubsetGuard) + " secrets");
  if (cap == 0 || cap > n) throw model_error("cap out of range");
  double best = -1.0;
  std::uint32_t best_mask = 0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) != static_cast<int>(cap)) continue;
    double mass = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (mask & (1u << j)) mass += delta.probs()[j];
    if (mass > best) {
      best = mass;
      best_mask = mask;
    }
  }
  std::vector<std::size_t> subset;
  for (std::size_t j = 0; j < n; ++j)
    if (best_mask & (1u << j)) subset.push_back(j);
  return {std::move(subset), gamma * best};
}

std::pair<std::vector<std::size_t>, double> costly_best_sequence(
    const PerSecretMix& delta, const CostlyParams& params) {
  params.validate();
  const std::size_t n = delta.size();
  if (n > kSequenceGuard)
    throw model_error("costly_best_sequence limited to " +
                      std::to_string(kSequenceGuard) + " secrets");
  std::vector<std::size_t> current;
  std::vector<std::size_t> best_seq;
  double best = 0.0;  // the empty sequence (quit at once)
  auto dfs = [&](auto&& self, std::uint32_t used, double value,
                 double found) -> void {
    for (std::size_t j = 0; j < n; ++j) {
      if (used & (1u << j)) continue;
      const double v = value + params.gamma * delta.probs()[j] -
                       params.sigma * (1.0 - found);
      current.push_back(j);
      if (v > best + 1e-12) {
        best = v;
        best_seq = current;
      }
      self(self, used | (1u << j), v, found + delta.probs()[j]);
      current.pop_back();
    }
  };
  dfs(dfs, 0, 0.0, 0.0);
  return {std::move(best_seq), best};
}

bool verify_capped_ne_exhaustive(const PartitionProfile& profile,
                                 const CappedParams& params,
                                 const PickerMix& delta,
                                 const GuesserMarginals& rho, double epsilon) {
  small_size(profile, kNeGuard, "verify_capped_ne_exhaustive");
  const auto [picker_now, guesser_now] =
      eval_capped(profile, params, delta, rho);
  const PerSecretMix flat = expand(profile, delta);
  const double guesser_best =
      capped_best_dictionary(flat, params.cap, params.gamma).second;
  double picker_best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < profile.num_partitions(); ++i)
    picker_best = std::max(
        picker_best, -profile.partition(i).cost - params.lambda * rho.rho(i));
  const bool ok = picker_best - picker_now <= epsilon &&
                  guesser_best - guesser_now <= epsilon;

  const VerifyResult closed = verify_ne(profile, params, delta, rho, epsilon);
  if (closed.ok != ok ||
      std::abs((picker_best - picker_now) - closed.picker_gap) > 1e-9 ||
      std::abs((guesser_best - guesser_now) - closed.guesser_gap) > 1e-9)
    throw model_error("closed-form verifier disagrees with enumeration");
  return ok;
}

SimResult simulate(const PartitionProfile& profile, const CappedParams& params,
                   const PickerMix& delta, const GuesserMarginals& rho,
                   std::uint64_t episodes, std::uint64_t seed) {
  if (episodes == 0) throw model_error("episodes must be positive");
  std::mt19937_64 rng(seed);
  std::vector<double> picker;
  std::vector<double> guesser;
  picker.reserve(episodes);
  guesser.reserve(episodes);
  for (std::uint64_t e = 0; e < episodes; ++e) {
    std::size_t part = 0;
    const std::uint64_t secret = sample_secret(profile, delta, rng, part);
    const std::vector<std::uint64_t> dict = sample_inclusion(rho, profile, rng);
    const bool found =
        std::binary_search(dict.begin(), dict.end(), secret);
    picker.push_back(-profile.partition(part).cost -
                     (found ? params.lambda : 0.0));
    guesser.push_back(found ? params.gamma : 0.0);
  }
  return summarize(picker, guesser);
}

SimResult simulate(const PartitionProfile& profile, const CostlyParams& params,
                   const PickerMix& delta, const ExplorationPlan& plan,
                   std::uint64_t episodes, std::uint64_t seed) {
  if (episodes == 0) throw model_error("episodes must be positive");
  plan.validate(profile);
  std::mt19937_64 rng(seed);
  std::vector<double> picker;
  std::vector<double> guesser;
  picker.reserve(episodes);
  guesser.reserve(episodes);
  std::vector<std::uint64_t> explored(profile.num_partitions());
  for (std::uint64_t e = 0; e < episodes; ++e) {
    std::size_t part = 0;
    const std::uint64_t secret = sample_secret(profile, delta, rng, part);
    const std::uint64_t base =
        part == 0 ? 0 : static_cast<std::uint64_t>(profile.prefix_size(part - 1));
    const std::uint64_t pos = secret - base;  // position within the partition
    std::fill(explored.begin(), explored.end(), 0);
    double guesses = 0.0;
    bool found = false;
    for (const ExplorationPlan::Batch& b : plan.batches) {
      const std::uint64_t count = static_cast<std::uint64_t>(b.count);
      if (b.group == part && pos >= explored[part] &&
          pos < explored[part] + count) {
        guesses += static_cast<double>(pos - explored[part] + 1);
        found = true;
        break;
      }
      guesses += static_cast<double>(count);
      explored[b.group] += count;
    }
    picker.push_back(-profile.partition(part).cost -
                     (found ? params.lambda : 0.0));
    guesser.push_back((found ? params.gamma : 0.0) - params.sigma * guesses);
  }
  return summarize(picker, guesser);
}

SmallLpOptimum lp_check_small(const PartitionProfile& profile,
                              const CostlyParams& params) {
  params.validate();
  const std::size_t n = profile.num_partitions();
  if (n > 3) throw model_error("lp_check_small limited to 3 partitions");

  // Constraint rows a.nu <= b, with coefficients extracted numerically
  // from the per-guess expansion of each prefix plan.
  std::vector<std::vector<double>> a;
  std::vector<double> b;
  for (std::size_t depth = 1; depth <= n; ++depth) {
    std::vector<double> zero(n, 0.0);
    const double base = prefix_plan_value(profile, params, zero, depth);
    std::vector<double> row(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<double> unit(n, 0.0);
      unit[j] = 1.0;
      row[j] = prefix_plan_value(profile, params, unit, depth) - base;
    }
    a.push_back(std::move(row));
    b.push_back(-base);
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    std::vector<double> row(n, 0.0);
    row[i] = -1.0 / to_double(profile.partition(i).size);
    row[i + 1] = 1.0 / to_double(profile.partition(i + 1).size);
    a.push_back(std::move(row));
    b.push_back(0.0);
  }
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> row(n, 0.0);
    row[j] = -1.0;
    a.push_back(std::move(row));
    b.push_back(0.0);
  }

  // Every vertex lies on the normalization plane plus n-1 of the above.
  SmallLpOptimum best;
  bool found = false;
  std::vector<std::size_t> pick(n >= 1 ? n - 1 : 0);
  auto consider = [&](const std::vector<std::size_t>& active) {
    std::vector<std::vector<double>> sys;
    std::vector<double> rhs;
    sys.push_back(std::vector<double>(n, 1.0));
    rhs.push_back(1.0);
    for (std::size_t idx : active) {
      sys.push_back(a[idx]);
      rhs.push_back(b[idx]);
    }
    std::vector<double> nu;
    if (!gauss_solve(sys, rhs, nu)) return;
    for (std::size_t r = 0; r < a.size(); ++r) {
      double lhs = 0.0;
      for (std::size_t j = 0; j < n; ++j) lhs += a[r][j] * nu[j];
      if (lhs > b[r] + 1e-9) return;
    }
    double objective = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      objective -= profile.partition(j).cost * nu[j];
    if (!found || objective > best.objective) {
      found = true;
      best.nu = nu;
      best.objective = objective;
    }
  };
  if (n == 1) {
    consider({});
  } else {
    std::vector<std::size_t> active;
    auto choose = [&](auto&& self, std::size_t start) -> void {
      if (active.size() == n - 1) {
        consider(active);
        return;
      }
      for (std::size_t k = start; k < a.size(); ++k) {
        active.push_back(k);
        self(self, k + 1);
        active.pop_back();
      }
    };
    choose(choose, 0);
  }
  if (!found) throw model_error("small LP has no feasible vertex");
  return best;
}

PartitionProfile random_profile(std::mt19937_64& rng,
                                std::size_t max_partitions,
                                std::uint64_t max_size) {
  std::uniform_int_distribution<std::size_t> nd(1, max_partitions);
  std::uniform_int_distribution<std::uint64_t> sized(1, max_size);
  std::uniform_real_distribution<double> costd(0.0, 1.0);
  const std::size_t n = nd(rng);
  std::vector<double> costs(n);
  for (;;) {
    for (double& c : costs) c = costd(rng);
    std::sort(costs.begin(), costs.end());
    bool ok = true;
    for (std::size_t i = 0; i + 1 < n; ++i)
      if (costs[i + 1] - costs[i] < 1e-3) ok = false;
    if (ok) break;
  }
  std::vector<Partition> parts(n);
  for (std::size_t i = 0; i < n; ++i)
    parts[i] = {static_cast<count_t>(sized(rng)), costs[i]};
  return PartitionProfile(std::move(parts));
}

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

PerSecretMix random_per_secret(std::mt19937_64& rng, std::size_t n) {
  std::exponential_distribution<double> ed(1.0);
  std::vector<double> probs(n);
  double total = 0.0;
  for (double& p : probs) {
    p = ed(rng) + 1e-6;
    total += p;
  }
  double running = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    probs[i] /= total;
    running += probs[i];
  }
  probs[n - 1] = 1.0 - running;  // exact unit sum
  return PerSecretMix(std::move(probs));
}

std::vector<SuiteResult> run_verification(std::uint64_t seed,
                                          std::uint64_t instances) {
  if (instances == 0) throw model_error("instances must be positive");
  std::mt19937_64 rng(seed);
  SuiteResult capped_ne, capped_oracle, costly_structure, lp_vertex;
  capped_ne.name = "capped_ne";
  capped_oracle.name = "capped_oracle";
  costly_structure.name = "costly_structure";
  lp_vertex.name = "lp_vertex";

  auto note = [](SuiteResult& suite, bool ok, const std::string& repro) {
    if (ok) {
      ++suite.passed;
    } else {
      ++suite.failed;
      if (suite.first_failure.empty()) suite.first_failure = repro;
    }
  };

  for (std::uint64_t t = 0; t < instances; ++t) {
    // Capped game: solve and verify, with exhaustive cross-check when small.
    PartitionProfile profile = random_profile(rng);
    while (profile.total_size() < 2) profile = random_profile(rng);
    const std::uint64_t total =
        static_cast<std::uint64_t>(profile.total_size());
    std::uniform_int_distribution<std::uint64_t> capd(1, total - 1);
    CappedParams cp{log_uniform(rng), log_uniform(rng), capd(rng)};
    const std::string repro = "instance " + std::to_string(t) + " seed " +
                              std::to_string(seed) + " profile " +
                              profile.to_json_text();
    try {
      const SolveReport report = solve_ne(profile, cp);
      const VerifyResult vr = verify_ne(profile, cp, report.picker_strategy,
                                        *report.guesser_marginals, 1e-9);
      note(capped_ne, vr.ok, repro + " : " + vr.certificate);
      if (total <= kNeGuard) {
        const bool ok = verify_capped_ne_exhaustive(
            profile, cp, report.picker_strategy, *report.guesser_marginals,
            1e-9);
        note(capped_oracle, ok, repro);
      }
    } catch (const std::exception& e) {
      note(capped_ne, false, repro + " : " + e.what());
    }

    // Costly best-response structure vs full sequence enumeration.
    std::uniform_int_distribution<std::size_t> nd(1, kSequenceGuard);
    const PerSecretMix flat = random_per_secret(rng, nd(rng));
    CostlyParams cost_params{log_uniform(rng), log_uniform(rng),
                             log_uniform(rng)};
    try {
      const double structured =
          best_response(flat.probs(), cost_params).second;
      const double enumerated =
          costly_best_sequence(flat, cost_params).second;
      note(costly_structure, std::abs(structured - enumerated) <= 1e-9,
           repro + " : structured " + std::to_string(structured) +
               " enumerated " + std::to_string(enumerated));
    } catch (const std::exception& e) {
      note(costly_structure, false, repro + " : " + e.what());
    }

    // Deterrence LP vs vertex enumeration on up-to-3-partition instances.
    const PartitionProfile small = random_profile(rng, 3);
    CostlyParams lp_params{log_uniform(rng), log_uniform(rng),
                           log_uniform(rng)};
    try {
      const LpSolution lp = solve_sse_lp(small, lp_params);
      if (lp.status == LpStatus::Optimal) {
        const SmallLpOptimum vertex = lp_check_small(small, lp_params);
        note(lp_vertex, std::abs(lp.objective - vertex.objective) <= 1e-7,
             repro + " : simplex " + std::to_string(lp.objective) +
                 " vertex " + std::to_string(vertex.objective));
      } else {
        bool vertex_infeasible = false;
        try {
          lp_check_small(small, lp_params);
        } catch (const model_error&) {
          vertex_infeasible = true;
        }
        note(lp_vertex, vertex_infeasible,
             repro + " : simplex infeasible but a feasible vertex exists");
      }
    } catch (const std::exception& e) {
      note(lp_vertex, false, repro + " : " + e.what());
    }
  }
  return {capped_ne, capped_oracle, costly_structure, lp_vertex};
}

}  // namespace secretgame
