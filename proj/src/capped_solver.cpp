#include "secretgame/capped_solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

namespace secretgame {

namespace {

constexpr double kIdentityTol = 1e-12;

double prefix_cost_mass(const PartitionProfile& profile, std::size_t end) {
  // sum of C_i * |E_i| over the first `end` partitions
  double total = 0.0;
  for (std::size_t i = 0; i < end; ++i)
    total += profile.partition(i).cost * to_double(profile.partition(i).size);
  return total;
}

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

}  // namespace

std::size_t compute_L(const PartitionProfile& profile, std::uint64_t cap) {
  if (static_cast<count_t>(cap) >= profile.total_size())
    throw model_error("cap K must be smaller than the total number of secrets");
  for (std::size_t i = 0; i < profile.num_partitions(); ++i) {
    if (profile.prefix_size(i) > static_cast<count_t>(cap)) return i + 1;
  }
  throw model_error("unreachable: K below total size");  // guarded above
}

CappedClassification classify(const PartitionProfile& profile,
                              const CappedParams& params) {
  params.validate(profile);
  CappedClassification out;
  out.L = compute_L(profile, params.cap);
  const double lambda_k = params.lambda * static_cast<double>(params.cap);

  // J-set: partitions past L still worth folding into the uniform support.
  for (std::size_t j = out.L + 1; j <= profile.num_partitions(); ++j) {
    const double below_sizes = to_double(profile.prefix_size(j - 2));
    const double below_costs = prefix_cost_mass(profile, j - 1);
    if (lambda_k + below_costs >= profile.partition(j - 1).cost * below_sizes)
      out.J_set.push_back(j);
  }
  if (!out.J_set.empty()) out.J = out.J_set.back();
  // The NE support always reaches at least L, even when the J-set is empty.
  out.support_end = std::max<std::size_t>(out.L, out.J.value_or(0));

  const std::size_t s = out.support_end;
  const double support_sizes = to_double(profile.prefix_size(s - 1));
  const double support_costs = prefix_cost_mass(profile, s);
  const double average = (support_costs + lambda_k) / support_sizes;
  if (profile.partition(0).cost + params.lambda <= average) {
    out.kind = CappedKind::TotalDefeat;
    return out;
  }
  out.kind = CappedKind::Ordinary;
  if (out.J) {
    // Tight J-membership makes the NE description sufficient but not
    // provably unique.
    const std::size_t j = *out.J;
    const double lhs = lambda_k + prefix_cost_mass(profile, j - 1);
    const double rhs =
        profile.partition(j - 1).cost * to_double(profile.prefix_size(j - 2));
    const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
    if (std::abs(lhs - rhs) <= kIdentityTol * scale)
      out.kind = CappedKind::Degenerate;
  }
  return out;
}

double maximin_utility(const PartitionProfile& profile,
                       const CappedParams& params) {
  const CappedClassification cls = classify(profile, params);
  if (cls.kind == CappedKind::TotalDefeat)
    return -profile.partition(0).cost - params.lambda;
  const std::size_t s = cls.support_end;
  return -(prefix_cost_mass(profile, s) +
           params.lambda * static_cast<double>(params.cap)) /
         to_double(profile.prefix_size(s - 1));
}

SolveReport solve_ne(const PartitionProfile& profile,
                     const CappedParams& params) {
  const CappedClassification cls = classify(profile, params);
  const std::size_t n = profile.num_partitions();

  Diagnostics diag;
  diag.L = cls.L;
  diag.J_set = cls.J_set;
  diag.J = cls.J;
  diag.support_end = cls.support_end;
  if (!cls.J) diag.flags.push_back("j_set_empty_support_is_L");

  if (cls.kind == CappedKind::TotalDefeat) {
    const double c1 = profile.partition(0).cost;
    // Deterrence marginals: rho = 1 on E_1 and just above the indifference
    // threshold on every partition a deviating picker could profit from.
    std::vector<double> thresholds(n, 0.0);
    double threshold_mass = 0.0;
    double deter_secrets = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double ci = profile.partition(i).cost;
      if (ci < c1 + params.lambda) {
        thresholds[i] =
            i == 0 ? 1.0 : clamp01(1.0 - (ci - c1) / params.lambda);
        threshold_mass += thresholds[i] * to_double(profile.partition(i).size);
        deter_secrets += to_double(profile.partition(i).size);
      }
    }
    const double cap = static_cast<double>(params.cap);
    if (threshold_mass > cap * (1.0 + 1e-9) + 1e-9)
      throw model_error("total-defeat deterrence thresholds exceed the cap K");
    const double eta = std::max(0.0, (cap - threshold_mass) / (2.0 * deter_secrets));
    std::vector<double> rho(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (profile.partition(i).cost < c1 + params.lambda)
        rho[i] = std::min(1.0, thresholds[i] + eta);
    }
    SolveReport report{Classification::TotalDefeat,
                       PickerMix::point_mass(profile, 0),
                       GuesserMarginals(std::move(rho), profile),
                       std::nullopt,
                       -c1 - params.lambda,
                       params.gamma,
                       std::move(diag)};
    return report;
  }

  const std::size_t s = cls.support_end;
  const double support_sizes = to_double(profile.prefix_size(s - 1));
  const double support_costs = prefix_cost_mass(profile, s);
  const double cap = static_cast<double>(params.cap);
  std::vector<double> mass(n, 0.0);
  std::vector<double> rho(n, 0.0);
  std::vector<double> bias(s, 0.0);
  for (std::size_t i = 0; i < s; ++i) {
    mass[i] = to_double(profile.partition(i).size) / support_sizes;
    bias[i] = (support_costs - profile.partition(i).cost * support_sizes) /
              (params.lambda * support_sizes);
    double r = cap / support_sizes + bias[i];
    if (r < 0.0 && r > -1e-9) r = 0.0;  // FP slack at the membership boundary
    rho[i] = r;
  }
  diag.bias = std::move(bias);
  if (cls.kind == CappedKind::Degenerate)
    diag.flags.push_back("degenerate_ne_description_not_provably_unique");

  const double picker_utility = maximin_utility(profile, params);
  SolveReport report{cls.kind == CappedKind::Degenerate
                         ? Classification::Degenerate
                         : Classification::Ordinary,
                     PickerMix(std::move(mass), profile),
                     GuesserMarginals(std::move(rho), profile),
                     std::nullopt,
                     picker_utility,
                     params.gamma * cap / support_sizes,
                     std::move(diag)};
  return report;
}

VerifyResult verify_ne(const PartitionProfile& profile,
                       const CappedParams& params, const PickerMix& delta,
                       const GuesserMarginals& rho, double epsilon) {
  const auto [picker_now, guesser_now] =
      eval_capped(profile, params, delta, rho);
  const std::size_t n = profile.num_partitions();

  // Guesser's best response: spend the K slots on the secrets with the
  // highest per-secret picking probability.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return delta.per_secret(profile, a) > delta.per_secret(profile, b);
  });
  count_t remaining = static_cast<count_t>(params.cap);
  double top_mass = 0.0;
  std::size_t guesser_target = n;
  for (std::size_t idx : order) {
    if (remaining == 0) break;
    const count_t take = std::min(remaining, profile.partition(idx).size);
    top_mass += to_double(take) * delta.per_secret(profile, idx);
    if (guesser_target == n) guesser_target = idx;
    remaining -= take;
  }
  const double guesser_best = params.gamma * top_mass;

  // Picker's best response: the partition with the smallest combined cost.
  double picker_best = -std::numeric_limits<double>::infinity();
  std::size_t picker_target = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = -profile.partition(i).cost - params.lambda * rho.rho(i);
    if (v > picker_best) {
      picker_best = v;
      picker_target = i;
    }
  }

  VerifyResult out;
  out.picker_gap = picker_best - picker_now;
  out.guesser_gap = guesser_best - guesser_now;
  out.ok = out.picker_gap <= epsilon && out.guesser_gap <= epsilon;
  if (!out.ok) {
    if (out.picker_gap > epsilon)
      out.certificate = "picker gains " + std::to_string(out.picker_gap) +
                        " by moving to partition " +
                        std::to_string(picker_target + 1);
    else
      out.certificate = "guesser gains " + std::to_string(out.guesser_gap) +
                        " by re-targeting the dictionary (highest-mass "
                        "partition " +
                        std::to_string(guesser_target + 1) + ")";
  }
  return out;
}

std::vector<std::uint64_t> sample_dictionary(const GuesserMarginals& rho,
                                             const PartitionProfile& profile,
                                             std::uint64_t cap,
                                             std::mt19937_64& rng) {
  const double budget = rho.budget(profile);
  if (std::abs(budget - static_cast<double>(cap)) > 1e-9)
    throw model_error("marginals do not sum to K");
  if (profile.total_size() > static_cast<count_t>(std::uint64_t{1} << 62))
    throw model_error("secret space too large to index for sampling");

  const std::size_t n = profile.num_partitions();
  std::vector<double> cum(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    cum[i + 1] = cum[i] + rho.rho(i) * to_double(profile.partition(i).size);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double start = unit(rng);
  std::vector<std::uint64_t> picks;
  picks.reserve(cap);
  std::vector<std::int64_t> last_in(n, -1);
  for (std::uint64_t k = 0; k < cap; ++k) {
    const double g = start + static_cast<double>(k);
    // locate the partition whose mass interval contains g
    std::size_t i =
        static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), g) -
                                 cum.begin());
    if (i == 0) i = 1;
    if (i > n) i = n;
    --i;
    while (rho.rho(i) <= 0.0 && i + 1 < n) ++i;
    const double r = rho.rho(i);
    std::int64_t offset =
        r > 0.0 ? static_cast<std::int64_t>((g - cum[i]) / r) : 0;
    const std::int64_t size_i =
        static_cast<std::int64_t>(static_cast<std::uint64_t>(profile.partition(i).size));
    if (offset <= last_in[i]) offset = last_in[i] + 1;  // FP boundary repair
    if (offset >= size_i) offset = size_i - 1;
    last_in[i] = offset;
    const std::uint64_t base =
        i == 0 ? 0
               : static_cast<std::uint64_t>(profile.prefix_size(i - 1));
    picks.push_back(base + static_cast<std::uint64_t>(offset));
  }
  return picks;
}

std::vector<CappedSweepRow> sweep_capped(const PartitionProfile& profile,
                                         double lambda, double gamma,
                                         const std::vector<std::uint64_t>& caps,
                                         unsigned threads) {
  std::vector<CappedSweepRow> rows(caps.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= caps.size()) return;
      CappedSweepRow& row = rows[idx];
      row.cap = caps[idx];
      try {
        CappedParams params{lambda, gamma, caps[idx]};
        const SolveReport report = solve_ne(profile, params);
        row.picker_loss = -report.picker_utility;
        row.classification = to_string(report.classification);
        if (report.classification == Classification::TotalDefeat) {
          row.support_size = to_double(profile.partition(0).size);
          row.find_probability = 1.0;
        } else {
          const std::size_t s = *report.diagnostics.support_end;
          row.support_size = to_double(profile.prefix_size(s - 1));
          row.find_probability = static_cast<double>(caps[idx]) / row.support_size;
        }
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
