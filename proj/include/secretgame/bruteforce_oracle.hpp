#ifndef SECRETGAME_BRUTEFORCE_ORACLE_HPP
#define SECRETGAME_BRUTEFORCE_ORACLE_HPP

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "secretgame/partition_model.hpp"

namespace secretgame {

/// Arbitrary per-secret distribution, without within-partition symmetry.
/// Only the oracles handle these; solvers stay in the symmetric space.
class PerSecretMix {
 public:
  explicit PerSecretMix(std::vector<double> probs);
  const std::vector<double>& probs() const { return probs_; }
  std::size_t size() const { return probs_.size(); }

 private:
  std::vector<double> probs_;
};

/// Flattens a per-partition mix to per-secret probabilities. Guarded: the
/// oracles only ever need small spaces.
PerSecretMix expand(const PartitionProfile& profile, const PickerMix& delta);

/// Exhaustive K-subset search for the guesser's best dictionary.
/// Requires at most 20 secrets.
std::pair<std::vector<std::size_t>, double> capped_best_dictionary(
    const PerSecretMix& delta, std::uint64_t cap, double gamma);

/// Exhaustive search over every ordered subset of secrets (including the
/// empty sequence). Requires at most 7 secrets.
std::pair<std::vector<std::size_t>, double> costly_best_sequence(
    const PerSecretMix& delta, const CostlyParams& params);

/// Independent NE check by full enumeration; also cross-checks the
/// closed-form verifier and throws if the two disagree.
/// Requires at most 12 secrets.
bool verify_capped_ne_exhaustive(const PartitionProfile& profile,
                                 const CappedParams& params,
                                 const PickerMix& delta,
                                 const GuesserMarginals& rho, double epsilon);

struct SimResult {
  double picker_mean = 0.0;
  double picker_se = 0.0;
  double guesser_mean = 0.0;
  double guesser_se = 0.0;
  std::uint64_t episodes = 0;
};

/// Monte-Carlo play of the capped game: sample a secret from delta and a
/// dictionary from rho each episode.
SimResult simulate(const PartitionProfile& profile, const CappedParams& params,
                   const PickerMix& delta, const GuesserMarginals& rho,
                   std::uint64_t episodes, std::uint64_t seed);

/// Monte-Carlo play of the costly game against a fixed exploration plan.
SimResult simulate(const PartitionProfile& profile, const CostlyParams& params,
                   const PickerMix& delta, const ExplorationPlan& plan,
                   std::uint64_t episodes, std::uint64_t seed);

struct SmallLpOptimum {
  std::vector<double> nu;
  double objective = 0.0;
};

/// Independent deterrence-LP optimum for at most 3 partitions, by
/// enumerating every vertex of the constraint polytope.
SmallLpOptimum lp_check_small(const PartitionProfile& profile,
                              const CostlyParams& params);

/// Seeded random instances for cross-validation.
PartitionProfile random_profile(std::mt19937_64& rng,
                                std::size_t max_partitions = 5,
                                std::uint64_t max_size = 6);
double log_uniform(std::mt19937_64& rng, double lo = 0.1, double hi = 10.0);
PerSecretMix random_per_secret(std::mt19937_64& rng, std::size_t n);

struct SuiteResult {
  std::string name;
  std::uint64_t passed = 0;
  std::uint64_t failed = 0;
  std::string first_failure;  // reproduction note for the first failing case
};

/// Runs the oracle-equivalence suites on `instances` random instances.
std::vector<SuiteResult> run_verification(std::uint64_t seed,
                                          std::uint64_t instances);

}  // namespace secretgame

#endif  // SECRETGAME_BRUTEFORCE_ORACLE_HPP
