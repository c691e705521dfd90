#ifndef SECRETGAME_PARTITION_MODEL_HPP
#define SECRETGAME_PARTITION_MODEL_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace secretgame {

/// Exact secret counts. The key-length model needs sums up to 2^65 - 1,
/// which does not fit in 64 bits.
using count_t = unsigned __int128;

double to_double(count_t n);
std::string to_string(count_t n);
count_t parse_count(const std::string& s);

/// Thrown when an input violates a model invariant. `index` is the
/// offending partition (or -1 when not applicable).
class model_error : public std::runtime_error {
 public:
  model_error(std::string msg, long index = -1)
      : std::runtime_error(std::move(msg)), index_(index) {}
  long index() const { return index_; }

 private:
  long index_;
};

struct Partition {
  count_t size = 0;   // |E_i|, number of secrets sharing this cost
  double cost = 0.0;  // C_i, usability cost of picking from this class
};

/// Ordered cost classes describing the secret space. Costs are strictly
/// increasing; every class is non-empty.
class PartitionProfile {
 public:
  explicit PartitionProfile(std::vector<Partition> partitions);

  const std::vector<Partition>& partitions() const { return partitions_; }
  std::size_t num_partitions() const { return partitions_.size(); }
  const Partition& partition(std::size_t i) const { return partitions_[i]; }
  count_t total_size() const { return total_size_; }

  /// Cumulative size of partitions [0, i].
  count_t prefix_size(std::size_t i) const { return prefix_sizes_[i]; }

  static PartitionProfile from_json_text(const std::string& text);
  std::string to_json_text() const;

 private:
  std::vector<Partition> partitions_;
  std::vector<count_t> prefix_sizes_;
  count_t total_size_ = 0;
};

struct CappedParams {
  double lambda = 1.0;       // picker's loss when the secret is found
  double gamma = 1.0;        // guesser's gain on a correct guess
  std::uint64_t cap = 1;     // K, size of the guessing dictionary

  void validate(const PartitionProfile& profile) const;
};

struct CostlyParams {
  double lambda = 1.0;
  double gamma = 1.0;
  double sigma = 1.0;  // cost per guess

  void validate() const;
};

/// Mixed picking strategy: probability mass per partition, spread
/// uniformly over the secrets inside each partition.
class PickerMix {
 public:
  PickerMix(std::vector<double> mass, const PartitionProfile& profile);

  const std::vector<double>& mass() const { return mass_; }
  double mass(std::size_t i) const { return mass_[i]; }
  /// Per-secret probability inside partition i.
  double per_secret(const PartitionProfile& profile, std::size_t i) const;

  static PickerMix uniform_prefix(const PartitionProfile& profile,
                                  std::size_t prefix_end);
  static PickerMix point_mass(const PartitionProfile& profile,
                              std::size_t partition);

 private:
  std::vector<double> mass_;
};

/// Per-partition marginal inclusion probabilities of a K-sized dictionary.
class GuesserMarginals {
 public:
  GuesserMarginals(std::vector<double> rho, const PartitionProfile& profile);

  const std::vector<double>& rho() const { return rho_; }
  double rho(std::size_t i) const { return rho_[i]; }
  /// Sum of per-secret inclusion probabilities.
  double budget(const PartitionProfile& profile) const;
  /// True when the marginals spend the full budget K (within tol).
  bool is_full_budget(const PartitionProfile& profile, std::uint64_t cap,
                      double tol = 1e-9) const;

 private:
  std::vector<double> rho_;
};

/// Ordered guessing sequence in batch form: explore `count` secrets of
/// partition `group`, then move on; the empty plan means quitting at once.
struct ExplorationPlan {
  struct Batch {
    std::size_t group = 0;
    count_t count = 0;
  };
  std::vector<Batch> batches;

  static ExplorationPlan quit() { return {}; }
  bool is_quit() const { return batches.empty(); }
  void validate(const PartitionProfile& profile) const;
};

enum class Classification {
  // Capped game
  Ordinary,
  TotalDefeat,
  Degenerate,
  // Costly game
  GuesserQuits,
  CostlyTotalDefeat,
  BoundedNe,
  SseDeterrence,
  SseGiveUp,
};

std::string to_string(Classification c);

/// Key quantities surfaced alongside a solution.
struct Diagnostics {
  std::optional<std::size_t> L;            // 1-based
  std::vector<std::size_t> J_set;          // 1-based members of the J-set
  std::optional<std::size_t> J;            // 1-based, absent when J-set empty
  std::optional<std::size_t> support_end;  // 1-based end of the NE support
  std::vector<double> bias;                // B_i over the support, capped game
  std::optional<std::size_t> M;            // 1-based, costly bounded regime
  std::optional<std::string> lp_status;
  std::optional<double> deterrence_value;  // guesser best-response value
  std::vector<std::string> flags;          // boundary / degeneracy notes
};

struct SolveReport {
  Classification classification = Classification::Ordinary;
  PickerMix picker_strategy;
  std::optional<GuesserMarginals> guesser_marginals;
  std::optional<ExplorationPlan> guesser_plan;
  double picker_utility = 0.0;
  double guesser_utility = 0.0;
  Diagnostics diagnostics;
};

/// Expected utilities of the capped game under independent randomization.
/// Returns (picker, guesser).
std::pair<double, double> eval_capped(const PartitionProfile& profile,
                                      const CappedParams& params,
                                      const PickerMix& delta,
                                      const GuesserMarginals& rho);

/// Guesser's expected utility for a batch plan in the costly game.
double eval_costly_plan(const PartitionProfile& profile,
                        const CostlyParams& params, const PickerMix& delta,
                        const ExplorationPlan& plan);

/// Value of exhausting a uniformly-picked set: gamma - (n + 1) * sigma / 2.
double exhaust_utility(count_t set_size, const CostlyParams& params);

}  // namespace secretgame

#endif  // SECRETGAME_PARTITION_MODEL_HPP
