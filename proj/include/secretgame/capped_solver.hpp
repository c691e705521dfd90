#ifndef SECRETGAME_CAPPED_SOLVER_HPP
#define SECRETGAME_CAPPED_SOLVER_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "secretgame/partition_model.hpp"

namespace secretgame {

enum class CappedKind { Ordinary, TotalDefeat, Degenerate };

struct CappedClassification {
  std::size_t L = 1;                // 1-based: first prefix exceeding K
  std::vector<std::size_t> J_set;   // 1-based indices in the worthwhile set
  std::optional<std::size_t> J;     // max of J_set, absent when empty
  std::size_t support_end = 1;      // 1-based: max(J_set ∪ {L})
  CappedKind kind = CappedKind::Ordinary;
};

/// 1-based index of the first partition whose cumulative size exceeds K.
std::size_t compute_L(const PartitionProfile& profile, std::uint64_t cap);

CappedClassification classify(const PartitionProfile& profile,
                              const CappedParams& params);

/// Equilibrium picker utility (identical in all NE, maximin and SSE).
double maximin_utility(const PartitionProfile& profile,
                       const CappedParams& params);

/// Closed-form NE of the capped game. The picker strategy is
/// simultaneously NE, maximin and SSE.
SolveReport solve_ne(const PartitionProfile& profile,
                     const CappedParams& params);

struct VerifyResult {
  bool ok = false;
  double picker_gap = 0.0;   // best response value minus current value
  double guesser_gap = 0.0;
  std::string certificate;   // profitable deviation, when not ok
};

/// Checks epsilon-NE via closed-form best responses: top-K mass for the
/// guesser, cheapest effective partition for the picker.
VerifyResult verify_ne(const PartitionProfile& profile,
                       const CappedParams& params, const PickerMix& delta,
                       const GuesserMarginals& rho, double epsilon);

/// Draws a K-subset whose per-secret inclusion probabilities match the
/// marginals exactly (systematic sampling on the cumulative circle).
/// Returns global secret indices in [0, total_size).
std::vector<std::uint64_t> sample_dictionary(const GuesserMarginals& rho,
                                             const PartitionProfile& profile,
                                             std::uint64_t cap,
                                             std::mt19937_64& rng);

struct CappedSweepRow {
  std::uint64_t cap = 0;
  double picker_loss = 0.0;
  double support_size = 0.0;       // secrets in the NE support
  double find_probability = 0.0;   // K / support, or 1 in total defeat
  std::string classification;
  std::string error;               // non-empty when this row failed
};

std::vector<CappedSweepRow> sweep_capped(const PartitionProfile& profile,
                                         double lambda, double gamma,
                                         const std::vector<std::uint64_t>& caps,
                                         unsigned threads = 1);

}  // namespace secretgame

#endif  // SECRETGAME_CAPPED_SOLVER_HPP
