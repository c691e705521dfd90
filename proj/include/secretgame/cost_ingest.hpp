#ifndef SECRETGAME_COST_INGEST_HPP
#define SECRETGAME_COST_INGEST_HPP

#include <string>

#include "secretgame/partition_model.hpp"

namespace secretgame {

enum class FreqFormat {
  Auto,              // count/multiplicity when every first field is numeric
  CountMultiplicity, // lines of <count>\t<how many secrets share it>
  SecretCount,       // lines of <secret>\t<count>, aggregated on ingest
};

/// Builds a profile from frequency data: secrets grouped by identical
/// count, cost = inverse frequency normalized so the rarest class costs 1.
PartitionProfile from_frequency_text(const std::string& text,
                                     FreqFormat format = FreqFormat::Auto);
PartitionProfile from_frequency_file(const std::string& path,
                                     FreqFormat format = FreqFormat::Auto);

enum class KeyCostShape { Linear, Cubic };

/// Key-length model: one partition per length l = 0..max_bits with 2^l
/// keys and cost (l/max_bits) or (l/max_bits)^3.
PartitionProfile synthetic_key_model(unsigned max_bits, KeyCostShape shape);

/// Merges adjacent partitions whose cost gap is below the tolerance
/// (left-to-right single pass; merged cost is the size-weighted mean).
PartitionProfile prune(const PartitionProfile& profile, double merge_tolerance);

}  // namespace secretgame

#endif  // SECRETGAME_COST_INGEST_HPP
