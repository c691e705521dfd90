#include "secretgame/partition_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace secretgame {

namespace {
constexpr double kMassTol = 1e-12;
}  // namespace

double to_double(count_t n) { return static_cast<double>(n); }

std::string to_string(count_t n) {
  if (n == 0) return "0";
  std::string out;
  while (n > 0) {
    out.push_back(static_cast<char>('0' + static_cast<int>(n % 10)));
    n /= 10;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

count_t parse_count(const std::string& s) {
  if (s.empty()) throw model_error("empty count");
  count_t value = 0;
  const count_t limit = ~static_cast<count_t>(0);
  for (char c : s) {
    if (c < '0' || c > '9') throw model_error("invalid count: " + s);
    count_t digit = static_cast<count_t>(c - '0');
    if (value > (limit - digit) / 10) throw model_error("count overflow: " + s);
    value = value * 10 + digit;
  }
  return value;
}

PartitionProfile::PartitionProfile(std::vector<Partition> partitions)
    : partitions_(std::move(partitions)) {
  if (partitions_.empty()) throw model_error("profile needs at least one partition");
  const count_t limit = static_cast<count_t>(1) << 65;
  prefix_sizes_.reserve(partitions_.size());
  for (std::size_t i = 0; i < partitions_.size(); ++i) {
    const Partition& p = partitions_[i];
    if (p.size == 0)
      throw model_error("partition " + std::to_string(i) + " is empty",
                        static_cast<long>(i));
    if (!(p.cost >= 0.0) || !std::isfinite(p.cost))
      throw model_error("partition " + std::to_string(i) + " has invalid cost",
                        static_cast<long>(i));
    if (i > 0 && !(p.cost > partitions_[i - 1].cost))
      throw model_error(
          "costs must be strictly increasing; violated at partition " +
              std::to_string(i),
          static_cast<long>(i));
    if (p.size > limit - total_size_)
      throw model_error("total size exceeds 2^65", static_cast<long>(i));
    total_size_ += p.size;
    prefix_sizes_.push_back(total_size_);
  }
}

PartitionProfile PartitionProfile::from_json_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw model_error(std::string("game profile is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("partitions") ||
      !doc["partitions"].is_array())
    throw model_error("game profile must be an object with a \"partitions\" array");
  std::vector<Partition> parts;
  long idx = 0;
  for (const auto& item : doc["partitions"]) {
    if (!item.is_object() || !item.contains("size") || !item.contains("cost"))
      throw model_error(
          "partition " + std::to_string(idx) + " must have size and cost", idx);
    Partition p;
    const auto& size = item["size"];
    if (size.is_string()) {
      p.size = parse_count(size.get<std::string>());
    } else if (size.is_number_unsigned()) {
      p.size = static_cast<count_t>(size.get<std::uint64_t>());
    } else if (size.is_number_integer() && size.get<std::int64_t>() > 0) {
      p.size = static_cast<count_t>(size.get<std::int64_t>());
    } else {
      throw model_error(
          "partition " + std::to_string(idx) + " size must be a positive integer",
          idx);
    }
    if (!item["cost"].is_number())
      throw model_error("partition " + std::to_string(idx) + " cost must be a number",
                        idx);
    p.cost = item["cost"].get<double>();
    parts.push_back(p);
    ++idx;
  }
  return PartitionProfile(std::move(parts));
}

std::string PartitionProfile::to_json_text() const {
  nlohmann::ordered_json doc;
  doc["partitions"] = nlohmann::ordered_json::array();
  const count_t u64max = static_cast<count_t>(~std::uint64_t{0});
  for (const Partition& p : partitions_) {
    nlohmann::ordered_json item;
    if (p.size <= u64max)
      item["size"] = static_cast<std::uint64_t>(p.size);
    else
      item["size"] = to_string(p.size);  // beyond JSON integer range
    item["cost"] = p.cost;
    doc["partitions"].push_back(std::move(item));
  }
  return doc.dump();
}

void CappedParams::validate(const PartitionProfile& profile) const {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw model_error("lambda must be positive");
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw model_error("gamma must be positive");
  if (cap == 0) throw model_error("cap must be positive");
  if (static_cast<count_t>(cap) >= profile.total_size())
    throw model_error("cap K must be smaller than the total number of secrets");
}

void CostlyParams::validate() const {
  if (!(lambda > 0.0) || !(gamma > 0.0) || !(sigma > 0.0) ||
      !std::isfinite(lambda) || !std::isfinite(gamma) || !std::isfinite(sigma))
    throw model_error("lambda, gamma, sigma must all be positive");
}

PickerMix::PickerMix(std::vector<double> mass, const PartitionProfile& profile)
    : mass_(std::move(mass)) {
  if (mass_.size() != profile.num_partitions())
    throw model_error("picker mix length does not match partition count");
  double total = 0.0;
  for (std::size_t i = 0; i < mass_.size(); ++i) {
    if (!(mass_[i] >= 0.0) || !std::isfinite(mass_[i]))
      throw model_error("picker mass must be non-negative at partition " +
                            std::to_string(i),
                        static_cast<long>(i));
    total += mass_[i];
  }
  if (std::abs(total - 1.0) > kMassTol)
    throw model_error("picker mass must sum to 1");
}

double PickerMix::per_secret(const PartitionProfile& profile,
                             std::size_t i) const {
  return mass_[i] / to_double(profile.partition(i).size);
}

PickerMix PickerMix::uniform_prefix(const PartitionProfile& profile,
                                    std::size_t prefix_end) {
  std::vector<double> mass(profile.num_partitions(), 0.0);
  const double total = to_double(profile.prefix_size(prefix_end - 1));
  for (std::size_t i = 0; i < prefix_end; ++i)
    mass[i] = to_double(profile.partition(i).size) / total;
  return PickerMix(std::move(mass), profile);
}

PickerMix PickerMix::point_mass(const PartitionProfile& profile,
                                std::size_t partition) {
  std::vector<double> mass(profile.num_partitions(), 0.0);
  mass[partition] = 1.0;
  return PickerMix(std::move(mass), profile);
}

GuesserMarginals::GuesserMarginals(std::vector<double> rho,
                                   const PartitionProfile& profile)
    : rho_(std::move(rho)) {
  if (rho_.size() != profile.num_partitions())
    throw model_error("marginals length does not match partition count");
  for (std::size_t i = 0; i < rho_.size(); ++i) {
    if (!(rho_[i] >= 0.0) || !(rho_[i] <= 1.0) || !std::isfinite(rho_[i]))
      throw model_error("marginal out of [0,1] at partition " + std::to_string(i),
                        static_cast<long>(i));
  }
}

double GuesserMarginals::budget(const PartitionProfile& profile) const {
  double total = 0.0;
  for (std::size_t i = 0; i < rho_.size(); ++i)
    total += to_double(profile.partition(i).size) * rho_[i];
  return total;
}

bool GuesserMarginals::is_full_budget(const PartitionProfile& profile,
                                      std::uint64_t cap, double tol) const {
  return std::abs(budget(profile) - static_cast<double>(cap)) <= tol;
}

void ExplorationPlan::validate(const PartitionProfile& profile) const {
  std::vector<count_t> used(profile.num_partitions(), 0);
  for (const Batch& b : batches) {
    if (b.group >= profile.num_partitions())
      throw model_error("plan references unknown partition " +
                        std::to_string(b.group));
    if (b.count == 0) throw model_error("plan batch with zero count");
    used[b.group] += b.count;
    if (used[b.group] > profile.partition(b.group).size)
      throw model_error("plan explores more secrets than partition " +
                            std::to_string(b.group) + " holds",
                        static_cast<long>(b.group));
  }
}

std::string to_string(Classification c) {
  switch (c) {
    case Classification::Ordinary: return "ordinary";
    case Classification::TotalDefeat: return "total_defeat";
    case Classification::Degenerate: return "degenerate";
    case Classification::GuesserQuits: return "guesser_quits";
    case Classification::CostlyTotalDefeat: return "total_defeat";
    case Classification::BoundedNe: return "bounded";
    case Classification::SseDeterrence: return "sse_deterrence";
    case Classification::SseGiveUp: return "sse_give_up";
  }
  return "unknown";
}

std::pair<double, double> eval_capped(const PartitionProfile& profile,
                                      const CappedParams& params,
                                      const PickerMix& delta,
                                      const GuesserMarginals& rho) {
  params.validate(profile);
  double usability = 0.0;
  double find_prob = 0.0;
  for (std::size_t i = 0; i < profile.num_partitions(); ++i) {
    usability += profile.partition(i).cost * delta.mass(i);
    // |E_i| secrets, each picked with nu_i/|E_i| and included with rho_i.
    find_prob += delta.mass(i) * rho.rho(i);
  }
  return {-usability - params.lambda * find_prob, params.gamma * find_prob};
}

double eval_costly_plan(const PartitionProfile& profile,
                        const CostlyParams& params, const PickerMix& delta,
                        const ExplorationPlan& plan) {
  params.validate();
  plan.validate(profile);
  double value = 0.0;
  double found_mass = 0.0;  // probability the secret was already hit
  for (const ExplorationPlan::Batch& b : plan.batches) {
    const double n = to_double(b.count);
    const double q = delta.per_secret(profile, b.group);
    // n guesses, each with hit probability q, reached with probability
    // 1 - (mass already explored).
    value += params.gamma * n * q -
             params.sigma * (n * (1.0 - found_mass) - q * n * (n - 1.0) / 2.0);
    found_mass += n * q;
  }
  return value;
}

double exhaust_utility(count_t set_size, const CostlyParams& params) {
  params.validate();
  if (set_size == 0) throw model_error("set size must be positive");
  return params.gamma - (to_double(set_size) + 1.0) * params.sigma / 2.0;
}

}  // namespace secretgame
