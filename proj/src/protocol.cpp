#include "wstore/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wstore {

DecodingSet form_decoding_set(const ChannelDraw& draw, double rho, double q) {
  if (!(rho > 0.0)) throw std::invalid_argument("decoding set: need rho > 0");
  if (q < 0.0) throw std::invalid_argument("decoding set: need Q >= 0");
  DecodingSet decoded;
  for (size_t i = 0; i < draw.storage_gains.size(); ++i) {
    if (std::log2(1.0 + rho * draw.storage_gains[i]) >= q)
      decoded.members.push_back(static_cast<int>(i));
  }
  return decoded;
}

std::optional<TimeAllocation> allocate_time(
    const AllocationVector& alloc, const DecodingSet& decoded,
    std::span<const double> recovery_gains) {
  double covered = 0.0;
  for (int node : decoded.members) covered += alloc.sizes[node];
  if (covered < 1.0 - kStorableTol) return std::nullopt;

  std::vector<int> order = decoded.members;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (recovery_gains[a] != recovery_gains[b])
      return recovery_gains[a] > recovery_gains[b];
    return a < b;
  });

  TimeAllocation schedule;
  schedule.shares.reserve(order.size());
  double running = 0.0;
  for (int node : order) {
    const double remaining = 1.0 - running;
    const double share =
        remaining > 0.0 ? std::min(alloc.sizes[node], remaining) : 0.0;
    schedule.shares.push_back(TimeShare{node, share});
    running += alloc.sizes[node];
  }
  return schedule;
}

RateCheck recovery_test(const TimeAllocation& time_alloc,
                        std::span<const double> recovery_gains, double rho,
                        double q) {
  RateCheck check;
  for (const TimeShare& share : time_alloc.shares)
    check.accumulated_rate +=
        share.fraction * std::log2(1.0 + rho * recovery_gains[share.node]);
  check.success = check.accumulated_rate > q;
  return check;
}

TrialOutcome run_trial(const SystemConfig& config,
                       const AllocationVector& alloc, uint64_t trial_index) {
  if (alloc.node_count() != config.k)
    throw std::invalid_argument("run_trial: allocation length != K");
  const ChannelDraw draw = sample_draw(config.seed, trial_index, config.k);
  TrialOutcome outcome;
  outcome.decoded = form_decoding_set(draw, config.rho, config.q);
  const auto schedule = allocate_time(alloc, outcome.decoded, draw.recovery_gains);
  outcome.storable = schedule.has_value();
  if (schedule) {
    const RateCheck check =
        recovery_test(*schedule, draw.recovery_gains, config.rho, config.q);
    outcome.recovered = check.success;
    outcome.accumulated_rate = check.accumulated_rate;
  }
  return outcome;
}

}  // namespace wstore
