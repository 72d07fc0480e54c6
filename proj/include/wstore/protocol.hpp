#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "wstore/allocation.hpp"
#include "wstore/channel.hpp"
#include "wstore/config.hpp"

namespace wstore {

// Nodes that decoded the broadcast during the storage phase.
struct DecodingSet {
  std::vector<int> members;  // ascending node indices
};

struct TimeShare {
  int node;
  double fraction;
};

// Recovery-phase schedule: decoded nodes in descending recovery-gain order
// (ties broken by ascending node index), each transmitting for its fraction
// of the recovery period.
struct TimeAllocation {
  std::vector<TimeShare> shares;
};

struct RateCheck {
  double accumulated_rate = 0.0;  // bits per channel use
  bool success = false;
};

struct TrialOutcome {
  DecodingSet decoded;
  bool storable = false;   // decoded sizes cover the object
  bool recovered = false;
  double accumulated_rate = 0.0;
};

// Node i decodes iff log2(1 + rho * |h_{s,i}|^2) >= Q. Every node is tested,
// including nodes with zero allocated storage.
DecodingSet form_decoding_set(const ChannelDraw& draw, double rho, double q);

// Greedy schedule: walk decoded nodes by descending recovery gain, granting
// t = a_i until the running size sum reaches 1, a final partial share there,
// and zero after. Returns nothing when the decoded sizes cannot cover the
// object.
std::optional<TimeAllocation> allocate_time(
    const AllocationVector& alloc, const DecodingSet& decoded,
    std::span<const double> recovery_gains);

// Accumulated rate sum t_i * log2(1 + rho * g_i); recovery succeeds on
// strict > Q (the boundary carries zero probability under continuous fading).
RateCheck recovery_test(const TimeAllocation& time_alloc,
                        std::span<const double> recovery_gains, double rho,
                        double q);

// One end-to-end trial: sample -> decode -> schedule -> recover. Pure in
// (config, alloc, trial_index); safe to run concurrently.
TrialOutcome run_trial(const SystemConfig& config,
                       const AllocationVector& alloc, uint64_t trial_index);

}  // namespace wstore
