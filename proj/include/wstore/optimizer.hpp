#pragma once

#include <cstdint>
#include <vector>

#include "wstore/allocation.hpp"
#include "wstore/config.hpp"
#include "wstore/montecarlo.hpp"

namespace wstore {

// Every multiset of K nonnegative multiples of step with sum <= T, in
// sorted-descending canonical form. Failure probability is label-invariant,
// so permutations are collapsed. Guard: at most 1e6 candidates.
std::vector<AllocationVector> enumerate_allocations(int k, double t,
                                                    double step);

struct RankedCandidate {
  AllocationVector alloc;
  FailureEstimate estimate;
  int order_upper = 0;
};

struct OptimizeResult {
  // ranking[0] is the selected best; the rest are ordered by estimate.
  std::vector<RankedCandidate> ranking;
  // Paired-difference standard error between the selected best and the
  // runner-up (common random numbers), 0 when fewer than two candidates.
  double runner_up_margin = 0.0;
  double runner_up_paired_se = 0.0;
};

// Evaluates every candidate with estimate_failure under common random
// numbers (identical seed and trial indices) and returns the minimizer.
// Statistical ties against the minimum are resolved toward the candidate
// with the larger order upper bound, then by concentration (see notes in
// the implementation).
OptimizeResult best_allocation(const SystemConfig& config, double step,
                               uint64_t trials);

}  // namespace wstore
