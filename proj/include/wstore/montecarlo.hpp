#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "wstore/allocation.hpp"
#include "wstore/analytic.hpp"
#include "wstore/config.hpp"

namespace wstore {

enum class Estimator { plain, conditioned };

// Aggregated failure estimate for one (allocation, SNR) cell. For the plain
// estimator p_hat = failures / trials; for the conditioned estimator p_hat is
// the exactly-weighted mixture and failures/trials report only the
// recovery-phase Monte Carlo portion.
struct FailureEstimate {
  uint64_t trials = 0;
  uint64_t failures = 0;
  double p_hat = 0.0;
  double std_err = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  Estimator estimator = Estimator::plain;
};

FailureEstimate summarize_counts(uint64_t failures, uint64_t trials);

// OpenMP trial kernel. Failure counts are integers, so the reduction is
// schedule-independent: identical output for any worker count.
uint64_t count_failures(const SystemConfig& config,
                        const AllocationVector& alloc, uint64_t first_trial,
                        uint64_t trials);

// Straight-line reference: composes the protocol module trial by trial.
// Kept for testing the kernel and as the baseline in the benchmark.
uint64_t count_failures_serial(const SystemConfig& config,
                               const AllocationVector& alloc,
                               uint64_t first_trial, uint64_t trials);

// Kernel variant recording the per-trial failure flag (bit per trial), used
// for paired comparisons under common random numbers.
void count_failures_bitmap(const SystemConfig& config,
                           const AllocationVector& alloc, uint64_t trials,
                           std::vector<uint64_t>& failure_bits);

FailureEstimate estimate_failure(const SystemConfig& config,
                                 const AllocationVector& alloc,
                                 uint64_t trials);
FailureEstimate estimate_failure_serial(const SystemConfig& config,
                                        const AllocationVector& alloc,
                                        uint64_t trials);

FailureEstimate conditioned_estimate(const SystemConfig& config,
                                     const AllocationVector& alloc,
                                     uint64_t trials_per_set);

struct SweepStrategy {
  std::string name;
  AllocationVector alloc;
  std::vector<FailureEstimate> estimates;  // one per grid point
};

struct SweepResult {
  int k = 0;
  double t = 0.0;
  double q = 0.0;
  uint64_t seed = 0;
  uint64_t trials = 0;
  Estimator estimator = Estimator::plain;
  uint64_t trials_per_set = 0;
  std::vector<double> snr_db;
  std::vector<SweepStrategy> strategies;
};

// Evaluates every (strategy, SNR) cell. All cells share the same stream seed
// and trial indices, so comparisons between strategies are paired (common
// random numbers).
SweepResult sweep(const SystemConfig& base,
                  const std::vector<std::pair<std::string, AllocationVector>>&
                      strategies,
                  const std::vector<double>& snr_db_grid, uint64_t trials,
                  Estimator estimator = Estimator::plain,
                  uint64_t trials_per_set = 20000);

// Least-squares slope of -log10(p) against log10(rho) inside the window.
// Cells whose plain estimate recorded no failures fall back to the
// conditioned estimator so deep-tail points stay usable.
double empirical_order(const SweepResult& result, const std::string& strategy,
                       double window_lo_db, double window_hi_db,
                       uint64_t fallback_trials_per_set = 20000);

// SNR (dB) of the first sign change of p_a - p_b, interpolated in
// (dB, log p) space; nothing when the curves never cross. Grid points where
// the estimates tie exactly are not sign changes.
std::optional<double> find_crossing(const SweepResult& result,
                                    const std::string& strategy_a,
                                    const std::string& strategy_b);

// CSV columns: snr_db,strategy,trials,failures,p_fail,ci_low,ci_high.
// With overlays enabled two analytic columns are appended
// (high_snr_approx, minimal_exact), blank where not applicable.
void write_sweep_csv(const SweepResult& result, std::ostream& out,
                     bool analytic_overlays);

std::string sweep_to_json(const SweepResult& result, bool analytic_overlays);

}  // namespace wstore
