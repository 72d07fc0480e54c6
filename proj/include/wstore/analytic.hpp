#pragma once

#include <cstdint>
#include <utility>

#include "wstore/allocation.hpp"

namespace wstore {

// Exponential-order bounds for an allocation, next to the optimum for the
// same (K, T). For the maximal symmetric allocation the three coincide.
struct OrderReport {
  double lower = 0.0;
  int upper = 0;
  int d_star = 0;
};

struct HighSnrApprox {
  double value = 0.0;  // clamped to [0, 1]
  double raw = 0.0;    // unclamped formula value
  bool clamped = false;  // set when the raw value exceeds 1 (regime invalid)
};

struct ConditionedEstimate {
  double p_fail = 0.0;
  double std_err = 0.0;
  uint64_t groups = 0;            // distinct decoded-cap compositions sampled
  uint64_t mc_trials = 0;         // recovery-phase draws across all groups
  uint64_t mc_failures = 0;
};

// K - ceil(K/T) + 1, the best achievable failure-probability decay exponent
// under budget T (> 1).
int optimal_order(int k, double t);

// Exact order upper bound: K minus the largest decoded set that cannot cover
// the object, found greedily over ascending sizes (equivalent to the full
// subset minimization).
int order_upper_bound(const AllocationVector& alloc);

// Order lower bound: minimized over decoded sets, with the time shares of
// each covering set equalized (water-filling under the size caps) to make
// the bound as tight as it permits. The minimization reduces exactly to the
// K prefixes of the ascending sizes, so no subset enumeration is needed.
double order_lower_bound(const AllocationVector& alloc);

// ((1 - 1/T) K, (1 - 1/T) K + 1); the optimal order lies within, inclusive.
std::pair<double, double> slope_bounds(int k, double t);

// High-SNR failure approximation for the maximal symmetric allocation:
// C(K, ceil(K/T)-1) * ((2^Q - 1)/rho)^(K - ceil(K/T) + 1).
HighSnrApprox high_snr_failure_approx(int k, double t, double q, double rho);

// Exact failure probability of the minimal allocation at integer budget T:
// sum_k C(T,k) e^{-kx} (1-e^{-x})^{T-k} (1-e^{-x})^k with x = (2^Q-1)/rho.
double minimal_exact_failure(int t, double q, double rho);

// Algebraic simplification of the same sum, kept as an independent route:
// (1 - e^{-2x})^T.
double minimal_exact_failure_product(int t, double q, double rho);

// e^{-2 (2^Q - 1)/rho}: upper bound on the recovery probability of any
// allocation made only of incomplete nodes, in the low-SNR regime.
double low_snr_bound_incomplete(int k, double q, double rho);

// Success probability of one complete node assisted by one incomplete node
// of size a, under the low-SNR linearization. Removable singularity at
// a = 1/2 is evaluated by series (tolerance 1e-9).
double f_prob(double a, double q, double rho);

// Variance-reduced failure estimator: decoded-set probabilities enumerated
// exactly (2^K subsets, K <= 20), Monte Carlo only over recovery gains, and
// only for compositions where recovery is not already decided.
ConditionedEstimate conditioned_failure_probability(
    const AllocationVector& alloc, double q, double rho,
    uint64_t trials_per_set, uint64_t seed);

OrderReport order_report(const AllocationVector& alloc, double t);

}  // namespace wstore
