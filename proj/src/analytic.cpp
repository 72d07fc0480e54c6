#include "wstore/analytic.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "wstore/rng.hpp"

namespace wstore {

namespace {

// ceil that forgives sub-1e-9 float noise in K/T when the quotient is a
// mathematical integer; never below 1 for positive quotients.
int ceil_tol(double v) {
  return std::max(1, static_cast<int>(std::ceil(v - 1e-9)));
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

double decode_miss(double x) { return -std::expm1(-x); }  // 1 - e^{-x}

// Smallest achievable maximum share when 1 unit of time is spread over the
// given caps (ascending): lambda with sum min(cap, lambda) = 1.
double waterfill_max_share(const std::vector<double>& caps_ascending) {
  const int m = static_cast<int>(caps_ascending.size());
  double prefix = 0.0;
  for (int j = 0; j < m; ++j) {
    const double lam = (1.0 - prefix) / (m - j);
    if (lam <= caps_ascending[j]) return lam;
    prefix += caps_ascending[j];
  }
  // Caps sum to 1 within tolerance: every node saturates.
  return caps_ascending.back();
}

}  // namespace

int optimal_order(int k, double t) {
  if (k < 1) throw std::invalid_argument("optimal_order: need K >= 1");
  if (!(t > 1.0))
    throw std::domain_error("optimal_order: defined for T > 1 only");
  return k - ceil_tol(static_cast<double>(k) / t) + 1;
}

int order_upper_bound(const AllocationVector& alloc) {
  std::vector<double> sizes = alloc.sizes;
  std::sort(sizes.begin(), sizes.end());
  double covered = 0.0;
  int deficient = 0;
  for (double s : sizes) {
    if (covered + s < 1.0 - kStorableTol) {
      covered += s;
      ++deficient;
    } else {
      break;
    }
  }
  return alloc.node_count() - deficient;
}

double order_lower_bound(const AllocationVector& alloc) {
  // The subset minimization collapses to one representative per decoded-set
  // size m: the m smallest sizes. They minimize the subset sum (so they are
  // deficient whenever any size-m subset is), and among covering subsets
  // smaller caps force a larger maximum share, which minimizes
  // K - m + 1/max_share. Water-filling is monotone in the caps, so no other
  // composition can undercut the prefix.
  const int k = alloc.node_count();
  std::vector<double> sizes = alloc.sizes;
  std::sort(sizes.begin(), sizes.end());
  double best = static_cast<double>(k);  // empty set
  double covered = 0.0;
  std::vector<double> prefix;
  for (int m = 1; m <= k; ++m) {
    prefix.push_back(sizes[m - 1]);
    covered += sizes[m - 1];
    double value;
    if (covered < 1.0 - kStorableTol)
      value = static_cast<double>(k - m);
    else
      value = k - m + 1.0 / waterfill_max_share(prefix);
    best = std::min(best, value);
  }
  return best;
}

std::pair<double, double> slope_bounds(int k, double t) {
  if (!(t > 1.0))
    throw std::domain_error("slope_bounds: defined for T > 1 only");
  const double lo = (1.0 - 1.0 / t) * k;
  return {lo, lo + 1.0};
}

HighSnrApprox high_snr_failure_approx(int k, double t, double q, double rho) {
  if (!(t > 1.0))
    throw std::domain_error("high_snr_failure_approx: defined for T > 1 only");
  if (!(rho > 0.0))
    throw std::invalid_argument("high_snr_failure_approx: need rho > 0");
  const int misses = ceil_tol(static_cast<double>(k) / t) - 1;
  const int order = k - misses;
  const double x = (std::exp2(q) - 1.0) / rho;
  HighSnrApprox approx;
  approx.raw = binomial(k, misses) * std::pow(x, order);
  approx.clamped = approx.raw > 1.0;
  approx.value = std::clamp(approx.raw, 0.0, 1.0);
  return approx;
}

double minimal_exact_failure(int t, double q, double rho) {
  if (t < 1)
    throw std::invalid_argument("minimal_exact_failure: need integer T >= 1");
  const double x = (std::exp2(q) - 1.0) / rho;
  const double miss = decode_miss(x);
  // Decoded complete nodes are Binomial(T, e^{-x}); given k of them the
  // collector picks the strongest, which fails with miss^k.
  double sum = 0.0;
  for (int k = 0; k <= t; ++k)
    sum += binomial(t, k) * std::exp(-k * x) * std::pow(miss, t - k) *
           std::pow(miss, k);
  return sum;
}

double minimal_exact_failure_product(int t, double q, double rho) {
  if (t < 1)
    throw std::invalid_argument("minimal_exact_failure: need integer T >= 1");
  const double x = (std::exp2(q) - 1.0) / rho;
  return std::pow(-std::expm1(-2.0 * x), t);
}

double low_snr_bound_incomplete(int /*k*/, double q, double rho) {
  if (!(rho > 0.0))
    throw std::invalid_argument("low_snr_bound_incomplete: need rho > 0");
  const double x = (std::exp2(q) - 1.0) / rho;
  return std::exp(-2.0 * x);
}

double f_prob(double a, double q, double rho) {
  if (a < 0.0 || a > 1.0)
    throw std::domain_error("f_prob: a must lie in [0, 1]");
  const double qr = q / rho;
  if (a == 0.0) return std::exp(-qr);
  if (std::abs(a - 0.5) < 1e-7) {
    // First-order expansion around the removable singularity:
    // f(1/2 + d) = e^{-q} + e^{-2q} (q/2 + q^2 d) + O(d^2).
    return std::exp(-qr) +
           std::exp(-2.0 * qr) * (0.5 * qr + qr * qr * (a - 0.5));
  }
  return std::exp(-qr) + a / (2.0 * (1.0 - 2.0 * a)) *
                             (std::exp(-2.0 * qr) - std::exp(-qr / a));
}

namespace {

// Failure frequency of the greedy schedule over fresh recovery gains, for a
// fixed multiset of decoded caps (descending).
void simulate_composition(const std::vector<double>& caps, double q, double rho,
                          uint64_t trials, uint64_t seed, double& p_fail,
                          double& std_err, uint64_t& failures) {
  const int m = static_cast<int>(caps.size());
  std::vector<double> gains(m);
  std::vector<int> order(m);
  uint64_t failed = 0;
  for (uint64_t trial = 0; trial < trials; ++trial) {
    rng::Stream(seed, trial, rng::kDomainConditioned).fill_exponential(gains);
    for (int i = 0; i < m; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (gains[a] != gains[b]) return gains[a] > gains[b];
      return a < b;
    });
    double running = 0.0;
    double rate = 0.0;
    for (int idx : order) {
      const double remaining = 1.0 - running;
      if (remaining <= 0.0) break;
      const double share = std::min(caps[idx], remaining);
      rate += share * std::log2(1.0 + rho * gains[idx]);
      running += caps[idx];
    }
    if (!(rate > q)) ++failed;
  }
  p_fail = static_cast<double>(failed) / trials;
  std_err = std::sqrt(p_fail * (1.0 - p_fail) / trials);
  failures = failed;
}

}  // namespace

ConditionedEstimate conditioned_failure_probability(
    const AllocationVector& alloc, double q, double rho,
    uint64_t trials_per_set, uint64_t seed) {
  const int k = alloc.node_count();
  if (k > 20)
    throw std::length_error("conditioned estimator: subset enumeration capped at K = 20");
  if (trials_per_set < 1)
    throw std::invalid_argument("conditioned estimator: need trials_per_set >= 1");

  const double x = (std::exp2(q) - 1.0) / rho;
  const double miss = decode_miss(x);

  // Zero-cap members never receive time, so a decoded set's conditional
  // failure depends only on the multiset of positive caps. Group the 2^K
  // decoded sets by that composition and weight each group by its exact
  // probability.
  struct Group {
    std::vector<double> caps;  // descending
    double weight = 0.0;
    uint64_t first_index = 0;  // discovery order, seeds the group's stream
  };
  std::map<std::vector<double>, size_t> index_of;
  std::vector<Group> groups;
  double deficient_weight = 0.0;
  std::vector<double> caps;
  for (uint64_t mask = 0; mask < (1ull << k); ++mask) {
    double covered = 0.0;
    caps.clear();
    int members = 0;
    for (int i = 0; i < k; ++i) {
      if (mask & (1ull << i)) {
        ++members;
        covered += alloc.sizes[i];
        if (alloc.sizes[i] > 0.0) caps.push_back(alloc.sizes[i]);
      }
    }
    const double weight =
        std::exp(-x * members) * std::pow(miss, k - members);
    if (covered < 1.0 - kStorableTol) {
      deficient_weight += weight;  // recovery impossible, failure = 1 exactly
      continue;
    }
    std::sort(caps.begin(), caps.end(), std::greater<double>());
    auto [it, inserted] = index_of.try_emplace(caps, groups.size());
    if (inserted) groups.push_back(Group{caps, 0.0, groups.size()});
    groups[it->second].weight += weight;
  }

  ConditionedEstimate estimate;
  estimate.groups = groups.size();
  std::vector<double> p_g(groups.size()), se_g(groups.size());
  std::vector<uint64_t> failed_g(groups.size(), 0);
  // Bytes, not vector<bool>: parallel writers must not share bit-packed words.
  std::vector<unsigned char> sampled(groups.size(), 0);

#pragma omp parallel for schedule(dynamic)
  for (long long g = 0; g < static_cast<long long>(groups.size()); ++g) {
    const Group& group = groups[g];
    if (std::all_of(group.caps.begin(), group.caps.end(),
                    [](double c) { return is_complete(c); })) {
      // Complete nodes only: the greedy schedule hands the whole period to
      // the strongest of the m nodes, so failure is miss^m exactly.
      p_g[g] = std::pow(miss, group.caps.size());
      se_g[g] = 0.0;
    } else {
      simulate_composition(group.caps, q, rho, trials_per_set,
                           rng::derive_seed(seed, group.first_index), p_g[g],
                           se_g[g], failed_g[g]);
      sampled[g] = 1;
    }
  }

  // Reduce serially in group order so the float sums do not depend on the
  // parallel schedule.
  double p = deficient_weight;
  double var = 0.0;
  for (size_t g = 0; g < groups.size(); ++g) {
    p += groups[g].weight * p_g[g];
    var += groups[g].weight * groups[g].weight * se_g[g] * se_g[g];
    if (sampled[g]) {
      estimate.mc_trials += trials_per_set;
      estimate.mc_failures += failed_g[g];
    }
  }
  estimate.p_fail = p;
  estimate.std_err = std::sqrt(var);
  return estimate;
}

OrderReport order_report(const AllocationVector& alloc, double t) {
  return OrderReport{order_lower_bound(alloc), order_upper_bound(alloc),
                     optimal_order(alloc.node_count(), t)};
}

}  // namespace wstore
