#pragma once

// Independent test oracles. Each one deliberately takes a different route
// from the library code it checks, so shared bugs cannot cancel out.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <set>
#include <stdexcept>
#include <vector>

namespace oracles {

// Exact maximizer of sum t_i * log(1 + g_i * rho) subject to sum t_i = 1,
// 0 <= t_i <= cap_i, by the exchange argument: a linear objective saturates
// caps in strictly decreasing coefficient order. Sorts by the computed
// coefficient (natural log), not by raw gain, so it can disagree with a
// buggy gain-ordered implementation.
inline std::vector<double> lp_time_shares(const std::vector<double>& caps,
                                          const std::vector<double>& gains,
                                          double rho) {
  if (std::accumulate(caps.begin(), caps.end(), 0.0) < 1.0 - 1e-9)
    throw std::invalid_argument("lp_time_shares: infeasible, caps sum < 1");
  std::vector<int> order(caps.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::vector<double> coeff(caps.size());
  for (size_t i = 0; i < caps.size(); ++i)
    coeff[i] = std::log(1.0 + gains[i] * rho);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (coeff[a] != coeff[b]) return coeff[a] > coeff[b];
    return a < b;
  });
  std::vector<double> shares(caps.size(), 0.0);
  double left = 1.0;
  for (int i : order) {
    const double take = std::min(caps[i], left);
    shares[i] = take;
    left -= take;
    if (left <= 0.0) break;
  }
  return shares;
}

inline double objective_bits(const std::vector<double>& shares,
                             const std::vector<double>& gains, double rho) {
  double value = 0.0;
  for (size_t i = 0; i < shares.size(); ++i)
    value += shares[i] * std::log2(1.0 + rho * gains[i]);
  return value;
}

// Literal subset minimization for the order upper bound:
// min over decoded sets D of (K - |D| + |D| * [sizes in D cover the object]).
inline int exhaustive_order_upper(const std::vector<double>& sizes) {
  const int k = static_cast<int>(sizes.size());
  int best = k;  // empty set
  for (uint32_t mask = 1; mask < (1u << k); ++mask) {
    int members = 0;
    double covered = 0.0;
    for (int i = 0; i < k; ++i)
      if (mask & (1u << i)) {
        ++members;
        covered += sizes[i];
      }
    const bool storable = covered >= 1.0 - 1e-9;
    best = std::min(best, k - members + (storable ? members : 0));
  }
  return best;
}

// Literal subset minimization for the order lower bound, with an equalizing
// share vector per covering subset. Independent bisection solves the
// water-filling level.
inline double exhaustive_order_lower(const std::vector<double>& sizes) {
  const int k = static_cast<int>(sizes.size());
  auto max_share = [](const std::vector<double>& caps) {
    double lo = 0.0, hi = 1.0;
    for (int iter = 0; iter < 200; ++iter) {
      const double mid = 0.5 * (lo + hi);
      double total = 0.0;
      for (double c : caps) total += std::min(c, mid);
      (total < 1.0 ? lo : hi) = mid;
    }
    double largest = 0.0;
    for (double c : caps) largest = std::max(largest, std::min(c, hi));
    return largest;
  };
  double best = k;
  for (uint32_t mask = 1; mask < (1u << k); ++mask) {
    std::vector<double> caps;
    double covered = 0.0;
    for (int i = 0; i < k; ++i)
      if (mask & (1u << i)) {
        caps.push_back(sizes[i]);
        covered += sizes[i];
      }
    const int members = static_cast<int>(caps.size());
    if (covered < 1.0 - 1e-9)
      best = std::min(best, static_cast<double>(k - members));
    else
      best = std::min(best, k - members + 1.0 / max_share(caps));
  }
  return best;
}

// Success probability of one complete node assisted by one incomplete node
// of size a, in the linearized low-SNR domain: Pr[(1-a)X + a max(X,Y) > q]
// with X, Y iid unit exponentials. Conditioning on X = t <= q, success needs
// Y > (q - (1-a)t)/a; for t > q success is certain. The remaining 1-D
// integral is evaluated by Simpson's rule.
inline double assisted_success_integral(double a, double q) {
  if (a <= 0.0) return std::exp(-q);
  const int panels = 4000;  // even
  const double h = q / panels;
  auto integrand = [&](double t) {
    return std::exp(-t) * std::exp(-(q - (1.0 - a) * t) / a);
  };
  double sum = integrand(0.0) + integrand(q);
  for (int i = 1; i < panels; ++i)
    sum += integrand(i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return std::exp(-q) + sum * h / 3.0;
}

// Distinct sorted-descending K-tuples of multiples of `step` with sum <= t,
// counted by brute force over ordered tuples.
inline size_t multiset_count(int k, double t, double step) {
  const long long units = std::llround(t / step);
  std::set<std::vector<long long>> seen;
  std::vector<long long> tuple(k, 0);
  auto walk = [&](auto&& self, int depth, long long used) -> void {
    if (depth == k) {
      std::vector<long long> sorted = tuple;
      std::sort(sorted.begin(), sorted.end(), std::greater<long long>());
      seen.insert(sorted);
      return;
    }
    for (long long v = 0; v + used <= units; ++v) {
      tuple[depth] = v;
      self(self, depth + 1, used + v);
    }
  };
  walk(walk, 0, 0);
  return seen.size();
}

}  // namespace oracles
