#include "wstore/optimizer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "wstore/analytic.hpp"

namespace wstore {

namespace {

constexpr uint64_t kCandidateGuard = 1000000;
// Above this many bitmap bytes the optimizer drops per-trial bitmaps and
// resolves ties with unpaired errors instead.
constexpr uint64_t kBitmapBudgetBytes = 512ull << 20;

struct PairedDiff {
  double margin;  // p_a - p_b
  double se;      // std err of the paired difference
};

PairedDiff paired_diff(const std::vector<uint64_t>& a,
                       const std::vector<uint64_t>& b, uint64_t trials) {
  uint64_t n10 = 0, n01 = 0;
  for (size_t w = 0; w < a.size(); ++w) {
    n10 += std::popcount(a[w] & ~b[w]);
    n01 += std::popcount(~a[w] & b[w]);
  }
  const double n = static_cast<double>(trials);
  const double d = static_cast<double>(n10) - static_cast<double>(n01);
  const double var = (static_cast<double>(n10 + n01) - d * d / n) / (n * n);
  return PairedDiff{d / n, std::sqrt(std::max(0.0, var))};
}

double combined_se(const FailureEstimate& a, const FailureEstimate& b) {
  return std::sqrt(a.std_err * a.std_err + b.std_err * b.std_err);
}

int lex_compare(const std::vector<double>& a, const std::vector<double>& b) {
  for (size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    if (a[i] < b[i]) return -1;
    if (a[i] > b[i]) return 1;
  }
  return 0;
}

std::vector<double> capped_sizes(const std::vector<double>& sizes) {
  std::vector<double> capped = sizes;
  for (double& v : capped) v = std::min(v, 1.0);
  return capped;
}

// Preference among candidates whose estimates are statistically
// indistinguishable: larger order upper bound first. Storage beyond one
// object size never changes an outcome, so the remaining keys compare sizes
// capped at 1 (more concentrated wins), then prefer less spent budget, then
// the raw vector.
bool tie_prefer(const RankedCandidate& challenger,
                const RankedCandidate& incumbent) {
  if (challenger.order_upper != incumbent.order_upper)
    return challenger.order_upper > incumbent.order_upper;
  const int capped = lex_compare(capped_sizes(challenger.alloc.sizes),
                                 capped_sizes(incumbent.alloc.sizes));
  if (capped != 0) return capped > 0;
  const double sum_c = challenger.alloc.sum(), sum_i = incumbent.alloc.sum();
  if (std::abs(sum_c - sum_i) > 1e-12) return sum_c < sum_i;
  return lex_compare(challenger.alloc.sizes, incumbent.alloc.sizes) > 0;
}

}  // namespace

std::vector<AllocationVector> enumerate_allocations(int k, double t,
                                                    double step) {
  if (k < 1) throw std::invalid_argument("enumerate_allocations: need K >= 1");
  if (!(step > 0.0) || !(t > 0.0))
    throw std::invalid_argument("enumerate_allocations: need T > 0, step > 0");
  const long long units = std::llround(t / step);
  if (units < 1 || std::abs(units * step - t) > 1e-9)
    throw std::invalid_argument(
        "enumerate_allocations: step must divide T within 1e-9");

  std::vector<AllocationVector> out;
  std::vector<long long> stack(k, 0);
  // Depth-first over nonincreasing unit vectors; integer units keep the
  // budget test exact.
  auto recurse = [&](auto&& self, int depth, long long cap,
                     long long left) -> void {
    if (depth == k) {
      if (out.size() >= kCandidateGuard)
        throw std::length_error(
            "enumerate_allocations: candidate grid exceeds 1e6");
      AllocationVector alloc;
      alloc.budget = t;
      alloc.sizes.reserve(k);
      for (long long u : stack) alloc.sizes.push_back(u * step);
      out.push_back(std::move(alloc));
      return;
    }
    for (long long v = std::min(cap, left); v >= 0; --v) {
      stack[depth] = v;
      self(self, depth + 1, v, left - v);
    }
  };
  recurse(recurse, 0, units, units);
  return out;
}

OptimizeResult best_allocation(const SystemConfig& config, double step,
                               uint64_t trials) {
  const std::vector<AllocationVector> candidates =
      enumerate_allocations(config.k, config.t, step);
  const uint64_t words = (trials + 63) / 64;
  const bool paired =
      candidates.size() * words * 8 <= kBitmapBudgetBytes;

  std::vector<RankedCandidate> evaluated;
  evaluated.reserve(candidates.size());
  std::vector<std::vector<uint64_t>> bitmaps(paired ? candidates.size() : 0);
  for (size_t c = 0; c < candidates.size(); ++c) {
    uint64_t failures;
    if (paired) {
      count_failures_bitmap(config, candidates[c], trials, bitmaps[c]);
      failures = 0;
      for (uint64_t w : bitmaps[c]) failures += std::popcount(w);
    } else {
      failures = count_failures(config, candidates[c], 0, trials);
    }
    evaluated.push_back(RankedCandidate{candidates[c],
                                        summarize_counts(failures, trials),
                                        order_upper_bound(candidates[c])});
  }

  std::vector<size_t> order(evaluated.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (evaluated[a].estimate.p_hat != evaluated[b].estimate.p_hat)
      return evaluated[a].estimate.p_hat < evaluated[b].estimate.p_hat;
    return tie_prefer(evaluated[a], evaluated[b]);
  });

  // Candidates within one standard error of the empirical minimum are
  // statistical ties; pick among them with the deterministic preference.
  auto margin_se = [&](size_t c, size_t against) -> PairedDiff {
    if (paired) return paired_diff(bitmaps[c], bitmaps[against], trials);
    return PairedDiff{
        evaluated[c].estimate.p_hat - evaluated[against].estimate.p_hat,
        combined_se(evaluated[c].estimate, evaluated[against].estimate)};
  };
  size_t best = order[0];
  for (size_t pos = 1; pos < order.size(); ++pos) {
    const size_t c = order[pos];
    const PairedDiff diff = margin_se(c, order[0]);
    if (diff.margin <= diff.se + 1e-15 &&
        tie_prefer(evaluated[c], evaluated[best]))
      best = c;
  }

  OptimizeResult result;
  result.ranking.reserve(evaluated.size());
  result.ranking.push_back(evaluated[best]);
  size_t runner = order.size();  // index into `evaluated`
  for (size_t c : order) {
    if (c == best) continue;
    if (runner == order.size()) runner = c;
    result.ranking.push_back(evaluated[c]);
  }
  if (runner != order.size()) {
    const PairedDiff diff = margin_se(runner, best);
    result.runner_up_margin = diff.margin;
    result.runner_up_paired_se = diff.se;
  }
  return result;
}

}  // namespace wstore
