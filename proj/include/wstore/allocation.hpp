#pragma once

#include <span>
#include <string>
#include <vector>

namespace wstore {

// A node counts as complete (can serve the whole object alone) when its size
// reaches 1 within this tolerance.
inline constexpr double kCompleteTol = 1e-12;

// Tolerance for the "decoded sizes cover the object" test. Sums like
// K * (T/K) accumulate a few ulps of error; anything within 1e-9 of 1 is
// treated as covering.
inline constexpr double kStorableTol = 1e-9;

// Per-node storage sizes under a sum budget. The sum may fall short of the
// budget: the low-SNR optimum deliberately leaves T - floor(T) unused.
struct AllocationVector {
  std::vector<double> sizes;
  double budget = 0.0;

  int node_count() const { return static_cast<int>(sizes.size()); }
  double sum() const;
};

AllocationVector make_symmetric(int k, double t);
AllocationVector make_minimal(int k, double t);

// Reports every violated invariant; never throws.
std::vector<std::string> validate(const AllocationVector& alloc, int k,
                                  double t);

inline bool is_complete(double size) { return size >= 1.0 - kCompleteTol; }

// Sorted-descending form; failure probability is label-invariant under
// i.i.d. channels, so this is the canonical representative.
std::vector<double> canonical_descending(std::vector<double> sizes);

enum class StrategyTag { symmetric, minimal, custom };

struct StrategyKind {
  StrategyTag tag = StrategyTag::symmetric;
  std::vector<double> custom_sizes;
};

// Accepts "symmetric", "minimal", or "custom=[...]" with a JSON array.
StrategyKind parse_strategy(const std::string& text);
AllocationVector realize(const StrategyKind& strategy, int k, double t);

// JSON array of numbers <-> sizes, for CLI input/output.
std::vector<double> sizes_from_json(const std::string& text);
std::string sizes_to_json(std::span<const double> sizes);

}  // namespace wstore
