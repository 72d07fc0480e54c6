#include "wstore/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace wstore {

double AllocationVector::sum() const {
  double s = 0.0;
  for (double v : sizes) s += v;
  return s;
}

AllocationVector make_symmetric(int k, double t) {
  if (k < 1) throw std::invalid_argument("make_symmetric: need K >= 1");
  if (!(t > 0.0)) throw std::invalid_argument("make_symmetric: need T > 0");
  AllocationVector alloc;
  alloc.budget = t;
  alloc.sizes.assign(k, t / k);
  // Pin the sum to exactly T; K * (T/K) can drift by an ulp.
  alloc.sizes.back() = t - (k - 1) * (t / k);
  return alloc;
}

AllocationVector make_minimal(int k, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("make_minimal: need T > 0");
  const double whole = std::floor(t);
  const double frac = t - whole;
  const bool integer_budget = frac < kCompleteTol;
  const int needed = static_cast<int>(whole) + (integer_budget ? 0 : 1);
  if (k < needed)
    throw std::invalid_argument("make_minimal: need K >= ceil(T) nodes");
  AllocationVector alloc;
  alloc.budget = t;
  alloc.sizes.assign(k, 0.0);
  for (int i = 0; i < static_cast<int>(whole); ++i) alloc.sizes[i] = 1.0;
  if (!integer_budget) alloc.sizes[static_cast<int>(whole)] = frac;
  return alloc;
}

std::vector<std::string> validate(const AllocationVector& alloc, int k,
                                  double t) {
  std::vector<std::string> violations;
  if (alloc.node_count() != k)
    violations.push_back("wrong length: " +
                         std::to_string(alloc.node_count()) + " sizes for K=" +
                         std::to_string(k));
  for (size_t i = 0; i < alloc.sizes.size(); ++i) {
    if (alloc.sizes[i] < 0.0)
      violations.push_back("negative entry at index " + std::to_string(i));
    if (alloc.sizes[i] > t + 1e-12)
      violations.push_back("entry at index " + std::to_string(i) +
                           " exceeds budget");
  }
  if (alloc.sum() > t + 1e-12) violations.push_back("sum exceeds budget");
  return violations;
}

std::vector<double> canonical_descending(std::vector<double> sizes) {
  std::sort(sizes.begin(), sizes.end(), std::greater<double>());
  return sizes;
}

StrategyKind parse_strategy(const std::string& text) {
  if (text == "symmetric") return {StrategyTag::symmetric, {}};
  if (text == "minimal") return {StrategyTag::minimal, {}};
  if (text.rfind("custom=", 0) == 0)
    return {StrategyTag::custom, sizes_from_json(text.substr(7))};
  throw std::invalid_argument("unknown strategy '" + text +
                              "' (expected symmetric, minimal, or custom=[...])");
}

AllocationVector realize(const StrategyKind& strategy, int k, double t) {
  switch (strategy.tag) {
    case StrategyTag::symmetric:
      return make_symmetric(k, t);
    case StrategyTag::minimal:
      return make_minimal(k, t);
    case StrategyTag::custom: {
      AllocationVector alloc{strategy.custom_sizes, t};
      auto violations = validate(alloc, k, t);
      if (!violations.empty())
        throw std::invalid_argument("custom allocation: " + violations.front());
      return alloc;
    }
  }
  throw std::invalid_argument("unreachable strategy tag");
}

std::vector<double> sizes_from_json(const std::string& text) {
  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("allocation JSON: ") + e.what());
  }
  if (!parsed.is_array())
    throw std::invalid_argument("allocation JSON must be an array of numbers");
  std::vector<double> sizes;
  for (const auto& v : parsed) {
    if (!v.is_number())
      throw std::invalid_argument("allocation JSON must be an array of numbers");
    sizes.push_back(v.get<double>());
  }
  return sizes;
}

std::string sizes_to_json(std::span<const double> sizes) {
  nlohmann::json arr = nlohmann::json::array();
  for (double v : sizes) arr.push_back(v);
  return arr.dump();
}

}  // namespace wstore
