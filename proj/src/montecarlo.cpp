#include "wstore/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "wstore/protocol.hpp"
#include "wstore/rng.hpp"

namespace wstore {

namespace {

constexpr double kZ95 = 1.959963984540054;

struct KernelParams {
  const double* caps;
  int k;
  double rho;
  double q;
  // Decode threshold inverted into uniform space: u >= 1 - e^{-x} with
  // x = (2^Q - 1)/rho. Draws inside a 1e-12 band fall back to the direct
  // rate expression so the kernel decides exactly like the reference path.
  double decode_u_lo;
  double decode_u_hi;
};

KernelParams make_params(const SystemConfig& config,
                         const AllocationVector& alloc) {
  if (alloc.node_count() != config.k)
    throw std::invalid_argument("count_failures: allocation length != K");
  const double x = (std::exp2(config.q) - 1.0) / config.rho;
  const double u_thr = -std::expm1(-x);
  return KernelParams{alloc.sizes.data(), config.k,     config.rho,
                      config.q,           u_thr - 1e-12, u_thr + 1e-12};
}

struct Scratch {
  std::vector<double> u;
  std::vector<double> gain;   // recovery gains of decoded nodes
  std::vector<int> member;    // decoded node indices
  std::vector<int> order;     // sort permutation of the decoded nodes
  explicit Scratch(int k) : u(2 * k) {
    gain.reserve(k);
    member.reserve(k);
    order.reserve(k);
  }
};

bool trial_fails(const KernelParams& p, uint64_t seed, uint64_t trial,
                 Scratch& s) {
  sample_uniforms_into(seed, trial, s.u);

  s.member.clear();
  s.gain.clear();
  double covered = 0.0;
  for (int i = 0; i < p.k; ++i) {
    const double u = s.u[i];
    bool decoded;
    if (u >= p.decode_u_hi) {
      decoded = true;
    } else if (u <= p.decode_u_lo) {
      decoded = false;
    } else {
      decoded = std::log2(1.0 + p.rho * (-std::log1p(-u))) >= p.q;
    }
    if (decoded) {
      s.member.push_back(i);
      covered += p.caps[i];
    }
  }
  if (covered < 1.0 - kStorableTol) return true;  // not storable

  const int m = static_cast<int>(s.member.size());
  s.gain.resize(m);
  for (int j = 0; j < m; ++j)
    s.gain[j] = -std::log1p(-s.u[p.k + s.member[j]]);

  // Descending recovery gain, ties by ascending node index; then the greedy
  // fill. Zero shares contribute exactly +0.0 rate, so the walk can stop
  // once the object is covered.
  s.order.resize(m);
  for (int j = 0; j < m; ++j) s.order[j] = j;
  std::sort(s.order.begin(), s.order.end(), [&](int a, int b) {
    if (s.gain[a] != s.gain[b]) return s.gain[a] > s.gain[b];
    return s.member[a] < s.member[b];
  });

  double running = 0.0;
  double rate = 0.0;
  for (int slot : s.order) {
    const double remaining = 1.0 - running;
    if (remaining <= 0.0) break;
    const double share = std::min(p.caps[s.member[slot]], remaining);
    rate += share * std::log2(1.0 + p.rho * s.gain[slot]);
    running += p.caps[s.member[slot]];
  }
  return !(rate > p.q);
}

}  // namespace

FailureEstimate summarize_counts(uint64_t failures, uint64_t trials) {
  if (trials == 0)
    throw std::invalid_argument("summarize_counts: need trials >= 1");
  FailureEstimate est;
  est.trials = trials;
  est.failures = failures;
  est.p_hat = static_cast<double>(failures) / trials;
  est.std_err = std::sqrt(est.p_hat * (1.0 - est.p_hat) / trials);
  if (failures == 0) {
    // Rule of three keeps log plots drawable for zero-failure cells.
    est.ci_low = 0.0;
    est.ci_high = std::min(1.0, 3.0 / trials);
  } else if (failures == trials) {
    est.ci_low = std::max(0.0, 1.0 - 3.0 / trials);
    est.ci_high = 1.0;
  } else {
    est.ci_low = std::max(0.0, est.p_hat - kZ95 * est.std_err);
    est.ci_high = std::min(1.0, est.p_hat + kZ95 * est.std_err);
  }
  return est;
}

uint64_t count_failures(const SystemConfig& config,
                        const AllocationVector& alloc, uint64_t first_trial,
                        uint64_t trials) {
  const KernelParams params = make_params(config, alloc);
  uint64_t failures = 0;
#pragma omp parallel
  {
    Scratch scratch(config.k);
    uint64_t local = 0;
#pragma omp for schedule(static) nowait
    for (long long i = 0; i < static_cast<long long>(trials); ++i) {
      if (trial_fails(params, config.seed, first_trial + i, scratch)) ++local;
    }
#pragma omp atomic
    failures += local;
  }
  return failures;
}

uint64_t count_failures_serial(const SystemConfig& config,
                               const AllocationVector& alloc,
                               uint64_t first_trial, uint64_t trials) {
  uint64_t failures = 0;
  for (uint64_t i = 0; i < trials; ++i)
    if (!run_trial(config, alloc, first_trial + i).recovered) ++failures;
  return failures;
}

void count_failures_bitmap(const SystemConfig& config,
                           const AllocationVector& alloc, uint64_t trials,
                           std::vector<uint64_t>& failure_bits) {
  const KernelParams params = make_params(config, alloc);
  const uint64_t words = (trials + 63) / 64;
  failure_bits.assign(words, 0);
#pragma omp parallel
  {
    Scratch scratch(config.k);
#pragma omp for schedule(static)
    for (long long w = 0; w < static_cast<long long>(words); ++w) {
      uint64_t bits = 0;
      const uint64_t base = static_cast<uint64_t>(w) * 64;
      const uint64_t end = std::min<uint64_t>(base + 64, trials);
      for (uint64_t trial = base; trial < end; ++trial) {
        if (trial_fails(params, config.seed, trial, scratch))
          bits |= 1ull << (trial - base);
      }
      failure_bits[w] = bits;
    }
  }
}

FailureEstimate estimate_failure(const SystemConfig& config,
                                 const AllocationVector& alloc,
                                 uint64_t trials) {
  return summarize_counts(count_failures(config, alloc, 0, trials), trials);
}

FailureEstimate estimate_failure_serial(const SystemConfig& config,
                                        const AllocationVector& alloc,
                                        uint64_t trials) {
  return summarize_counts(count_failures_serial(config, alloc, 0, trials),
                          trials);
}

FailureEstimate conditioned_estimate(const SystemConfig& config,
                                     const AllocationVector& alloc,
                                     uint64_t trials_per_set) {
  const ConditionedEstimate cond = conditioned_failure_probability(
      alloc, config.q, config.rho, trials_per_set, config.seed);
  FailureEstimate est;
  est.trials = cond.mc_trials;
  est.failures = cond.mc_failures;
  est.p_hat = cond.p_fail;
  est.std_err = cond.std_err;
  est.ci_low = std::max(0.0, cond.p_fail - kZ95 * cond.std_err);
  est.ci_high = std::min(1.0, cond.p_fail + kZ95 * cond.std_err);
  est.estimator = Estimator::conditioned;
  return est;
}

SweepResult sweep(const SystemConfig& base,
                  const std::vector<std::pair<std::string, AllocationVector>>&
                      strategies,
                  const std::vector<double>& snr_db_grid, uint64_t trials,
                  Estimator estimator, uint64_t trials_per_set) {
  if (strategies.empty())
    throw std::invalid_argument("sweep: need at least one strategy");
  if (snr_db_grid.empty())
    throw std::invalid_argument("sweep: need a nonempty SNR grid");
  for (size_t i = 1; i < snr_db_grid.size(); ++i)
    if (!(snr_db_grid[i] > snr_db_grid[i - 1]))
      throw std::invalid_argument("sweep: SNR grid must be strictly increasing");

  SweepResult result;
  result.k = base.k;
  result.t = base.t;
  result.q = base.q;
  result.seed = base.seed;
  result.trials = trials;
  result.estimator = estimator;
  result.trials_per_set = trials_per_set;
  result.snr_db = snr_db_grid;
  for (const auto& [name, alloc] : strategies)
    result.strategies.push_back(SweepStrategy{name, alloc, {}});

  for (auto& strategy : result.strategies) {
    strategy.estimates.reserve(snr_db_grid.size());
    for (double db : snr_db_grid) {
      SystemConfig cell = base;
      cell.rho = db_to_linear(db);
      strategy.estimates.push_back(
          estimator == Estimator::plain
              ? estimate_failure(cell, strategy.alloc, trials)
              : conditioned_estimate(cell, strategy.alloc, trials_per_set));
    }
  }
  return result;
}

namespace {

const SweepStrategy& find_strategy(const SweepResult& result,
                                   const std::string& name) {
  for (const auto& s : result.strategies)
    if (s.name == name) return s;
  throw std::invalid_argument("sweep has no strategy named '" + name + "'");
}

}  // namespace

double empirical_order(const SweepResult& result, const std::string& strategy,
                       double window_lo_db, double window_hi_db,
                       uint64_t fallback_trials_per_set) {
  const SweepStrategy& s = find_strategy(result, strategy);
  std::vector<double> xs, ys;
  for (size_t i = 0; i < result.snr_db.size(); ++i) {
    const double db = result.snr_db[i];
    if (db < window_lo_db || db > window_hi_db) continue;
    const FailureEstimate& est = s.estimates[i];
    double p = est.p_hat;
    if (est.estimator == Estimator::plain && est.failures == 0) {
      // Plain estimate underflowed; switch to the conditioned estimator for
      // this point.
      p = conditioned_failure_probability(
              s.alloc, result.q, db_to_linear(db), fallback_trials_per_set,
              rng::derive_seed(result.seed, 0xFA11BACCull + i))
              .p_fail;
    }
    if (!(p > 0.0)) continue;
    xs.push_back(db / 10.0);  // log10(rho)
    ys.push_back(-std::log10(p));
  }
  if (xs.size() < 3)
    throw std::runtime_error(
        "empirical_order: fewer than 3 usable grid points in window");
  double mx = 0, my = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= xs.size();
  my /= ys.size();
  double sxy = 0, sxx = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

std::optional<double> find_crossing(const SweepResult& result,
                                    const std::string& strategy_a,
                                    const std::string& strategy_b) {
  const SweepStrategy& a = find_strategy(result, strategy_a);
  const SweepStrategy& b = find_strategy(result, strategy_b);
  int prev = -1;
  int prev_sign = 0;
  for (size_t i = 0; i < result.snr_db.size(); ++i) {
    const double diff = a.estimates[i].p_hat - b.estimates[i].p_hat;
    const int sign = diff > 0.0 ? 1 : diff < 0.0 ? -1 : 0;
    if (sign == 0) continue;  // exact ties are not sign changes
    if (prev_sign != 0 && sign != prev_sign) {
      const double db0 = result.snr_db[prev];
      const double db1 = result.snr_db[i];
      const double pa0 = a.estimates[prev].p_hat, pb0 = b.estimates[prev].p_hat;
      const double pa1 = a.estimates[i].p_hat, pb1 = b.estimates[i].p_hat;
      double frac;
      if (pa0 > 0 && pb0 > 0 && pa1 > 0 && pb1 > 0) {
        const double g0 = std::log10(pa0) - std::log10(pb0);
        const double g1 = std::log10(pa1) - std::log10(pb1);
        frac = g0 / (g0 - g1);
      } else {
        const double d0 = pa0 - pb0, d1 = pa1 - pb1;
        frac = d0 / (d0 - d1);
      }
      return db0 + frac * (db1 - db0);
    }
    prev_sign = sign;
    prev = static_cast<int>(i);
  }
  return std::nullopt;
}

namespace {

bool integer_budget(double t) { return std::abs(t - std::round(t)) < 1e-12; }

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

}  // namespace

void write_sweep_csv(const SweepResult& result, std::ostream& out,
                     bool analytic_overlays) {
  out << "snr_db,strategy,trials,failures,p_fail,ci_low,ci_high";
  if (analytic_overlays) out << ",high_snr_approx,minimal_exact";
  out << "\n";
  for (size_t i = 0; i < result.snr_db.size(); ++i) {
    const double db = result.snr_db[i];
    const double rho = db_to_linear(db);
    std::string approx, exact;
    if (analytic_overlays) {
      if (result.t > 1.0)
        approx = format_double(
            high_snr_failure_approx(result.k, result.t, result.q, rho).value);
      if (integer_budget(result.t) && result.t >= 1.0)
        exact = format_double(minimal_exact_failure(
            static_cast<int>(std::llround(result.t)), result.q, rho));
    }
    for (const auto& strategy : result.strategies) {
      const FailureEstimate& est = strategy.estimates[i];
      out << format_double(db) << ',' << strategy.name << ',' << est.trials
          << ',' << est.failures << ',' << format_double(est.p_hat) << ','
          << format_double(est.ci_low) << ',' << format_double(est.ci_high);
      if (analytic_overlays) out << ',' << approx << ',' << exact;
      out << "\n";
    }
  }
}

std::string sweep_to_json(const SweepResult& result, bool analytic_overlays) {
  nlohmann::json meta{
      {"k", result.k},
      {"t", result.t},
      {"q", result.q},
      {"seed", result.seed},
      {"trials", result.trials},
      {"estimator",
       result.estimator == Estimator::plain ? "plain" : "conditioned"},
  };
  if (result.estimator == Estimator::conditioned)
    meta["trials_per_set"] = result.trials_per_set;

  nlohmann::json strategies = nlohmann::json::array();
  for (const auto& strategy : result.strategies) {
    nlohmann::json estimates = nlohmann::json::array();
    for (size_t i = 0; i < result.snr_db.size(); ++i) {
      const FailureEstimate& est = strategy.estimates[i];
      estimates.push_back({{"snr_db", result.snr_db[i]},
                           {"trials", est.trials},
                           {"failures", est.failures},
                           {"p_fail", est.p_hat},
                           {"std_err", est.std_err},
                           {"ci_low", est.ci_low},
                           {"ci_high", est.ci_high}});
    }
    strategies.push_back({{"name", strategy.name},
                          {"allocation", strategy.alloc.sizes},
                          {"estimates", estimates}});
  }

  nlohmann::json doc{{"meta", meta},
                     {"snr_db", result.snr_db},
                     {"strategies", strategies}};
  if (analytic_overlays) {
    nlohmann::json approx = nlohmann::json::array();
    nlohmann::json exact = nlohmann::json::array();
    for (double db : result.snr_db) {
      const double rho = db_to_linear(db);
      if (result.t > 1.0)
        approx.push_back(
            high_snr_failure_approx(result.k, result.t, result.q, rho).value);
      else
        approx.push_back(nullptr);
      if (integer_budget(result.t) && result.t >= 1.0)
        exact.push_back(minimal_exact_failure(
            static_cast<int>(std::llround(result.t)), result.q, rho));
      else
        exact.push_back(nullptr);
    }
    doc["overlays"] = {{"high_snr_approx", approx}, {"minimal_exact", exact}};
  }
  return doc.dump(2);
}

}  // namespace wstore
