#include <cmath>
#include <fstream>
#include <limits>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "wstore/analytic.hpp"
#include "wstore/montecarlo.hpp"
#include "wstore/optimizer.hpp"

namespace {

using nlohmann::json;

// Values from a --config JSON file fill in flags the user did not pass
// explicitly; explicit flags always win.
class ConfigFile {
 public:
  void load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file " + path);
    in >> data_;
    if (!data_.is_object())
      throw std::invalid_argument("config file must hold a JSON object");
  }

  template <typename T>
  void apply(const CLI::App& cmd, const std::string& flag,
             const std::string& key, T& value) const {
    const CLI::Option* opt = cmd.get_option_no_throw(flag);
    if (opt != nullptr && opt->count() > 0) return;  // explicit flag wins
    if (data_.contains(key)) value = data_.at(key).get<T>();
  }

 private:
  json data_ = json::object();
};

std::vector<double> parse_range(const std::string& text, double default_step) {
  double start = 0, stop = 0, step = default_step;
  std::stringstream ss(text);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, ':')) parts.push_back(part);
  if (parts.size() < 2 || parts.size() > 3)
    throw std::invalid_argument("range must be start:stop[:step]");
  start = std::stod(parts[0]);
  stop = std::stod(parts[1]);
  if (parts.size() == 3) step = std::stod(parts[2]);
  if (!(step > 0.0) || stop < start - 1e-12)
    throw std::invalid_argument("range is empty: " + text);
  std::vector<double> grid;
  const long long n =
      static_cast<long long>(std::floor((stop - start) / step + 1e-9));
  for (long long i = 0; i <= n; ++i) grid.push_back(start + i * step);
  return grid;
}

// Strategy tokens arrive space-separated; simple names may also be packed
// with commas ("symmetric,minimal"). Custom JSON arrays contain commas and
// are kept whole.
std::vector<std::string> expand_strategy_tokens(
    const std::vector<std::string>& tokens) {
  std::vector<std::string> out;
  for (const std::string& token : tokens) {
    if (token.find('[') != std::string::npos) {
      out.push_back(token);
      continue;
    }
    std::stringstream ss(token);
    std::string piece;
    while (std::getline(ss, piece, ','))
      if (!piece.empty()) out.push_back(piece);
  }
  return out;
}

std::string label_for(const wstore::StrategyKind& kind, int custom_ordinal) {
  switch (kind.tag) {
    case wstore::StrategyTag::symmetric:
      return "symmetric";
    case wstore::StrategyTag::minimal:
      return "minimal";
    default:
      return custom_ordinal == 1 ? "custom"
                                 : "custom" + std::to_string(custom_ordinal);
  }
}

void write_output(const std::string& path, const std::string& payload) {
  if (path.empty()) {
    std::cout << payload;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open output file " + path);
  out << payload;
}

json estimate_to_json(const wstore::FailureEstimate& est) {
  return json{{"trials", est.trials},
              {"failures", est.failures},
              {"p_fail", est.p_hat},
              {"std_err", est.std_err},
              {"ci_low", est.ci_low},
              {"ci_high", est.ci_high},
              {"estimator",
               est.estimator == wstore::Estimator::plain ? "plain"
                                                         : "conditioned"}};
}

struct CommonFlags {
  int k = 0;
  double t = 0;
  double q = 1.0;
  uint64_t trials = 100000;
  uint64_t seed = 1;
  std::string format = "csv";
  std::string output;
  std::string config_path;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool with_format = true) {
  cmd->add_option("--k", flags.k, "number of storage nodes");
  cmd->add_option("--t", flags.t, "sum storage budget");
  cmd->add_option("--q", flags.q, "rate threshold in bits");
  cmd->add_option("--trials", flags.trials, "Monte Carlo trials per cell");
  cmd->add_option("--seed", flags.seed, "stream seed");
  if (with_format)
    cmd->add_option("--format", flags.format, "csv or json");
  cmd->add_option("--output", flags.output, "write to file instead of stdout");
  cmd->add_option("--config", flags.config_path,
                  "JSON file supplying any flag; explicit flags override");
}

void merge_common(const CLI::App& cmd, const ConfigFile& config,
                  CommonFlags& flags) {
  config.apply(cmd, "--k", "k", flags.k);
  config.apply(cmd, "--t", "t", flags.t);
  config.apply(cmd, "--q", "q", flags.q);
  config.apply(cmd, "--trials", "trials", flags.trials);
  config.apply(cmd, "--seed", "seed", flags.seed);
  config.apply(cmd, "--format", "format", flags.format);
  config.apply(cmd, "--output", "output", flags.output);
}

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

int run_simulate(const CLI::App& cmd, CommonFlags& flags, double& snr_db,
                 std::string& strategy_text) {
  ConfigFile config;
  if (!flags.config_path.empty()) config.load(flags.config_path);
  merge_common(cmd, config, flags);
  config.apply(cmd, "--snr-db", "snr-db", snr_db);
  config.apply(cmd, "--strategy", "strategy", strategy_text);
  require(flags.k > 0, "missing or invalid --k");
  require(flags.t > 0, "missing or invalid --t");
  require(std::isfinite(snr_db), "missing --snr-db");
  require(!strategy_text.empty(), "missing --strategy");

  const auto kind = wstore::parse_strategy(strategy_text);
  const auto alloc = wstore::realize(kind, flags.k, flags.t);
  const auto cfg = wstore::make_config(flags.k, flags.t, flags.q,
                                       wstore::db_to_linear(snr_db),
                                       flags.seed);
  const auto est = wstore::estimate_failure(cfg, alloc, flags.trials);

  std::ostringstream out;
  if (flags.format == "json") {
    json doc = estimate_to_json(est);
    doc["k"] = flags.k;
    doc["t"] = flags.t;
    doc["q"] = flags.q;
    doc["seed"] = flags.seed;
    doc["snr_db"] = snr_db;
    doc["strategy"] = label_for(kind, 1);
    doc["allocation"] = alloc.sizes;
    out << doc.dump(2) << "\n";
  } else if (flags.format == "csv") {
    out << "snr_db,strategy,trials,failures,p_fail,ci_low,ci_high\n"
        << std::setprecision(12) << snr_db << ',' << label_for(kind, 1) << ','
        << est.trials << ',' << est.failures << ',' << est.p_hat << ','
        << est.ci_low << ',' << est.ci_high << "\n";
  } else {
    throw std::invalid_argument("unknown --format " + flags.format);
  }
  write_output(flags.output, out.str());
  return 0;
}

int run_sweep(const CLI::App& cmd, CommonFlags& flags, std::string& range_text,
              std::vector<std::string>& strategy_tokens, bool& conditioned,
              uint64_t& trials_per_set) {
  ConfigFile config;
  if (!flags.config_path.empty()) config.load(flags.config_path);
  merge_common(cmd, config, flags);
  config.apply(cmd, "--snr-db-range", "snr-db-range", range_text);
  config.apply(cmd, "--strategies", "strategies", strategy_tokens);
  config.apply(cmd, "--conditioned", "conditioned", conditioned);
  config.apply(cmd, "--trials-per-set", "trials-per-set", trials_per_set);
  require(flags.k > 0, "missing or invalid --k");
  require(flags.t > 0, "missing or invalid --t");
  require(!range_text.empty(), "missing --snr-db-range");
  const auto names = expand_strategy_tokens(strategy_tokens);
  require(!names.empty(), "missing --strategies");

  const auto grid = parse_range(range_text, 1.0);
  std::vector<std::pair<std::string, wstore::AllocationVector>> strategies;
  int customs = 0;
  for (const std::string& name : names) {
    const auto kind = wstore::parse_strategy(name);
    if (kind.tag == wstore::StrategyTag::custom) ++customs;
    strategies.emplace_back(label_for(kind, customs),
                            wstore::realize(kind, flags.k, flags.t));
  }

  const auto base = wstore::make_config(flags.k, flags.t, flags.q, 1.0,
                                        flags.seed);
  const auto result = wstore::sweep(
      base, strategies, grid, flags.trials,
      conditioned ? wstore::Estimator::conditioned : wstore::Estimator::plain,
      trials_per_set);

  std::ostringstream out;
  if (flags.format == "json") {
    out << wstore::sweep_to_json(result, true) << "\n";
  } else if (flags.format == "csv") {
    wstore::write_sweep_csv(result, out, true);
  } else {
    throw std::invalid_argument("unknown --format " + flags.format);
  }
  write_output(flags.output, out.str());
  return 0;
}

int run_orders(const CLI::App& cmd, CommonFlags& flags, std::string& k_range,
               std::string& t_range) {
  ConfigFile config;
  if (!flags.config_path.empty()) config.load(flags.config_path);
  merge_common(cmd, config, flags);
  config.apply(cmd, "--k-range", "k-range", k_range);
  config.apply(cmd, "--t-range", "t-range", t_range);
  require(k_range.empty() != t_range.empty(),
          "give exactly one of --k-range or --t-range");

  struct Row {
    int k;
    double t;
  };
  std::vector<Row> rows;
  if (!k_range.empty()) {
    require(flags.t > 0, "missing or invalid --t");
    for (double kv : parse_range(k_range, 1.0))
      rows.push_back(Row{static_cast<int>(std::llround(kv)), flags.t});
  } else {
    require(flags.k > 0, "missing or invalid --k");
    for (double tv : parse_range(t_range, 1.0)) rows.push_back(Row{flags.k, tv});
  }

  std::ostringstream out;
  const bool as_json = flags.format == "json";
  json rows_json = json::array();
  if (!as_json) out << "k,t,d_star,slope_lower,slope_upper,status\n";
  for (const Row& row : rows) {
    if (row.t > 1.0) {
      const int d_star = wstore::optimal_order(row.k, row.t);
      const auto [lo, hi] = wstore::slope_bounds(row.k, row.t);
      if (as_json)
        rows_json.push_back({{"k", row.k},
                             {"t", row.t},
                             {"d_star", d_star},
                             {"slope_lower", lo},
                             {"slope_upper", hi},
                             {"status", "ok"}});
      else
        out << row.k << ',' << std::setprecision(12) << row.t << ',' << d_star
            << ',' << lo << ',' << hi << ",ok\n";
    } else {
      if (as_json)
        rows_json.push_back({{"k", row.k},
                             {"t", row.t},
                             {"d_star", nullptr},
                             {"slope_lower", nullptr},
                             {"slope_upper", nullptr},
                             {"status", "out-of-domain"}});
      else
        out << row.k << ',' << std::setprecision(12) << row.t
            << ",,,,out-of-domain\n";
    }
  }
  if (as_json) out << rows_json.dump(2) << "\n";
  write_output(flags.output, out.str());
  return 0;
}

int run_optimize(const CLI::App& cmd, CommonFlags& flags, double& snr_db,
                 double& step) {
  ConfigFile config;
  if (!flags.config_path.empty()) config.load(flags.config_path);
  merge_common(cmd, config, flags);
  config.apply(cmd, "--snr-db", "snr-db", snr_db);
  config.apply(cmd, "--step", "step", step);
  require(flags.k > 0, "missing or invalid --k");
  require(flags.t > 0, "missing or invalid --t");
  require(std::isfinite(snr_db), "missing --snr-db");
  require(step > 0, "missing or invalid --step");

  const auto cfg = wstore::make_config(flags.k, flags.t, flags.q,
                                       wstore::db_to_linear(snr_db),
                                       flags.seed);
  const auto result = wstore::best_allocation(cfg, step, flags.trials);

  json ranking = json::array();
  for (const auto& cand : result.ranking) {
    json entry = estimate_to_json(cand.estimate);
    entry["allocation"] = cand.alloc.sizes;
    entry["order_upper_bound"] = cand.order_upper;
    ranking.push_back(entry);
  }
  json doc{{"k", flags.k},
           {"t", flags.t},
           {"q", flags.q},
           {"snr_db", snr_db},
           {"seed", flags.seed},
           {"trials", flags.trials},
           {"step", step},
           {"best", ranking.empty() ? json() : ranking.front()},
           {"runner_up_margin", result.runner_up_margin},
           {"runner_up_paired_se", result.runner_up_paired_se},
           {"ranking", ranking}};
  write_output(flags.output, doc.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simulator and analytic toolkit for wireless distributed "
               "storage allocation under a sum storage budget"};
  app.require_subcommand(1);

  CommonFlags sim_flags, sweep_flags, orders_flags, opt_flags;
  double sim_snr_db = std::numeric_limits<double>::quiet_NaN();
  std::string sim_strategy;
  auto* sim = app.add_subcommand("simulate",
                                 "estimate failure probability at one SNR");
  add_common(sim, sim_flags);
  sim->add_option("--snr-db", sim_snr_db, "SNR in dB");
  sim->add_option("--strategy", sim_strategy,
                  "symmetric | minimal | custom=[json array]");

  std::string sweep_range;
  std::vector<std::string> sweep_strategies;
  bool sweep_conditioned = false;
  uint64_t sweep_trials_per_set = 20000;
  auto* swp = app.add_subcommand("sweep", "failure probability over an SNR grid");
  add_common(swp, sweep_flags);
  swp->add_option("--snr-db-range", sweep_range, "start:stop:step in dB");
  swp->add_option("--strategies", sweep_strategies,
                  "strategy list (space separated; simple names may be "
                  "comma-packed)");
  swp->add_flag("--conditioned", sweep_conditioned,
                "use the decoded-set-conditioned estimator");
  swp->add_option("--trials-per-set", sweep_trials_per_set,
                  "recovery draws per decoded-set composition");

  std::string orders_k_range, orders_t_range;
  auto* ord = app.add_subcommand("orders",
                                 "exponential-order table over K or T");
  add_common(ord, orders_flags);
  ord->add_option("--k-range", orders_k_range, "start:stop[:step] for K");
  ord->add_option("--t-range", orders_t_range, "start:stop:step for T");

  double opt_snr_db = std::numeric_limits<double>::quiet_NaN(), opt_step = 0.0;
  auto* opt = app.add_subcommand("optimize",
                                 "rank every grid allocation at one SNR");
  add_common(opt, opt_flags, /*with_format=*/false);
  opt->add_option("--snr-db", opt_snr_db, "SNR in dB");
  opt->add_option("--step", opt_step, "allocation grid step");

  try {
    app.parse(argc, argv);
    if (sim->parsed()) return run_simulate(*sim, sim_flags, sim_snr_db,
                                           sim_strategy);
    if (swp->parsed())
      return run_sweep(*swp, sweep_flags, sweep_range, sweep_strategies,
                       sweep_conditioned, sweep_trials_per_set);
    if (ord->parsed())
      return run_orders(*ord, orders_flags, orders_k_range, orders_t_range);
    if (opt->parsed()) return run_optimize(*opt, opt_flags, opt_snr_db,
                                           opt_step);
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::length_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
