#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace wstore {

// Fixed parameters of one experiment. SNR is stored linear; the CLI converts
// from dB exactly once at the boundary.
struct SystemConfig {
  int k = 1;           // number of storage nodes
  double t = 1.0;      // sum storage budget, in units of the data object
  double q = 1.0;      // accumulated-rate threshold, bits per channel use
  double rho = 1.0;    // average SNR, linear
  uint64_t seed = 1;   // stream seed for all channel draws
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double rho) { return 10.0 * std::log10(rho); }

inline SystemConfig make_config(int k, double t, double q, double rho,
                                uint64_t seed) {
  if (k < 1) throw std::invalid_argument("config: need at least one node");
  if (!(t > 0.0)) throw std::invalid_argument("config: budget must be > 0");
  if (!(q > 0.0)) throw std::invalid_argument("config: threshold must be > 0");
  if (!(rho > 0.0)) throw std::invalid_argument("config: SNR must be > 0");
  return SystemConfig{k, t, q, rho, seed};
}

}  // namespace wstore
