// Compares the OpenMP trial kernel against the straight-line serial
// reference on identical workloads. The two must agree on the exact failure
// count; the table reports throughput and speedup.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "wstore/montecarlo.hpp"

namespace {

template <typename F>
double timed(F&& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(stop - start).count();
}

}  // namespace

int main(int argc, char** argv) {
  uint64_t trials = 1000000;
  int k = 6;
  double t = 2.0, q = 1.0, snr_db = 4.0;
  uint64_t seed = 1;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    const char* value = argv[i + 1];
    if (flag == "--trials") trials = std::strtoull(value, nullptr, 10);
    else if (flag == "--k") k = std::atoi(value);
    else if (flag == "--t") t = std::atof(value);
    else if (flag == "--q") q = std::atof(value);
    else if (flag == "--snr-db") snr_db = std::atof(value);
    else if (flag == "--seed") seed = std::strtoull(value, nullptr, 10);
    else { std::fprintf(stderr, "unknown flag %s\n", flag.c_str()); return 2; }
  }

  const auto config =
      wstore::make_config(k, t, q, wstore::db_to_linear(snr_db), seed);
  const wstore::AllocationVector allocs[] = {wstore::make_symmetric(k, t),
                                             wstore::make_minimal(k, t)};
  const char* names[] = {"symmetric", "minimal"};

  std::printf("trials=%llu k=%d t=%g q=%g snr=%g dB seed=%llu\n",
              static_cast<unsigned long long>(trials), k, t, q, snr_db,
              static_cast<unsigned long long>(seed));
  std::printf("%-10s %-8s %8s %12s %14s %9s %12s\n", "alloc", "engine",
              "threads", "seconds", "trials/sec", "speedup", "failures");

  int rc = 0;
  for (int a = 0; a < 2; ++a) {
    const wstore::AllocationVector& alloc = allocs[a];
    uint64_t serial_failures = 0;
    const double serial_s = timed([&] {
      serial_failures =
          wstore::count_failures_serial(config, alloc, 0, trials);
    });
    std::printf("%-10s %-8s %8d %12.3f %14.0f %9.2f %12llu\n", names[a],
                "serial", 1, serial_s, trials / serial_s, 1.0,
                static_cast<unsigned long long>(serial_failures));

#ifdef _OPENMP
    const int max_threads = omp_get_max_threads();
    for (int threads = 1; threads <= max_threads; threads *= 2) {
      omp_set_num_threads(threads);
#else
    {
      const int threads = 1;
#endif
      uint64_t kernel_failures = 0;
      const double kernel_s = timed([&] {
        kernel_failures = wstore::count_failures(config, alloc, 0, trials);
      });
      std::printf("%-10s %-8s %8d %12.3f %14.0f %9.2f %12llu\n", names[a],
                  "kernel", threads, kernel_s, trials / kernel_s,
                  serial_s / kernel_s,
                  static_cast<unsigned long long>(kernel_failures));
      if (kernel_failures != serial_failures) {
        std::fprintf(stderr,
                     "MISMATCH: kernel %llu vs serial %llu failures\n",
                     static_cast<unsigned long long>(kernel_failures),
                     static_cast<unsigned long long>(serial_failures));
        rc = 1;
      }
    }
  }
  return rc;
}
