#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace wstore {

// One realization of the fading links: squared channel magnitudes for the
// source->node links (storage phase) and node->collector links (recovery
// phase). All 2K gains are i.i.d. unit-mean exponential and change
// independently between the two phases.
struct ChannelDraw {
  std::vector<double> storage_gains;
  std::vector<double> recovery_gains;
};

// Uniform words backing a draw: indices [0, K) map to storage gains and
// [K, 2K) to recovery gains, via gain = -ln(1 - u). The Monte Carlo kernel
// relies on this exact layout.
void sample_uniforms_into(uint64_t stream_seed, uint64_t trial_index,
                          std::span<double> out);

ChannelDraw sample_draw(uint64_t stream_seed, uint64_t trial_index,
                        int node_count);

void sample_draw_into(uint64_t stream_seed, uint64_t trial_index,
                      std::span<double> storage_gains,
                      std::span<double> recovery_gains);

}  // namespace wstore
