#include "wstore/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "wstore/rng.hpp"

namespace wstore {

void sample_uniforms_into(uint64_t stream_seed, uint64_t trial_index,
                          std::span<double> out) {
  rng::Stream(stream_seed, trial_index, rng::kDomainChannel).fill_uniform(out);
}

void sample_draw_into(uint64_t stream_seed, uint64_t trial_index,
                      std::span<double> storage_gains,
                      std::span<double> recovery_gains) {
  const size_t k = storage_gains.size();
  if (k == 0 || recovery_gains.size() != k)
    throw std::invalid_argument("sample_draw: need K >= 1 matching spans");
  rng::Stream stream(stream_seed, trial_index, rng::kDomainChannel);
  // One contiguous fill keeps the word layout identical whether a caller
  // asks for gains or raw uniforms.
  std::vector<double> u(2 * k);
  stream.fill_uniform(u);
  for (size_t i = 0; i < k; ++i) storage_gains[i] = -std::log1p(-u[i]);
  for (size_t i = 0; i < k; ++i) recovery_gains[i] = -std::log1p(-u[k + i]);
}

ChannelDraw sample_draw(uint64_t stream_seed, uint64_t trial_index,
                        int node_count) {
  if (node_count < 1)
    throw std::invalid_argument("sample_draw: need K >= 1");
  ChannelDraw draw;
  draw.storage_gains.resize(node_count);
  draw.recovery_gains.resize(node_count);
  sample_draw_into(stream_seed, trial_index, draw.storage_gains,
                   draw.recovery_gains);
  return draw;
}

}  // namespace wstore
