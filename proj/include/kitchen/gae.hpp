#pragma once

#include <cstdint>
#include <vector>

#include "kitchen/layout.hpp"

namespace kitchen {

struct GaeOut {
  std::vector<double> advantages;  // T * N
  std::vector<double> targets;     // advantages + values
};

// Standard recursive generalized advantage estimation over N parallel
// streams laid out [t * N + i]. `dones[t]` masks the bootstrap past the end
// of an episode; `bootstrap` holds V(s_{T}) per stream.
inline GaeOut compute_gae(const std::vector<double>& rewards,
                          const std::vector<double>& values,
                          const std::vector<std::uint8_t>& dones,
                          const std::vector<double>& bootstrap, int T, int N,
                          double gamma, double lambda) {
  const std::size_t total = static_cast<std::size_t>(T) * N;
  if (rewards.size() != total || values.size() != total || dones.size() != total ||
      bootstrap.size() != static_cast<std::size_t>(N))
    throw Error("compute_gae: input length mismatch");

  GaeOut out;
  out.advantages.assign(total, 0.0);
  out.targets.assign(total, 0.0);

  for (int i = 0; i < N; ++i) {
    double gae = 0.0;
    for (int t = T - 1; t >= 0; --t) {
      const std::size_t idx = static_cast<std::size_t>(t) * N + i;
      const double not_done = dones[idx] ? 0.0 : 1.0;
      const double next_value =
          (t == T - 1) ? bootstrap[i] : values[static_cast<std::size_t>(t + 1) * N + i];
      const double delta =
          rewards[idx] + gamma * next_value * not_done - values[idx];
      gae = delta + gamma * lambda * not_done * gae;
      out.advantages[idx] = gae;
      out.targets[idx] = gae + values[idx];
    }
  }
  return out;
}

}  // namespace kitchen
