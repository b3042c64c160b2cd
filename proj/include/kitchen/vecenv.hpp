#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "kitchen/observation.hpp"
#include "kitchen/rng.hpp"
#include "kitchen/step.hpp"

namespace kitchen {

// Batch of independent environments on one layout. Env i draws from its own
// counter-based stream keyed derive_seed(master, i), so results never depend
// on evaluation order. Episodes auto-reset when they hit the horizon.
class BatchEnv {
 public:
  BatchEnv(std::shared_ptr<const Layout> layout, int n_envs, int horizon,
           std::uint64_t master_seed,
           RewardConfig reward = RewardConfig::dense())
      : layout_(std::move(layout)),
        horizon_(horizon),
        reward_(reward),
        master_seed_(master_seed) {
    states_.reserve(n_envs);
    streams_.reserve(n_envs);
    for (int i = 0; i < n_envs; ++i) {
      states_.push_back(reset(layout_));
      streams_.emplace_back(derive_seed(master_seed, static_cast<std::uint64_t>(i)));
    }
  }

  int n_envs() const { return static_cast<int>(states_.size()); }
  int horizon() const { return horizon_; }
  const Layout& layout() const { return *layout_; }
  std::shared_ptr<const Layout> layout_ptr() const { return layout_; }
  const RewardConfig& reward_config() const { return reward_; }
  const EnvState& state(int i) const { return states_[i]; }
  Rng& stream(int i) { return streams_[i]; }

  struct StepOut {
    std::vector<double> rewards;  // team reward per env
    std::vector<std::array<double, 2>> shaped;  // per-agent shaped part
    std::vector<std::uint8_t> dones;
    std::vector<int> soups;
  };

  // Steps every env with its action pair; identical to looping the scalar
  // step per env plus reset-at-horizon.
  StepOut batch_step(std::span<const std::array<Action, 2>> actions,
                     double shaping_scale) {
    if (static_cast<int>(actions.size()) != n_envs())
      throw Error("batch_step: action array shape mismatch");
    StepOut out;
    out.rewards.resize(states_.size());
    out.shaped.resize(states_.size());
    out.dones.resize(states_.size());
    out.soups.resize(states_.size());
    for (std::size_t i = 0; i < states_.size(); ++i) {
      const StepResult r = step_in_place(states_[i], actions[i], shaping_scale, reward_);
      out.rewards[i] = r.team_reward;
      out.shaped[i] = r.shaped;
      out.soups[i] = r.soups_delivered;
      if (states_[i].t >= horizon_) {
        out.dones[i] = 1;
        states_[i] = reset(layout_);
      }
    }
    return out;
  }

 private:
  std::shared_ptr<const Layout> layout_;
  int horizon_;
  RewardConfig reward_;
  std::uint64_t master_seed_;
  std::vector<EnvState> states_;
  std::vector<Rng> streams_;
};

// On-policy trajectory storage, [t][env][agent] order for per-agent data and
// [t][env] for shared rewards/dones.
struct Trajectory {
  int T = 0;
  int n_envs = 0;
  int obs_dim = 0;

  std::vector<float> obs;             // T * n_envs * 2 * obs_dim
  std::vector<std::uint8_t> actions;  // T * n_envs * 2
  std::vector<float> log_probs;       // T * n_envs * 2
  std::vector<float> values;          // T * n_envs * 2
  std::vector<float> rewards;         // T * n_envs (team)
  std::vector<float> agent_rewards;   // T * n_envs * 2 (learner feed)
  std::vector<std::uint8_t> dones;    // T * n_envs
  std::vector<float> last_values;     // n_envs * 2 (bootstrap)

  int total_soups = 0;
  double total_reward = 0.0;

  int samples() const { return T * n_envs * 2; }
  std::size_t obs_offset(int t, int env, int agent) const {
    return ((static_cast<std::size_t>(t) * n_envs + env) * 2 + agent) * obs_dim;
  }
  std::size_t flat(int t, int env, int agent) const {
    return (static_cast<std::size_t>(t) * n_envs + env) * 2 + agent;
  }
};

// Policy hook used by rollout: fills per-row logits (6 wide) and values for
// a block of observations laid out row-major (rows x obs_dim).
using PolicyFn = std::function<void(const float* obs, int rows, int obs_dim,
                                    float* logits, float* values)>;

namespace detail {

inline int sample_from_logits(const float* logits, Rng& rng) {
  // Softmax sample via inverse CDF on the normalized probabilities.
  float max_logit = logits[0];
  for (int a = 1; a < kNumActions; ++a) max_logit = std::max(max_logit, logits[a]);
  double z = 0.0;
  double probs[kNumActions];
  for (int a = 0; a < kNumActions; ++a) {
    probs[a] = std::exp(static_cast<double>(logits[a]) - max_logit);
    z += probs[a];
  }
  const double u = rng.uniform01() * z;
  double acc = 0.0;
  for (int a = 0; a < kNumActions; ++a) {
    acc += probs[a];
    if (u < acc) return a;
  }
  return kNumActions - 1;
}

inline float log_prob_of(const float* logits, int action) {
  float max_logit = logits[0];
  for (int a = 1; a < kNumActions; ++a) max_logit = std::max(max_logit, logits[a]);
  double z = 0.0;
  for (int a = 0; a < kNumActions; ++a)
    z += std::exp(static_cast<double>(logits[a]) - max_logit);
  return static_cast<float>(logits[action] - max_logit - std::log(z));
}

}  // namespace detail

// Collects T steps from every env. Actions are sampled from the policy with
// each env's own stream (two draws per env step, agent 0 first). With
// per_agent_shaping the learner feed credits each agent its own shaped
// events on top of the shared delivery reward; the team reward is logged
// either way.
inline Trajectory rollout(BatchEnv& env, const PolicyFn& policy, int T,
                          const ObsSpec& spec, double shaping_scale,
                          bool per_agent_shaping = false) {
  Trajectory traj;
  traj.T = T;
  traj.n_envs = env.n_envs();
  traj.obs_dim = spec.size();
  const int rows = traj.n_envs * 2;

  traj.obs.resize(static_cast<std::size_t>(T) * rows * traj.obs_dim);
  traj.actions.resize(static_cast<std::size_t>(T) * rows);
  traj.log_probs.resize(static_cast<std::size_t>(T) * rows);
  traj.values.resize(static_cast<std::size_t>(T) * rows);
  traj.rewards.resize(static_cast<std::size_t>(T) * traj.n_envs);
  traj.agent_rewards.resize(static_cast<std::size_t>(T) * rows);
  traj.dones.resize(static_cast<std::size_t>(T) * traj.n_envs);
  traj.last_values.resize(rows);

  std::vector<float> step_obs(static_cast<std::size_t>(rows) * traj.obs_dim);
  std::vector<float> logits(static_cast<std::size_t>(rows) * kNumActions);
  std::vector<float> values(rows);
  std::vector<std::array<Action, 2>> actions(traj.n_envs);

  for (int t = 0; t < T; ++t) {
    for (int e = 0; e < traj.n_envs; ++e)
      for (int a = 0; a < 2; ++a)
        encode_observation_into(
            env.state(e), a, spec,
            std::span<float>(step_obs.data() +
                                 static_cast<std::size_t>(e * 2 + a) * traj.obs_dim,
                             traj.obs_dim));
    policy(step_obs.data(), rows, traj.obs_dim, logits.data(), values.data());

    for (int e = 0; e < traj.n_envs; ++e)
      for (int a = 0; a < 2; ++a) {
        const int row = e * 2 + a;
        const float* row_logits = logits.data() + static_cast<std::size_t>(row) * kNumActions;
        const int act = detail::sample_from_logits(row_logits, env.stream(e));
        actions[e][a] = static_cast<Action>(act);
        const std::size_t idx = traj.flat(t, e, a);
        traj.actions[idx] = static_cast<std::uint8_t>(act);
        traj.log_probs[idx] = detail::log_prob_of(row_logits, act);
        traj.values[idx] = values[row];
      }
    std::copy(step_obs.begin(), step_obs.end(),
              traj.obs.begin() + traj.obs_offset(t, 0, 0));

    const BatchEnv::StepOut out = env.batch_step(actions, shaping_scale);
    for (int e = 0; e < traj.n_envs; ++e) {
      traj.rewards[static_cast<std::size_t>(t) * traj.n_envs + e] =
          static_cast<float>(out.rewards[e]);
      for (int a = 0; a < 2; ++a) {
        const double r = per_agent_shaping
                             ? out.rewards[e] - out.shaped[e][1 - a]
                             : out.rewards[e];
        traj.agent_rewards[traj.flat(t, e, a)] = static_cast<float>(r);
      }
      traj.dones[static_cast<std::size_t>(t) * traj.n_envs + e] = out.dones[e];
      traj.total_soups += out.soups[e];
      traj.total_reward += out.rewards[e];
    }
  }

  // Bootstrap values for the states after the last step.
  for (int e = 0; e < traj.n_envs; ++e)
    for (int a = 0; a < 2; ++a)
      encode_observation_into(
          env.state(e), a, spec,
          std::span<float>(step_obs.data() +
                               static_cast<std::size_t>(e * 2 + a) * traj.obs_dim,
                           traj.obs_dim));
  policy(step_obs.data(), rows, traj.obs_dim, logits.data(), values.data());
  for (int row = 0; row < rows; ++row) traj.last_values[row] = values[row];

  return traj;
}

}  // namespace kitchen
