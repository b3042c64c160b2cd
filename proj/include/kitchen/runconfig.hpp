#pragma once

#include <cstdint>
#include <cstdlib>
#include <string>
#include <vector>

#include <json.hpp>

#include "kitchen/continual.hpp"
#include "kitchen/net.hpp"
#include "kitchen/ppo.hpp"
#include "kitchen/state.hpp"

namespace kitchen {

struct ConfigError : Error {
  using Error::Error;
};

using Json = nlohmann::json;

struct SequenceSpec {
  std::uint64_t seed = 1;
  int level = 1;
  int n_tasks = 1;
  int repeat = 1;
  std::vector<std::string> layout_files;  // non-empty overrides generation
};

struct NetOptions {
  int hidden_layers = 2;
  int width = 128;
  std::string activation = "relu";
  bool layer_norm = false;
  bool multihead = true;
  bool task_onehot = false;
  bool shared_backbone = false;
};

struct CLOptions {
  double online_decay = 0.9;
  int fisher_episodes = 5;
  int fisher_steps = 500;
  bool regularize_critic = false;
  bool regularize_heads = false;
};

struct RunConfig {
  std::string run_name = "run";
  SequenceSpec sequence;
  std::string method = "ft";
  double lambda = -1.0;  // negative: use the method default
  NetOptions net;
  PPOConfig ppo;
  CLOptions cl;
  std::string reward_mode = "dense";
  bool per_agent_shaping = false;
  double shaping_horizon = 2.5e6;
  int horizon = kDefaultHorizon;
  int eval_interval = 100;
  int eval_episodes = 10;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::string out_dir;  // empty: $KITCHEN_OUTPUT_ROOT or ./runs
};

inline Json to_json(const RunConfig& c) {
  Json j;
  j["run_name"] = c.run_name;
  j["sequence"] = {{"seed", c.sequence.seed},
                   {"level", c.sequence.level},
                   {"n_tasks", c.sequence.n_tasks},
                   {"repeat", c.sequence.repeat},
                   {"layout_files", c.sequence.layout_files}};
  j["method"] = c.method;
  j["lambda"] = c.lambda;
  j["net"] = {{"hidden_layers", c.net.hidden_layers},
              {"width", c.net.width},
              {"activation", c.net.activation},
              {"layer_norm", c.net.layer_norm},
              {"multihead", c.net.multihead},
              {"task_onehot", c.net.task_onehot},
              {"shared_backbone", c.net.shared_backbone}};
  j["ppo"] = {{"lr", c.ppo.lr},
              {"anneal_lr", c.ppo.anneal_lr},
              {"gamma", c.ppo.gamma},
              {"gae_lambda", c.ppo.gae_lambda},
              {"clip_eps", c.ppo.clip_eps},
              {"entropy_coef", c.ppo.entropy_coef},
              {"value_coef", c.ppo.value_coef},
              {"max_grad_norm", c.ppo.max_grad_norm},
              {"epochs", c.ppo.epochs},
              {"minibatches", c.ppo.minibatches},
              {"steps_per_task", c.ppo.steps_per_task},
              {"n_envs", c.ppo.n_envs},
              {"rollout_steps", c.ppo.rollout_steps}};
  j["cl"] = {{"online_decay", c.cl.online_decay},
             {"fisher_episodes", c.cl.fisher_episodes},
             {"fisher_steps", c.cl.fisher_steps},
             {"regularize_critic", c.cl.regularize_critic},
             {"regularize_heads", c.cl.regularize_heads}};
  j["reward_mode"] = c.reward_mode;
  j["per_agent_shaping"] = c.per_agent_shaping;
  j["shaping_horizon"] = c.shaping_horizon;
  j["horizon"] = c.horizon;
  j["eval_interval"] = c.eval_interval;
  j["eval_episodes"] = c.eval_episodes;
  j["seeds"] = c.seeds;
  j["out_dir"] = c.out_dir;
  return j;
}

namespace detail {

template <typename T>
void maybe(const Json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace detail

inline RunConfig run_config_from_json(const Json& j) {
  RunConfig c;
  detail::maybe(j, "run_name", c.run_name);
  if (j.contains("sequence")) {
    const Json& s = j.at("sequence");
    detail::maybe(s, "seed", c.sequence.seed);
    detail::maybe(s, "level", c.sequence.level);
    detail::maybe(s, "n_tasks", c.sequence.n_tasks);
    detail::maybe(s, "repeat", c.sequence.repeat);
    detail::maybe(s, "layout_files", c.sequence.layout_files);
  }
  detail::maybe(j, "method", c.method);
  detail::maybe(j, "lambda", c.lambda);
  if (j.contains("net")) {
    const Json& n = j.at("net");
    detail::maybe(n, "hidden_layers", c.net.hidden_layers);
    detail::maybe(n, "width", c.net.width);
    detail::maybe(n, "activation", c.net.activation);
    detail::maybe(n, "layer_norm", c.net.layer_norm);
    detail::maybe(n, "multihead", c.net.multihead);
    detail::maybe(n, "task_onehot", c.net.task_onehot);
    detail::maybe(n, "shared_backbone", c.net.shared_backbone);
  }
  if (j.contains("ppo")) {
    const Json& p = j.at("ppo");
    detail::maybe(p, "lr", c.ppo.lr);
    detail::maybe(p, "anneal_lr", c.ppo.anneal_lr);
    detail::maybe(p, "gamma", c.ppo.gamma);
    detail::maybe(p, "gae_lambda", c.ppo.gae_lambda);
    detail::maybe(p, "clip_eps", c.ppo.clip_eps);
    detail::maybe(p, "entropy_coef", c.ppo.entropy_coef);
    detail::maybe(p, "value_coef", c.ppo.value_coef);
    detail::maybe(p, "max_grad_norm", c.ppo.max_grad_norm);
    detail::maybe(p, "epochs", c.ppo.epochs);
    detail::maybe(p, "minibatches", c.ppo.minibatches);
    detail::maybe(p, "steps_per_task", c.ppo.steps_per_task);
    detail::maybe(p, "n_envs", c.ppo.n_envs);
    detail::maybe(p, "rollout_steps", c.ppo.rollout_steps);
  }
  if (j.contains("cl")) {
    const Json& q = j.at("cl");
    detail::maybe(q, "online_decay", c.cl.online_decay);
    detail::maybe(q, "fisher_episodes", c.cl.fisher_episodes);
    detail::maybe(q, "fisher_steps", c.cl.fisher_steps);
    detail::maybe(q, "regularize_critic", c.cl.regularize_critic);
    detail::maybe(q, "regularize_heads", c.cl.regularize_heads);
  }
  detail::maybe(j, "reward_mode", c.reward_mode);
  detail::maybe(j, "per_agent_shaping", c.per_agent_shaping);
  detail::maybe(j, "shaping_horizon", c.shaping_horizon);
  detail::maybe(j, "horizon", c.horizon);
  detail::maybe(j, "eval_interval", c.eval_interval);
  detail::maybe(j, "eval_episodes", c.eval_episodes);
  detail::maybe(j, "seeds", c.seeds);
  detail::maybe(j, "out_dir", c.out_dir);
  return c;
}

inline void check_run_config(const RunConfig& c) {
  parse_cl_method(c.method);
  parse_activation(c.net.activation);
  if (c.reward_mode != "dense" && c.reward_mode != "sparse")
    throw ConfigError("reward_mode must be dense or sparse");
  if (c.sequence.layout_files.empty() &&
      (c.sequence.level < 1 || c.sequence.level > 3))
    throw ConfigError("sequence level must be 1, 2 or 3");
  if (c.sequence.n_tasks < 1 || c.sequence.repeat < 1)
    throw ConfigError("sequence needs n_tasks >= 1 and repeat >= 1");
  if (c.horizon < 1) throw ConfigError("horizon must be positive");
  if (c.eval_interval < 1 || c.eval_episodes < 1)
    throw ConfigError("eval cadence fields must be positive");
  if (c.seeds.empty()) throw ConfigError("at least one seed required");
  if (c.ppo.n_envs < 1 || c.ppo.rollout_steps < 1 || c.ppo.epochs < 1 ||
      c.ppo.minibatches < 1 || c.ppo.steps_per_task < 1)
    throw ConfigError("ppo dimensions must be positive");
  if ((static_cast<long long>(c.ppo.n_envs) * c.ppo.rollout_steps * 2) %
          c.ppo.minibatches !=
      0)
    throw ConfigError("batch size must divide evenly into minibatches");
}

// Stable 64-bit FNV-1a digest of the canonical config dump.
inline std::string config_digest(const RunConfig& c) {
  const std::string dump = to_json(c).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : dump) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string resolve_out_dir(const RunConfig& c) {
  if (!c.out_dir.empty()) return c.out_dir;
  if (const char* root = std::getenv("KITCHEN_OUTPUT_ROOT"))
    return std::string(root) + "/" + c.run_name;
  return "runs/" + c.run_name;
}

inline RewardConfig reward_config_for(const RunConfig& c) {
  RewardConfig r = (c.reward_mode == "dense") ? RewardConfig::dense()
                                              : RewardConfig::sparse();
  r.shaping_horizon = c.shaping_horizon;
  return r;
}

}  // namespace kitchen
