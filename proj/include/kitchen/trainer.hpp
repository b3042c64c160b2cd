#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "kitchen/checkpoint.hpp"
#include "kitchen/continual.hpp"
#include "kitchen/estimator.hpp"
#include "kitchen/gae.hpp"
#include "kitchen/io.hpp"
#include "kitchen/net.hpp"
#include "kitchen/ppo.hpp"
#include "kitchen/procgen.hpp"
#include "kitchen/runconfig.hpp"
#include "kitchen/runlog.hpp"
#include "kitchen/validator.hpp"
#include "kitchen/vecenv.hpp"

namespace kitchen {

// Child-seed tags for the independent random streams of one run.
inline constexpr std::uint64_t kSeedTagNet = 0x01;
inline constexpr std::uint64_t kSeedTagEnv = 0x02;
inline constexpr std::uint64_t kSeedTagShuffle = 0x03;
inline constexpr std::uint64_t kSeedTagFisher = 0x04;

struct TaskEntry {
  std::shared_ptr<const Layout> layout;
  std::uint64_t gen_seed = 0;
  int base_id = 0;  // head index; repeated tasks share their base head
};

// Expands the sequence spec into the ordered task list. Generated sequences
// come from make_sequence; explicit layout files are loaded and validated.
// `repeat` appends the whole base list again, reusing the same heads.
inline std::vector<TaskEntry> resolve_sequence(const RunConfig& cfg) {
  std::vector<TaskEntry> base;
  if (!cfg.sequence.layout_files.empty()) {
    for (const std::string& file : cfg.sequence.layout_files) {
      Layout layout = load_layout_file(file);
      const ValidationReport rep = validate(layout);
      if (!rep.accepted)
        throw ConfigError("layout file " + file + " rejected by validator (" +
                          rule_name(*rep.failed_rule) + ")");
      base.push_back({std::make_shared<Layout>(std::move(layout)), 0, 0});
    }
  } else {
    TaskSequence seq =
        make_sequence(cfg.sequence.seed, DifficultyPreset::for_level(cfg.sequence.level),
                      cfg.sequence.n_tasks, cfg.horizon);
    for (TaskSpec& t : seq.tasks)
      base.push_back({std::make_shared<Layout>(std::move(t.layout)), t.seed, 0});
  }
  for (std::size_t i = 0; i < base.size(); ++i)
    base[i].base_id = static_cast<int>(i);

  std::vector<TaskEntry> plan;
  for (int r = 0; r < cfg.sequence.repeat; ++r)
    for (const TaskEntry& t : base) plan.push_back(t);
  return plan;
}

struct EvalOutcome {
  double score = 0.0;  // soups normalized by the task's bound
  double soups = 0.0;
};

// Greedy-policy evaluation: mode actions (lowest index wins ties), fixed
// resets, `episodes` rollouts of `horizon` steps.
inline EvalOutcome evaluate_policy(const Net<float>& net, const VecX<float>& params,
                                   std::shared_ptr<const Layout> layout, int head,
                                   const ObsSpec& spec, int episodes,
                                   const CycleEstimate& est) {
  MatX<float> obs_pair(2, spec.size());
  std::vector<float> buf(static_cast<std::size_t>(spec.size()));
  double total_soups = 0.0;
  for (int ep = 0; ep < episodes; ++ep) {
    EnvState state = reset(layout);
    for (int t = 0; t < spec.horizon; ++t) {
      for (int a = 0; a < 2; ++a) {
        encode_observation_into(state, a, spec, buf);
        for (int j = 0; j < spec.size(); ++j)
          obs_pair(a, j) = buf[static_cast<std::size_t>(j)];
      }
      const auto fwd = net.forward(params, obs_pair, head);
      std::array<Action, 2> acts{
          static_cast<Action>(argmax_row<float>(fwd.logits, 0)),
          static_cast<Action>(argmax_row<float>(fwd.logits, 1))};
      total_soups += step_in_place(state, acts, 0.0).soups_delivered;
    }
  }
  EvalOutcome out;
  out.soups = total_soups / episodes;
  out.score = normalize_score(out.soups, est);
  return out;
}

struct RunResult {
  std::string log_path;
  std::string checkpoint_path;
  int n_tasks = 0;
  std::vector<double> diagonal;      // s_i(i)
  std::vector<double> final_scores;  // s_N(i)
  long long env_steps = 0;
};

// Trains one seed over the full task sequence: per task, rollout/update
// cycles with annealed shaping and learning rate, evaluation on all seen
// tasks every eval_interval updates and at the task's last update, then
// boundary consolidation for the anchored methods.
inline RunResult run_sequence(const RunConfig& cfg, std::uint64_t seed,
                              const std::vector<TaskEntry>& plan,
                              const std::filesystem::path& out_dir) {
  const int n_tasks = static_cast<int>(plan.size());
  if (n_tasks == 0) throw ConfigError("empty task plan");
  int n_heads = 0;
  for (const TaskEntry& t : plan) n_heads = std::max(n_heads, t.base_id + 1);

  ObsSpec spec;
  spec.horizon = cfg.horizon;
  for (const TaskEntry& t : plan) {
    spec.pad_height = std::max(spec.pad_height, t.layout->height());
    spec.pad_width = std::max(spec.pad_width, t.layout->width());
  }

  std::vector<CycleEstimate> estimates;
  for (const TaskEntry& t : plan) {
    estimates.push_back(estimate_cycle(*t.layout, cfg.horizon));
    if (estimates.back().n_max < 1)
      throw ConfigError("layout '" + t.layout->name() + "' cannot fit one cycle in " +
                        std::to_string(cfg.horizon) + " steps (t_cycle=" +
                        std::to_string(estimates.back().t_cycle) + ")");
  }

  NetConfig nc;
  nc.obs_dim = spec.size();
  nc.hidden_layers = cfg.net.hidden_layers;
  nc.width = cfg.net.width;
  nc.activation = parse_activation(cfg.net.activation);
  nc.layer_norm = cfg.net.layer_norm;
  nc.multihead = cfg.net.multihead;
  nc.task_onehot = cfg.net.task_onehot;
  nc.num_tasks = n_heads;
  nc.shared_backbone = cfg.net.shared_backbone;
  const Net<float> net(nc);

  Rng init_rng(derive_seed(seed, kSeedTagNet));
  VecX<float> params = net.init_params(init_rng);
  AdamState<float> adam;
  CLState<float> cl = make_cl_state<float>(parse_cl_method(cfg.method), cfg.lambda);
  cl.online_decay = cfg.cl.online_decay;
  cl.fisher_episodes = cfg.cl.fisher_episodes;
  cl.fisher_steps = cfg.cl.fisher_steps;
  cl.regularize_critic = cfg.cl.regularize_critic;
  cl.regularize_heads = cfg.cl.regularize_heads;

  Rng shuffle_rng(derive_seed(seed, kSeedTagShuffle));
  const RewardConfig reward = reward_config_for(cfg);

  const long long steps_per_update =
      static_cast<long long>(cfg.ppo.n_envs) * cfg.ppo.rollout_steps;
  const long long updates_per_task =
      (cfg.ppo.steps_per_task + steps_per_update - 1) / steps_per_update;

  std::filesystem::create_directories(out_dir);
  RunLogWriter log(out_dir / ("runlog_seed" + std::to_string(seed) + ".jsonl"));
  const long long run_start_ms = wall_ms_now();
  {
    Json meta;
    meta["v"] = 1;
    meta["kind"] = "meta";
    meta["seed"] = seed;
    meta["config"] = to_json(cfg);
    meta["config_digest"] = config_digest(cfg);
    meta["n_tasks"] = n_tasks;
    meta["obs"] = {{"pad_height", spec.pad_height},
                   {"pad_width", spec.pad_width},
                   {"channels", kObsChannels}};
    meta["updates_per_task"] = updates_per_task;
    log.write(meta);
  }

  RunResult result;
  result.n_tasks = n_tasks;
  result.diagonal.assign(n_tasks, 0.0);
  result.final_scores.assign(n_tasks, 0.0);

  const int N = cfg.ppo.n_envs * 2;  // per-agent sample streams
  long long env_steps = 0;
  long long global_update = 0;

  auto policy = [&](const float* obs, int rows, int obs_dim, float* logits,
                    float* values, int head) {
    Eigen::Map<const MatX<float>> m(obs, rows, obs_dim);
    const auto fwd = net.forward(params, m, head);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < kNumActions; ++j)
        logits[static_cast<std::size_t>(i) * kNumActions + j] = fwd.logits(i, j);
      values[i] = fwd.values(i);
    }
  };

  auto run_eval = [&](int train_task, long long update_in_task) {
    Json rec;
    rec["kind"] = "eval";
    rec["task"] = train_task;
    rec["update"] = update_in_task;
    rec["global_update"] = global_update;
    rec["env_steps"] = env_steps;
    Json scores = Json::array();
    for (int j = 1; j <= train_task; ++j) {
      const TaskEntry& entry = plan[j - 1];
      const EvalOutcome e =
          evaluate_policy(net, params, entry.layout, entry.base_id, spec,
                          cfg.eval_episodes, estimates[j - 1]);
      scores.push_back({{"task", j},
                        {"head", entry.base_id},
                        {"score", e.score},
                        {"soups", e.soups}});
      if (j == train_task && update_in_task == updates_per_task)
        result.diagonal[j - 1] = e.score;
      if (train_task == n_tasks && update_in_task == updates_per_task)
        result.final_scores[j - 1] = e.score;
    }
    rec["scores"] = scores;
    log.write(rec);
  };

  for (int task = 1; task <= n_tasks; ++task) {
    const TaskEntry& entry = plan[task - 1];
    const int head = entry.base_id;
    {
      Json rec;
      rec["kind"] = "task_start";
      rec["task"] = task;
      rec["head"] = head;
      rec["layout_name"] = entry.layout->name();
      rec["layout"] = serialize_layout(*entry.layout);
      rec["gen_seed"] = entry.gen_seed;
      rec["n_max"] = estimates[task - 1].n_max;
      rec["t_cycle"] = estimates[task - 1].t_cycle;
      log.write(rec);
    }

    BatchEnv env(entry.layout, cfg.ppo.n_envs, cfg.horizon,
                 derive_seed(derive_seed(seed, kSeedTagEnv),
                             static_cast<std::uint64_t>(task)),
                 reward);
    long long task_steps = 0;

    for (long long u = 1; u <= updates_per_task; ++u) {
      const double shaping =
          std::max(0.0, 1.0 - static_cast<double>(task_steps) / reward.shaping_horizon);
      const double lr_now =
          cfg.ppo.anneal_lr
              ? cfg.ppo.lr * (1.0 - static_cast<double>(u - 1) / updates_per_task)
              : cfg.ppo.lr;

      Trajectory traj = rollout(
          env,
          [&](const float* obs, int rows, int dim, float* lg, float* vl) {
            policy(obs, rows, dim, lg, vl, head);
          },
          cfg.ppo.rollout_steps, spec, shaping, cfg.per_agent_shaping);
      task_steps += steps_per_update;
      env_steps += steps_per_update;

      // Per-agent GAE over the shared team reward.
      const int T = traj.T;
      std::vector<double> rewards(static_cast<std::size_t>(T) * N);
      std::vector<std::uint8_t> dones(static_cast<std::size_t>(T) * N);
      std::vector<double> values(static_cast<std::size_t>(T) * N);
      std::vector<double> bootstrap(static_cast<std::size_t>(N));
      for (int t = 0; t < T; ++t)
        for (int e = 0; e < traj.n_envs; ++e)
          for (int a = 0; a < 2; ++a) {
            const std::size_t dst = static_cast<std::size_t>(t) * N + e * 2 + a;
            rewards[dst] = traj.agent_rewards[traj.flat(t, e, a)];
            dones[dst] = traj.dones[static_cast<std::size_t>(t) * traj.n_envs + e];
            values[dst] = traj.values[traj.flat(t, e, a)];
          }
      for (int i = 0; i < N; ++i) bootstrap[i] = traj.last_values[i];
      const GaeOut gae = compute_gae(rewards, values, dones, bootstrap, T, N,
                                     cfg.ppo.gamma, cfg.ppo.gae_lambda);

      const Eigen::Index n_samples = static_cast<Eigen::Index>(T) * N;
      SampleBatch<float> samples;
      samples.obs = Eigen::Map<const MatX<float>>(traj.obs.data(), n_samples,
                                                  traj.obs_dim);
      samples.actions.resize(n_samples);
      samples.old_log_probs.resize(n_samples);
      samples.advantages.resize(n_samples);
      samples.targets.resize(n_samples);
      for (Eigen::Index i = 0; i < n_samples; ++i) {
        samples.actions(i) = traj.actions[static_cast<std::size_t>(i)];
        samples.old_log_probs(i) = traj.log_probs[static_cast<std::size_t>(i)];
        samples.advantages(i) = static_cast<float>(gae.advantages[static_cast<std::size_t>(i)]);
        samples.targets(i) = static_cast<float>(gae.targets[static_cast<std::size_t>(i)]);
      }

      const UpdateDiag diag = ppo_update(net, params, adam, samples, head, lr_now,
                                         cfg.ppo, cl, shuffle_rng);
      ++global_update;

      {
        Json rec;
        rec["kind"] = "update";
        rec["task"] = task;
        rec["update"] = u;
        rec["global_update"] = global_update;
        rec["env_steps"] = env_steps;
        rec["reward_mean"] = traj.total_reward / static_cast<double>(steps_per_update);
        rec["soups"] = traj.total_soups;
        rec["loss"] = diag.loss.total;
        rec["policy_loss"] = diag.loss.policy;
        rec["value_loss"] = diag.loss.value;
        rec["entropy"] = diag.loss.entropy;
        rec["cl_penalty"] = diag.loss.cl_penalty;
        rec["grad_norm"] = diag.loss.grad_norm;
        rec["lr"] = diag.lr;
        rec["shaping"] = shaping;
        log.write(rec);
      }

      if (u % cfg.eval_interval == 0 || u == updates_per_task) run_eval(task, u);
    }

    if (cl.method != CLMethod::FT) {
      const long long t0 = wall_ms_now();
      consolidate(net, params, entry.layout, spec, cl, head,
                  derive_seed(seed, kSeedTagFisher + static_cast<std::uint64_t>(task)));
      Json rec;
      rec["kind"] = "consolidate";
      rec["task"] = task;
      rec["method"] = cfg.method;
      rec["anchors"] = cl.anchors.size();
      rec["wall_ms"] = wall_ms_now() - t0;
      log.write(rec);
    }

    Checkpoint ckpt;
    ckpt.net_cfg = nc;
    ckpt.spec = spec;
    ckpt.method = cfg.method;
    ckpt.lambda = cl.lambda;
    ckpt.params = params;
    ckpt.adam = adam;
    ckpt.cl = cl;
    ckpt.seed = seed;
    ckpt.global_update = global_update;
    ckpt.env_steps = env_steps;
    ckpt.shuffle_counter = shuffle_rng.counter();
    ckpt.trained_tasks = task;
    const std::string ckpt_name =
        "ckpt_seed" + std::to_string(seed) + "_task" + std::to_string(task) + ".bin";
    save_checkpoint(out_dir / ckpt_name, ckpt);
    result.checkpoint_path = (out_dir / ckpt_name).string();

    Json rec;
    rec["kind"] = "task_end";
    rec["task"] = task;
    rec["env_steps"] = env_steps;
    rec["checkpoint"] = ckpt_name;
    log.write(rec);
  }

  {
    Json rec;
    rec["kind"] = "done";
    rec["env_steps"] = env_steps;
    rec["wall_ms"] = wall_ms_now() - run_start_ms;
    log.write(rec);
  }
  result.env_steps = env_steps;
  result.log_path = log.path().string();
  return result;
}

// ---- Episode rendering ------------------------------------------------------

namespace detail {

inline char item_glyph(Item item) {
  switch (item) {
    case Item::Onion: return 'o';
    case Item::Plate: return 'b';
    case Item::Soup: return 's';
    case Item::Nothing: return '-';
  }
  return '?';
}

inline char dir_glyph(Direction d) {
  switch (d) {
    case Direction::Up: return '^';
    case Direction::Down: return 'v';
    case Direction::Left: return '<';
    case Direction::Right: return '>';
  }
  return '?';
}

}  // namespace detail

// One text frame: the grid with agent glyphs and loose items overlaid, then
// a status line with holdings and pot timers, then an optional event line.
inline std::string render_frame(const Layout& layout, const EnvState& state,
                                int total_soups, const std::string& event) {
  std::string frame;
  for (int r = 0; r < layout.height(); ++r) {
    for (int c = 0; c < layout.width(); ++c) {
      char ch = tile_char(layout.at(r, c));
      const Item loose = state.counter_items[layout.cell_index({r, c})];
      if (loose != Item::Nothing) ch = detail::item_glyph(loose);
      if (state.agents[0].pos == Coord{r, c} || state.agents[1].pos == Coord{r, c})
        ch = 'A';
      frame.push_back(ch);
    }
    frame.push_back('\n');
  }
  frame += "t=" + std::to_string(state.t) + " soups=" + std::to_string(total_soups);
  for (int a = 0; a < 2; ++a) {
    const AgentState& ag = state.agents[a];
    frame += " | agent" + std::to_string(a) + "@(" + std::to_string(ag.pos.row) +
             "," + std::to_string(ag.pos.col) + ")" + detail::dir_glyph(ag.dir) +
             " held=" + detail::item_glyph(ag.held);
  }
  for (std::size_t p = 0; p < state.pots.size(); ++p) {
    const Coord cc = layout.pot_cells()[p];
    frame += " | pot(" + std::to_string(cc.row) + "," + std::to_string(cc.col) +
             ") onions=" + std::to_string(state.pots[p].onions);
    if (state.pots[p].cooking())
      frame += " timer=" + std::to_string(state.pots[p].timer);
    if (state.pots[p].ready()) frame += " READY";
  }
  if (!event.empty()) frame += "\n" + event;
  return frame;
}

// Text frames of one greedy (or sampled) episode played from a checkpoint.
// Frame 0's grid block is exactly the serialized layout.
inline std::vector<std::string> render_episode(const Layout& layout,
                                               const Checkpoint& ckpt,
                                               std::uint64_t seed, int task = 0,
                                               int max_steps = -1,
                                               bool sample = false) {
  if (layout.height() > ckpt.spec.pad_height || layout.width() > ckpt.spec.pad_width)
    throw Error("layout does not fit the checkpoint's observation shape");
  const Net<float> net(ckpt.net_cfg);
  if (net.n_params() != ckpt.params.size())
    throw Error("checkpoint parameter count mismatch");
  if (task < 0 || task >= ckpt.net_cfg.num_tasks)
    throw Error("task head out of range for checkpoint");

  const int steps = max_steps < 0 ? ckpt.spec.horizon : max_steps;
  auto layout_ptr = std::make_shared<const Layout>(layout);
  EnvState state = reset(layout_ptr);
  Rng rng(seed);
  MatX<float> obs_pair(2, ckpt.spec.size());
  std::vector<float> buf(static_cast<std::size_t>(ckpt.spec.size()));

  std::vector<std::string> frames;
  int total_soups = 0;

  frames.push_back(render_frame(layout, state, total_soups, ""));
  for (int t = 0; t < steps; ++t) {
    for (int a = 0; a < 2; ++a) {
      encode_observation_into(state, a, ckpt.spec, buf);
      for (int j = 0; j < ckpt.spec.size(); ++j)
        obs_pair(a, j) = buf[static_cast<std::size_t>(j)];
    }
    const auto fwd = net.forward(ckpt.params, obs_pair, task);
    std::array<Action, 2> acts;
    if (sample) {
      const MatX<float> logp = log_softmax_rows<float>(fwd.logits);
      for (int a = 0; a < 2; ++a) {
        const double u = rng.uniform01();
        double acc = 0.0;
        int pick = kNumActions - 1;
        for (int j = 0; j < kNumActions; ++j) {
          acc += std::exp(static_cast<double>(logp(a, j)));
          if (u < acc) {
            pick = j;
            break;
          }
        }
        acts[a] = static_cast<Action>(pick);
      }
    } else {
      acts = {static_cast<Action>(argmax_row<float>(fwd.logits, 0)),
              static_cast<Action>(argmax_row<float>(fwd.logits, 1))};
    }
    const StepResult r = step_in_place(state, acts, 0.0);
    total_soups += r.soups_delivered;
    std::string event;
    if (r.soups_delivered > 0)
      event = "+" + std::to_string(static_cast<int>(r.team_reward)) + " delivered!";
    frames.push_back(render_frame(layout, state, total_soups, event));
  }
  return frames;
}

}  // namespace kitchen
