// Minimal end-to-end training demo: a very short fine-tuning run on the
// cramped-room layout, followed by the metric report for its log.

#include <filesystem>
#include <iostream>

#include "kitchen/report.hpp"
#include "kitchen/trainer.hpp"

int main() {
  using namespace kitchen;
  RunConfig cfg;
  cfg.run_name = "demo";
  cfg.sequence.layout_files = {std::string(KITCHEN_DATA_DIR) +
                               "/layouts/cramped_room.txt"};
  cfg.method = "ft";
  cfg.ppo.n_envs = 8;
  cfg.ppo.rollout_steps = 32;
  cfg.ppo.steps_per_task = 8 * 32 * 20;  // 20 updates
  cfg.ppo.minibatches = 8;
  cfg.horizon = 400;
  cfg.eval_interval = 10;
  cfg.eval_episodes = 3;
  cfg.seeds = {1};

  const std::filesystem::path out = std::filesystem::temp_directory_path() /
                                    "kitchen_demo_run";
  std::filesystem::remove_all(out);
  const auto plan = resolve_sequence(cfg);
  std::cout << "training 20 updates on '" << plan[0].layout->name() << "' ...\n";
  const RunResult res = run_sequence(cfg, 1, plan, out);
  std::cout << "log: " << res.log_path << "\n";

  const RunSummary summary = summarize_log(res.log_path);
  std::cout << format_report(build_report({summary}));
  return 0;
}
