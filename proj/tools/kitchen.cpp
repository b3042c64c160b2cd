// Command-line front end: procedural kitchen generation, layout validation,
// cycle-bound estimation, continual training runs, metric reports, and
// episode rendering.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "kitchen/io.hpp"
#include "kitchen/procgen.hpp"
#include "kitchen/report.hpp"
#include "kitchen/trainer.hpp"

namespace fs = std::filesystem;
using namespace kitchen;

namespace {

int cmd_generate(std::uint64_t seed, int level, int n, std::string out_dir) {
  if (out_dir.empty()) {
    if (const char* root = std::getenv("KITCHEN_OUTPUT_ROOT")) out_dir = root;
    else out_dir = ".";
  }
  const DifficultyPreset preset = DifficultyPreset::for_level(level);
  Json manifest;
  manifest["seed"] = seed;
  manifest["level"] = level;
  manifest["n"] = n;
  manifest["params"] = {{"side_min", preset.side_min},
                        {"side_max", preset.side_max},
                        {"wall_density", preset.wall_density}};
  Json entries = Json::array();

  std::set<std::string> used;
  std::uint64_t draw = 0;
  int produced = 0;
  while (produced < n) {
    if (draw >= static_cast<std::uint64_t>(n) * 100)
      throw GenerationError("draw budget exhausted while generating layouts");
    const std::uint64_t child = derive_seed(seed, draw++);
    const GenOutcome out = generate_layout_detailed(preset.params(child));
    const std::string text = serialize_layout(out.layout);
    if (used.contains(text)) continue;
    used.insert(text);
    char name[64];
    std::snprintf(name, sizeof name, "layout_L%d_%03d.txt", level, produced);
    const fs::path path = fs::path(out_dir) / name;
    write_text_file(path, text + "\n");
    entries.push_back({{"file", name},
                       {"child_seed", child},
                       {"attempts", out.attempts},
                       {"height", out.layout.height()},
                       {"width", out.layout.width()}});
    std::cout << path.string() << "\n";
    ++produced;
  }
  manifest["layouts"] = entries;
  write_text_file(fs::path(out_dir) / "manifest.json", manifest.dump(2) + "\n");
  return 0;
}

int cmd_validate(const std::vector<std::string>& files) {
  bool all_ok = true;
  for (const std::string& file : files) {
    std::string text = read_text_file(file);
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r'))
      text.pop_back();
    const ValidationReport rep = validate_text(text);
    if (rep.accepted) {
      std::cout << "ACCEPT " << file << "\n";
    } else {
      std::cout << "REJECT " << file << " rule=" << rule_name(*rep.failed_rule) << "\n";
      all_ok = false;
    }
  }
  return all_ok ? 0 : 1;
}

int cmd_estimate(const std::string& file, int horizon) {
  const Layout layout = load_layout_file(file);
  const CycleEstimate est = estimate_cycle(layout, horizon);
  std::cout << "layout:   " << layout.name() << " (" << layout.height() << "x"
            << layout.width() << ")\n"
            << "d_onion:  " << est.d_onion << "\n"
            << "d_plate:  " << est.d_plate << "\n"
            << "d_goal:   " << est.d_goal << "\n"
            << "c_move:   " << est.c_move << "\n"
            << "t_cycle:  " << est.t_cycle << "\n"
            << "horizon:  " << est.horizon << "\n"
            << "n_max:    " << est.n_max << "\n"
            << "r_max:    " << est.r_max << "\n";
  return 0;
}

int cmd_train(const std::string& config_file, const std::string& out_override,
              const std::vector<std::uint64_t>& seeds_override) {
  RunConfig cfg;
  if (!config_file.empty()) {
    cfg = run_config_from_json(Json::parse(read_text_file(config_file)));
    // Relative layout paths resolve against the config file's directory.
    const fs::path cfg_dir = fs::absolute(config_file).parent_path();
    for (std::string& file : cfg.sequence.layout_files) {
      const fs::path p(file);
      if (!p.is_absolute()) file = (cfg_dir / p).lexically_normal().string();
    }
  }
  if (!out_override.empty()) cfg.out_dir = out_override;
  if (!seeds_override.empty()) cfg.seeds = seeds_override;
  check_run_config(cfg);

  const fs::path out_dir = resolve_out_dir(cfg);
  fs::create_directories(out_dir);
  write_text_file(out_dir / "config.json", to_json(cfg).dump(2) + "\n");

  const std::vector<TaskEntry> plan = resolve_sequence(cfg);
  std::cout << "tasks: " << plan.size() << ", output: " << out_dir.string() << "\n";
  for (std::uint64_t seed : cfg.seeds) {
    std::cout << "training seed " << seed << " ..." << std::flush;
    const RunResult res = run_sequence(cfg, seed, plan, out_dir);
    std::cout << " done (" << res.env_steps << " env steps)\n";
    std::cout << "  log: " << res.log_path << "\n";
  }
  return 0;
}

int cmd_report(std::vector<std::string> logs, const std::string& dir,
               const std::string& out_dir) {
  if (!dir.empty())
    for (const auto& entry : fs::directory_iterator(dir))
      if (entry.path().extension() == ".jsonl") logs.push_back(entry.path().string());
  if (logs.empty()) throw ConfigError("no run logs given");
  std::sort(logs.begin(), logs.end());

  std::vector<RunSummary> summaries;
  for (const std::string& log : logs) summaries.push_back(summarize_log(log));
  const auto reports = build_report(summaries);
  std::cout << format_report(reports);
  for (const RunSummary& s : summaries)
    if (!s.complete)
      std::cout << "warning: incomplete log for seed " << s.seed
                << " (partial report)\n";
  if (!out_dir.empty()) {
    write_report_files(out_dir, reports);
    std::cout << "report files written to " << out_dir << "\n";
  }
  return 0;
}

int cmd_render(const std::string& layout_file, const std::string& ckpt_file,
               std::uint64_t seed, int task, int steps, bool sample,
               const std::string& out_file) {
  const Layout layout = load_layout_file(layout_file);
  const Checkpoint ckpt = load_checkpoint(ckpt_file);
  const auto frames = render_episode(layout, ckpt, seed, task, steps, sample);
  if (out_file.empty()) {
    for (const std::string& f : frames) std::cout << f << "\n\n";
  } else {
    std::string all;
    for (const std::string& f : frames) all += f + "\n\n";
    write_text_file(out_file, all);
    std::cout << frames.size() << " frames written to " << out_file << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cooperative kitchen benchmark: procedural tasks, IPPO continual training, metrics"};
  app.require_subcommand(1);

  auto* generate = app.add_subcommand("generate", "Generate validated kitchen layouts");
  std::uint64_t gen_seed = 1;
  int gen_level = 1, gen_n = 1;
  std::string gen_out;
  generate->add_option("--seed", gen_seed, "Master seed");
  generate->add_option("--level", gen_level, "Difficulty level 1-3")->check(CLI::Range(1, 3));
  generate->add_option("--n", gen_n, "Number of layouts");
  generate->add_option("--out", gen_out, "Output directory");

  auto* validate_cmd = app.add_subcommand("validate", "Check layout files for solvability");
  std::vector<std::string> val_files;
  validate_cmd->add_option("files", val_files, "Layout files")->required();

  auto* estimate = app.add_subcommand("estimate", "Print the cook-deliver cycle bound");
  std::string est_file;
  int est_horizon = kDefaultHorizon;
  estimate->add_option("file", est_file, "Layout file")->required();
  estimate->add_option("--horizon", est_horizon, "Episode horizon");

  auto* train = app.add_subcommand("train", "Run continual training from a config file");
  std::string train_config, train_out;
  std::vector<std::uint64_t> train_seeds;
  train->add_option("--config", train_config, "JSON run config");
  train->add_option("--out", train_out, "Output directory override");
  train->add_option("--seeds", train_seeds, "Seed list override");

  auto* report = app.add_subcommand("report", "Summarize run logs into metric tables");
  std::vector<std::string> rep_logs;
  std::string rep_dir, rep_out;
  report->add_option("logs", rep_logs, "Run log files (.jsonl)");
  report->add_option("--dir", rep_dir, "Directory holding run logs");
  report->add_option("--out", rep_out, "Directory for report files");

  auto* render = app.add_subcommand("render", "Replay a checkpoint as text frames");
  std::string ren_layout, ren_ckpt, ren_out;
  std::uint64_t ren_seed = 0;
  int ren_task = 0, ren_steps = -1;
  bool ren_sample = false;
  render->add_option("--layout", ren_layout, "Layout file")->required();
  render->add_option("--checkpoint", ren_ckpt, "Checkpoint file")->required();
  render->add_option("--seed", ren_seed, "Sampling seed");
  render->add_option("--task", ren_task, "Task head index");
  render->add_option("--steps", ren_steps, "Steps to render (default: horizon)");
  render->add_flag("--sample", ren_sample, "Sample actions instead of greedy");
  render->add_option("--out", ren_out, "Write frames to a file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*generate) return cmd_generate(gen_seed, gen_level, gen_n, gen_out);
    if (*validate_cmd) return cmd_validate(val_files);
    if (*estimate) return cmd_estimate(est_file, est_horizon);
    if (*train) return cmd_train(train_config, train_out, train_seeds);
    if (*report) return cmd_report(rep_logs, rep_dir, rep_out);
    if (*render) return cmd_render(ren_layout, ren_ckpt, ren_seed, ren_task,
                                   ren_steps, ren_sample, ren_out);
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
