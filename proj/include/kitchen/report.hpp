#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "kitchen/io.hpp"
#include "kitchen/metrics.hpp"
#include "kitchen/runlog.hpp"

namespace kitchen {

struct RunSummary {
  std::uint64_t seed = 0;
  std::string method;
  int n_tasks = 0;
  bool complete = false;
  std::vector<double> diagonal;      // s_i(i)
  std::vector<double> final_scores;  // s_N(i)
  std::vector<std::pair<long long, double>> series;  // (env_steps, avg over all tasks)
  std::vector<std::vector<double>> task_reward_traces;  // per task, per update
  std::vector<std::string> layout_texts;
};

inline RunSummary summarize_log(const std::filesystem::path& path) {
  const auto records = read_run_log(path);
  RunSummary s;
  long long updates_per_task = 0;
  for (const auto& rec : records) {
    const std::string kind = rec.value("kind", "");
    if (kind == "meta") {
      s.seed = rec.at("seed").get<std::uint64_t>();
      s.method = rec.at("config").at("method").get<std::string>();
      s.n_tasks = rec.at("n_tasks").get<int>();
      updates_per_task = rec.at("updates_per_task").get<long long>();
      s.diagonal.assign(s.n_tasks, 0.0);
      s.final_scores.assign(s.n_tasks, 0.0);
      s.task_reward_traces.assign(s.n_tasks, {});
      s.layout_texts.assign(s.n_tasks, "");
    } else if (kind == "task_start") {
      s.layout_texts[rec.at("task").get<int>() - 1] = rec.at("layout").get<std::string>();
    } else if (kind == "update") {
      s.task_reward_traces[rec.at("task").get<int>() - 1].push_back(
          rec.at("reward_mean").get<double>());
    } else if (kind == "eval") {
      const int train_task = rec.at("task").get<int>();
      const long long update = rec.at("update").get<long long>();
      const long long env_steps = rec.at("env_steps").get<long long>();
      double sum = 0.0;
      for (const auto& sc : rec.at("scores")) {
        const int j = sc.at("task").get<int>();
        const double v = sc.at("score").get<double>();
        sum += v;
        if (update == updates_per_task) {
          if (j == train_task) s.diagonal[j - 1] = v;
          if (train_task == s.n_tasks) s.final_scores[j - 1] = v;
        }
      }
      s.series.emplace_back(env_steps, sum / std::max(1, s.n_tasks));
    } else if (kind == "done") {
      s.complete = true;
    }
  }
  return s;
}

struct MeanCI {
  double mean = 0.0;
  double ci = 0.0;  // 1.96 * stdev / sqrt(n)
  int n = 0;
};

inline MeanCI mean_ci(const std::vector<double>& xs) {
  MeanCI out;
  out.n = static_cast<int>(xs.size());
  if (out.n == 0) return out;
  double sum = 0.0;
  for (double x : xs) sum += x;
  out.mean = sum / out.n;
  if (out.n > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    const double stdev = std::sqrt(ss / (out.n - 1));
    out.ci = 1.96 * stdev / std::sqrt(static_cast<double>(out.n));
  }
  return out;
}

struct MethodReport {
  std::string method;
  int n_seeds = 0;
  int n_tasks = 0;
  MeanCI average_performance;
  MeanCI forgetting_m;  // only when n_tasks >= 2
  MeanCI plasticity_m;
  std::vector<std::pair<long long, MeanCI>> series;
  bool has_plasticity_degradation = false;
  PlasticitySummary degradation;
  bool partial = false;  // some contributing log was incomplete
};

// Detects repetition runs: every layout text appears the same number R >= 2
// of times; traces of the k-th occurrence form repetition k.
inline bool repetition_structure(const RunSummary& s, int& n_base, int& repeats) {
  std::map<std::string, std::vector<int>> occurrences;
  for (int i = 0; i < s.n_tasks; ++i) occurrences[s.layout_texts[i]].push_back(i);
  if (occurrences.empty()) return false;
  const int r = static_cast<int>(occurrences.begin()->second.size());
  if (r < 2) return false;
  for (const auto& [text, idx] : occurrences)
    if (static_cast<int>(idx.size()) != r) return false;
  n_base = static_cast<int>(occurrences.size());
  repeats = r;
  return true;
}

inline std::vector<MethodReport> build_report(const std::vector<RunSummary>& runs) {
  std::map<std::string, std::vector<const RunSummary*>> by_method;
  for (const RunSummary& r : runs) by_method[r.method].push_back(&r);

  std::vector<MethodReport> out;
  for (const auto& [method, group] : by_method) {
    MethodReport rep;
    rep.method = method;
    rep.n_seeds = static_cast<int>(group.size());
    rep.n_tasks = group.front()->n_tasks;

    std::vector<double> a, f, p;
    for (const RunSummary* r : group) {
      if (!r->complete) rep.partial = true;
      a.push_back(average_performance(r->final_scores));
      p.push_back(plasticity(r->diagonal));
      if (r->n_tasks >= 2) f.push_back(forgetting(r->diagonal, r->final_scores));
    }
    rep.average_performance = mean_ci(a);
    rep.plasticity_m = mean_ci(p);
    if (!f.empty()) rep.forgetting_m = mean_ci(f);

    // Align series across seeds on the env-step grid of the first run.
    const std::size_t points = group.front()->series.size();
    for (std::size_t k = 0; k < points; ++k) {
      std::vector<double> vals;
      for (const RunSummary* r : group)
        if (k < r->series.size()) vals.push_back(r->series[k].second);
      rep.series.emplace_back(group.front()->series[k].first, mean_ci(vals));
    }

    // Plasticity degradation for repetition-structured sequences.
    int n_base = 0, repeats = 0;
    if (repetition_structure(*group.front(), n_base, repeats)) {
      std::vector<std::vector<RepetitionMetrics>> pooled;
      bool usable = true;
      for (const RunSummary* r : group) {
        std::map<std::string, std::vector<int>> occ;
        for (int i = 0; i < r->n_tasks; ++i) occ[r->layout_texts[i]].push_back(i);
        for (const auto& [text, idx] : occ) {
          std::vector<RepetitionTrace> traces;
          for (std::size_t j = 0; j < idx.size(); ++j)
            traces.push_back({static_cast<int>(j),
                              r->task_reward_traces[static_cast<std::size_t>(idx[j])]});
          try {
            pooled.push_back(plasticity_degradation(traces));
          } catch (const MetricError&) {
            usable = false;
          }
        }
      }
      if (usable && !pooled.empty()) {
        rep.has_plasticity_degradation = true;
        rep.degradation = summarize_plasticity(pooled);
      }
    }
    out.push_back(std::move(rep));
  }
  return out;
}

inline std::string format_report(const std::vector<MethodReport>& reports) {
  std::ostringstream os;
  os << "method        seeds  tasks  A(avg perf)        F(forgetting)      P(plasticity)\n";
  auto cell = [](const MeanCI& m, bool present) {
    std::ostringstream c;
    if (!present) {
      c << "-";
    } else {
      c.precision(4);
      c << std::fixed << m.mean;
      if (m.n > 1) c << " +/- " << m.ci;
    }
    return c.str();
  };
  for (const MethodReport& r : reports) {
    os << r.method;
    for (std::size_t i = r.method.size(); i < 14; ++i) os << ' ';
    os << r.n_seeds << "      " << r.n_tasks << "      ";
    os << cell(r.average_performance, true) << "  ";
    os << cell(r.forgetting_m, r.n_tasks >= 2) << "  ";
    os << cell(r.plasticity_m, true);
    if (r.partial) os << "  [partial]";
    os << '\n';
    if (r.has_plasticity_degradation) {
      os.precision(4);
      os << "  repetition metrics: AUC-loss=" << std::fixed << r.degradation.auc_loss
         << " FPR=" << r.degradation.fpr << " RAUC=" << r.degradation.rauc << '\n';
    }
  }
  return os.str();
}

// Writes report.txt plus one plot-ready CSV per method.
inline void write_report_files(const std::filesystem::path& dir,
                               const std::vector<MethodReport>& reports) {
  std::filesystem::create_directories(dir);
  write_text_file(dir / "report.txt", format_report(reports));
  for (const MethodReport& r : reports) {
    std::ostringstream csv;
    csv << "env_steps,avg_score_mean,avg_score_ci\n";
    for (const auto& [steps, m] : r.series)
      csv << steps << ',' << m.mean << ',' << m.ci << '\n';
    write_text_file(dir / ("series_" + r.method + ".csv"), csv.str());
  }
}

}  // namespace kitchen
