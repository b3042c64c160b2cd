#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "kitchen/layout.hpp"

namespace kitchen {

struct MetricError : Error {
  using Error::Error;
};

struct EvalRecord {
  int train_task = 0;  // 1-based
  int eval_task = 0;   // 1-based
  long long update = 0;
  double score = 0.0;
  std::uint64_t seed = 0;
};

// Mean normalized score across all tasks at the end of training.
inline double average_performance(const std::vector<double>& final_scores) {
  if (final_scores.empty()) throw MetricError("average_performance: no tasks");
  double sum = 0.0;
  for (double s : final_scores) sum += s;
  return sum / static_cast<double>(final_scores.size());
}

// Mean drop from the score right after training task i to its final score.
// `diagonal` holds s_i(i) for i = 1..N, `final_scores` holds s_N(i).
inline double forgetting(const std::vector<double>& diagonal,
                         const std::vector<double>& final_scores) {
  const std::size_t n = diagonal.size();
  if (n < 2 || final_scores.size() != n)
    throw MetricError("forgetting needs at least 2 aligned task scores");
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) sum += diagonal[i] - final_scores[i];
  return sum / static_cast<double>(n - 1);
}

// Mean training score s_i(i) across the sequence.
inline double plasticity(const std::vector<double>& diagonal) {
  if (diagonal.empty()) throw MetricError("plasticity: no tasks");
  double sum = 0.0;
  for (double s : diagonal) sum += s;
  return sum / static_cast<double>(diagonal.size());
}

// ---- Plasticity degradation under task repetition --------------------------

struct RepetitionTrace {
  int repetition = 0;             // 0-based, 0 is the baseline
  std::vector<double> rewards;    // per-step online reward, length L
};

struct RepetitionMetrics {
  int repetition = 0;
  double auc_loss = 0.0;  // 1 - AUC_j / AUC_0 on the smoothed running mean
  double fpr = 0.0;       // plateau ratio p_j / p_0
  double rauc = 0.0;      // raw AUC ratio, unsmoothed
};

namespace detail {

// Gaussian kernel smoothing, truncated at 4 sigma and renormalized at the
// boundaries. sigma <= 0 leaves the signal untouched.
inline std::vector<double> gaussian_smooth(const std::vector<double>& x, double sigma) {
  if (sigma <= 0.0) return x;
  const int n = static_cast<int>(x.size());
  const int radius = std::max(1, static_cast<int>(std::ceil(4.0 * sigma)));
  std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
  for (int k = -radius; k <= radius; ++k)
    kernel[static_cast<std::size_t>(k + radius)] =
        std::exp(-0.5 * (k / sigma) * (k / sigma));
  std::vector<double> out(x.size());
  for (int i = 0; i < n; ++i) {
    double num = 0.0, den = 0.0;
    for (int k = -radius; k <= radius; ++k) {
      const int j = i + k;
      if (j < 0 || j >= n) continue;
      const double w = kernel[static_cast<std::size_t>(k + radius)];
      num += w * x[static_cast<std::size_t>(j)];
      den += w;
    }
    out[static_cast<std::size_t>(i)] = num / den;
  }
  return out;
}

inline std::vector<double> cumulative_average(const std::vector<double>& x) {
  std::vector<double> out(x.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sum += x[i];
    out[i] = sum / static_cast<double>(i + 1);
  }
  return out;
}

inline double trapezoid(const std::vector<double>& x) {
  if (x.size() < 2) return x.empty() ? 0.0 : x[0];
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) area += 0.5 * (x[i] + x[i + 1]);
  return area;
}

}  // namespace detail

// Per-repetition capacity metrics relative to repetition 0. The smoothed
// running mean feeds AUC-loss and the plateau ratio; RAUC uses the raw
// running mean. sigma defaults to 0.01 * L.
inline std::vector<RepetitionMetrics> plasticity_degradation(
    const std::vector<RepetitionTrace>& traces, double sigma = -1.0) {
  if (traces.size() < 2)
    throw MetricError("plasticity_degradation needs at least 2 repetitions");
  const std::size_t L = traces[0].rewards.size();
  if (L < 2) throw MetricError("repetition traces too short");
  for (const RepetitionTrace& t : traces)
    if (t.rewards.size() != L)
      throw MetricError("repetition traces must have equal length");
  if (sigma < 0.0) sigma = 0.01 * static_cast<double>(L);

  std::vector<double> auc(traces.size()), plateau(traces.size()), raw_auc(traces.size());
  for (std::size_t j = 0; j < traces.size(); ++j) {
    const auto smooth_bar =
        detail::cumulative_average(detail::gaussian_smooth(traces[j].rewards, sigma));
    const auto raw_bar = detail::cumulative_average(traces[j].rewards);
    auc[j] = detail::trapezoid(smooth_bar);
    plateau[j] = smooth_bar.back();
    raw_auc[j] = detail::trapezoid(raw_bar);
  }
  if (auc[0] == 0.0 || plateau[0] == 0.0 || raw_auc[0] == 0.0)
    throw MetricError("baseline repetition has zero AUC or plateau");

  std::vector<RepetitionMetrics> out(traces.size());
  for (std::size_t j = 0; j < traces.size(); ++j) {
    out[j].repetition = traces[j].repetition;
    out[j].auc_loss = 1.0 - auc[j] / auc[0];
    out[j].fpr = plateau[j] / plateau[0];
    out[j].rauc = raw_auc[j] / raw_auc[0];
  }
  return out;
}

// Sequence-level aggregation: mean over repetitions j >= 1 of each metric,
// already averaged over whatever tasks/seeds the caller pooled.
struct PlasticitySummary {
  double auc_loss = 0.0;
  double fpr = 0.0;
  double rauc = 0.0;
  int count = 0;
};

inline PlasticitySummary summarize_plasticity(
    const std::vector<std::vector<RepetitionMetrics>>& per_task) {
  PlasticitySummary sum;
  for (const auto& reps : per_task)
    for (const RepetitionMetrics& m : reps) {
      if (m.repetition == 0) continue;
      sum.auc_loss += m.auc_loss;
      sum.fpr += m.fpr;
      sum.rauc += m.rauc;
      ++sum.count;
    }
  if (sum.count > 0) {
    sum.auc_loss /= sum.count;
    sum.fpr /= sum.count;
    sum.rauc /= sum.count;
  }
  return sum;
}

}  // namespace kitchen
