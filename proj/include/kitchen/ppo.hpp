#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "kitchen/continual.hpp"
#include "kitchen/net.hpp"
#include "kitchen/rng.hpp"

namespace kitchen {

struct NumericError : Error {
  using Error::Error;
};

struct PPOConfig {
  double lr = 3e-4;
  bool anneal_lr = true;
  double gamma = 0.99;
  double gae_lambda = 0.957;
  double clip_eps = 0.2;
  double entropy_coef = 0.01;
  double value_coef = 0.5;
  double max_grad_norm = 0.5;
  int epochs = 8;
  int minibatches = 8;
  long long steps_per_task = 200000;
  int n_envs = 16;
  int rollout_steps = 128;
};

template <typename S>
struct AdamState {
  VecX<S> m, v;
  long long t = 0;
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-5;

  void ensure(long n) {
    if (m.size() != n) {
      m = VecX<S>::Zero(n);
      v = VecX<S>::Zero(n);
      t = 0;
    }
  }

  void step(VecX<S>& params, const VecX<S>& grad, double lr) {
    ensure(params.size());
    ++t;
    m = static_cast<S>(beta1) * m + static_cast<S>(1.0 - beta1) * grad;
    v.array() = static_cast<S>(beta2) * v.array() +
                static_cast<S>(1.0 - beta2) * grad.array().square();
    const S corr1 = static_cast<S>(1.0 - std::pow(beta1, static_cast<double>(t)));
    const S corr2 = static_cast<S>(1.0 - std::pow(beta2, static_cast<double>(t)));
    params.array() -= static_cast<S>(lr) * (m.array() / corr1) /
                      ((v.array() / corr2).sqrt() + static_cast<S>(eps));
  }
};

// One optimization batch: rows are (step, env, agent) samples.
template <typename S>
struct SampleBatch {
  MatX<S> obs;
  Eigen::VectorXi actions;
  VecX<S> old_log_probs;
  VecX<S> advantages;
  VecX<S> targets;

  Eigen::Index rows() const { return obs.rows(); }
};

struct LossDiag {
  double total = 0.0;
  double policy = 0.0;
  double value = 0.0;
  double entropy = 0.0;
  double cl_penalty = 0.0;
  double grad_norm = 0.0;
};

// Clipped-surrogate PPO loss plus value loss, entropy bonus, and the active
// continual-learning penalty, with its exact gradient. Advantages are taken
// as given (normalization happens per minibatch in ppo_update).
template <typename S>
std::pair<LossDiag, VecX<S>> composite_loss_grad(const Net<S>& net,
                                                 const VecX<S>& params,
                                                 const SampleBatch<S>& batch,
                                                 int task, const PPOConfig& cfg,
                                                 const CLState<S>& cl) {
  const Eigen::Index n = batch.rows();
  const S inv_n = S(1) / static_cast<S>(n);
  const S eps = static_cast<S>(cfg.clip_eps);

  const auto fwd = net.forward(params, batch.obs, task);
  const MatX<S> logp = log_softmax_rows<S>(fwd.logits);
  const MatX<S> probs = logp.array().exp().matrix();
  const VecX<S> ent = entropy_rows<S>(logp);

  VecX<S> logp_a(n);
  for (Eigen::Index i = 0; i < n; ++i) logp_a(i) = logp(i, batch.actions(i));

  const VecX<S> ratio = (logp_a - batch.old_log_probs).array().exp().matrix();

  S policy_loss = S(0);
  VecX<S> dlogp_a = VecX<S>::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const S r = ratio(i);
    const S a = batch.advantages(i);
    const S clipped = std::clamp(r, S(1) - eps, S(1) + eps);
    const S u1 = r * a;
    const S u2 = clipped * a;
    policy_loss += -std::min(u1, u2);
    // Gradient flows through the unclipped branch whenever it attains the
    // min (ties included); the clipped branch is flat in that regime.
    if (u1 <= u2) dlogp_a(i) = -a * r * inv_n;
  }
  policy_loss *= inv_n;

  const VecX<S> vdiff = fwd.values - batch.targets;
  const S value_loss = vdiff.array().square().mean();
  const S entropy_mean = ent.mean();

  // d(loss)/d(logits): policy term through log-softmax plus entropy bonus.
  MatX<S> dlogits(n, kNumActions);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int j = 0; j < kNumActions; ++j) {
      const S indicator = (j == batch.actions(i)) ? S(1) : S(0);
      const S d_policy = dlogp_a(i) * (indicator - probs(i, j));
      const S d_entropy = -probs(i, j) * (logp(i, j) + ent(i));
      dlogits(i, j) =
          d_policy - static_cast<S>(cfg.entropy_coef) * inv_n * d_entropy;
    }
  }
  const VecX<S> dvalues =
      (S(2) * static_cast<S>(cfg.value_coef) * inv_n) * vdiff;

  VecX<S> grad = net.backward(params, batch.obs, fwd, dlogits, dvalues);
  cl_penalty_grad(net, params, cl, grad);
  const S penalty = cl_penalty(net, params, cl);

  LossDiag diag;
  diag.policy = static_cast<double>(policy_loss);
  diag.value = static_cast<double>(value_loss);
  diag.entropy = static_cast<double>(entropy_mean);
  diag.cl_penalty = static_cast<double>(penalty);
  diag.total = diag.policy + cfg.value_coef * diag.value -
               cfg.entropy_coef * diag.entropy + diag.cl_penalty;
  return {diag, std::move(grad)};
}

// Loss value alone, for finite-difference checks.
template <typename S>
S composite_loss(const Net<S>& net, const VecX<S>& params,
                 const SampleBatch<S>& batch, int task, const PPOConfig& cfg,
                 const CLState<S>& cl) {
  const Eigen::Index n = batch.rows();
  const S inv_n = S(1) / static_cast<S>(n);
  const S eps = static_cast<S>(cfg.clip_eps);

  const auto fwd = net.forward(params, batch.obs, task);
  const MatX<S> logp = log_softmax_rows<S>(fwd.logits);
  const VecX<S> ent = entropy_rows<S>(logp);

  S policy_loss = S(0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const S r = std::exp(logp(i, batch.actions(i)) - batch.old_log_probs(i));
    const S clipped = std::clamp(r, S(1) - eps, S(1) + eps);
    policy_loss += -std::min(r * batch.advantages(i), clipped * batch.advantages(i));
  }
  policy_loss *= inv_n;

  const S value_loss = (fwd.values - batch.targets).array().square().mean();
  return policy_loss + static_cast<S>(cfg.value_coef) * value_loss -
         static_cast<S>(cfg.entropy_coef) * ent.mean() +
         cl_penalty(net, params, cl);
}

struct UpdateDiag {
  LossDiag loss;       // means over minibatches
  double lr = 0.0;
  int minibatch_count = 0;
};

// 8 epochs x 8 minibatches of clipped-surrogate updates with per-minibatch
// advantage normalization, global gradient clipping, and Adam. Non-finite
// losses abort before any parameter change of the offending minibatch.
template <typename S>
UpdateDiag ppo_update(const Net<S>& net, VecX<S>& params, AdamState<S>& adam,
                      const SampleBatch<S>& samples, int task, double lr_now,
                      const PPOConfig& cfg, const CLState<S>& cl, Rng& rng) {
  const Eigen::Index n = samples.rows();
  if (n % cfg.minibatches != 0)
    throw Error("ppo_update: batch not divisible into minibatches");
  const Eigen::Index mb_size = n / cfg.minibatches;

  std::vector<int> perm(static_cast<std::size_t>(n));
  UpdateDiag diag;
  diag.lr = lr_now;

  SampleBatch<S> mb;
  mb.obs.resize(mb_size, samples.obs.cols());
  mb.actions.resize(mb_size);
  mb.old_log_probs.resize(mb_size);
  mb.advantages.resize(mb_size);
  mb.targets.resize(mb_size);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (Eigen::Index i = 0; i < n; ++i) perm[i] = static_cast<int>(i);
    for (Eigen::Index i = n - 1; i > 0; --i) {
      const auto j = static_cast<Eigen::Index>(rng.uniform_u64(0, static_cast<std::uint64_t>(i)));
      std::swap(perm[i], perm[j]);
    }

    for (int b = 0; b < cfg.minibatches; ++b) {
      for (Eigen::Index i = 0; i < mb_size; ++i) {
        const int src = perm[static_cast<std::size_t>(b) * mb_size + i];
        mb.obs.row(i) = samples.obs.row(src);
        mb.actions(i) = samples.actions(src);
        mb.old_log_probs(i) = samples.old_log_probs(src);
        mb.advantages(i) = samples.advantages(src);
        mb.targets(i) = samples.targets(src);
      }
      const S mean = mb.advantages.mean();
      const S sd = std::sqrt((mb.advantages.array() - mean).square().mean());
      mb.advantages = ((mb.advantages.array() - mean) / (sd + S(1e-8))).matrix();

      auto [loss, grad] = composite_loss_grad(net, params, mb, task, cfg, cl);
      if (!std::isfinite(loss.total))
        throw NumericError("non-finite PPO loss (policy=" +
                           std::to_string(loss.policy) +
                           ", value=" + std::to_string(loss.value) +
                           ", penalty=" + std::to_string(loss.cl_penalty) + ")");

      const double gnorm = std::sqrt(static_cast<double>(grad.squaredNorm()));
      if (!std::isfinite(gnorm)) throw NumericError("non-finite PPO gradient");
      if (gnorm > cfg.max_grad_norm && gnorm > 0.0)
        grad *= static_cast<S>(cfg.max_grad_norm / gnorm);

      adam.step(params, grad, lr_now);

      diag.loss.total += loss.total;
      diag.loss.policy += loss.policy;
      diag.loss.value += loss.value;
      diag.loss.entropy += loss.entropy;
      diag.loss.cl_penalty += loss.cl_penalty;
      diag.loss.grad_norm += gnorm;
      ++diag.minibatch_count;
    }
  }

  const double k = std::max(1, diag.minibatch_count);
  diag.loss.total /= k;
  diag.loss.policy /= k;
  diag.loss.value /= k;
  diag.loss.entropy /= k;
  diag.loss.cl_penalty /= k;
  diag.loss.grad_norm /= k;
  return diag;
}

}  // namespace kitchen
