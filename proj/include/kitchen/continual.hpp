#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "kitchen/net.hpp"
#include "kitchen/observation.hpp"
#include "kitchen/rng.hpp"
#include "kitchen/step.hpp"

namespace kitchen {

enum class CLMethod { FT, L2, EWC, OnlineEWC, MAS };

inline CLMethod parse_cl_method(const std::string& s) {
  if (s == "ft") return CLMethod::FT;
  if (s == "l2") return CLMethod::L2;
  if (s == "ewc") return CLMethod::EWC;
  if (s == "online_ewc") return CLMethod::OnlineEWC;
  if (s == "mas") return CLMethod::MAS;
  throw Error("unknown continual-learning method '" + s + "'");
}

inline std::string cl_method_name(CLMethod m) {
  switch (m) {
    case CLMethod::FT: return "ft";
    case CLMethod::L2: return "l2";
    case CLMethod::EWC: return "ewc";
    case CLMethod::OnlineEWC: return "online_ewc";
    case CLMethod::MAS: return "mas";
  }
  return "?";
}

inline double default_cl_lambda(CLMethod m) {
  switch (m) {
    case CLMethod::FT: return 0.0;
    case CLMethod::L2: return 1e7;
    case CLMethod::EWC: return 1e11;
    case CLMethod::OnlineEWC: return 1e11;
    case CLMethod::MAS: return 1e9;
  }
  return 0.0;
}

// Anchors are parameter snapshots taken at task boundaries; importances are
// the per-parameter weights (Fisher diagonal or MAS sensitivities). EWC
// accumulates one pair per task, the online variant folds into a single
// running pair, L2 keeps only the latest anchor, MAS keeps one accumulated
// importance vector. Before the first consolidation the penalty is zero.
template <typename S>
struct CLState {
  CLMethod method = CLMethod::FT;
  double lambda = 0.0;
  std::vector<VecX<S>> anchors;
  std::vector<VecX<S>> importances;
  double online_decay = 0.9;
  int fisher_episodes = 5;
  int fisher_steps = 500;
  bool regularize_critic = false;
  bool regularize_heads = false;
};

template <typename S>
CLState<S> make_cl_state(CLMethod method, double lambda = -1.0) {
  CLState<S> cl;
  cl.method = method;
  cl.lambda = lambda >= 0.0 ? lambda : default_cl_lambda(method);
  return cl;
}

// 1 for parameters the penalty may touch. Actor trunk is always in; the
// critic trunk and the output heads join only when their flags are set.
template <typename S>
VecX<S> penalty_mask(const Net<S>& net, const CLState<S>& cl) {
  VecX<S> mask = VecX<S>::Zero(net.n_params());
  for (const TensorSpec& t : net.tensors()) {
    bool in = false;
    switch (t.group) {
      case ParamGroup::ActorTrunk: in = true; break;
      case ParamGroup::CriticTrunk: in = cl.regularize_critic; break;
      case ParamGroup::ActorHead: in = cl.regularize_heads; break;
      case ParamGroup::CriticHead:
        in = cl.regularize_heads && cl.regularize_critic;
        break;
    }
    if (in) mask.segment(t.offset, t.size()).setOnes();
  }
  return mask;
}

template <typename S>
S cl_penalty(const Net<S>& net, const VecX<S>& params, const CLState<S>& cl) {
  if (cl.method == CLMethod::FT || cl.anchors.empty()) return S(0);
  const VecX<S> mask = penalty_mask(net, cl);
  const S half_lambda = static_cast<S>(cl.lambda) / S(2);
  S penalty = S(0);
  if (cl.method == CLMethod::L2) {
    const VecX<S> d = params - cl.anchors.back();
    penalty = half_lambda * (mask.array() * d.array().square()).sum();
  } else {
    for (std::size_t k = 0; k < cl.anchors.size(); ++k) {
      const VecX<S> d = params - cl.anchors[k];
      penalty += half_lambda *
                 (mask.array() * cl.importances[k].array() * d.array().square()).sum();
    }
  }
  return penalty;
}

template <typename S>
void cl_penalty_grad(const Net<S>& net, const VecX<S>& params, const CLState<S>& cl,
                     VecX<S>& grad) {
  if (cl.method == CLMethod::FT || cl.anchors.empty()) return;
  const VecX<S> mask = penalty_mask(net, cl);
  const S lambda = static_cast<S>(cl.lambda);
  if (cl.method == CLMethod::L2) {
    grad.array() += lambda * mask.array() * (params - cl.anchors.back()).array();
  } else {
    for (std::size_t k = 0; k < cl.anchors.size(); ++k)
      grad.array() += lambda * mask.array() * cl.importances[k].array() *
                      (params - cl.anchors[k]).array();
  }
}

// Diagonal Fisher estimate: mean squared gradient of the log-probability of
// an action sampled from the current policy, one sample per state.
template <typename S>
VecX<S> fisher_diag(const Net<S>& net, const VecX<S>& params, const MatX<S>& states,
                    int task, Rng& rng) {
  VecX<S> fisher = VecX<S>::Zero(net.n_params());
  if (states.rows() == 0) return fisher;
  MatX<S> row(1, states.cols());
  for (Eigen::Index i = 0; i < states.rows(); ++i) {
    row = states.row(i);
    const auto fwd = net.forward(params, row, task);
    const MatX<S> logp = log_softmax_rows<S>(fwd.logits);
    // Sample from the categorical via inverse CDF.
    const double u = rng.uniform01();
    double acc = 0.0;
    int action = kNumActions - 1;
    for (int a = 0; a < kNumActions; ++a) {
      acc += std::exp(static_cast<double>(logp(0, a)));
      if (u < acc) {
        action = a;
        break;
      }
    }
    MatX<S> dlogits = -logp.array().exp().matrix();
    dlogits(0, action) += S(1);
    const VecX<S> g = net.backward(params, row, fwd, dlogits, VecX<S>::Zero(1));
    fisher.array() += g.array().square();
  }
  fisher /= static_cast<S>(states.rows());
  return fisher;
}

// MAS importance: mean absolute gradient of the squared L2 norm of the
// policy logits with respect to each parameter.
template <typename S>
VecX<S> mas_importance(const Net<S>& net, const VecX<S>& params,
                       const MatX<S>& states, int task) {
  VecX<S> omega = VecX<S>::Zero(net.n_params());
  if (states.rows() == 0) return omega;
  MatX<S> row(1, states.cols());
  for (Eigen::Index i = 0; i < states.rows(); ++i) {
    row = states.row(i);
    const auto fwd = net.forward(params, row, task);
    const MatX<S> dlogits = S(2) * fwd.logits;
    const VecX<S> g = net.backward(params, row, fwd, dlogits, VecX<S>::Zero(1));
    omega.array() += g.array().abs();
  }
  omega /= static_cast<S>(states.rows());
  return omega;
}

// Plays sampled-policy episodes on the layout and returns every per-agent
// observation visited, capped at `step_cap` steps per episode.
template <typename S>
MatX<S> collect_policy_states(const Net<S>& net, const VecX<S>& params,
                              std::shared_ptr<const Layout> layout,
                              const ObsSpec& spec, int episodes, int step_cap,
                              int task, Rng& rng) {
  const int steps = std::min(spec.horizon, step_cap);
  MatX<S> states(static_cast<Eigen::Index>(episodes) * steps * 2, spec.size());
  std::vector<float> buf(static_cast<std::size_t>(spec.size()));
  Eigen::Index next_row = 0;
  MatX<S> obs_pair(2, spec.size());
  for (int ep = 0; ep < episodes; ++ep) {
    EnvState state = reset(layout);
    for (int t = 0; t < steps; ++t) {
      for (int a = 0; a < 2; ++a) {
        encode_observation_into(state, a, spec, buf);
        for (int j = 0; j < spec.size(); ++j)
          obs_pair(a, j) = static_cast<S>(buf[static_cast<std::size_t>(j)]);
        states.row(next_row++) = obs_pair.row(a);
      }
      const auto fwd = net.forward(params, obs_pair, task);
      const MatX<S> logp = log_softmax_rows<S>(fwd.logits);
      std::array<Action, 2> acts;
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
      step_in_place(state, acts, 0.0);
    }
  }
  return states;
}

// Task-boundary consolidation on the just-finished task.
template <typename S>
void consolidate(const Net<S>& net, const VecX<S>& params,
                 std::shared_ptr<const Layout> layout, const ObsSpec& spec,
                 CLState<S>& cl, int task, std::uint64_t seed) {
  switch (cl.method) {
    case CLMethod::FT:
      return;
    case CLMethod::L2:
      cl.anchors.assign(1, params);
      return;
    case CLMethod::EWC: {
      Rng rng(seed);
      const MatX<S> states = collect_policy_states(
          net, params, layout, spec, cl.fisher_episodes, cl.fisher_steps, task, rng);
      cl.anchors.push_back(params);
      cl.importances.push_back(fisher_diag(net, params, states, task, rng));
      return;
    }
    case CLMethod::OnlineEWC: {
      Rng rng(seed);
      const MatX<S> states = collect_policy_states(
          net, params, layout, spec, cl.fisher_episodes, cl.fisher_steps, task, rng);
      VecX<S> fresh = fisher_diag(net, params, states, task, rng);
      if (!cl.importances.empty())
        fresh += static_cast<S>(cl.online_decay) * cl.importances.back();
      cl.anchors.assign(1, params);
      cl.importances.assign(1, std::move(fresh));
      return;
    }
    case CLMethod::MAS: {
      Rng rng(seed);
      const MatX<S> states = collect_policy_states(
          net, params, layout, spec, cl.fisher_episodes, cl.fisher_steps, task, rng);
      VecX<S> fresh = mas_importance(net, params, states, task);
      if (!cl.importances.empty()) fresh += cl.importances.back();
      cl.anchors.assign(1, params);
      cl.importances.assign(1, std::move(fresh));
      return;
    }
  }
}

}  // namespace kitchen
