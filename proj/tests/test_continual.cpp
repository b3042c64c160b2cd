#include <catch2/catch.hpp>

#include "kitchen/continual.hpp"
#include "kitchen/io.hpp"

using namespace kitchen;

namespace {

NetConfig small_config(int obs_dim = 6) {
  NetConfig cfg;
  cfg.obs_dim = obs_dim;
  cfg.hidden_layers = 2;
  cfg.width = 8;
  cfg.activation = Activation::Tanh;
  cfg.multihead = true;
  cfg.num_tasks = 2;
  return cfg;
}

}  // namespace

TEST_CASE("method parsing and default coefficients") {
  REQUIRE(parse_cl_method("ewc") == CLMethod::EWC);
  REQUIRE(parse_cl_method("online_ewc") == CLMethod::OnlineEWC);
  REQUIRE_THROWS_AS(parse_cl_method("packnet"), Error);
  REQUIRE(default_cl_lambda(CLMethod::EWC) == Approx(1e11));
  REQUIRE(default_cl_lambda(CLMethod::MAS) == Approx(1e9));
  REQUIRE(default_cl_lambda(CLMethod::L2) == Approx(1e7));
  REQUIRE(make_cl_state<double>(CLMethod::EWC).lambda == Approx(1e11));
  REQUIRE(make_cl_state<double>(CLMethod::EWC, 5.0).lambda == Approx(5.0));
}

TEST_CASE("penalty mask follows the critic/head flags") {
  const Net<double> net(small_config());
  CLState<double> cl = make_cl_state<double>(CLMethod::L2, 1.0);

  auto group_all = [&](const VecX<double>& mask, ParamGroup g) {
    double lo = 1.0, hi = 0.0;
    for (const TensorSpec& t : net.tensors()) {
      if (t.group != g) continue;
      lo = std::min(lo, mask.segment(t.offset, t.size()).minCoeff());
      hi = std::max(hi, mask.segment(t.offset, t.size()).maxCoeff());
    }
    return std::pair{lo, hi};
  };

  VecX<double> mask = penalty_mask(net, cl);
  REQUIRE(group_all(mask, ParamGroup::ActorTrunk) == std::pair{1.0, 1.0});
  REQUIRE(group_all(mask, ParamGroup::CriticTrunk) == std::pair{0.0, 0.0});
  REQUIRE(group_all(mask, ParamGroup::ActorHead) == std::pair{0.0, 0.0});

  cl.regularize_critic = true;
  mask = penalty_mask(net, cl);
  REQUIRE(group_all(mask, ParamGroup::CriticTrunk) == std::pair{1.0, 1.0});
  REQUIRE(group_all(mask, ParamGroup::ActorHead) == std::pair{0.0, 0.0});

  cl.regularize_heads = true;
  mask = penalty_mask(net, cl);
  REQUIRE(group_all(mask, ParamGroup::ActorHead) == std::pair{1.0, 1.0});
  REQUIRE(group_all(mask, ParamGroup::CriticHead) == std::pair{1.0, 1.0});
}

TEST_CASE("fisher vanishes wherever the log-prob gradient vanishes") {
  // Zeroed actor head weights cut the gradient path into the trunk, so every
  // trunk parameter (and all critic parameters) must carry zero Fisher mass.
  const Net<double> net(small_config());
  Rng rng(40);
  VecX<double> params = net.init_params(rng);
  for (std::size_t i = 0; i < net.tensors().size(); ++i)
    if (net.tensors()[i].group == ParamGroup::ActorHead)
      net.mat(params, static_cast<int>(i)).setZero();

  MatX<double> states = MatX<double>::Random(32, 6);
  Rng sample_rng(41);
  const VecX<double> fisher = fisher_diag(net, params, states, 0, sample_rng);
  for (const TensorSpec& t : net.tensors()) {
    if (t.group == ParamGroup::ActorHead) continue;
    REQUIRE(fisher.segment(t.offset, t.size()).cwiseAbs().maxCoeff() ==
            Approx(0.0).margin(1e-18));
  }

  // No states at all: identically zero.
  const MatX<double> empty(0, 6);
  Rng r2(42);
  REQUIRE(fisher_diag(net, params, empty, 0, r2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("fisher matches the analytic squared-score expectation on a bandit") {
  // Two fixed states, many repetitions: the empirical mean squared gradient
  // converges to sum_a pi(a) (d log pi(a) / d theta)^2 averaged over states.
  const Net<double> net(small_config());
  Rng rng(50);
  const VecX<double> params = net.init_params(rng);

  MatX<double> two(2, 6);
  Rng obs_rng(51);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 6; ++j) two(i, j) = obs_rng.gaussian();

  // Analytic expectation via per-action backward passes.
  VecX<double> expected = VecX<double>::Zero(net.n_params());
  for (int i = 0; i < 2; ++i) {
    const MatX<double> row = two.row(i);
    const auto fwd = net.forward(params, row, 0);
    const auto logp = log_softmax_rows<double>(fwd.logits);
    for (int a = 0; a < kNumActions; ++a) {
      MatX<double> dlogits = -logp.array().exp().matrix();
      dlogits(0, a) += 1.0;
      const VecX<double> g =
          net.backward(params, row, fwd, dlogits, VecX<double>::Zero(1));
      expected.array() += std::exp(logp(0, a)) * g.array().square() / 2.0;
    }
  }

  const int reps = 3000;
  MatX<double> states(2 * reps, 6);
  for (int k = 0; k < reps; ++k) {
    states.row(2 * k) = two.row(0);
    states.row(2 * k + 1) = two.row(1);
  }
  Rng sample_rng(52);
  const VecX<double> fisher = fisher_diag(net, params, states, 0, sample_rng);

  // Monte-Carlo tolerance on the aggregate.
  REQUIRE(fisher.sum() == Approx(expected.sum()).epsilon(0.05));
  // And elementwise on the largest entries.
  for (long k = 0; k < net.n_params(); ++k)
    if (expected(k) > 0.1 * expected.maxCoeff())
      REQUIRE(fisher(k) == Approx(expected(k)).epsilon(0.25));
}

TEST_CASE("consolidate: L2 snapshots only the anchor") {
  const Net<float> net(small_config(4 * 5 * kObsChannels));
  Rng rng(60);
  const VecX<float> params = net.init_params(rng);
  auto layout = std::make_shared<const Layout>(
      parse_layout("WWPWW\nOA AB\nW   W\nWWXWW"));
  ObsSpec spec{4, 5, 40};
  CLState<float> cl = make_cl_state<float>(CLMethod::L2);
  consolidate(net, params, layout, spec, cl, 0, 7);
  REQUIRE(cl.anchors.size() == 1);
  REQUIRE(cl.importances.empty());
  REQUIRE((cl.anchors[0] - params).cwiseAbs().maxCoeff() == 0.0f);
}

TEST_CASE("consolidate: EWC appends per-task pairs, online EWC folds") {
  const Net<float> net(small_config(4 * 5 * kObsChannels));
  Rng rng(61);
  const VecX<float> params = net.init_params(rng);
  auto layout = std::make_shared<const Layout>(
      parse_layout("WWPWW\nOA AB\nW   W\nWWXWW"));
  ObsSpec spec{4, 5, 30};

  CLState<float> ewc = make_cl_state<float>(CLMethod::EWC);
  ewc.fisher_episodes = 2;
  ewc.fisher_steps = 25;
  consolidate(net, params, layout, spec, ewc, 0, 7);
  consolidate(net, params, layout, spec, ewc, 1, 8);
  REQUIRE(ewc.anchors.size() == 2);
  REQUIRE(ewc.importances.size() == 2);
  REQUIRE(ewc.importances[0].minCoeff() >= 0.0f);

  CLState<float> online = make_cl_state<float>(CLMethod::OnlineEWC);
  online.fisher_episodes = 2;
  online.fisher_steps = 25;
  consolidate(net, params, layout, spec, online, 0, 7);
  const VecX<float> f1 = online.importances[0];
  consolidate(net, params, layout, spec, online, 0, 7);
  REQUIRE(online.anchors.size() == 1);
  REQUIRE(online.importances.size() == 1);
  // Same seed, same policy: F_new = f1, so the fold gives 0.9*f1 + f1.
  const VecX<float> expected = 1.9f * f1;
  REQUIRE((online.importances[0] - expected).cwiseAbs().maxCoeff() ==
          Approx(0.0f).margin(1e-6));
}

TEST_CASE("consolidate: MAS accumulates importances across tasks") {
  const Net<float> net(small_config(4 * 5 * kObsChannels));
  Rng rng(62);
  const VecX<float> params = net.init_params(rng);
  auto layout = std::make_shared<const Layout>(
      parse_layout("WWPWW\nOA AB\nW   W\nWWXWW"));
  ObsSpec spec{4, 5, 30};
  CLState<float> mas = make_cl_state<float>(CLMethod::MAS);
  mas.fisher_episodes = 2;
  mas.fisher_steps = 25;
  consolidate(net, params, layout, spec, mas, 0, 7);
  const VecX<float> o1 = mas.importances[0];
  REQUIRE(o1.minCoeff() >= 0.0f);
  REQUIRE(o1.maxCoeff() > 0.0f);
  consolidate(net, params, layout, spec, mas, 0, 7);
  const VecX<float> expected = 2.0f * o1;
  REQUIRE((mas.importances[0] - expected).cwiseAbs().maxCoeff() ==
          Approx(0.0f).margin(1e-6));
  REQUIRE(mas.anchors.size() == 1);
}

TEST_CASE("collected states have the right count and obs width") {
  const Net<float> net(small_config(4 * 5 * kObsChannels));
  Rng rng(63);
  const VecX<float> params = net.init_params(rng);
  auto layout = std::make_shared<const Layout>(
      parse_layout("WWPWW\nOA AB\nW   W\nWWXWW"));
  ObsSpec spec{4, 5, 100};
  Rng stream(9);
  const MatX<float> states =
      collect_policy_states(net, params, layout, spec, 3, 50, 0, stream);
  REQUIRE(states.rows() == 3 * 50 * 2);
  REQUIRE(states.cols() == spec.size());
}
