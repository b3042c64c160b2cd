#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "kitchen/layout.hpp"
#include "kitchen/rng.hpp"

namespace kitchen {

template <typename S>
using MatX = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename S>
using VecX = Eigen::Matrix<S, Eigen::Dynamic, 1>;

enum class Activation { Relu, Tanh };

inline Activation parse_activation(const std::string& s) {
  if (s == "relu") return Activation::Relu;
  if (s == "tanh") return Activation::Tanh;
  throw Error("unknown activation '" + s + "'");
}

struct NetConfig {
  int obs_dim = 0;
  int hidden_layers = 2;
  int width = 128;
  Activation activation = Activation::Relu;
  bool layer_norm = false;
  bool multihead = true;
  bool task_onehot = false;
  int num_tasks = 1;
  bool shared_backbone = false;

  int actor_out() const { return multihead ? 6 * num_tasks : 6; }
  int critic_out() const { return multihead ? num_tasks : 1; }
  int head_in() const { return width + (task_onehot ? num_tasks : 0); }
};

enum class ParamGroup : std::uint8_t { ActorTrunk, ActorHead, CriticTrunk, CriticHead };
enum class InitKind : std::uint8_t { Orthogonal, Zero, One };

struct TensorSpec {
  std::string name;
  int rows = 0, cols = 0;
  long offset = 0;
  ParamGroup group = ParamGroup::ActorTrunk;
  InitKind init = InitKind::Zero;
  double gain = 1.0;

  long size() const { return static_cast<long>(rows) * cols; }
};

namespace detail {

inline Eigen::MatrixXd orthogonal_matrix(int rows, int cols, double gain, Rng& rng) {
  const bool tall = rows >= cols;
  const int r = tall ? rows : cols;
  const int c = tall ? cols : rows;
  Eigen::MatrixXd g(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) g(i, j) = rng.gaussian();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(r, c);
  const Eigen::MatrixXd& qrm = qr.matrixQR();
  for (int j = 0; j < c; ++j)
    if (qrm(j, j) < 0) q.col(j) = -q.col(j);
  q *= gain;
  if (tall) return q;
  return q.transpose();
}

}  // namespace detail

// Actor-critic MLP over flattened observations. Parameters live in one flat
// vector addressed through the schema, which keeps optimizer state, anchors,
// and importance weights uniform across methods. Hidden layers are
// Dense -> (LayerNorm) -> activation; heads are linear. With multihead the
// actor holds a 6-logit slice and the critic one value per task.
template <typename S>
class Net {
 public:
  using Mat = MatX<S>;
  using Vec = VecX<S>;

  explicit Net(NetConfig cfg) : cfg_(cfg) { build_schema(); }

  const NetConfig& config() const { return cfg_; }
  const std::vector<TensorSpec>& tensors() const { return tensors_; }
  long n_params() const { return n_params_; }

  Eigen::Map<const Mat> mat(const Vec& flat, int tensor) const {
    const TensorSpec& t = tensors_[tensor];
    return Eigen::Map<const Mat>(flat.data() + t.offset, t.rows, t.cols);
  }
  Eigen::Map<Mat> mat(Vec& flat, int tensor) const {
    const TensorSpec& t = tensors_[tensor];
    return Eigen::Map<Mat>(flat.data() + t.offset, t.rows, t.cols);
  }

  // Orthogonal weights (sqrt(2) hidden, 0.01 policy logits), zero biases.
  Vec init_params(Rng& rng) const {
    Vec flat = Vec::Zero(n_params_);
    for (std::size_t i = 0; i < tensors_.size(); ++i) {
      const TensorSpec& t = tensors_[i];
      switch (t.init) {
        case InitKind::Zero:
          break;
        case InitKind::One:
          mat(flat, static_cast<int>(i)).setOnes();
          break;
        case InitKind::Orthogonal: {
          const Eigen::MatrixXd w =
              detail::orthogonal_matrix(t.rows, t.cols, t.gain, rng);
          mat(flat, static_cast<int>(i)) = w.cast<S>();
          break;
        }
      }
    }
    return flat;
  }

  struct LayerCache {
    Mat z;        // pre-normalization pre-activation
    Mat xhat;     // normalized input (layer_norm only)
    Vec inv_std;  // per-row 1/sigma (layer_norm only)
    Mat a;        // post-activation output
  };

  struct Forward {
    Mat logits;  // N x 6, already sliced to the task head
    Vec values;  // N
    std::vector<LayerCache> actor_cache;
    std::vector<LayerCache> critic_cache;  // empty when backbone is shared
    Mat feat_actor;                        // N x head_in
    Mat feat_critic;
    int task = 0;
  };

  using ConstMatRef = Eigen::Ref<const Mat>;

  Forward forward(const Vec& flat, ConstMatRef obs, int task) const {
    if (obs.cols() != cfg_.obs_dim) throw Error("forward: obs width mismatch");
    if (task < 0 || task >= cfg_.num_tasks)
      throw Error("forward: task id " + std::to_string(task) + " out of range");

    Forward fwd;
    fwd.task = task;
    trunk_forward(flat, actor_trunk_start_, obs, fwd.actor_cache);
    fwd.feat_actor = with_task_onehot(fwd.actor_cache.back().a, task);
    if (cfg_.shared_backbone) {
      fwd.feat_critic = fwd.feat_actor;
    } else {
      trunk_forward(flat, critic_trunk_start_, obs, fwd.critic_cache);
      fwd.feat_critic = with_task_onehot(fwd.critic_cache.back().a, task);
    }

    const auto wa = mat(flat, actor_head_w_);
    const auto ba = mat(flat, actor_head_b_);
    const int acol = cfg_.multihead ? task * 6 : 0;
    fwd.logits.noalias() = fwd.feat_actor * wa.middleCols(acol, 6);
    fwd.logits.rowwise() += ba.middleCols(acol, 6).row(0);

    const auto wc = mat(flat, critic_head_w_);
    const auto bc = mat(flat, critic_head_b_);
    const int vcol = cfg_.multihead ? task : 0;
    fwd.values.noalias() = fwd.feat_critic * wc.col(vcol);
    fwd.values.array() += bc(0, vcol);
    return fwd;
  }

  // Backpropagates d(loss)/d(logits) and d(loss)/d(values) into a flat
  // gradient the same size as the parameters.
  Vec backward(const Vec& flat, ConstMatRef obs, const Forward& fwd,
               const Mat& dlogits, const Vec& dvalues) const {
    Vec grad = Vec::Zero(n_params_);

    const int acol = cfg_.multihead ? fwd.task * 6 : 0;
    const int vcol = cfg_.multihead ? fwd.task : 0;
    {
      auto gwa = grad_mat(grad, actor_head_w_);
      gwa.middleCols(acol, 6).noalias() = fwd.feat_actor.transpose() * dlogits;
      auto gba = grad_mat(grad, actor_head_b_);
      gba.middleCols(acol, 6).row(0) = dlogits.colwise().sum();
    }
    {
      auto gwc = grad_mat(grad, critic_head_w_);
      gwc.col(vcol).noalias() = fwd.feat_critic.transpose() * dvalues;
      auto gbc = grad_mat(grad, critic_head_b_);
      gbc(0, vcol) = dvalues.sum();
    }

    const auto wa = mat(flat, actor_head_w_);
    const auto wc = mat(flat, critic_head_w_);
    Mat dfeat_actor = dlogits * wa.middleCols(acol, 6).transpose();
    Mat dfeat_critic = dvalues * wc.col(vcol).transpose();

    if (cfg_.shared_backbone) {
      Mat da = dfeat_actor.leftCols(cfg_.width) + dfeat_critic.leftCols(cfg_.width);
      trunk_backward(flat, actor_trunk_start_, obs, fwd.actor_cache, std::move(da), grad);
    } else {
      trunk_backward(flat, actor_trunk_start_, obs, fwd.actor_cache,
                     dfeat_actor.leftCols(cfg_.width), grad);
      trunk_backward(flat, critic_trunk_start_, obs, fwd.critic_cache,
                     dfeat_critic.leftCols(cfg_.width), grad);
    }
    return grad;
  }

 private:
  static constexpr double kLnEps = 1e-5;

  Eigen::Map<Mat> grad_mat(Vec& grad, int tensor) const {
    const TensorSpec& t = tensors_[tensor];
    return Eigen::Map<Mat>(grad.data() + t.offset, t.rows, t.cols);
  }

  Mat with_task_onehot(const Mat& feat, int task) const {
    if (!cfg_.task_onehot) return feat;
    Mat out(feat.rows(), cfg_.head_in());
    out.leftCols(cfg_.width) = feat;
    out.rightCols(cfg_.num_tasks).setZero();
    out.col(cfg_.width + task).setOnes();
    return out;
  }

  void trunk_forward(const Vec& flat, int first_tensor, ConstMatRef obs,
                     std::vector<LayerCache>& cache) const {
    cache.clear();
    cache.resize(cfg_.hidden_layers);
    int tensor = first_tensor;
    for (int l = 0; l < cfg_.hidden_layers; ++l) {
      LayerCache& lc = cache[l];
      const auto w = mat(flat, tensor++);
      const auto b = mat(flat, tensor++);
      if (l == 0)
        lc.z.noalias() = obs * w;
      else
        lc.z.noalias() = cache[l - 1].a * w;
      lc.z.rowwise() += b.row(0);
      const Mat* y = &lc.z;
      if (cfg_.layer_norm) {
        const auto gamma = mat(flat, tensor++);
        const auto beta = mat(flat, tensor++);
        const Vec mean = lc.z.rowwise().mean();
        const Mat centered = lc.z.colwise() - mean;
        const Vec var = centered.array().square().rowwise().mean().matrix();
        lc.inv_std = (var.array() + static_cast<S>(kLnEps)).rsqrt().matrix();
        lc.xhat = (centered.array().colwise() * lc.inv_std.array()).matrix();
        Mat scaled = (lc.xhat.array().rowwise() * gamma.row(0).array()).matrix();
        scaled.rowwise() += beta.row(0);
        lc.a = apply_activation(scaled);
      } else {
        lc.a = apply_activation(*y);
      }
    }
  }

  Mat apply_activation(const Mat& y) const {
    if (cfg_.activation == Activation::Relu)
      return y.array().max(static_cast<S>(0)).matrix();
    return y.array().tanh().matrix();
  }

  void trunk_backward(const Vec& flat, int first_tensor, ConstMatRef obs,
                      const std::vector<LayerCache>& cache, Mat da, Vec& grad) const {
    // Walk tensor indices forward once so each layer knows its slots.
    std::vector<int> layer_tensor(cfg_.hidden_layers);
    int tensor = first_tensor;
    const int per_layer = cfg_.layer_norm ? 4 : 2;
    for (int l = 0; l < cfg_.hidden_layers; ++l) {
      layer_tensor[l] = tensor;
      tensor += per_layer;
    }

    for (int l = cfg_.hidden_layers - 1; l >= 0; --l) {
      const LayerCache& lc = cache[l];
      // Through the activation.
      Mat dy;
      if (cfg_.activation == Activation::Relu)
        dy = (lc.a.array() > static_cast<S>(0))
                 .select(da, Mat::Zero(da.rows(), da.cols()));
      else
        dy = (da.array() * (static_cast<S>(1) - lc.a.array().square())).matrix();

      Mat dz;
      if (cfg_.layer_norm) {
        const auto gamma = mat(flat, layer_tensor[l] + 2);
        auto ggamma = grad_mat(grad, layer_tensor[l] + 2);
        auto gbeta = grad_mat(grad, layer_tensor[l] + 3);
        ggamma.row(0) = (dy.array() * lc.xhat.array()).colwise().sum().matrix();
        gbeta.row(0) = dy.colwise().sum();
        const Mat dxhat = (dy.array().rowwise() * gamma.row(0).array()).matrix();
        const Vec m1 = dxhat.rowwise().mean();
        const Vec m2 =
            (dxhat.array() * lc.xhat.array()).rowwise().mean().matrix();
        dz = (((dxhat.colwise() - m1).array() -
               (lc.xhat.array().colwise() * m2.array()))
                  .colwise() *
              lc.inv_std.array())
                 .matrix();
      } else {
        dz = std::move(dy);
      }

      auto gw = grad_mat(grad, layer_tensor[l]);
      if (l == 0)
        gw.noalias() = obs.transpose() * dz;
      else
        gw.noalias() = cache[l - 1].a.transpose() * dz;
      auto gb = grad_mat(grad, layer_tensor[l] + 1);
      gb.row(0) = dz.colwise().sum();
      if (l > 0) {
        const auto w = mat(flat, layer_tensor[l]);
        da.noalias() = dz * w.transpose();
      }
    }
  }

  void add_tensor(std::string name, int rows, int cols, ParamGroup group,
                  InitKind init, double gain = 1.0) {
    TensorSpec t;
    t.name = std::move(name);
    t.rows = rows;
    t.cols = cols;
    t.offset = n_params_;
    t.group = group;
    t.init = init;
    t.gain = gain;
    n_params_ += t.size();
    tensors_.push_back(std::move(t));
  }

  void add_trunk(const std::string& prefix, ParamGroup group) {
    const double hidden_gain = std::sqrt(2.0);
    for (int l = 0; l < cfg_.hidden_layers; ++l) {
      const int in = (l == 0) ? cfg_.obs_dim : cfg_.width;
      add_tensor(prefix + ".w" + std::to_string(l), in, cfg_.width, group,
                 InitKind::Orthogonal, hidden_gain);
      add_tensor(prefix + ".b" + std::to_string(l), 1, cfg_.width, group,
                 InitKind::Zero);
      if (cfg_.layer_norm) {
        add_tensor(prefix + ".ln_g" + std::to_string(l), 1, cfg_.width, group,
                   InitKind::One);
        add_tensor(prefix + ".ln_b" + std::to_string(l), 1, cfg_.width, group,
                   InitKind::Zero);
      }
    }
  }

  void build_schema() {
    if (cfg_.obs_dim <= 0) throw Error("net: obs_dim must be positive");
    if (cfg_.hidden_layers != 2 && cfg_.hidden_layers != 3)
      throw Error("net: hidden_layers must be 2 or 3");
    if (cfg_.num_tasks < 1) throw Error("net: num_tasks must be >= 1");

    actor_trunk_start_ = 0;
    add_trunk("actor", ParamGroup::ActorTrunk);
    actor_head_w_ = static_cast<int>(tensors_.size());
    add_tensor("actor.head_w", cfg_.head_in(), cfg_.actor_out(),
               ParamGroup::ActorHead, InitKind::Orthogonal, 0.01);
    actor_head_b_ = static_cast<int>(tensors_.size());
    add_tensor("actor.head_b", 1, cfg_.actor_out(), ParamGroup::ActorHead,
               InitKind::Zero);

    if (cfg_.shared_backbone) {
      critic_trunk_start_ = actor_trunk_start_;
    } else {
      critic_trunk_start_ = static_cast<int>(tensors_.size());
      add_trunk("critic", ParamGroup::CriticTrunk);
    }
    critic_head_w_ = static_cast<int>(tensors_.size());
    add_tensor("critic.head_w", cfg_.head_in(), cfg_.critic_out(),
               ParamGroup::CriticHead, InitKind::Orthogonal, std::sqrt(2.0));
    critic_head_b_ = static_cast<int>(tensors_.size());
    add_tensor("critic.head_b", 1, cfg_.critic_out(), ParamGroup::CriticHead,
               InitKind::Zero);
  }

  NetConfig cfg_;
  std::vector<TensorSpec> tensors_;
  long n_params_ = 0;
  int actor_trunk_start_ = 0;
  int actor_head_w_ = 0, actor_head_b_ = 0;
  int critic_trunk_start_ = 0;
  int critic_head_w_ = 0, critic_head_b_ = 0;
};

// ---- Categorical over the 6 actions ----------------------------------------

template <typename S>
MatX<S> log_softmax_rows(const MatX<S>& logits) {
  MatX<S> out(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const S m = logits.row(i).maxCoeff();
    const S lse = m + std::log((logits.row(i).array() - m).exp().sum());
    out.row(i) = (logits.row(i).array() - lse).matrix();
  }
  return out;
}

template <typename S>
VecX<S> entropy_rows(const MatX<S>& log_probs) {
  VecX<S> h(log_probs.rows());
  for (Eigen::Index i = 0; i < log_probs.rows(); ++i)
    h(i) = -(log_probs.row(i).array().exp() * log_probs.row(i).array()).sum();
  return h;
}

// Distribution mode with lowest-index tie-break.
template <typename S>
int argmax_row(const MatX<S>& logits, Eigen::Index row) {
  int best = 0;
  for (int j = 1; j < logits.cols(); ++j)
    if (logits(row, j) > logits(row, best)) best = j;
  return best;
}

}  // namespace kitchen
