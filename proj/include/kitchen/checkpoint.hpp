#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "kitchen/continual.hpp"
#include "kitchen/net.hpp"
#include "kitchen/observation.hpp"
#include "kitchen/ppo.hpp"

namespace kitchen {

// Versioned binary checkpoint: 8-byte magic, a JSON header with the network
// configuration and array directory, then raw little-endian float32 blobs in
// directory order (params, adam.m, adam.v, anchors, importances).
struct Checkpoint {
  NetConfig net_cfg;
  ObsSpec spec;
  std::string method = "ft";
  double lambda = 0.0;
  VecX<float> params;
  AdamState<float> adam;
  CLState<float> cl;
  std::uint64_t seed = 0;
  long long global_update = 0;
  long long env_steps = 0;
  std::uint64_t shuffle_counter = 0;
  int trained_tasks = 0;
};

namespace detail {

inline constexpr char kCkptMagic[8] = {'K', 'C', 'H', 'N', 'C', 'K', 'P', '1'};

inline void write_blob(std::ofstream& out, const VecX<float>& v) {
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(float)));
}

inline VecX<float> read_blob(std::ifstream& in, long n) {
  VecX<float> v(n);
  in.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(n * sizeof(float)));
  if (!in) throw Error("checkpoint truncated");
  return v;
}

}  // namespace detail

inline void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c) {
  nlohmann::json h;
  h["net"] = {{"obs_dim", c.net_cfg.obs_dim},
              {"hidden_layers", c.net_cfg.hidden_layers},
              {"width", c.net_cfg.width},
              {"activation", c.net_cfg.activation == Activation::Relu ? "relu" : "tanh"},
              {"layer_norm", c.net_cfg.layer_norm},
              {"multihead", c.net_cfg.multihead},
              {"task_onehot", c.net_cfg.task_onehot},
              {"num_tasks", c.net_cfg.num_tasks},
              {"shared_backbone", c.net_cfg.shared_backbone}};
  h["obs"] = {{"pad_height", c.spec.pad_height},
              {"pad_width", c.spec.pad_width},
              {"horizon", c.spec.horizon}};
  h["method"] = c.method;
  h["lambda"] = c.lambda;
  h["cl"] = {{"online_decay", c.cl.online_decay},
             {"fisher_episodes", c.cl.fisher_episodes},
             {"fisher_steps", c.cl.fisher_steps},
             {"regularize_critic", c.cl.regularize_critic},
             {"regularize_heads", c.cl.regularize_heads},
             {"n_anchors", c.cl.anchors.size()},
             {"n_importances", c.cl.importances.size()}};
  h["n_params"] = c.params.size();
  h["adam"] = {{"t", c.adam.t}, {"present", c.adam.m.size() == c.params.size()}};
  h["seed"] = c.seed;
  h["global_update"] = c.global_update;
  h["env_steps"] = c.env_steps;
  h["shuffle_counter"] = c.shuffle_counter;
  h["trained_tasks"] = c.trained_tasks;

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write checkpoint: " + path.string());
  out.write(detail::kCkptMagic, sizeof detail::kCkptMagic);
  const std::string header = h.dump();
  const std::uint64_t len = header.size();
  out.write(reinterpret_cast<const char*>(&len), sizeof len);
  out.write(header.data(), static_cast<std::streamsize>(header.size()));

  detail::write_blob(out, c.params);
  if (c.adam.m.size() == c.params.size()) {
    detail::write_blob(out, c.adam.m);
    detail::write_blob(out, c.adam.v);
  }
  for (const auto& a : c.cl.anchors) detail::write_blob(out, a);
  for (const auto& f : c.cl.importances) detail::write_blob(out, f);
}

inline Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint: " + path.string());
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, detail::kCkptMagic, sizeof magic) != 0)
    throw Error("not a checkpoint file: " + path.string());
  std::uint64_t len = 0;
  in.read(reinterpret_cast<char*>(&len), sizeof len);
  std::string header(len, '\0');
  in.read(header.data(), static_cast<std::streamsize>(len));
  if (!in) throw Error("checkpoint header truncated");
  const nlohmann::json h = nlohmann::json::parse(header);

  Checkpoint c;
  const nlohmann::json& n = h.at("net");
  c.net_cfg.obs_dim = n.at("obs_dim").get<int>();
  c.net_cfg.hidden_layers = n.at("hidden_layers").get<int>();
  c.net_cfg.width = n.at("width").get<int>();
  c.net_cfg.activation = parse_activation(n.at("activation").get<std::string>());
  c.net_cfg.layer_norm = n.at("layer_norm").get<bool>();
  c.net_cfg.multihead = n.at("multihead").get<bool>();
  c.net_cfg.task_onehot = n.at("task_onehot").get<bool>();
  c.net_cfg.num_tasks = n.at("num_tasks").get<int>();
  c.net_cfg.shared_backbone = n.at("shared_backbone").get<bool>();
  const nlohmann::json& o = h.at("obs");
  c.spec.pad_height = o.at("pad_height").get<int>();
  c.spec.pad_width = o.at("pad_width").get<int>();
  c.spec.horizon = o.at("horizon").get<int>();
  c.method = h.at("method").get<std::string>();
  c.lambda = h.at("lambda").get<double>();
  const nlohmann::json& q = h.at("cl");
  c.cl.method = parse_cl_method(c.method);
  c.cl.lambda = c.lambda;
  c.cl.online_decay = q.at("online_decay").get<double>();
  c.cl.fisher_episodes = q.at("fisher_episodes").get<int>();
  c.cl.fisher_steps = q.at("fisher_steps").get<int>();
  c.cl.regularize_critic = q.at("regularize_critic").get<bool>();
  c.cl.regularize_heads = q.at("regularize_heads").get<bool>();
  const long n_params = h.at("n_params").get<long>();
  c.seed = h.at("seed").get<std::uint64_t>();
  c.global_update = h.at("global_update").get<long long>();
  c.env_steps = h.at("env_steps").get<long long>();
  c.shuffle_counter = h.at("shuffle_counter").get<std::uint64_t>();
  c.trained_tasks = h.at("trained_tasks").get<int>();

  c.params = detail::read_blob(in, n_params);
  c.adam.t = h.at("adam").at("t").get<long long>();
  if (h.at("adam").at("present").get<bool>()) {
    c.adam.m = detail::read_blob(in, n_params);
    c.adam.v = detail::read_blob(in, n_params);
  }
  const auto n_anchors = q.at("n_anchors").get<std::size_t>();
  const auto n_imps = q.at("n_importances").get<std::size_t>();
  for (std::size_t i = 0; i < n_anchors; ++i)
    c.cl.anchors.push_back(detail::read_blob(in, n_params));
  for (std::size_t i = 0; i < n_imps; ++i)
    c.cl.importances.push_back(detail::read_blob(in, n_params));
  return c;
}

}  // namespace kitchen
