#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ptdgnn/matrix.hpp"
#include "ptdgnn/rng.hpp"

namespace ptdgnn {

struct AdamwConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;
};

struct ParamTensor {
  Matrix value;
  Matrix grad;
  Matrix m;  // first moment
  Matrix v;  // second moment
};

// Named dense parameters with gradient and AdamW moment buffers. std::map
// keeps iteration order stable, which keeps updates deterministic.
class ParamStore {
 public:
  void add(const std::string& name, Matrix value) {
    if (tensors_.count(name)) throw std::runtime_error("duplicate parameter: " + name);
    ParamTensor t;
    t.grad = Matrix(value.rows, value.cols);
    t.m = Matrix(value.rows, value.cols);
    t.v = Matrix(value.rows, value.cols);
    t.value = std::move(value);
    tensors_.emplace(name, std::move(t));
  }

  bool has(const std::string& name) const { return tensors_.count(name) > 0; }

  Matrix& value(const std::string& name) { return tensor(name).value; }
  const Matrix& value(const std::string& name) const { return tensor(name).value; }
  Matrix& grad(const std::string& name) { return tensor(name).grad; }
  const Matrix& grad(const std::string& name) const { return tensor(name).grad; }

  ParamTensor& tensor(const std::string& name) {
    auto it = tensors_.find(name);
    if (it == tensors_.end()) throw std::runtime_error("unknown parameter: " + name);
    return it->second;
  }
  const ParamTensor& tensor(const std::string& name) const {
    auto it = tensors_.find(name);
    if (it == tensors_.end()) throw std::runtime_error("unknown parameter: " + name);
    return it->second;
  }

  const std::map<std::string, ParamTensor>& tensors() const { return tensors_; }
  std::map<std::string, ParamTensor>& tensors() { return tensors_; }

  void zero_grads() {
    for (auto& [name, t] : tensors_) t.grad.fill(0.0);
  }

  void reset_optimizer_state() {
    for (auto& [name, t] : tensors_) {
      t.m.fill(0.0);
      t.v.fill(0.0);
    }
    step_ = 0;
  }

  std::int64_t step() const { return step_; }
  void set_step(std::int64_t s) { step_ = s; }

 private:
  std::map<std::string, ParamTensor> tensors_;
  std::int64_t step_ = 0;
};

// Decoupled-weight-decay Adam. Gradients are zeroed after the update. A
// non-finite gradient aborts before any parameter is touched.
inline void adamw_step(ParamStore& params, const AdamwConfig& cfg,
                       const std::vector<std::string>& only = {}) {
  auto included = [&only](const std::string& name) {
    if (only.empty()) return true;
    for (const std::string& s : only)
      if (s == name) return true;
    return false;
  };

  for (const auto& [name, t] : params.tensors()) {
    if (!included(name)) continue;
    if (!t.grad.all_finite())
      throw std::runtime_error("non-finite gradient in parameter '" + name + "'");
  }

  params.set_step(params.step() + 1);
  const auto step = static_cast<double>(params.step());
  const double bc1 = 1.0 - std::pow(cfg.beta1, step);
  const double bc2 = 1.0 - std::pow(cfg.beta2, step);

  for (auto& [name, t] : params.tensors()) {
    if (!included(name)) continue;
    for (std::size_t i = 0; i < t.value.data.size(); ++i) {
      const double g = t.grad.data[i];
      t.m.data[i] = cfg.beta1 * t.m.data[i] + (1.0 - cfg.beta1) * g;
      t.v.data[i] = cfg.beta2 * t.v.data[i] + (1.0 - cfg.beta2) * g * g;
      const double m_hat = t.m.data[i] / bc1;
      const double v_hat = t.v.data[i] / bc2;
      t.value.data[i] -=
          cfg.lr * (m_hat / (std::sqrt(v_hat) + cfg.eps) + cfg.weight_decay * t.value.data[i]);
    }
    t.grad.fill(0.0);
  }
}

enum class EncoderBase { Gcn, Sgc };

struct EncoderConfig {
  int layers = 3;
  int hidden = 400;
  EncoderBase base = EncoderBase::Gcn;

  void validate() const {
    if (layers < 1) throw std::runtime_error("encoder layers must be at least 1");
    if (hidden < 1) throw std::runtime_error("encoder hidden dim must be at least 1");
  }

  // SGC folds the L-fold propagation into a single transform.
  int weight_layers() const { return base == EncoderBase::Sgc ? 1 : layers; }
};

inline std::string encoder_base_name(EncoderBase b) {
  return b == EncoderBase::Gcn ? "gcn" : "sgc";
}

inline EncoderBase encoder_base_from_name(const std::string& s) {
  if (s == "gcn") return EncoderBase::Gcn;
  if (s == "sgc") return EncoderBase::Sgc;
  throw std::runtime_error("unknown encoder base: " + s);
}

// Glorot-uniform weights, zero biases, small-gaussian X', MLP decoder
// hidden -> hidden -> attr_dim.
inline ParamStore init_params(int attr_dim, const EncoderConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  if (attr_dim < 1) throw std::runtime_error("attr_dim must be at least 1");
  ParamStore store;
  Rng rng(seed);

  auto glorot = [&rng](int fan_in, int fan_out) {
    Matrix w(fan_in, fan_out);
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (double& v : w.data) v = rng.uniform(-bound, bound);
    return w;
  };

  for (int l = 1; l <= cfg.weight_layers(); ++l) {
    const int d_in = l == 1 ? attr_dim : cfg.hidden;
    store.add("enc" + std::to_string(l) + ".W", glorot(d_in, cfg.hidden));
    store.add("enc" + std::to_string(l) + ".b", Matrix(1, cfg.hidden));
  }

  Matrix x_prime(1, attr_dim);
  for (double& v : x_prime.data) v = 0.01 * rng.normal();
  store.add("x_prime", std::move(x_prime));

  store.add("dec1.W", glorot(cfg.hidden, cfg.hidden));
  store.add("dec1.b", Matrix(1, cfg.hidden));
  store.add("dec2.W", glorot(cfg.hidden, attr_dim));
  store.add("dec2.b", Matrix(1, attr_dim));
  return store;
}

inline std::vector<std::string> encoder_param_names(const EncoderConfig& cfg) {
  std::vector<std::string> names;
  for (int l = 1; l <= cfg.weight_layers(); ++l) {
    names.push_back("enc" + std::to_string(l) + ".W");
    names.push_back("enc" + std::to_string(l) + ".b");
  }
  return names;
}

constexpr int kCheckpointVersion = 1;

inline nlohmann::json checkpoint_to_json(const ParamStore& params, const EncoderConfig& cfg,
                                         int attr_dim) {
  nlohmann::json tensors = nlohmann::json::object();
  for (const auto& [name, t] : params.tensors()) {
    tensors[name] = {{"shape", {t.value.rows, t.value.cols}}, {"values", t.value.data}};
  }
  return nlohmann::json{{"version", kCheckpointVersion},
                        {"encoder_config",
                         {{"layers", cfg.layers},
                          {"hidden", cfg.hidden},
                          {"base", encoder_base_name(cfg.base)}}},
                        {"attr_dim", attr_dim},
                        {"tensors", tensors}};
}

inline void save_checkpoint(const ParamStore& params, const EncoderConfig& cfg, int attr_dim,
                            const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out << checkpoint_to_json(params, cfg, attr_dim).dump(2) << "\n";
}

struct Checkpoint {
  ParamStore params;
  EncoderConfig encoder;
  int attr_dim = 0;
};

inline Checkpoint checkpoint_from_json(const nlohmann::json& j) {
  if (j.at("version").get<int>() != kCheckpointVersion)
    throw std::runtime_error("unsupported checkpoint version");
  Checkpoint ck;
  const auto& ec = j.at("encoder_config");
  ck.encoder.layers = ec.at("layers").get<int>();
  ck.encoder.hidden = ec.at("hidden").get<int>();
  ck.encoder.base = encoder_base_from_name(ec.at("base").get<std::string>());
  ck.attr_dim = j.at("attr_dim").get<int>();

  // Shapes must agree with a fresh parameter layout for the same config.
  ParamStore reference = init_params(ck.attr_dim, ck.encoder, 0);
  for (const auto& [name, t] : reference.tensors()) {
    const auto& entry = j.at("tensors").at(name);
    const auto shape = entry.at("shape").get<std::vector<int>>();
    if (shape.size() != 2 || shape[0] != t.value.rows || shape[1] != t.value.cols)
      throw std::runtime_error("checkpoint tensor '" + name + "' has the wrong shape");
    auto values = entry.at("values").get<std::vector<double>>();
    ck.params.add(name, Matrix(shape[0], shape[1], std::move(values)));
  }
  return ck;
}

inline Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  nlohmann::json j;
  in >> j;
  return checkpoint_from_json(j);
}

}  // namespace ptdgnn
