#pragma once

#include <string>
#include <vector>

#include "trajcast/conv.hpp"
#include "trajcast/geo.hpp"
#include "trajcast/lstm.hpp"
#include "trajcast/nn.hpp"

namespace trajcast::models {

using nn::Parameter;
using nn::Tensor;

struct MlpConfig {
  std::size_t input_dim = 1600;  // M * M
  std::size_t hidden = 150;
  std::size_t hidden_layers = 4;
  double dropout = 0.1;
};

// Flattened grid -> four ReLU hidden layers -> dropout -> 2 outputs in [0,1].
template <typename T>
class MlpModel {
 public:
  explicit MlpModel(const MlpConfig& cfg, std::uint64_t seed = 1)
      : cfg_(cfg), dropout_(cfg.dropout), rng_(seed ^ 0x9e3779b97f4a7c15ull) {
    if (cfg.hidden_layers == 0) throw ConfigError("mlp needs hidden layers");
    Rng init_rng(seed);
    std::size_t in = cfg.input_dim;
    for (std::size_t i = 0; i < cfg.hidden_layers; ++i) {
      layers_.emplace_back("mlp.fc" + std::to_string(i), in, cfg.hidden);
      layers_.back().init(init_rng);
      in = cfg.hidden;
    }
    head_ = std::make_unique<nn::Linear<T>>("mlp.out", in, 2);
    head_->init(init_rng);
    acts_.resize(cfg.hidden_layers);
  }

  void set_training(bool training) { dropout_.set_training(training); }

  Tensor<T> forward(const Tensor<T>& x) {
    nn::require_cols(x, cfg_.input_dim, "mlp");
    Tensor<T> h = x;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      h = acts_[i].forward(layers_[i].forward(h));
    }
    h = dropout_.forward(h, rng_);
    return squash_.forward(head_->forward(h));
  }

  void backward(const Tensor<T>& dpred) {
    Tensor<T> d = head_->backward(squash_.backward(dpred));
    d = dropout_.backward(d);
    for (std::size_t i = layers_.size(); i-- > 0;) {
      d = layers_[i].backward(acts_[i].backward(d));
    }
  }

  std::vector<Parameter<T>*> params() {
    std::vector<Parameter<T>*> out;
    for (auto& l : layers_) l.collect_params(out);
    head_->collect_params(out);
    return out;
  }

 private:
  MlpConfig cfg_;
  std::vector<nn::Linear<T>> layers_;
  std::vector<nn::Relu<T>> acts_;
  std::unique_ptr<nn::Linear<T>> head_;
  nn::Dropout<T> dropout_;
  nn::Sigmoid<T> squash_;
  Rng rng_;
};

struct CnnConfig {
  std::size_t side = 40;  // M
  std::size_t channels = 128;
  std::size_t kernel = 7;
  std::size_t stride = 2;
  std::size_t pad = 3;
  std::size_t fc_dim = 128;
};

// One 7x7 conv (stride 2) + ReLU, then two fully connected layers.
template <typename T>
class CnnModel {
 public:
  explicit CnnModel(const CnnConfig& cfg, std::uint64_t seed = 1)
      : cfg_(cfg),
        conv_("cnn.conv", 1, cfg.channels, cfg.kernel, cfg.stride, cfg.pad) {
    Rng rng(seed);
    conv_.init(rng);
    const std::size_t os = conv_.out_side(cfg.side);
    flat_dim_ = cfg.channels * os * os;
    fc1_ = std::make_unique<nn::Linear<T>>("cnn.fc1", flat_dim_, cfg.fc_dim);
    fc2_ = std::make_unique<nn::Linear<T>>("cnn.fc2", cfg.fc_dim, 2);
    fc1_->init(rng);
    fc2_->init(rng);
  }

  std::size_t conv_out_side() const { return conv_.out_side(cfg_.side); }

  Tensor<T> forward(const Tensor<T>& x) {
    nn::require_cols(x, cfg_.side * cfg_.side, "cnn");
    const std::size_t batch = x.rows();
    Tensor<T> h = relu_.forward(conv_.forward(x, cfg_.side));
    h.reshape({batch, flat_dim_});
    h = relu2_.forward(fc1_->forward(h));
    return squash_.forward(fc2_->forward(h));
  }

  void backward(const Tensor<T>& dpred) {
    Tensor<T> d = fc2_->backward(squash_.backward(dpred));
    d = fc1_->backward(relu2_.backward(d));
    const std::size_t os = conv_out_side();
    d.reshape({d.rows() * os * os, cfg_.channels});
    conv_.backward(relu_.backward(d));
  }

  std::vector<Parameter<T>*> params() {
    std::vector<Parameter<T>*> out;
    conv_.collect_params(out);
    fc1_->collect_params(out);
    fc2_->collect_params(out);
    return out;
  }

 private:
  CnnConfig cfg_;
  nn::Conv2d<T> conv_;
  std::unique_ptr<nn::Linear<T>> fc1_;
  std::unique_ptr<nn::Linear<T>> fc2_;
  nn::Relu<T> relu_, relu2_;
  nn::Sigmoid<T> squash_;
  std::size_t flat_dim_ = 0;
};

inline constexpr std::size_t kLstmSeqLen = 200;

// Cell-coordinate list -> fixed [seq_len, 3] rows: zero padding first, then
// (m / M, n / M, 1) for the last min(L, seq_len) coordinates.
template <typename T>
Tensor<T> lstm_prepare_input(const std::vector<CellIndex>& cells,
                             std::size_t resolution,
                             std::size_t seq_len = kLstmSeqLen) {
  if (cells.empty()) throw DataError("lstm input needs at least one cell");
  Tensor<T> rows({seq_len, 3});
  const std::size_t take = std::min(cells.size(), seq_len);
  const std::size_t src_start = cells.size() - take;
  const std::size_t dst_start = seq_len - take;
  const T inv = T(1) / static_cast<T>(resolution);
  for (std::size_t i = 0; i < take; ++i) {
    const CellIndex& c = cells[src_start + i];
    rows((dst_start + i), 0) = static_cast<T>(c.m) * inv;
    rows((dst_start + i), 1) = static_cast<T>(c.n) * inv;
    rows((dst_start + i), 2) = T(1);
  }
  return rows;
}

struct LstmConfig {
  std::size_t hidden = 4;
  std::size_t seq_len = kLstmSeqLen;
};

// Recurrent baseline over coordinate rows; the final hidden state feeds a
// linear head squashed into [0,1]^2.
template <typename T>
class LstmModel {
 public:
  explicit LstmModel(const LstmConfig& cfg, std::uint64_t seed = 1)
      : cfg_(cfg),
        lstm_("lstm", 3, cfg.hidden),
        head_("lstm.out", cfg.hidden, 2) {
    Rng rng(seed);
    lstm_.init(rng);
    head_.init(rng);
  }

  Tensor<T> forward(const Tensor<T>& x) {
    Tensor<T> h = lstm_.forward(x, cfg_.seq_len);
    return squash_.forward(head_.forward(h));
  }

  void backward(const Tensor<T>& dpred) {
    lstm_.backward(head_.backward(squash_.backward(dpred)));
  }

  std::vector<Parameter<T>*> params() {
    std::vector<Parameter<T>*> out;
    lstm_.collect_params(out);
    head_.collect_params(out);
    return out;
  }

 private:
  LstmConfig cfg_;
  nn::Lstm<T> lstm_;
  nn::Linear<T> head_;
  nn::Sigmoid<T> squash_;
};

}  // namespace trajcast::models
