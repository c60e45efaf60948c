#pragma once

#include <optional>
#include <string>
#include <vector>

#include "trajcast/nn.hpp"

namespace trajcast::nn {

// Multi-head scaled dot-product self-attention over independent groups of
// `tokens` tokens each (a group is one attention window of one batch item).
// Input/output layout: [groups * tokens, dim]. Supports a learned relative
// position bias shared across groups, a fixed additive logit bias, and a
// fixed mask cycling over window positions (group g uses g % positions).
template <typename T>
class SelfAttention {
 public:
  SelfAttention(std::string name, std::size_t dim, std::size_t heads)
      : qkv_(name + ".qkv", dim, 3 * dim),
        proj_(name + ".proj", dim, dim),
        name_(std::move(name)),
        dim_(dim),
        heads_(heads) {
    if (heads == 0 || dim % heads != 0) {
      throw ConfigError(name_ + ": dim " + std::to_string(dim) +
                        " not divisible by heads " + std::to_string(heads));
    }
    head_dim_ = dim / heads;
    scale_ = T(1) / std::sqrt(static_cast<T>(head_dim_));
  }

  void init(Rng& rng) {
    qkv_.init(rng);
    proj_.init(rng);
    if (bias_table_) trunc_normal_init(bias_table_->value, rng);
  }

  // Learned per-head bias indexed by intra-window offset; window tokens must
  // form a w x w square.
  void enable_relative_bias(std::size_t window) {
    const std::size_t span = 2 * window - 1;
    bias_table_.emplace(name_ + ".rel_bias", std::vector<std::size_t>{
                                                 span * span, heads_});
    const std::size_t t = window * window;
    bias_index_.assign(t * t, 0);
    for (std::size_t i = 0; i < t; ++i) {
      const std::ptrdiff_t ri = static_cast<std::ptrdiff_t>(i / window);
      const std::ptrdiff_t ci = static_cast<std::ptrdiff_t>(i % window);
      for (std::size_t j = 0; j < t; ++j) {
        const std::ptrdiff_t rj = static_cast<std::ptrdiff_t>(j / window);
        const std::ptrdiff_t cj = static_cast<std::ptrdiff_t>(j % window);
        const std::size_t dr = static_cast<std::size_t>(ri - rj + static_cast<std::ptrdiff_t>(window) - 1);
        const std::size_t dc = static_cast<std::size_t>(ci - cj + static_cast<std::ptrdiff_t>(window) - 1);
        bias_index_[i * t + j] = dr * span + dc;
      }
    }
  }

  // Constant additive bias on logits, shape [heads, tokens, tokens].
  void set_logit_bias(Tensor<T> bias) { logit_bias_ = std::move(bias); }

  // Constant mask (0 or large negative), shape [positions, tokens, tokens];
  // group g uses slice g % positions.
  void set_mask(Tensor<T> mask) { mask_ = std::move(mask); }
  void clear_mask() { mask_.reset(); }

  Tensor<T> forward(const Tensor<T>& x, std::size_t groups,
                    std::size_t tokens) {
    groups_ = groups;
    tokens_ = tokens;
    qkv_out_ = qkv_.forward(x);
    const std::size_t t = tokens, hd = head_dim_;
    probs_ = Tensor<T>({groups * heads_ * t, t});
    Tensor<T> ctx({groups * t, dim_});

    for (std::size_t g = 0; g < groups; ++g) {
      for (std::size_t h = 0; h < heads_; ++h) {
        const auto q = head_block(qkv_out_, g, 0, h);
        const auto k = head_block(qkv_out_, g, 1, h);
        const auto v = head_block(qkv_out_, g, 2, h);
        MatrixRM<T> logits = (q * k.transpose()) * scale_;
        if (bias_table_) {
          for (std::size_t i = 0; i < t; ++i) {
            for (std::size_t j = 0; j < t; ++j) {
              logits(i, j) += bias_table_->value(bias_index_[i * t + j], h);
            }
          }
        }
        if (logit_bias_) {
          const T* b = logit_bias_->data() + h * t * t;
          for (std::size_t i = 0; i < t * t; ++i) {
            logits.data()[i] += b[i];
          }
        }
        if (mask_) {
          const std::size_t positions = mask_->extent(0);
          const T* m = mask_->data() + (g % positions) * t * t;
          for (std::size_t i = 0; i < t * t; ++i) {
            logits.data()[i] += m[i];
          }
        }
        T* probs_gh = probs_.data() + (g * heads_ + h) * t * t;
        for (std::size_t i = 0; i < t; ++i) {
          const T* lr = logits.data() + i * t;
          T* pr = probs_gh + i * t;
          T mx = lr[0];
          for (std::size_t j = 1; j < t; ++j) mx = std::max(mx, lr[j]);
          T sum = T(0);
          for (std::size_t j = 0; j < t; ++j) {
            pr[j] = std::exp(lr[j] - mx);
            sum += pr[j];
          }
          const T inv = T(1) / sum;
          for (std::size_t j = 0; j < t; ++j) pr[j] *= inv;
        }
        Eigen::Map<const MatrixRM<T>> p(probs_gh,
                                        static_cast<Eigen::Index>(t),
                                        static_cast<Eigen::Index>(t));
        ctx_block(ctx, g, h).noalias() = p * v;
      }
    }
    return proj_.forward(ctx);
  }

  Tensor<T> backward(const Tensor<T>& dy) {
    const std::size_t t = tokens_, hd = head_dim_;
    Tensor<T> dctx = proj_.backward(dy);
    Tensor<T> dqkv({groups_ * t, 3 * dim_});

    for (std::size_t g = 0; g < groups_; ++g) {
      for (std::size_t h = 0; h < heads_; ++h) {
        const auto q = head_block(qkv_out_, g, 0, h);
        const auto k = head_block(qkv_out_, g, 1, h);
        const auto v = head_block(qkv_out_, g, 2, h);
        const T* probs_gh = probs_.data() + (g * heads_ + h) * t * t;
        Eigen::Map<const MatrixRM<T>> p(probs_gh,
                                        static_cast<Eigen::Index>(t),
                                        static_cast<Eigen::Index>(t));
        const auto dctx_gh = ctx_block_const(dctx, g, h);

        MatrixRM<T> dprobs = dctx_gh * v.transpose();
        MatrixRM<T> dlogits(t, t);
        for (std::size_t i = 0; i < t; ++i) {
          T dot = T(0);
          for (std::size_t j = 0; j < t; ++j) {
            dot += p(i, j) * dprobs(i, j);
          }
          for (std::size_t j = 0; j < t; ++j) {
            dlogits(i, j) = p(i, j) * (dprobs(i, j) - dot);
          }
        }
        if (bias_table_) {
          for (std::size_t i = 0; i < t; ++i) {
            for (std::size_t j = 0; j < t; ++j) {
              bias_table_->grad(bias_index_[i * t + j], h) += dlogits(i, j);
            }
          }
        }
        head_block_mut(dqkv, g, 2, h).noalias() = p.transpose() * dctx_gh;
        head_block_mut(dqkv, g, 0, h).noalias() = (dlogits * k) * scale_;
        head_block_mut(dqkv, g, 1, h).noalias() =
            (dlogits.transpose() * q) * scale_;
      }
    }
    return qkv_.backward(dqkv);
  }

  void collect_params(std::vector<Parameter<T>*>& out) {
    qkv_.collect_params(out);
    proj_.collect_params(out);
    if (bias_table_) out.push_back(&*bias_table_);
  }

  std::size_t dim() const { return dim_; }
  std::size_t heads() const { return heads_; }

 private:
  using StridedMap =
      Eigen::Map<MatrixRM<T>, 0, Eigen::OuterStride<>>;
  using ConstStridedMap =
      Eigen::Map<const MatrixRM<T>, 0, Eigen::OuterStride<>>;

  // Rows g*tokens..g*tokens+tokens of the q/k/v segment for head h.
  ConstStridedMap head_block(const Tensor<T>& qkv, std::size_t g,
                             std::size_t segment, std::size_t h) const {
    const T* base = qkv.data() + (g * tokens_) * (3 * dim_) +
                    segment * dim_ + h * head_dim_;
    return {base, static_cast<Eigen::Index>(tokens_),
            static_cast<Eigen::Index>(head_dim_),
            Eigen::OuterStride<>(static_cast<Eigen::Index>(3 * dim_))};
  }

  StridedMap head_block_mut(Tensor<T>& qkv, std::size_t g,
                            std::size_t segment, std::size_t h) const {
    T* base = qkv.data() + (g * tokens_) * (3 * dim_) + segment * dim_ +
              h * head_dim_;
    return {base, static_cast<Eigen::Index>(tokens_),
            static_cast<Eigen::Index>(head_dim_),
            Eigen::OuterStride<>(static_cast<Eigen::Index>(3 * dim_))};
  }

  StridedMap ctx_block(Tensor<T>& ctx, std::size_t g, std::size_t h) const {
    T* base = ctx.data() + (g * tokens_) * dim_ + h * head_dim_;
    return {base, static_cast<Eigen::Index>(tokens_),
            static_cast<Eigen::Index>(head_dim_),
            Eigen::OuterStride<>(static_cast<Eigen::Index>(dim_))};
  }

  ConstStridedMap ctx_block_const(const Tensor<T>& ctx, std::size_t g,
                                  std::size_t h) const {
    const T* base = ctx.data() + (g * tokens_) * dim_ + h * head_dim_;
    return {base, static_cast<Eigen::Index>(tokens_),
            static_cast<Eigen::Index>(head_dim_),
            Eigen::OuterStride<>(static_cast<Eigen::Index>(dim_))};
  }

  Linear<T> qkv_;
  Linear<T> proj_;
  std::string name_;
  std::size_t dim_;
  std::size_t heads_;
  std::size_t head_dim_;
  T scale_;

  std::optional<Parameter<T>> bias_table_;
  std::vector<std::size_t> bias_index_;
  std::optional<Tensor<T>> logit_bias_;
  std::optional<Tensor<T>> mask_;

  std::size_t groups_ = 0;
  std::size_t tokens_ = 0;
  Tensor<T> qkv_out_;
  Tensor<T> probs_;
};

}  // namespace trajcast::nn
