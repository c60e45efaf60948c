#pragma once

#include <string>
#include <vector>

#include "trajcast/nn.hpp"

namespace trajcast::nn {

// Single-layer LSTM unrolled over a fixed-length sequence. Input
// [batch, seq_len * in_dim]; returns the final hidden state [batch, hidden].
// Gate order along the 4*hidden axis: input, forget, cell, output.
template <typename T>
class Lstm {
 public:
  Lstm(std::string name, std::size_t in_dim, std::size_t hidden)
      : wx(name + ".wx", {in_dim, 4 * hidden}),
        wh(name + ".wh", {hidden, 4 * hidden}),
        bias(name + ".bias", {4 * hidden}),
        in_dim_(in_dim),
        hidden_(hidden) {}

  void init(Rng& rng, double sigma = 0.02) {
    trunc_normal_init(wx.value, rng, sigma);
    trunc_normal_init(wh.value, rng, sigma);
    bias.value.fill(T(0));
  }

  Tensor<T> forward(const Tensor<T>& x, std::size_t seq_len) {
    if (seq_len == 0 || x.cols() != seq_len * in_dim_) {
      throw ShapeError(wx.name + ": input shape " + x.shape_str() +
                       " does not hold " + std::to_string(seq_len) +
                       " steps of " + std::to_string(in_dim_) + " features");
    }
    batch_ = x.rows();
    seq_len_ = seq_len;
    xs_.assign(seq_len, Tensor<T>({batch_, in_dim_}));
    gates_.assign(seq_len, Tensor<T>({batch_, 4 * hidden_}));
    cells_.assign(seq_len, Tensor<T>({batch_, hidden_}));
    tanh_c_.assign(seq_len, Tensor<T>({batch_, hidden_}));
    hs_.assign(seq_len, Tensor<T>({batch_, hidden_}));

    Tensor<T> h({batch_, hidden_});
    Tensor<T> c({batch_, hidden_});
    for (std::size_t t = 0; t < seq_len; ++t) {
      Tensor<T>& xt = xs_[t];
      for (std::size_t b = 0; b < batch_; ++b) {
        const T* src = x.data() + b * seq_len * in_dim_ + t * in_dim_;
        std::copy(src, src + in_dim_, xt.data() + b * in_dim_);
      }
      Tensor<T>& z = gates_[t];
      mat_view(z).noalias() = mat_view(xt) * mat_view(wx.value);
      mat_view(z).noalias() += mat_view(h) * mat_view(wh.value);
      mat_view(z).rowwise() += Eigen::Map<const Eigen::RowVectorX<T>>(
          bias.value.data(), 4 * hidden_);

      Tensor<T>& ct = cells_[t];
      Tensor<T>& tc = tanh_c_[t];
      Tensor<T>& ht = hs_[t];
      for (std::size_t b = 0; b < batch_; ++b) {
        T* zb = z.data() + b * 4 * hidden_;
        const T* cprev = c.data() + b * hidden_;
        for (std::size_t u = 0; u < hidden_; ++u) {
          T& gi = zb[u];
          T& gf = zb[hidden_ + u];
          T& gg = zb[2 * hidden_ + u];
          T& go = zb[3 * hidden_ + u];
          gi = sigmoid(gi);
          gf = sigmoid(gf);
          gg = std::tanh(gg);
          go = sigmoid(go);
          const T cv = gf * cprev[u] + gi * gg;
          ct(b, u) = cv;
          tc(b, u) = std::tanh(cv);
          ht(b, u) = go * tc(b, u);
        }
      }
      h = ht;
      c = ct;
    }
    return h;
  }

  // dh_last: gradient w.r.t. the returned final hidden state.
  Tensor<T> backward(const Tensor<T>& dh_last) {
    Tensor<T> dx({batch_, seq_len_ * in_dim_});
    Tensor<T> dh = dh_last;
    Tensor<T> dc({batch_, hidden_});
    Tensor<T> dz({batch_, 4 * hidden_});

    for (std::size_t t = seq_len_; t-- > 0;) {
      const Tensor<T>& z = gates_[t];
      const Tensor<T>& tc = tanh_c_[t];
      for (std::size_t b = 0; b < batch_; ++b) {
        const T* zb = z.data() + b * 4 * hidden_;
        T* dzb = dz.data() + b * 4 * hidden_;
        const T* cprev =
            t > 0 ? cells_[t - 1].data() + b * hidden_ : nullptr;
        for (std::size_t u = 0; u < hidden_; ++u) {
          const T gi = zb[u];
          const T gf = zb[hidden_ + u];
          const T gg = zb[2 * hidden_ + u];
          const T go = zb[3 * hidden_ + u];
          const T tcv = tc(b, u);
          const T dct = dc(b, u) + dh(b, u) * go * (T(1) - tcv * tcv);
          dzb[u] = dct * gg * gi * (T(1) - gi);
          const T cp = cprev ? cprev[u] : T(0);
          dzb[hidden_ + u] = dct * cp * gf * (T(1) - gf);
          dzb[2 * hidden_ + u] = dct * gi * (T(1) - gg * gg);
          dzb[3 * hidden_ + u] = dh(b, u) * tcv * go * (T(1) - go);
          dc(b, u) = dct * gf;
        }
      }
      mat_view(wx.grad).noalias() += mat_view(xs_[t]).transpose() * mat_view(dz);
      if (t > 0) {
        mat_view(wh.grad).noalias() +=
            mat_view(hs_[t - 1]).transpose() * mat_view(dz);
      }
      Eigen::Map<Eigen::RowVectorX<T>>(bias.grad.data(), 4 * hidden_) +=
          mat_view(dz).colwise().sum();

      Tensor<T> dxt({batch_, in_dim_});
      mat_view(dxt).noalias() = mat_view(dz) * mat_view(wx.value).transpose();
      for (std::size_t b = 0; b < batch_; ++b) {
        T* dst = dx.data() + b * seq_len_ * in_dim_ + t * in_dim_;
        std::copy(dxt.data() + b * in_dim_, dxt.data() + (b + 1) * in_dim_,
                  dst);
      }
      if (t > 0) {
        mat_view(dh).noalias() = mat_view(dz) * mat_view(wh.value).transpose();
      }
    }
    return dx;
  }

  void collect_params(std::vector<Parameter<T>*>& out) {
    out.push_back(&wx);
    out.push_back(&wh);
    out.push_back(&bias);
  }

  Parameter<T> wx;
  Parameter<T> wh;
  Parameter<T> bias;

 private:
  static T sigmoid(T v) {
    if (v >= T(0)) return T(1) / (T(1) + std::exp(-v));
    const T e = std::exp(v);
    return e / (T(1) + e);
  }

  std::size_t in_dim_, hidden_;
  std::size_t batch_ = 0;
  std::size_t seq_len_ = 0;
  std::vector<Tensor<T>> xs_, gates_, cells_, tanh_c_, hs_;
};

}  // namespace trajcast::nn
