#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "trajcast/rng.hpp"
#include "trajcast/tensor.hpp"

namespace trajcast::nn {

template <typename T>
struct Parameter {
  std::string name;
  Tensor<T> value;
  Tensor<T> grad;

  Parameter() = default;
  Parameter(std::string n, std::vector<std::size_t> shape)
      : name(std::move(n)), value(shape), grad(std::move(shape)) {}

  void zero_grad() { grad.fill(T(0)); }
};

template <typename T>
void trunc_normal_init(Tensor<T>& t, Rng& rng, double sigma = 0.02) {
  for (T& v : t.values()) v = static_cast<T>(rng.trunc_normal(sigma));
}

// y = x W + b, x: [rows, in], W: [in, out], b: [out]
template <typename T>
class Linear {
 public:
  Linear(std::string name, std::size_t in, std::size_t out)
      : weight(name + ".weight", {in, out}), bias(name + ".bias", {out}) {}

  void init(Rng& rng, double sigma = 0.02) {
    trunc_normal_init(weight.value, rng, sigma);
    bias.value.fill(T(0));
  }

  std::size_t in_dim() const { return weight.value.extent(0); }
  std::size_t out_dim() const { return weight.value.extent(1); }

  Tensor<T> forward(const Tensor<T>& x) {
    require_cols(x, in_dim(), weight.name.c_str());
    x_ = x;
    Tensor<T> y({x.rows(), out_dim()});
    mat_view(y).noalias() = mat_view(x) * mat_view(weight.value);
    mat_view(y).rowwise() +=
        Eigen::Map<const Eigen::RowVectorX<T>>(bias.value.data(), out_dim());
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy) {
    require_cols(dy, out_dim(), weight.name.c_str());
    mat_view(weight.grad).noalias() +=
        mat_view(x_).transpose() * mat_view(dy);
    Eigen::Map<Eigen::RowVectorX<T>>(bias.grad.data(), out_dim()) +=
        mat_view(dy).colwise().sum();
    Tensor<T> dx({dy.rows(), in_dim()});
    mat_view(dx).noalias() = mat_view(dy) * mat_view(weight.value).transpose();
    return dx;
  }

  void collect_params(std::vector<Parameter<T>*>& out) {
    out.push_back(&weight);
    out.push_back(&bias);
  }

  Parameter<T> weight;
  Parameter<T> bias;

 private:
  Tensor<T> x_;
};

// Per-row standardization over the last axis, then affine gamma/beta.
template <typename T>
class LayerNorm {
 public:
  LayerNorm(std::string name, std::size_t dim, T eps = T(1e-5))
      : gamma(name + ".gamma", {dim}), beta(name + ".beta", {dim}), eps_(eps) {
    gamma.value.fill(T(1));
  }

  std::size_t dim() const { return gamma.value.extent(0); }

  Tensor<T> forward(const Tensor<T>& x) {
    require_cols(x, dim(), gamma.name.c_str());
    const std::size_t rows = x.rows(), d = dim();
    xhat_ = Tensor<T>(x.shape());
    inv_std_ = Tensor<T>({rows});
    Tensor<T> y(x.shape());
    for (std::size_t r = 0; r < rows; ++r) {
      const T* xr = x.data() + r * d;
      T mean = T(0);
      for (std::size_t i = 0; i < d; ++i) mean += xr[i];
      mean /= static_cast<T>(d);
      T var = T(0);
      for (std::size_t i = 0; i < d; ++i) {
        const T c = xr[i] - mean;
        var += c * c;
      }
      var /= static_cast<T>(d);
      const T inv = T(1) / std::sqrt(var + eps_);
      inv_std_[r] = inv;
      T* xh = xhat_.data() + r * d;
      T* yr = y.data() + r * d;
      for (std::size_t i = 0; i < d; ++i) {
        xh[i] = (xr[i] - mean) * inv;
        yr[i] = gamma.value[i] * xh[i] + beta.value[i];
      }
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy) {
    require_cols(dy, dim(), gamma.name.c_str());
    const std::size_t rows = dy.rows(), d = dim();
    Tensor<T> dx(dy.shape());
    for (std::size_t r = 0; r < rows; ++r) {
      const T* dyr = dy.data() + r * d;
      const T* xh = xhat_.data() + r * d;
      T* dxr = dx.data() + r * d;
      T sum_dxhat = T(0), sum_dxhat_xhat = T(0);
      for (std::size_t i = 0; i < d; ++i) {
        const T dxhat = dyr[i] * gamma.value[i];
        gamma.grad[i] += dyr[i] * xh[i];
        beta.grad[i] += dyr[i];
        sum_dxhat += dxhat;
        sum_dxhat_xhat += dxhat * xh[i];
      }
      const T inv = inv_std_[r];
      const T mean_dxhat = sum_dxhat / static_cast<T>(d);
      const T mean_dxhat_xhat = sum_dxhat_xhat / static_cast<T>(d);
      for (std::size_t i = 0; i < d; ++i) {
        const T dxhat = dyr[i] * gamma.value[i];
        dxr[i] = inv * (dxhat - mean_dxhat - xh[i] * mean_dxhat_xhat);
      }
    }
    return dx;
  }

  void collect_params(std::vector<Parameter<T>*>& out) {
    out.push_back(&gamma);
    out.push_back(&beta);
  }

  Parameter<T> gamma;
  Parameter<T> beta;

 private:
  T eps_;
  Tensor<T> xhat_;
  Tensor<T> inv_std_;
};

// Row-stable softmax over the last axis.
template <typename T>
Tensor<T> softmax(const Tensor<T>& x) {
  const std::size_t rows = x.rows(), d = x.cols();
  Tensor<T> y(x.shape());
  for (std::size_t r = 0; r < rows; ++r) {
    const T* xr = x.data() + r * d;
    T* yr = y.data() + r * d;
    T mx = xr[0];
    for (std::size_t i = 1; i < d; ++i) mx = std::max(mx, xr[i]);
    T sum = T(0);
    for (std::size_t i = 0; i < d; ++i) {
      yr[i] = std::exp(xr[i] - mx);
      sum += yr[i];
    }
    const T inv = T(1) / sum;
    for (std::size_t i = 0; i < d; ++i) yr[i] *= inv;
  }
  return y;
}

// dx from cached softmax output y: dx = y * (dy - sum(dy * y)).
template <typename T>
Tensor<T> softmax_backward(const Tensor<T>& y, const Tensor<T>& dy) {
  require_same_shape(y, dy, "softmax_backward");
  const std::size_t rows = y.rows(), d = y.cols();
  Tensor<T> dx(y.shape());
  for (std::size_t r = 0; r < rows; ++r) {
    const T* yr = y.data() + r * d;
    const T* dyr = dy.data() + r * d;
    T* dxr = dx.data() + r * d;
    T dot = T(0);
    for (std::size_t i = 0; i < d; ++i) dot += yr[i] * dyr[i];
    for (std::size_t i = 0; i < d; ++i) dxr[i] = yr[i] * (dyr[i] - dot);
  }
  return dx;
}

template <typename T>
class Gelu {
 public:
  Tensor<T> forward(const Tensor<T>& x) {
    x_ = x;
    Tensor<T> y(x.shape());
    for (std::size_t i = 0; i < x.numel(); ++i) {
      y[i] = T(0.5) * x[i] *
             (T(1) + std::erf(x[i] * T(0.7071067811865475244)));
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy) {
    Tensor<T> dx(dy.shape());
    constexpr T inv_sqrt2 = T(0.7071067811865475244);
    constexpr T inv_sqrt2pi = T(0.3989422804014326779);
    for (std::size_t i = 0; i < dy.numel(); ++i) {
      const T x = x_[i];
      const T cdf = T(0.5) * (T(1) + std::erf(x * inv_sqrt2));
      const T pdf = inv_sqrt2pi * std::exp(T(-0.5) * x * x);
      dx[i] = dy[i] * (cdf + x * pdf);
    }
    return dx;
  }

 private:
  Tensor<T> x_;
};

template <typename T>
class Relu {
 public:
  Tensor<T> forward(const Tensor<T>& x) {
    x_ = x;
    Tensor<T> y(x.shape());
    for (std::size_t i = 0; i < x.numel(); ++i) y[i] = std::max(x[i], T(0));
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy) {
    Tensor<T> dx(dy.shape());
    for (std::size_t i = 0; i < dy.numel(); ++i) {
      dx[i] = x_[i] > T(0) ? dy[i] : T(0);
    }
    return dx;
  }

 private:
  Tensor<T> x_;
};

template <typename T>
class Sigmoid {
 public:
  Tensor<T> forward(const Tensor<T>& x) {
    y_ = Tensor<T>(x.shape());
    for (std::size_t i = 0; i < x.numel(); ++i) {
      const T v = x[i];
      if (v >= T(0)) {
        y_[i] = T(1) / (T(1) + std::exp(-v));
      } else {
        const T e = std::exp(v);
        y_[i] = e / (T(1) + e);
      }
    }
    return y_;
  }

  Tensor<T> backward(const Tensor<T>& dy) {
    Tensor<T> dx(dy.shape());
    for (std::size_t i = 0; i < dy.numel(); ++i) {
      dx[i] = dy[i] * y_[i] * (T(1) - y_[i]);
    }
    return dx;
  }

 private:
  Tensor<T> y_;
};

// Inverted dropout; rate 0 bypasses the mask entirely.
template <typename T>
class Dropout {
 public:
  explicit Dropout(double rate = 0.0) : rate_(rate) {}

  void set_rate(double rate) { rate_ = rate; }
  void set_training(bool training) { training_ = training; }

  Tensor<T> forward(const Tensor<T>& x, Rng& rng) {
    if (rate_ <= 0.0 || !training_) {
      active_ = false;
      return x;
    }
    active_ = true;
    mask_ = Tensor<T>(x.shape());
    Tensor<T> y(x.shape());
    const T scale = T(1.0 / (1.0 - rate_));
    for (std::size_t i = 0; i < x.numel(); ++i) {
      mask_[i] = rng.uniform() < rate_ ? T(0) : scale;
      y[i] = x[i] * mask_[i];
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy) {
    if (!active_) return dy;
    Tensor<T> dx(dy.shape());
    for (std::size_t i = 0; i < dy.numel(); ++i) dx[i] = dy[i] * mask_[i];
    return dx;
  }

 private:
  double rate_;
  bool training_ = true;
  bool active_ = false;
  Tensor<T> mask_;
};

// Mean over every entry of (pred - target)^2; fills dpred when requested.
template <typename T>
T mse_loss(const Tensor<T>& pred, const Tensor<T>& target,
           Tensor<T>* dpred = nullptr) {
  require_same_shape(pred, target, "mse_loss");
  const std::size_t n = pred.numel();
  if (n == 0) throw DataError("mse_loss on empty tensors");
  T acc = T(0);
  for (std::size_t i = 0; i < n; ++i) {
    const T diff = pred[i] - target[i];
    acc += diff * diff;
  }
  const T loss = acc / static_cast<T>(n);
  if (dpred) {
    *dpred = Tensor<T>(pred.shape());
    const T scale = T(2) / static_cast<T>(n);
    for (std::size_t i = 0; i < n; ++i) {
      (*dpred)[i] = scale * (pred[i] - target[i]);
    }
  }
  return loss;
}

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Adam with bias correction; step() consumes and zeroes the gradients.
template <typename T>
class Adam {
 public:
  Adam(std::vector<Parameter<T>*> params, AdamConfig cfg = {})
      : params_(std::move(params)), cfg_(cfg) {
    m_.reserve(params_.size());
    v_.reserve(params_.size());
    for (Parameter<T>* p : params_) {
      m_.emplace_back(p->value.shape());
      v_.emplace_back(p->value.shape());
    }
  }

  std::uint64_t step_count() const { return step_; }

  void step() {
    ++step_;
    const T b1 = static_cast<T>(cfg_.beta1);
    const T b2 = static_cast<T>(cfg_.beta2);
    const T corr1 = T(1) - static_cast<T>(std::pow(cfg_.beta1,
                                                   static_cast<double>(step_)));
    const T corr2 = T(1) - static_cast<T>(std::pow(cfg_.beta2,
                                                   static_cast<double>(step_)));
    const T lr = static_cast<T>(cfg_.lr);
    const T eps = static_cast<T>(cfg_.eps);
    for (std::size_t pi = 0; pi < params_.size(); ++pi) {
      Parameter<T>& p = *params_[pi];
      Tensor<T>& m = m_[pi];
      Tensor<T>& v = v_[pi];
      for (std::size_t i = 0; i < p.value.numel(); ++i) {
        const T g = p.grad[i];
        m[i] = b1 * m[i] + (T(1) - b1) * g;
        v[i] = b2 * v[i] + (T(1) - b2) * g * g;
        const T mhat = m[i] / corr1;
        const T vhat = v[i] / corr2;
        p.value[i] -= lr * mhat / (std::sqrt(vhat) + eps);
      }
      p.zero_grad();
    }
  }

 private:
  std::vector<Parameter<T>*> params_;
  AdamConfig cfg_;
  std::vector<Tensor<T>> m_;
  std::vector<Tensor<T>> v_;
  std::uint64_t step_ = 0;
};

}  // namespace trajcast::nn
