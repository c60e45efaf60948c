#pragma once

#include <string>
#include <vector>

#include "trajcast/nn.hpp"

namespace trajcast::nn {

// 2-D convolution via im2col + gemm. Input [batch, in_ch * side * side],
// output [batch * out_side * out_side, channels] with rows ordered
// (batch, out_row, out_col).
template <typename T>
class Conv2d {
 public:
  Conv2d(std::string name, std::size_t in_ch, std::size_t out_ch,
         std::size_t kernel, std::size_t stride, std::size_t pad)
      : weight(name + ".weight", {out_ch, in_ch * kernel * kernel}),
        bias(name + ".bias", {out_ch}),
        in_ch_(in_ch),
        out_ch_(out_ch),
        kernel_(kernel),
        stride_(stride),
        pad_(pad) {}

  void init(Rng& rng, double sigma = 0.02) {
    trunc_normal_init(weight.value, rng, sigma);
    bias.value.fill(T(0));
  }

  std::size_t out_side(std::size_t side) const {
    return (side + 2 * pad_ - kernel_) / stride_ + 1;
  }

  Tensor<T> forward(const Tensor<T>& x, std::size_t side) {
    require_cols(x, in_ch_ * side * side, weight.name.c_str());
    batch_ = x.rows();
    side_ = side;
    const std::size_t os = out_side(side);
    const std::size_t patch = in_ch_ * kernel_ * kernel_;
    col_ = Tensor<T>({batch_ * os * os, patch});
    for (std::size_t b = 0; b < batch_; ++b) {
      const T* xb = x.data() + b * in_ch_ * side * side;
      for (std::size_t oh = 0; oh < os; ++oh) {
        for (std::size_t ow = 0; ow < os; ++ow) {
          T* crow = col_.data() + ((b * os + oh) * os + ow) * patch;
          for (std::size_t ci = 0; ci < in_ch_; ++ci) {
            for (std::size_t kr = 0; kr < kernel_; ++kr) {
              const std::ptrdiff_t r =
                  static_cast<std::ptrdiff_t>(oh * stride_ + kr) -
                  static_cast<std::ptrdiff_t>(pad_);
              for (std::size_t kc = 0; kc < kernel_; ++kc) {
                const std::ptrdiff_t c =
                    static_cast<std::ptrdiff_t>(ow * stride_ + kc) -
                    static_cast<std::ptrdiff_t>(pad_);
                T v = T(0);
                if (r >= 0 && c >= 0 &&
                    r < static_cast<std::ptrdiff_t>(side) &&
                    c < static_cast<std::ptrdiff_t>(side)) {
                  v = xb[(ci * side + static_cast<std::size_t>(r)) * side +
                         static_cast<std::size_t>(c)];
                }
                crow[(ci * kernel_ + kr) * kernel_ + kc] = v;
              }
            }
          }
        }
      }
    }
    Tensor<T> y({batch_ * os * os, out_ch_});
    mat_view(y).noalias() = mat_view(col_) * mat_view(weight.value).transpose();
    mat_view(y).rowwise() +=
        Eigen::Map<const Eigen::RowVectorX<T>>(bias.value.data(), out_ch_);
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy) {
    const std::size_t os = out_side(side_);
    const std::size_t patch = in_ch_ * kernel_ * kernel_;
    require_cols(dy, out_ch_, weight.name.c_str());

    mat_view(weight.grad).noalias() +=
        mat_view(dy).transpose() * mat_view(col_);
    Eigen::Map<Eigen::RowVectorX<T>>(bias.grad.data(), out_ch_) +=
        mat_view(dy).colwise().sum();

    Tensor<T> dcol({batch_ * os * os, patch});
    mat_view(dcol).noalias() = mat_view(dy) * mat_view(weight.value);

    Tensor<T> dx({batch_, in_ch_ * side_ * side_});
    for (std::size_t b = 0; b < batch_; ++b) {
      T* dxb = dx.data() + b * in_ch_ * side_ * side_;
      for (std::size_t oh = 0; oh < os; ++oh) {
        for (std::size_t ow = 0; ow < os; ++ow) {
          const T* crow = dcol.data() + ((b * os + oh) * os + ow) * patch;
          for (std::size_t ci = 0; ci < in_ch_; ++ci) {
            for (std::size_t kr = 0; kr < kernel_; ++kr) {
              const std::ptrdiff_t r =
                  static_cast<std::ptrdiff_t>(oh * stride_ + kr) -
                  static_cast<std::ptrdiff_t>(pad_);
              if (r < 0 || r >= static_cast<std::ptrdiff_t>(side_)) continue;
              for (std::size_t kc = 0; kc < kernel_; ++kc) {
                const std::ptrdiff_t c =
                    static_cast<std::ptrdiff_t>(ow * stride_ + kc) -
                    static_cast<std::ptrdiff_t>(pad_);
                if (c < 0 || c >= static_cast<std::ptrdiff_t>(side_)) continue;
                dxb[(ci * side_ + static_cast<std::size_t>(r)) * side_ +
                    static_cast<std::size_t>(c)] +=
                    crow[(ci * kernel_ + kr) * kernel_ + kc];
              }
            }
          }
        }
      }
    }
    return dx;
  }

  void collect_params(std::vector<Parameter<T>*>& out) {
    out.push_back(&weight);
    out.push_back(&bias);
  }

  Parameter<T> weight;
  Parameter<T> bias;

 private:
  std::size_t in_ch_, out_ch_, kernel_, stride_, pad_;
  std::size_t batch_ = 0;
  std::size_t side_ = 0;
  Tensor<T> col_;
};

}  // namespace trajcast::nn
