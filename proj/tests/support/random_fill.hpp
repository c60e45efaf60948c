#pragma once

#include "trajcast/nn.hpp"
#include "trajcast/rng.hpp"

namespace trajcast::testing {

template <typename T>
void fill_uniform(nn::Tensor<T>& t, Rng& rng, double lo = -1.0,
                  double hi = 1.0) {
  for (T& v : t.values()) v = static_cast<T>(rng.uniform(lo, hi));
}

template <typename T>
nn::Tensor<T> random_tensor(std::vector<std::size_t> shape, Rng& rng,
                            double lo = -1.0, double hi = 1.0) {
  nn::Tensor<T> t(std::move(shape));
  fill_uniform(t, rng, lo, hi);
  return t;
}

}  // namespace trajcast::testing
