#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "trajcast/errors.hpp"

namespace trajcast::nn {

// Dense row-major n-d array. The last extent is the feature/column axis;
// everything before it collapses into rows for matrix views.
template <typename T>
class Tensor {
 public:
  Tensor() = default;

  explicit Tensor(std::vector<std::size_t> shape)
      : shape_(std::move(shape)),
        data_(std::accumulate(shape_.begin(), shape_.end(),
                              std::size_t{1}, std::multiplies<>()),
              T(0)) {}

  Tensor(std::vector<std::size_t> shape, std::vector<T> data)
      : shape_(std::move(shape)), data_(std::move(data)) {
    if (numel_from_shape() != data_.size()) {
      throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                       " does not match shape " + shape_str());
    }
  }

  static Tensor zeros(std::vector<std::size_t> shape) {
    return Tensor(std::move(shape));
  }

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t extent(std::size_t i) const { return shape_[i]; }
  std::size_t numel() const { return data_.size(); }

  std::size_t cols() const { return shape_.empty() ? 0 : shape_.back(); }
  std::size_t rows() const { return cols() == 0 ? 0 : numel() / cols(); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::vector<T>& values() { return data_; }
  const std::vector<T>& values() const { return data_; }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
  const T& operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols() + c];
  }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

  void reshape(std::vector<std::size_t> shape) {
    const std::size_t n = std::accumulate(shape.begin(), shape.end(),
                                          std::size_t{1}, std::multiplies<>());
    if (n != data_.size()) {
      throw ShapeError("cannot reshape " + shape_str() + " (" +
                       std::to_string(data_.size()) + " values) to " +
                       shape_str(shape));
    }
    shape_ = std::move(shape);
  }

  bool all_finite() const {
    for (const T& v : data_) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  std::string shape_str() const { return shape_str(shape_); }

  static std::string shape_str(const std::vector<std::size_t>& shape) {
    std::ostringstream s;
    s << "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
      if (i) s << ", ";
      s << shape[i];
    }
    s << "]";
    return s.str();
  }

  bool operator==(const Tensor&) const = default;

 private:
  std::size_t numel_from_shape() const {
    return std::accumulate(shape_.begin(), shape_.end(), std::size_t{1},
                           std::multiplies<>());
  }

  std::vector<std::size_t> shape_;
  std::vector<T> data_;
};

template <typename T>
using MatrixRM =
    Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// 2-D Eigen view: all leading axes collapse into rows.
template <typename T>
Eigen::Map<MatrixRM<T>> mat_view(Tensor<T>& t) {
  return {t.data(), static_cast<Eigen::Index>(t.rows()),
          static_cast<Eigen::Index>(t.cols())};
}

template <typename T>
Eigen::Map<const MatrixRM<T>> mat_view(const Tensor<T>& t) {
  return {t.data(), static_cast<Eigen::Index>(t.rows()),
          static_cast<Eigen::Index>(t.cols())};
}

template <typename T>
void require_same_shape(const Tensor<T>& a, const Tensor<T>& b,
                        const char* context) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(context) + ": shapes " + a.shape_str() +
                     " and " + b.shape_str() + " differ");
  }
}

template <typename T>
void require_cols(const Tensor<T>& t, std::size_t expected,
                  const char* context) {
  if (t.cols() != expected) {
    throw ShapeError(std::string(context) + ": input shape " + t.shape_str() +
                     " does not end in expected extent " +
                     std::to_string(expected));
  }
}

}  // namespace trajcast::nn
