// Copyright (c) 2026 The svkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SVKIT_NN_TENSOR_HPP
#define SVKIT_NN_TENSOR_HPP

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "svkit/error.hpp"

namespace svkit::nn {

using Index = Eigen::Index;
using Shape = std::vector<Index>;

inline Index shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), Index{1},
                         std::multiplies<>());
}

inline std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  return os.str();
}

// Dense row-major tensor. Storage is an Eigen column vector so that
// contiguous blocks can be mapped as matrices without copying.
template <typename Scalar>
class Tensor {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using RowMatrix =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using MatrixMap = Eigen::Map<RowMatrix>;
  using ConstMatrixMap = Eigen::Map<const RowMatrix>;

  Tensor() = default;

  explicit Tensor(Shape shape) : shape_(std::move(shape)) {
    check_extents(shape_);
    values_ = Vector::Zero(shape_size(shape_));
  }

  Tensor(Shape shape, Vector values)
      : shape_(std::move(shape)), values_(std::move(values)) {
    check_extents(shape_);
    if (shape_size(shape_) != values_.size()) {
      throw DimensionError("tensor: shape " + shape_string(shape_) +
                           " does not match " +
                           std::to_string(values_.size()) + " values");
    }
  }

  static Tensor constant(Shape shape, Scalar value) {
    Tensor t(std::move(shape));
    t.values_.setConstant(value);
    return t;
  }

  const Shape& shape() const { return shape_; }
  Index rank() const { return static_cast<Index>(shape_.size()); }
  Index dim(Index axis) const { return shape_.at(static_cast<std::size_t>(axis)); }
  Index size() const { return values_.size(); }
  bool empty() const { return values_.size() == 0; }

  Vector& values() { return values_; }
  const Vector& values() const { return values_; }
  Scalar* data() { return values_.data(); }
  const Scalar* data() const { return values_.data(); }

  Scalar& operator[](Index i) { return values_[i]; }
  Scalar operator[](Index i) const { return values_[i]; }

  // Rank-4 accessors for the [D, H, W, C] layout used by feature cubes.
  Scalar& operator()(Index d, Index h, Index w, Index c) {
    return values_[((d * shape_[1] + h) * shape_[2] + w) * shape_[3] + c];
  }
  Scalar operator()(Index d, Index h, Index w, Index c) const {
    return values_[((d * shape_[1] + h) * shape_[2] + w) * shape_[3] + c];
  }

  // View of the flat storage as rows x cols, row-major.
  MatrixMap as_matrix(Index rows, Index cols) {
    check_matrix(rows, cols);
    return MatrixMap(values_.data(), rows, cols);
  }
  ConstMatrixMap as_matrix(Index rows, Index cols) const {
    check_matrix(rows, cols);
    return ConstMatrixMap(values_.data(), rows, cols);
  }

  Tensor reshaped(Shape shape) const& { return Tensor(std::move(shape), values_); }
  Tensor reshaped(Shape shape) && {
    return Tensor(std::move(shape), std::move(values_));
  }

  bool all_finite() const { return values_.allFinite(); }

  friend bool operator==(const Tensor& a, const Tensor& b) {
    return a.shape_ == b.shape_ && a.values_ == b.values_;
  }

 private:
  static void check_extents(const Shape& shape) {
    for (Index e : shape) {
      if (e <= 0) {
        throw DimensionError("tensor: extents must be positive, got " +
                             shape_string(shape));
      }
    }
  }
  void check_matrix(Index rows, Index cols) const {
    if (rows * cols != values_.size()) {
      throw DimensionError("tensor: cannot view " + shape_string(shape_) +
                           " as " + std::to_string(rows) + "x" +
                           std::to_string(cols));
    }
  }

  Shape shape_;
  Vector values_;
};

using TensorD = Tensor<double>;

}  // namespace svkit::nn

#endif  // SVKIT_NN_TENSOR_HPP
