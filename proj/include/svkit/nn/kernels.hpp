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

#ifndef SVKIT_NN_KERNELS_HPP
#define SVKIT_NN_KERNELS_HPP

// Forward and backward kernels for every layer type used by the 3D-CNN and
// the locally-connected baseline. Everything here is a free function over
// Tensor<Scalar>; the stateful layer wrappers live in layers.hpp.
//
// Layout conventions:
//   volumes       [D, H, W, C]   depth (utterance) x time x frequency x channel
//   conv weights  [kD, kH, kW, Cin, Cout]
//   dense weights [out, in]
//   lc weights    [patches, units, patch*patch]

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "svkit/nn/rng.hpp"
#include "svkit/nn/tensor.hpp"

namespace svkit::nn {

struct Extent3 {
  Index depth = 1;
  Index height = 1;
  Index width = 1;

  friend bool operator==(const Extent3&, const Extent3&) = default;
};

namespace detail {

inline void require_rank(const Shape& shape, Index rank, const char* what) {
  if (static_cast<Index>(shape.size()) != rank) {
    throw DimensionError(std::string(what) + ": expected rank " +
                         std::to_string(rank) + ", got shape " +
                         shape_string(shape));
  }
}

struct ConvGeometry {
  Index in_d, in_h, in_w, in_c;
  Index k_d, k_h, k_w, out_c;
  Index pad_d;
  Index out_d, out_h, out_w;

  Index positions() const { return out_d * out_h * out_w; }
  Index patch() const { return k_d * k_h * k_w * in_c; }
};

inline Index conv_extent(Index in, Index kernel, Index stride, Index pad,
                         const char* axis) {
  if (stride < 1) {
    throw DimensionError(std::string("conv3d: stride along ") + axis +
                         " must be >= 1");
  }
  if (in + 2 * pad < kernel) {
    throw DimensionError(std::string("conv3d: kernel extent ") +
                         std::to_string(kernel) + " exceeds input extent " +
                         std::to_string(in + 2 * pad) + " along " + axis +
                         " axis");
  }
  return (in + 2 * pad - kernel) / stride + 1;
}

inline ConvGeometry conv_geometry(const Shape& x, const Shape& w,
                                  const Extent3& stride, bool pad_depth) {
  require_rank(x, 4, "conv3d input");
  require_rank(w, 5, "conv3d weights");
  if (x[3] != w[3]) {
    throw DimensionError("conv3d: channel axis mismatch, input has " +
                         std::to_string(x[3]) + " channels, kernel expects " +
                         std::to_string(w[3]));
  }
  ConvGeometry g{};
  g.in_d = x[0];
  g.in_h = x[1];
  g.in_w = x[2];
  g.in_c = x[3];
  g.k_d = w[0];
  g.k_h = w[1];
  g.k_w = w[2];
  g.out_c = w[4];
  g.pad_d = pad_depth ? (g.k_d - 1) / 2 : 0;
  g.out_d = conv_extent(g.in_d, g.k_d, stride.depth, g.pad_d, "depth");
  g.out_h = conv_extent(g.in_h, g.k_h, stride.height, 0, "height");
  g.out_w = conv_extent(g.in_w, g.k_w, stride.width, 0, "width");
  return g;
}

// Rows of the receptive-field matrix processed per GEMM, sized so one
// block of unrolled patches stays cache resident.
inline Index im2col_block_rows(const ConvGeometry& g) {
  return std::max<Index>(32, (Index{1} << 17) / std::max<Index>(1, g.patch()));
}

// Unrolls the receptive fields of output positions [row0, row0 + rows) into
// consecutive rows of `col` (rows x patch). Taps in depth padding are zero.
template <typename Scalar>
void im2col(const Tensor<Scalar>& x, const ConvGeometry& g,
            const Extent3& stride, Index row0, Index rows,
            typename Tensor<Scalar>::RowMatrix& col) {
  const Scalar* src = x.data();
  const Index run = g.k_w * g.in_c;
  for (Index r = 0; r < rows; ++r) {
    const Index pos = row0 + r;
    const Index ow = pos % g.out_w;
    const Index oh = (pos / g.out_w) % g.out_h;
    const Index od = pos / (g.out_w * g.out_h);
    Scalar* dst = col.data() + r * g.patch();
    for (Index a = 0; a < g.k_d; ++a) {
      const Index id = od * stride.depth + a - g.pad_d;
      if (id < 0 || id >= g.in_d) {
        std::fill(dst, dst + g.k_h * run, Scalar(0));
        dst += g.k_h * run;
        continue;
      }
      for (Index b = 0; b < g.k_h; ++b) {
        const Index ih = oh * stride.height + b;
        const Scalar* line =
            src + ((id * g.in_h + ih) * g.in_w + ow * stride.width) * g.in_c;
        std::copy(line, line + run, dst);
        dst += run;
      }
    }
  }
}

template <typename Scalar>
void col2im_add(const typename Tensor<Scalar>::RowMatrix& col,
                const ConvGeometry& g, const Extent3& stride, Index row0,
                Index rows, Tensor<Scalar>& grad_x) {
  Scalar* dst = grad_x.data();
  const Index run = g.k_w * g.in_c;
  for (Index r = 0; r < rows; ++r) {
    const Index pos = row0 + r;
    const Index ow = pos % g.out_w;
    const Index oh = (pos / g.out_w) % g.out_h;
    const Index od = pos / (g.out_w * g.out_h);
    const Scalar* src = col.data() + r * g.patch();
    for (Index a = 0; a < g.k_d; ++a) {
      const Index id = od * stride.depth + a - g.pad_d;
      if (id < 0 || id >= g.in_d) {
        src += g.k_h * run;
        continue;
      }
      for (Index b = 0; b < g.k_h; ++b) {
        const Index ih = oh * stride.height + b;
        Scalar* line =
            dst + ((id * g.in_h + ih) * g.in_w + ow * stride.width) * g.in_c;
        for (Index i = 0; i < run; ++i) line[i] += src[i];
        src += run;
      }
    }
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// conv3d

// Output extents of conv3d_forward for a given input shape; throws the same
// DimensionError the forward pass would.
inline Shape conv3d_output_shape(const Shape& x, const Shape& weights,
                                 const Extent3& stride, bool pad_depth) {
  const auto g = detail::conv_geometry(x, weights, stride, pad_depth);
  return {g.out_d, g.out_h, g.out_w, g.out_c};
}

// Valid-mode 3D convolution (cross-correlation). With pad_depth set, the
// depth axis is zero-padded by (kD - 1) / 2 on both sides.
template <typename Scalar>
Tensor<Scalar> conv3d_forward(const Tensor<Scalar>& x,
                              const Tensor<Scalar>& weights,
                              const Tensor<Scalar>& bias, const Extent3& stride,
                              bool pad_depth) {
  const auto g = detail::conv_geometry(x.shape(), weights.shape(), stride,
                                       pad_depth);
  if (bias.size() != g.out_c) {
    throw DimensionError("conv3d: bias length " + std::to_string(bias.size()) +
                         " != output channels " + std::to_string(g.out_c));
  }
  Tensor<Scalar> y({g.out_d, g.out_h, g.out_w, g.out_c});
  auto out = y.as_matrix(g.positions(), g.out_c);
  const auto w = weights.as_matrix(g.patch(), g.out_c);
  const Index block = detail::im2col_block_rows(g);
  typename Tensor<Scalar>::RowMatrix col(block, g.patch());
  for (Index r0 = 0; r0 < g.positions(); r0 += block) {
    const Index rows = std::min(block, g.positions() - r0);
    detail::im2col(x, g, stride, r0, rows, col);
    out.middleRows(r0, rows).noalias() = col.topRows(rows) * w;
  }
  out.rowwise() += bias.values().transpose();
  return y;
}

template <typename Scalar>
struct ConvGradients {
  Tensor<Scalar> input;
  Tensor<Scalar> weights;
  Tensor<Scalar> bias;
};

template <typename Scalar>
ConvGradients<Scalar> conv3d_backward(const Tensor<Scalar>& x,
                                      const Tensor<Scalar>& weights,
                                      const Extent3& stride, bool pad_depth,
                                      const Tensor<Scalar>& grad_out) {
  const auto g = detail::conv_geometry(x.shape(), weights.shape(), stride,
                                       pad_depth);
  const Shape expected{g.out_d, g.out_h, g.out_w, g.out_c};
  if (grad_out.shape() != expected) {
    throw DimensionError("conv3d_backward: grad_out shape " +
                         shape_string(grad_out.shape()) + " != " +
                         shape_string(expected));
  }
  const auto go = grad_out.as_matrix(g.positions(), g.out_c);
  const auto w = weights.as_matrix(g.patch(), g.out_c);

  ConvGradients<Scalar> grads{Tensor<Scalar>(x.shape()),
                              Tensor<Scalar>(weights.shape()),
                              Tensor<Scalar>({g.out_c})};
  auto gw = grads.weights.as_matrix(g.patch(), g.out_c);
  grads.bias.values() = go.colwise().sum().transpose();
  const Index block = detail::im2col_block_rows(g);
  typename Tensor<Scalar>::RowMatrix col(block, g.patch());
  typename Tensor<Scalar>::RowMatrix grad_col(block, g.patch());
  for (Index r0 = 0; r0 < g.positions(); r0 += block) {
    const Index rows = std::min(block, g.positions() - r0);
    detail::im2col(x, g, stride, r0, rows, col);
    gw.noalias() += col.topRows(rows).transpose() * go.middleRows(r0, rows);
    grad_col.topRows(rows).noalias() = go.middleRows(r0, rows) * w.transpose();
    detail::col2im_add(grad_col, g, stride, r0, rows, grads.input);
  }
  return grads;
}

// ---------------------------------------------------------------------------
// frequency-only max pooling (kernel 1x1x2, stride 1x1x2)

template <typename Scalar>
struct PoolResult {
  Tensor<Scalar> output;
  std::vector<Index> argmax;  // flat input index per output element
};

template <typename Scalar>
PoolResult<Scalar> maxpool_freq_forward(const Tensor<Scalar>& x) {
  detail::require_rank(x.shape(), 4, "maxpool_freq");
  const Index d = x.dim(0), h = x.dim(1), w = x.dim(2), c = x.dim(3);
  if (w < 2) {
    throw DimensionError("maxpool_freq: frequency (width) axis extent " +
                         std::to_string(w) + " < 2");
  }
  const Index ow = w / 2;
  PoolResult<Scalar> r{Tensor<Scalar>({d, h, ow, c}), {}};
  r.argmax.resize(static_cast<std::size_t>(r.output.size()));
  Index o = 0;
  for (Index i = 0; i < d * h; ++i) {
    for (Index k = 0; k < ow; ++k) {
      for (Index ch = 0; ch < c; ++ch, ++o) {
        const Index a = (i * w + 2 * k) * c + ch;
        const Index b = a + c;
        // ties go to the first element
        const Index pick = x[b] > x[a] ? b : a;
        r.output[o] = x[pick];
        r.argmax[static_cast<std::size_t>(o)] = pick;
      }
    }
  }
  return r;
}

template <typename Scalar>
Tensor<Scalar> maxpool_freq_backward(const Shape& input_shape,
                                     const std::vector<Index>& argmax,
                                     const Tensor<Scalar>& grad_out) {
  if (static_cast<Index>(argmax.size()) != grad_out.size()) {
    throw DimensionError("maxpool_freq_backward: grad_out size mismatch");
  }
  Tensor<Scalar> grad(input_shape);
  for (Index o = 0; o < grad_out.size(); ++o) {
    grad[argmax[static_cast<std::size_t>(o)]] += grad_out[o];
  }
  return grad;
}

// ---------------------------------------------------------------------------
// PReLU, one slope per channel (last axis)

template <typename Scalar>
Tensor<Scalar> prelu_forward(const Tensor<Scalar>& x,
                             const Tensor<Scalar>& slope) {
  const Index c = x.dim(x.rank() - 1);
  if (slope.size() != c) {
    throw DimensionError("prelu: slope length " + std::to_string(slope.size()) +
                         " != channel count " + std::to_string(c));
  }
  const Index rows = x.size() / c;
  const auto a = slope.values().transpose().array();
  Tensor<Scalar> y(x.shape());
  const auto xm = x.as_matrix(rows, c).array();
  y.as_matrix(rows, c).array() =
      xm.max(Scalar(0)) + xm.min(Scalar(0)).rowwise() * a;
  return y;
}

template <typename Scalar>
struct PreluGradients {
  Tensor<Scalar> input;
  Tensor<Scalar> slope;
};

template <typename Scalar>
PreluGradients<Scalar> prelu_backward(const Tensor<Scalar>& x,
                                      const Tensor<Scalar>& slope,
                                      const Tensor<Scalar>& grad_out) {
  if (grad_out.shape() != x.shape()) {
    throw DimensionError("prelu_backward: grad_out shape mismatch");
  }
  const Index c = slope.size();
  const Index rows = x.size() / c;
  PreluGradients<Scalar> g{Tensor<Scalar>(x.shape()), Tensor<Scalar>({c})};
  const auto xm = x.as_matrix(rows, c).array();
  const auto go = grad_out.as_matrix(rows, c).array();
  const auto negative = (xm < Scalar(0)).template cast<Scalar>();
  const auto a = slope.values().transpose().array();
  g.input.as_matrix(rows, c).array() =
      go * (Scalar(1) - negative) + (go * negative).rowwise() * a;
  g.slope.values() =
      (xm.min(Scalar(0)) * go).colwise().sum().transpose().matrix();
  return g;
}

// ---------------------------------------------------------------------------
// batch normalization, statistics per channel (last axis) over the whole
// batch and every spatial position

template <typename Scalar>
struct BatchNormCache {
  std::vector<Tensor<Scalar>> normalized;  // x-hat per sample
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> mean;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> var;  // biased batch variance
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> inv_std;
};

template <typename Scalar>
struct BatchNormOutput {
  std::vector<Tensor<Scalar>> outputs;
  BatchNormCache<Scalar> cache;
};

template <typename Scalar>
BatchNormOutput<Scalar> batchnorm_forward_train(
    std::span<const Tensor<Scalar>> batch, const Tensor<Scalar>& scale,
    const Tensor<Scalar>& shift, Scalar eps) {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  if (batch.empty()) throw DimensionError("batchnorm: empty batch");
  if (!(eps > Scalar(0))) throw ConfigError("batchnorm: eps must be > 0");
  const Shape& shape = batch.front().shape();
  const Index c = shape.back();
  if (scale.size() != c || shift.size() != c) {
    throw DimensionError("batchnorm: scale/shift length != channel count");
  }
  const Index per_sample = shape_size(shape) / c;
  const Scalar count = static_cast<Scalar>(per_sample * Index(batch.size()));

  Vec mean = Vec::Zero(c);
  for (const auto& x : batch) {
    if (x.shape() != shape) {
      throw DimensionError("batchnorm: inconsistent shapes within batch");
    }
    mean += x.as_matrix(per_sample, c).colwise().sum().transpose();
  }
  mean /= count;
  Vec var = Vec::Zero(c);
  for (const auto& x : batch) {
    var += (x.as_matrix(per_sample, c).rowwise() - mean.transpose())
               .array()
               .square()
               .colwise()
               .sum()
               .matrix()
               .transpose();
  }
  var /= count;

  BatchNormOutput<Scalar> out;
  out.cache.mean = mean;
  out.cache.var = var;
  out.cache.inv_std = (var.array() + eps).rsqrt().matrix();
  for (const auto& x : batch) {
    Tensor<Scalar> xhat(shape);
    xhat.as_matrix(per_sample, c) =
        ((x.as_matrix(per_sample, c).rowwise() - mean.transpose()).array().rowwise() *
         out.cache.inv_std.transpose().array())
            .matrix();
    Tensor<Scalar> y(shape);
    y.as_matrix(per_sample, c) =
        ((xhat.as_matrix(per_sample, c).array().rowwise() *
          scale.values().transpose().array())
             .rowwise() +
         shift.values().transpose().array())
            .matrix();
    out.cache.normalized.push_back(std::move(xhat));
    out.outputs.push_back(std::move(y));
  }
  return out;
}

template <typename Scalar>
Tensor<Scalar> batchnorm_forward_infer(const Tensor<Scalar>& x,
                                       const Tensor<Scalar>& scale,
                                       const Tensor<Scalar>& shift,
                                       const Tensor<Scalar>& running_mean,
                                       const Tensor<Scalar>& running_var,
                                       Scalar eps) {
  const Index c = x.dim(x.rank() - 1);
  if (scale.size() != c || running_mean.size() != c ||
      running_var.size() != c || shift.size() != c) {
    throw DimensionError("batchnorm: parameter length != channel count");
  }
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Index rows = x.size() / c;
  const Vec inv_std = (running_var.values().array() + eps).rsqrt().matrix();
  const Vec gain = scale.values().cwiseProduct(inv_std);
  const Vec offset = shift.values() - running_mean.values().cwiseProduct(gain);
  Tensor<Scalar> y(x.shape());
  y.as_matrix(rows, c) =
      ((x.as_matrix(rows, c).array().rowwise() * gain.transpose().array())
           .rowwise() +
       offset.transpose().array())
          .matrix();
  return y;
}

template <typename Scalar>
struct BatchNormGradients {
  std::vector<Tensor<Scalar>> inputs;
  Tensor<Scalar> scale;
  Tensor<Scalar> shift;
};

template <typename Scalar>
BatchNormGradients<Scalar> batchnorm_backward_train(
    const BatchNormCache<Scalar>& cache, const Tensor<Scalar>& scale,
    std::span<const Tensor<Scalar>> grad_out) {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  if (grad_out.size() != cache.normalized.size()) {
    throw DimensionError("batchnorm_backward: batch size mismatch");
  }
  const Shape& shape = cache.normalized.front().shape();
  const Index c = shape.back();
  const Index per_sample = shape_size(shape) / c;
  const Scalar count =
      static_cast<Scalar>(per_sample * Index(cache.normalized.size()));

  Vec sum_g = Vec::Zero(c);
  Vec sum_g_xhat = Vec::Zero(c);
  for (std::size_t i = 0; i < grad_out.size(); ++i) {
    if (grad_out[i].shape() != shape) {
      throw DimensionError("batchnorm_backward: grad_out shape mismatch");
    }
    const auto g = grad_out[i].as_matrix(per_sample, c);
    const auto xhat = cache.normalized[i].as_matrix(per_sample, c);
    sum_g += g.colwise().sum().transpose();
    sum_g_xhat += g.cwiseProduct(xhat).colwise().sum().transpose();
  }

  BatchNormGradients<Scalar> out{{}, Tensor<Scalar>({c}), Tensor<Scalar>({c})};
  out.scale.values() = sum_g_xhat;
  out.shift.values() = sum_g;
  // dx = gamma * inv_std / N * (N g - sum(g) - xhat * sum(g xhat))
  const Vec k = (scale.values().array() * cache.inv_std.array() / count).matrix();
  for (std::size_t i = 0; i < grad_out.size(); ++i) {
    const auto g = grad_out[i].as_matrix(per_sample, c);
    const auto xhat = cache.normalized[i].as_matrix(per_sample, c);
    Tensor<Scalar> dx(shape);
    dx.as_matrix(per_sample, c) =
        (((g.array() * count).rowwise() - sum_g.transpose().array() -
          xhat.array().rowwise() * sum_g_xhat.transpose().array())
             .rowwise() *
         k.transpose().array())
            .matrix();
    out.inputs.push_back(std::move(dx));
  }
  return out;
}

// ---------------------------------------------------------------------------
// fully connected: y = W x + b over the flattened input

template <typename Scalar>
Tensor<Scalar> fully_connected_forward(const Tensor<Scalar>& x,
                                       const Tensor<Scalar>& weights,
                                       const Tensor<Scalar>& bias) {
  detail::require_rank(weights.shape(), 2, "fully_connected weights");
  const Index out = weights.dim(0), in = weights.dim(1);
  if (x.size() != in) {
    throw DimensionError("fully_connected: input length " +
                         std::to_string(x.size()) + " != fan-in " +
                         std::to_string(in));
  }
  if (bias.size() != out) {
    throw DimensionError("fully_connected: bias length mismatch");
  }
  Tensor<Scalar> y({out});
  y.values().noalias() = weights.as_matrix(out, in) * x.values();
  y.values() += bias.values();
  return y;
}

template <typename Scalar>
struct DenseGradients {
  Tensor<Scalar> input;
  Tensor<Scalar> weights;
  Tensor<Scalar> bias;
};

template <typename Scalar>
DenseGradients<Scalar> fully_connected_backward(const Tensor<Scalar>& x,
                                                const Tensor<Scalar>& weights,
                                                const Tensor<Scalar>& grad_out) {
  const Index out = weights.dim(0), in = weights.dim(1);
  if (grad_out.size() != out || x.size() != in) {
    throw DimensionError("fully_connected_backward: shape mismatch");
  }
  DenseGradients<Scalar> g{Tensor<Scalar>(x.shape()),
                           Tensor<Scalar>(weights.shape()),
                           Tensor<Scalar>({out})};
  g.input.values().noalias() =
      weights.as_matrix(out, in).transpose() * grad_out.values();
  g.weights.as_matrix(out, in).noalias() =
      grad_out.values() * x.values().transpose();
  g.bias.values() = grad_out.values();
  return g;
}

// ---------------------------------------------------------------------------
// locally connected: non-overlapping patch x patch tiles, each with its own
// untied weight block. Input [H, W] or [H, W, 1]; the grid is zero-padded
// up to a multiple of the patch size. Output [H/p, W/p, units].

struct LocalGrid {
  Index height, width, patch, rows, cols;
  Index patches() const { return rows * cols; }
};

inline LocalGrid local_grid(const Shape& x, Index patch) {
  if (x.size() != 2 && !(x.size() == 3 && x[2] == 1)) {
    throw DimensionError("locally_connected: expected [H, W] or [H, W, 1], got " +
                         shape_string(x));
  }
  if (patch < 1) throw DimensionError("locally_connected: patch must be >= 1");
  return {x[0], x[1], patch, (x[0] + patch - 1) / patch,
          (x[1] + patch - 1) / patch};
}

namespace detail {

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> gather_patch(const Tensor<Scalar>& x,
                                                      const LocalGrid& g,
                                                      Index pr, Index pc) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v =
      Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(g.patch * g.patch);
  for (Index r = 0; r < g.patch; ++r) {
    const Index h = pr * g.patch + r;
    if (h >= g.height) break;
    for (Index c = 0; c < g.patch; ++c) {
      const Index w = pc * g.patch + c;
      if (w >= g.width) break;
      v[r * g.patch + c] = x[h * g.width + w];
    }
  }
  return v;
}

}  // namespace detail

template <typename Scalar>
Tensor<Scalar> locally_connected_forward(const Tensor<Scalar>& x,
                                         const Tensor<Scalar>& weights,
                                         const Tensor<Scalar>& bias,
                                         Index patch) {
  const auto g = local_grid(x.shape(), patch);
  detail::require_rank(weights.shape(), 3, "locally_connected weights");
  const Index units = weights.dim(1);
  if (weights.dim(0) != g.patches() || weights.dim(2) != patch * patch ||
      bias.size() != g.patches() * units) {
    throw DimensionError("locally_connected: weights " +
                         shape_string(weights.shape()) + " do not fit a " +
                         std::to_string(g.rows) + "x" + std::to_string(g.cols) +
                         " patch grid");
  }
  Tensor<Scalar> y({g.rows, g.cols, units});
  const Index area = patch * patch;
  for (Index pr = 0; pr < g.rows; ++pr) {
    for (Index pc = 0; pc < g.cols; ++pc) {
      const Index p = pr * g.cols + pc;
      const auto v = detail::gather_patch(x, g, pr, pc);
      Eigen::Map<const typename Tensor<Scalar>::RowMatrix> w(
          weights.data() + p * units * area, units, area);
      y.values().segment(p * units, units) =
          w * v + bias.values().segment(p * units, units);
    }
  }
  return y;
}

template <typename Scalar>
DenseGradients<Scalar> locally_connected_backward(
    const Tensor<Scalar>& x, const Tensor<Scalar>& weights, Index patch,
    const Tensor<Scalar>& grad_out) {
  const auto g = local_grid(x.shape(), patch);
  const Index units = weights.dim(1);
  const Index area = patch * patch;
  if (grad_out.size() != g.patches() * units) {
    throw DimensionError("locally_connected_backward: grad_out size mismatch");
  }
  DenseGradients<Scalar> out{Tensor<Scalar>(x.shape()),
                             Tensor<Scalar>(weights.shape()),
                             Tensor<Scalar>({g.patches() * units})};
  out.bias.values() = grad_out.values();
  for (Index pr = 0; pr < g.rows; ++pr) {
    for (Index pc = 0; pc < g.cols; ++pc) {
      const Index p = pr * g.cols + pc;
      const auto v = detail::gather_patch(x, g, pr, pc);
      const auto go = grad_out.values().segment(p * units, units);
      Eigen::Map<const typename Tensor<Scalar>::RowMatrix> w(
          weights.data() + p * units * area, units, area);
      Eigen::Map<typename Tensor<Scalar>::RowMatrix> gw(
          out.weights.data() + p * units * area, units, area);
      gw.noalias() = go * v.transpose();
      const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> gv = w.transpose() * go;
      for (Index r = 0; r < patch; ++r) {
        const Index h = pr * patch + r;
        if (h >= g.height) break;
        for (Index c = 0; c < patch; ++c) {
          const Index wcol = pc * patch + c;
          if (wcol >= g.width) break;
          out.input[h * g.width + wcol] += gv[r * patch + c];
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// softmax + cross-entropy

template <typename Scalar>
struct SoftmaxXent {
  Scalar loss;
  Tensor<Scalar> probs;
};

template <typename Scalar>
Tensor<Scalar> softmax(const Tensor<Scalar>& logits) {
  Tensor<Scalar> p(logits.shape());
  const Scalar peak = logits.values().maxCoeff();
  p.values() = (logits.values().array() - peak).exp().matrix();
  p.values() /= p.values().sum();
  return p;
}

template <typename Scalar>
SoftmaxXent<Scalar> softmax_xent(const Tensor<Scalar>& logits, Index label) {
  const Index c = logits.size();
  if (label < 0 || label >= c) {
    throw ConfigError("softmax_xent: label " + std::to_string(label) +
                      " out of range [0, " + std::to_string(c) + ")");
  }
  const Scalar peak = logits.values().maxCoeff();
  const auto shifted = (logits.values().array() - peak).eval();
  const Scalar log_z = std::log(shifted.exp().sum());
  SoftmaxXent<Scalar> r{log_z - shifted[label], Tensor<Scalar>(logits.shape())};
  r.probs.values() = (shifted - log_z).exp().matrix();
  return r;
}

// ---------------------------------------------------------------------------
// He / variance-scaling initialization: N(0, 2 / fan_in)

inline TensorD variance_scaling_init(Shape shape, Index fan_in, Rng& rng) {
  if (fan_in < 1) throw ConfigError("variance_scaling_init: fan_in must be >= 1");
  TensorD t(std::move(shape));
  const double stddev = std::sqrt(2.0 / static_cast<double>(fan_in));
  for (Index i = 0; i < t.size(); ++i) t[i] = rng.normal(0.0, stddev);
  return t;
}

}  // namespace svkit::nn

#endif  // SVKIT_NN_KERNELS_HPP
