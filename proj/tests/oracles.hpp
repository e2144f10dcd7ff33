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

#ifndef SVKIT_TESTS_ORACLES_HPP
#define SVKIT_TESTS_ORACLES_HPP

// Independent reference implementations used only by the tests. None of
// these share code paths with the library kernels they check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "svkit/nn/tensor.hpp"

namespace svkit::oracle {

using nn::Index;
using nn::TensorD;

// Direct summation over every output element and kernel tap.
inline TensorD conv3d_direct(const TensorD& x, const TensorD& w,
                             const TensorD& b, Index sd, Index sh, Index sw,
                             bool pad_depth) {
  const Index D = x.dim(0), H = x.dim(1), W = x.dim(2), C = x.dim(3);
  const Index kd = w.dim(0), kh = w.dim(1), kw = w.dim(2), co = w.dim(4);
  const Index pd = pad_depth ? (kd - 1) / 2 : 0;
  const Index od = (D + 2 * pd - kd) / sd + 1;
  const Index oh = (H - kh) / sh + 1;
  const Index ow = (W - kw) / sw + 1;
  TensorD y({od, oh, ow, co});
  for (Index d = 0; d < od; ++d)
    for (Index h = 0; h < oh; ++h)
      for (Index v = 0; v < ow; ++v)
        for (Index o = 0; o < co; ++o) {
          double acc = b[o];
          for (Index a = 0; a < kd; ++a)
            for (Index r = 0; r < kh; ++r)
              for (Index s = 0; s < kw; ++s)
                for (Index c = 0; c < C; ++c) {
                  const Index id = d * sd + a - pd;
                  if (id < 0 || id >= D) continue;
                  const double xv = x(id, h * sh + r, v * sw + s, c);
                  const double wv =
                      w[(((a * kh + r) * kw + s) * C + c) * co + o];
                  acc += xv * wv;
                }
          y(d, h, v, o) = acc;
        }
  return y;
}

inline TensorD maxpool_freq_bruteforce(const TensorD& x) {
  const Index D = x.dim(0), H = x.dim(1), W = x.dim(2), C = x.dim(3);
  TensorD y({D, H, W / 2, C});
  for (Index d = 0; d < D; ++d)
    for (Index h = 0; h < H; ++h)
      for (Index k = 0; k < W / 2; ++k)
        for (Index c = 0; c < C; ++c) {
          double m = -INFINITY;
          for (Index j = 0; j < 2; ++j) m = std::max(m, x(d, h, 2 * k + j, c));
          y(d, h, k, c) = m;
        }
  return y;
}

// y[o] = b[o] + sum_i w[o, i] x[i] over the flattened input.
inline TensorD dense_direct(const TensorD& x, const TensorD& w, const TensorD& b) {
  const Index out = w.dim(0), in = w.dim(1);
  TensorD y({out});
  for (Index o = 0; o < out; ++o) {
    double acc = b[o];
    for (Index i = 0; i < in; ++i) acc += w[o * in + i] * x[i];
    y[o] = acc;
  }
  return y;
}

// One slope per channel of the last axis.
inline TensorD prelu_direct(const TensorD& x, const TensorD& slope) {
  TensorD y(x.shape());
  const Index c = slope.size();
  for (Index i = 0; i < x.size(); ++i) {
    const double v = x[i];
    y[i] = v > 0.0 ? v : slope[i % c] * v;
  }
  return y;
}

inline TensorD batchnorm_infer_direct(const TensorD& x, const TensorD& scale,
                                      const TensorD& shift, const TensorD& mean,
                                      const TensorD& var, double eps) {
  TensorD y(x.shape());
  const Index c = scale.size();
  for (Index i = 0; i < x.size(); ++i) {
    const Index k = i % c;
    y[i] = scale[k] * (x[i] - mean[k]) / std::sqrt(var[k] + eps) + shift[k];
  }
  return y;
}

// Locally-connected map: patch (pr, pc) of the zero-padded [H, W] input,
// flattened row-major, feeds `units` private neurons. Output [R, C, units].
inline TensorD locally_connected_direct(const TensorD& x, const TensorD& w,
                                        const TensorD& b, Index patch) {
  const Index H = x.dim(0), W = x.dim(1);
  const Index R = (H + patch - 1) / patch, C = (W + patch - 1) / patch;
  const Index units = w.dim(1), area = patch * patch;
  TensorD y({R, C, units});
  for (Index pr = 0; pr < R; ++pr)
    for (Index pc = 0; pc < C; ++pc)
      for (Index u = 0; u < units; ++u) {
        const Index p = pr * C + pc;
        double acc = b[p * units + u];
        for (Index r = 0; r < patch; ++r)
          for (Index s = 0; s < patch; ++s) {
            const Index h = pr * patch + r, v = pc * patch + s;
            if (h >= H || v >= W) continue;
            acc += w[(p * units + u) * area + r * patch + s] * x[h * W + v];
          }
        y[p * units + u] = acc;
      }
  return y;
}

// Power spectrum |X_k|^2 / n_fft of a zero-padded frame via the textbook
// O(N^2) DFT.
inline std::vector<double> power_spectrum_dft(const std::vector<double>& frame,
                                              Index n_fft) {
  std::vector<double> out(static_cast<std::size_t>(n_fft / 2 + 1));
  for (Index k = 0; k <= n_fft / 2; ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t n = 0; n < frame.size(); ++n) {
      const double phase = -2.0 * std::numbers::pi * double(k) * double(n) /
                           double(n_fft);
      acc += frame[n] * std::complex<double>(std::cos(phase), std::sin(phase));
    }
    out[static_cast<std::size_t>(k)] = std::norm(acc) / double(n_fft);
  }
  return out;
}

}  // namespace svkit::oracle

#endif  // SVKIT_TESTS_ORACLES_HPP
