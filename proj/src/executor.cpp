// Copyright (c) 2026 PPTK contributors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pptk/executor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <thread>
#include <vector>

#include "pptk/activations.hpp"

namespace pptk {

namespace {

// Runs fn(i) for i in [0, count) on up to max_threads() workers. Tasks must
// write disjoint data; results are bit-identical for any thread count.
void parallel_for(int64_t count, const std::function<void(int64_t)>& fn) {
  int threads = std::min<int64_t>(max_threads(), count);
  if (threads <= 1) {
    for (int64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(size_t(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (int64_t i = t; i < count; i += threads) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

ShapeNCHW shape_of(const TensorF32& t) {
  check(t.rank() == 4, "expected a rank-4 NCHW tensor");
  return {t.dim(0), t.dim(1), t.dim(2), t.dim(3)};
}

}  // namespace

TensorF32 conv2d_naive(const TensorF32& input, const TensorF32& weights,
                       const TensorF32* bias, int64_t stride, int64_t pad,
                       int64_t groups) {
  ShapeNCHW in = shape_of(input);
  check(weights.rank() == 4, "conv weights must be rank 4");
  int64_t out_ch = weights.dim(0);
  int64_t k = weights.dim(2);
  check(weights.dim(2) == weights.dim(3), "only square kernels supported");
  check(in.c % groups == 0 && out_ch % groups == 0, "groups mismatch");
  check(weights.dim(1) == in.c / groups,
        "conv weight input-channel extent does not match input");
  if (bias) check(bias->numel() == out_ch, "bias length mismatch");

  int64_t out_h = (in.h + 2 * pad - k) / stride + 1;
  int64_t out_w = (in.w + 2 * pad - k) / stride + 1;
  check(out_h >= 1 && out_w >= 1, "conv output would be empty");
  TensorF32 out({in.n, out_ch, out_h, out_w});

  int64_t ch_per_group = in.c / groups;
  int64_t out_per_group = out_ch / groups;
  parallel_for(in.n * out_ch, [&](int64_t task) {
    int64_t n = task / out_ch;
    int64_t oc = task % out_ch;
    int64_t g = oc / out_per_group;
    int64_t ic0 = g * ch_per_group;
    for (int64_t oy = 0; oy < out_h; ++oy) {
      for (int64_t ox = 0; ox < out_w; ++ox) {
        double acc = bias ? double((*bias)[oc]) : 0.0;
        for (int64_t ic = 0; ic < ch_per_group; ++ic) {
          for (int64_t ky = 0; ky < k; ++ky) {
            int64_t iy = oy * stride - pad + ky;
            if (iy < 0 || iy >= in.h) continue;
            for (int64_t kx = 0; kx < k; ++kx) {
              int64_t ix = ox * stride - pad + kx;
              if (ix < 0 || ix >= in.w) continue;
              acc += double(input.at(n, ic0 + ic, iy, ix)) *
                     double(weights.at(oc, ic, ky, kx));
            }
          }
        }
        out.at(n, oc, oy, ox) = float(acc);
      }
    }
  });
  return out;
}

namespace {

// Bilinear read with zero outside the map.
double bilinear(const TensorF32& t, int64_t n, int64_t c, double y, double x) {
  int64_t h = t.dim(2), w = t.dim(3);
  if (y <= -1.0 || y >= double(h) || x <= -1.0 || x >= double(w)) return 0.0;
  int64_t y0 = int64_t(std::floor(y));
  int64_t x0 = int64_t(std::floor(x));
  double fy = y - double(y0);
  double fx = x - double(x0);
  auto sample = [&](int64_t yy, int64_t xx) -> double {
    if (yy < 0 || yy >= h || xx < 0 || xx >= w) return 0.0;
    return double(t.at(n, c, yy, xx));
  };
  return sample(y0, x0) * (1 - fy) * (1 - fx) +
         sample(y0, x0 + 1) * (1 - fy) * fx +
         sample(y0 + 1, x0) * fy * (1 - fx) +
         sample(y0 + 1, x0 + 1) * fy * fx;
}

}  // namespace

TensorF32 deform_conv2d_naive(const TensorF32& input, const TensorF32& weights,
                              const TensorF32* bias, const TensorF32& offsets,
                              int64_t stride, int64_t pad) {
  ShapeNCHW in = shape_of(input);
  int64_t out_ch = weights.dim(0);
  int64_t k = weights.dim(2);
  check(weights.dim(1) == in.c, "deform conv does not support groups");
  int64_t out_h = (in.h + 2 * pad - k) / stride + 1;
  int64_t out_w = (in.w + 2 * pad - k) / stride + 1;
  check(offsets.rank() == 4 && offsets.dim(1) == 2 * k * k &&
            offsets.dim(0) == in.n && offsets.dim(2) == out_h &&
            offsets.dim(3) == out_w,
        "offsets tensor must be [n, 2k^2, out_h, out_w]");

  TensorF32 out({in.n, out_ch, out_h, out_w});
  parallel_for(in.n * out_ch, [&](int64_t task) {
    int64_t n = task / out_ch;
    int64_t oc = task % out_ch;
    for (int64_t oy = 0; oy < out_h; ++oy) {
      for (int64_t ox = 0; ox < out_w; ++ox) {
        double acc = bias ? double((*bias)[oc]) : 0.0;
        for (int64_t ky = 0; ky < k; ++ky) {
          for (int64_t kx = 0; kx < k; ++kx) {
            int64_t tap = ky * k + kx;
            double dy = offsets.at(n, 2 * tap, oy, ox);
            double dx = offsets.at(n, 2 * tap + 1, oy, ox);
            double sy = double(oy * stride - pad + ky) + dy;
            double sx = double(ox * stride - pad + kx) + dx;
            for (int64_t ic = 0; ic < in.c; ++ic) {
              acc += bilinear(input, n, ic, sy, sx) *
                     double(weights.at(oc, ic, ky, kx));
            }
          }
        }
        out.at(n, oc, oy, ox) = float(acc);
      }
    }
  });
  return out;
}

TensorF32 dropblock_mask(Rng& rng, const ShapeNCHW& shape, int64_t block_size,
                         double keep_prob) {
  check(block_size >= 1 && block_size % 2 == 1, "block_size must be odd");
  check(block_size <= std::min(shape.h, shape.w),
        "block_size exceeds feature map");
  check(keep_prob > 0.0 && keep_prob <= 1.0, "keep_prob must be in (0,1]");

  TensorF32 mask({shape.n, shape.c, shape.h, shape.w}, 1.0f);
  if (keep_prob >= 1.0) return mask;

  // seed density chosen so the expected dropped fraction is ~ 1 - keep_prob
  int64_t seed_h = shape.h - block_size + 1;
  int64_t seed_w = shape.w - block_size + 1;
  double gamma = (1.0 - keep_prob) / double(block_size * block_size) *
                 (double(shape.h * shape.w) / double(seed_h * seed_w));

  for (int64_t n = 0; n < shape.n; ++n) {
    for (int64_t c = 0; c < shape.c; ++c) {
      for (int64_t sy = 0; sy < seed_h; ++sy) {
        for (int64_t sx = 0; sx < seed_w; ++sx) {
          if (!rng.bernoulli(gamma)) continue;
          for (int64_t y = sy; y < sy + block_size; ++y)
            for (int64_t x = sx; x < sx + block_size; ++x)
              mask.at(n, c, y, x) = 0.0f;
        }
      }
      // rescale survivors per plane
      int64_t ones = 0;
      for (int64_t y = 0; y < shape.h; ++y)
        for (int64_t x = 0; x < shape.w; ++x)
          ones += mask.at(n, c, y, x) > 0.0f ? 1 : 0;
      if (ones == 0) continue;
      float scale = float(double(shape.h * shape.w) / double(ones));
      for (int64_t y = 0; y < shape.h; ++y)
        for (int64_t x = 0; x < shape.w; ++x)
          mask.at(n, c, y, x) *= scale;
    }
  }
  return mask;
}

TensorF32 add_coord_channels(const TensorF32& input) {
  ShapeNCHW in = shape_of(input);
  TensorF32 out({in.n, in.c + 2, in.h, in.w});
  for (int64_t n = 0; n < in.n; ++n) {
    for (int64_t y = 0; y < in.h; ++y) {
      for (int64_t x = 0; x < in.w; ++x) {
        float cx = in.w == 1 ? 0.0f : -1.0f + 2.0f * float(x) / float(in.w - 1);
        float cy = in.h == 1 ? 0.0f : -1.0f + 2.0f * float(y) / float(in.h - 1);
        out.at(n, 0, y, x) = cx;
        out.at(n, 1, y, x) = cy;
      }
    }
    for (int64_t c = 0; c < in.c; ++c)
      for (int64_t y = 0; y < in.h; ++y)
        for (int64_t x = 0; x < in.w; ++x)
          out.at(n, c + 2, y, x) = input.at(n, c, y, x);
  }
  return out;
}

TensorF32 apply_activation(const TensorF32& input, ActKind kind, double slope) {
  TensorF32 out = input;
  int64_t n = out.numel();
  switch (kind) {
    case ActKind::Mish:
      for (int64_t i = 0; i < n; ++i) out[i] = float(mish(out[i]));
      break;
    case ActKind::Silu:
      for (int64_t i = 0; i < n; ++i) out[i] = float(silu(out[i]));
      break;
    case ActKind::LeakyRelu:
      for (int64_t i = 0; i < n; ++i) out[i] = float(leaky_relu(out[i], slope));
      break;
    case ActKind::Sigmoid:
      for (int64_t i = 0; i < n; ++i) out[i] = float(sigmoid(out[i]));
      break;
    case ActKind::Relu:
      for (int64_t i = 0; i < n; ++i) out[i] = std::max(out[i], 0.0f);
      break;
    case ActKind::Linear:
      break;
  }
  return out;
}

namespace {

TensorF32 pool2d(const TensorF32& input, int64_t k, int64_t s, int64_t p,
                 bool is_max) {
  ShapeNCHW in = shape_of(input);
  int64_t out_h = (in.h + 2 * p - k) / s + 1;
  int64_t out_w = (in.w + 2 * p - k) / s + 1;
  TensorF32 out({in.n, in.c, out_h, out_w});
  for (int64_t n = 0; n < in.n; ++n) {
    for (int64_t c = 0; c < in.c; ++c) {
      for (int64_t oy = 0; oy < out_h; ++oy) {
        for (int64_t ox = 0; ox < out_w; ++ox) {
          double acc = is_max ? -std::numeric_limits<double>::infinity() : 0.0;
          for (int64_t ky = 0; ky < k; ++ky) {
            int64_t iy = oy * s - p + ky;
            for (int64_t kx = 0; kx < k; ++kx) {
              int64_t ix = ox * s - p + kx;
              double v = (iy < 0 || iy >= in.h || ix < 0 || ix >= in.w)
                             ? (is_max ? -std::numeric_limits<double>::infinity()
                                       : 0.0)
                             : double(input.at(n, c, iy, ix));
              acc = is_max ? std::max(acc, v) : acc + v;
            }
          }
          out.at(n, c, oy, ox) = float(is_max ? acc : acc / double(k * k));
        }
      }
    }
  }
  return out;
}

TensorF32 batchnorm(const TensorF32& input, const NodeParams& p) {
  ShapeNCHW in = shape_of(input);
  TensorF32 out = input;
  const double eps = 1e-5;
  for (int64_t c = 0; c < in.c; ++c) {
    double scale = double(p.gamma[c]) / std::sqrt(double(p.running_var[c]) + eps);
    double shift = double(p.beta[c]) - scale * double(p.running_mean[c]);
    for (int64_t n = 0; n < in.n; ++n)
      for (int64_t y = 0; y < in.h; ++y)
        for (int64_t x = 0; x < in.w; ++x)
          out.at(n, c, y, x) = float(scale * double(input.at(n, c, y, x)) + shift);
  }
  return out;
}

TensorF32 upsample2x(const TensorF32& input) {
  ShapeNCHW in = shape_of(input);
  TensorF32 out({in.n, in.c, in.h * 2, in.w * 2});
  for (int64_t n = 0; n < in.n; ++n)
    for (int64_t c = 0; c < in.c; ++c)
      for (int64_t y = 0; y < in.h * 2; ++y)
        for (int64_t x = 0; x < in.w * 2; ++x)
          out.at(n, c, y, x) = input.at(n, c, y / 2, x / 2);
  return out;
}

TensorF32 concat_channels(const std::vector<const TensorF32*>& inputs) {
  ShapeNCHW first = shape_of(*inputs[0]);
  int64_t total_c = 0;
  for (const TensorF32* t : inputs) {
    ShapeNCHW s = shape_of(*t);
    check(s.n == first.n && s.h == first.h && s.w == first.w,
          "concat inputs disagree on n/h/w");
    total_c += s.c;
  }
  TensorF32 out({first.n, total_c, first.h, first.w});
  int64_t c0 = 0;
  for (const TensorF32* t : inputs) {
    int64_t c_in = t->dim(1);
    for (int64_t n = 0; n < first.n; ++n)
      for (int64_t c = 0; c < c_in; ++c)
        for (int64_t y = 0; y < first.h; ++y)
          for (int64_t x = 0; x < first.w; ++x)
            out.at(n, c0 + c, y, x) = t->at(n, c, y, x);
    c0 += c_in;
  }
  return out;
}

TensorF32 rand_uniform(Rng& rng, std::vector<int64_t> dims, double lo, double hi) {
  TensorF32 t(std::move(dims));
  for (int64_t i = 0; i < t.numel(); ++i) t[i] = float(rng.uniform(lo, hi));
  return t;
}

}  // namespace

ParamStore init_params(const GraphSpec& graph, uint64_t seed) {
  ParamStore store;
  uint64_t index = 0;
  for (const auto& node : graph.nodes) {
    Rng rng(Rng::derive(seed, index++));
    NodeParams p;
    switch (node.kind()) {
      case LayerKind::Conv2d:
      case LayerKind::CoordConv:
      case LayerKind::DeformConv2d: {
        ConvAttrs c;
        bool deform = false;
        if (node.kind() == LayerKind::Conv2d) {
          c = std::get<ConvAttrs>(node.attrs);
        } else if (node.kind() == LayerKind::CoordConv) {
          c = std::get<CoordConvAttrs>(node.attrs).conv;
          c.in_ch += 2;
        } else {
          c = std::get<DeformConvAttrs>(node.attrs).conv;
          deform = true;
        }
        double bound = std::sqrt(1.0 / double(c.in_ch / c.groups * c.kernel * c.kernel));
        p.weight = rand_uniform(
            rng, {c.out_ch, c.in_ch / c.groups, c.kernel, c.kernel}, -bound, bound);
        if (c.bias) p.bias = TensorF32({c.out_ch}, 0.0f);
        if (deform) {
          // near-zero offsets keep sampling close to the regular grid
          p.offset_weight = rand_uniform(
              rng, {2 * c.kernel * c.kernel, c.in_ch, c.kernel, c.kernel},
              -0.01, 0.01);
          p.offset_bias = TensorF32({2 * c.kernel * c.kernel}, 0.0f);
        }
        break;
      }
      case LayerKind::BatchNorm: {
        int64_t ch = std::get<BatchNormAttrs>(node.attrs).channels;
        p.gamma = TensorF32({ch}, 1.0f);
        p.beta = TensorF32({ch}, 0.0f);
        p.running_mean = TensorF32({ch}, 0.0f);
        p.running_var = TensorF32({ch}, 1.0f);
        break;
      }
      default:
        continue;
    }
    store.by_node[node.name] = std::move(p);
  }
  return store;
}

std::map<std::string, TensorF32> forward(
    const GraphSpec& graph, const std::map<std::string, TensorF32>& entries,
    ExecMode mode, const ParamStore& params, Rng* rng) {
  graph.validate();
  std::map<std::string, TensorF32> values;
  ShapeMap entry_shapes;
  for (const auto& e : graph.inputs) {
    auto it = entries.find(e.name);
    check(it != entries.end(), "missing entry tensor: " + e.name);
    entry_shapes[e.name] = shape_of(it->second);
    values[e.name] = it->second;
  }
  // validates connectivity and shapes up front so execution cannot half-run
  infer_shapes(graph, entry_shapes);

  for (const auto& node : graph.nodes) {
    std::vector<const TensorF32*> in;
    in.reserve(node.inputs.size());
    for (const auto& name : node.inputs) in.push_back(&values.at(name));
    const TensorF32& x = *in[0];
    TensorF32 out;

    switch (node.kind()) {
      case LayerKind::Conv2d: {
        const auto& c = std::get<ConvAttrs>(node.attrs);
        const NodeParams& p = params.by_node.at(node.name);
        out = conv2d_naive(x, p.weight, c.bias ? &p.bias : nullptr, c.stride,
                           c.pad, c.groups);
        break;
      }
      case LayerKind::CoordConv: {
        const auto& c = std::get<CoordConvAttrs>(node.attrs).conv;
        const NodeParams& p = params.by_node.at(node.name);
        TensorF32 with_coords = add_coord_channels(x);
        out = conv2d_naive(with_coords, p.weight, c.bias ? &p.bias : nullptr,
                           c.stride, c.pad, c.groups);
        break;
      }
      case LayerKind::DeformConv2d: {
        const auto& c = std::get<DeformConvAttrs>(node.attrs).conv;
        const NodeParams& p = params.by_node.at(node.name);
        TensorF32 offsets = conv2d_naive(x, p.offset_weight, &p.offset_bias,
                                         c.stride, c.pad, 1);
        out = deform_conv2d_naive(x, p.weight, c.bias ? &p.bias : nullptr,
                                  offsets, c.stride, c.pad);
        break;
      }
      case LayerKind::BatchNorm:
        out = batchnorm(x, params.by_node.at(node.name));
        break;
      case LayerKind::Activation: {
        const auto& a = std::get<ActivationAttrs>(node.attrs);
        out = apply_activation(x, a.kind, a.slope);
        break;
      }
      case LayerKind::UpsampleNearest2x:
        out = upsample2x(x);
        break;
      case LayerKind::Concat:
        out = concat_channels(in);
        break;
      case LayerKind::Add: {
        out = x;
        for (size_t i = 1; i < in.size(); ++i) {
          check(in[i]->same_shape(out), node.name + ": add shape mismatch");
          for (int64_t j = 0; j < out.numel(); ++j) out[j] += (*in[i])[j];
        }
        break;
      }
      case LayerKind::MaxPool: {
        const auto& p = std::get<MaxPoolAttrs>(node.attrs);
        out = pool2d(x, p.kernel, p.stride, p.pad, true);
        break;
      }
      case LayerKind::AvgPool: {
        const auto& p = std::get<AvgPoolAttrs>(node.attrs);
        out = pool2d(x, p.kernel, p.stride, p.pad, false);
        break;
      }
      case LayerKind::SPP: {
        const auto& s = std::get<SppAttrs>(node.attrs);
        std::vector<TensorF32> pooled;
        std::vector<const TensorF32*> parts{&x};
        pooled.reserve(s.pool_sizes.size());
        for (int64_t k : s.pool_sizes) {
          pooled.push_back(pool2d(x, k, 1, k / 2, true));
          parts.push_back(&pooled.back());
        }
        out = concat_channels(parts);
        break;
      }
      case LayerKind::DropBlock: {
        if (mode == ExecMode::Eval) {
          out = x;
        } else {
          check(rng != nullptr, "train-mode DropBlock requires an rng");
          const auto& d = std::get<DropBlockAttrs>(node.attrs);
          TensorF32 mask =
              dropblock_mask(*rng, shape_of(x), d.block_size, d.keep_prob);
          out = x;
          for (int64_t i = 0; i < out.numel(); ++i) out[i] *= mask[i];
        }
        break;
      }
    }
    values[node.name] = std::move(out);
  }
  return values;
}

}  // namespace pptk
