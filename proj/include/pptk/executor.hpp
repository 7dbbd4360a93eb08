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

#ifndef PPTK_EXECUTOR_HPP_
#define PPTK_EXECUTOR_HPP_

#include <map>
#include <string>

#include "pptk/graph.hpp"
#include "pptk/rng.hpp"
#include "pptk/tensor.hpp"

namespace pptk {

// Correctness-first execution of GraphSpec on small tensors. No
// vectorization contract; intended for verification, not throughput.

struct NodeParams {
  TensorF32 weight;         // conv: [out, in/groups (+2 for CoordConv), k, k]
  TensorF32 bias;           // [out], empty when absent
  TensorF32 offset_weight;  // deform: [2k^2, in, k, k]
  TensorF32 offset_bias;    // [2k^2]
  TensorF32 gamma, beta, running_mean, running_var;  // BN, each [ch]
};

struct ParamStore {
  std::map<std::string, NodeParams> by_node;
};

// Deterministic initialization: conv weights uniform in +-sqrt(1/fan_in),
// biases zero, BN identity, deform offsets near zero.
ParamStore init_params(const GraphSpec& graph, uint64_t seed);

enum class ExecMode { Train, Eval };

// Direct 7-loop convolution. weights [out, in/groups, k, k]; bias may be null.
TensorF32 conv2d_naive(const TensorF32& input, const TensorF32& weights,
                       const TensorF32* bias, int64_t stride, int64_t pad,
                       int64_t groups = 1);

// 3x3-style deformable convolution: each kernel tap samples the input at a
// fractional position given by `offsets` ([n, 2k^2, out_h, out_w], dy/dx
// interleaved per tap). Out-of-bounds bilinear reads are zero.
TensorF32 deform_conv2d_naive(const TensorF32& input, const TensorF32& weights,
                              const TensorF32* bias, const TensorF32& offsets,
                              int64_t stride, int64_t pad);

// Mask entries are 0 inside dropped block_size^2 squares and
// area/ones_count elsewhere. Block seeds are confined so every block fits
// inside the map. keep_prob = 1 yields all ones.
TensorF32 dropblock_mask(Rng& rng, const ShapeNCHW& shape, int64_t block_size,
                         double keep_prob);

// Prepends x and y coordinate channels normalized to [-1, 1].
TensorF32 add_coord_channels(const TensorF32& input);

TensorF32 apply_activation(const TensorF32& input, ActKind kind,
                           double slope = 0.1);

// Evaluates every node in order; returns all node outputs by name.
// DropBlock is identity in Eval mode; Train mode requires `rng` when the
// graph contains DropBlock nodes.
std::map<std::string, TensorF32> forward(
    const GraphSpec& graph, const std::map<std::string, TensorF32>& entries,
    ExecMode mode, const ParamStore& params, Rng* rng = nullptr);

}  // namespace pptk

#endif  // PPTK_EXECUTOR_HPP_
