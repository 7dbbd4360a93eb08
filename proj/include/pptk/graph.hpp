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

#ifndef PPTK_GRAPH_HPP_
#define PPTK_GRAPH_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "pptk/common.hpp"

namespace pptk {

struct ShapeNCHW {
  int64_t n = 1;
  int64_t c = 1;
  int64_t h = 1;
  int64_t w = 1;
  bool operator==(const ShapeNCHW&) const = default;
  int64_t numel() const { return n * c * h * w; }
  std::string str() const;
};

enum class ActKind { Mish, Silu, LeakyRelu, Sigmoid, Relu, Linear };

const char* act_name(ActKind k);
ActKind act_from_name(const std::string& name);

struct ConvAttrs {
  int64_t in_ch = 0;
  int64_t out_ch = 0;
  int64_t kernel = 1;
  int64_t stride = 1;
  int64_t pad = 0;
  int64_t groups = 1;
  bool bias = false;
};

// 3x3 deformable conv; carries an internal offset-predicting conv emitting
// 2*k*k channels (interleaved dy,dx per kernel tap).
struct DeformConvAttrs {
  ConvAttrs conv;
};

// Conv whose input is prefixed with two coordinate channels (x then y,
// normalized to [-1,1]); conv.in_ch counts only the data channels, the
// weight spans in_ch + 2.
struct CoordConvAttrs {
  ConvAttrs conv;
};

struct BatchNormAttrs {
  int64_t channels = 0;
};

struct ActivationAttrs {
  ActKind kind = ActKind::Linear;
  double slope = 0.1;  // LeakyRelu only
};

struct UpsampleNearest2xAttrs {};

struct ConcatAttrs {};  // channel axis

struct AddAttrs {};

struct MaxPoolAttrs {
  int64_t kernel = 2;
  int64_t stride = 2;
  int64_t pad = 0;
};

struct AvgPoolAttrs {
  int64_t kernel = 2;
  int64_t stride = 2;
  int64_t pad = 0;
};

// Stride-1 max pools at each size plus the identity, concatenated.
struct SppAttrs {
  std::vector<int64_t> pool_sizes = {5, 9, 13};
};

struct DropBlockAttrs {
  int64_t block_size = 3;
  double keep_prob = 0.9;
};

using LayerAttrs =
    std::variant<ConvAttrs, DeformConvAttrs, CoordConvAttrs, BatchNormAttrs,
                 ActivationAttrs, UpsampleNearest2xAttrs, ConcatAttrs, AddAttrs,
                 MaxPoolAttrs, AvgPoolAttrs, SppAttrs, DropBlockAttrs>;

enum class LayerKind {
  Conv2d,
  DeformConv2d,
  CoordConv,
  BatchNorm,
  Activation,
  UpsampleNearest2x,
  Concat,
  Add,
  MaxPool,
  AvgPool,
  SPP,
  DropBlock,
};

const char* kind_name(LayerKind k);

struct LayerSpec {
  std::string name;
  std::vector<std::string> inputs;
  LayerAttrs attrs;
  // Backbone stage tag used for freezing: 0 = stem, 1..4 = residual stages,
  // -1 = not part of the backbone.
  int stage = -1;

  LayerKind kind() const;
};

struct EntrySpec {
  std::string name;
  int64_t channels = 0;
};

// Declarative DAG; nodes are topologically ordered and inputs may reference
// entries or earlier nodes only.
struct GraphSpec {
  std::vector<EntrySpec> inputs;
  std::vector<LayerSpec> nodes;
  std::vector<std::string> outputs;
  // Leading backbone stages excluded from the trainable-parameter count;
  // freezing k >= 1 residual stages freezes the stem as well.
  int frozen_stages = 0;

  void validate() const;
  const LayerSpec* find(const std::string& name) const;
  bool node_frozen(const LayerSpec& node) const {
    return frozen_stages > 0 && node.stage >= 0 && node.stage <= frozen_stages;
  }
};

// Appends `src` to `dst`, rewiring each src entry to an existing dst node
// (or dst entry) named in `wiring`. Node names must not collide.
void merge_graphs(GraphSpec& dst, const GraphSpec& src,
                  const std::map<std::string, std::string>& wiring);

using ShapeMap = std::map<std::string, ShapeNCHW>;

// Standard conv/pool shape arithmetic over the whole graph. Throws
// ValidationError naming the offending node on any mismatch.
ShapeMap infer_shapes(const GraphSpec& graph, const ShapeMap& entry_shapes);
ShapeMap infer_shapes(const GraphSpec& graph, const ShapeNCHW& entry);

}  // namespace pptk

#endif  // PPTK_GRAPH_HPP_
