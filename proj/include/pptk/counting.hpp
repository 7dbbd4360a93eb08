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

#ifndef PPTK_COUNTING_HPP_
#define PPTK_COUNTING_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "pptk/graph.hpp"

namespace pptk {

// Two FLOP conventions are in circulation and both appear in published
// tables. We track multiply-accumulates as the primitive:
//   * flops_x2:  one MAC = 2 FLOPs, plus per-element costs of BN,
//     activations, pooling, upsampling and bilinear sampling.
//   * gflops (headline, used for reference-table comparison): conv/deform
//     MACs plus bias adds only, one MAC = 1 FLOP. This is what the common
//     profilers behind published parameter/GFLOPs tables report.
struct NodeCost {
  int64_t params = 0;       // trainable (BN scale+shift; conv weights+bias)
  int64_t bn_running = 0;   // BN running mean/var, reported separately
  uint64_t macs = 0;        // conv/deform multiply-accumulates
  uint64_t bias_adds = 0;
  uint64_t elementwise = 0; // everything that is not a MAC
};

struct ArchReport {
  int64_t total_params = 0;
  int64_t trainable_params = 0;
  int64_t bn_running_stats = 0;
  uint64_t macs = 0;
  uint64_t flops_x2 = 0;
  double gflops = 0.0;
  struct Node {
    std::string name;
    std::string kind;
    ShapeNCHW out_shape;
    int64_t params = 0;
    uint64_t flops = 0;  // x2 convention, consistent with count_flops()
    uint64_t macs = 0;
  };
  std::vector<Node> per_node;
};

NodeCost node_cost(const LayerSpec& node, const ShapeNCHW& out_shape,
                   const std::vector<ShapeNCHW>& in_shapes);

// Conv2d: in_ch/groups * out_ch * k^2 (+ out_ch if bias); BatchNorm: 2*ch
// trainable, 2*ch running stats kept out of the headline count; DeformConv2d
// includes its offset-predicting conv. Frozen stages are excluded when
// trainable_only is set.
int64_t count_params(const GraphSpec& graph, bool trainable_only = false);

// Total FLOPs under the x2 convention: Conv2d contributes
// 2 * out_elements * (in_ch/groups * k^2) (+ out_elements if bias);
// BN/activations/pooling contribute per-element costs.
uint64_t count_flops(const GraphSpec& graph, const ShapeNCHW& entry);
uint64_t count_flops(const GraphSpec& graph, const ShapeMap& entry_shapes);

ArchReport analyze_graph(const GraphSpec& graph, const ShapeMap& entry_shapes);
ArchReport analyze_graph(const GraphSpec& graph, const ShapeNCHW& entry);

std::string report_to_json(const ArchReport& report, bool per_node = true);

}  // namespace pptk

#endif  // PPTK_COUNTING_HPP_
