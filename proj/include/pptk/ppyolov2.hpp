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

#ifndef PPTK_PPYOLOV2_HPP_
#define PPTK_PPYOLOV2_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "pptk/graph.hpp"

namespace pptk {

// ResNet50-vd: deep 3-conv stem, stride moved to the 3x3 bottleneck conv,
// avg-pool downsample branches. Feature outputs c3/c4/c5 at strides 8/16/32
// with 512/1024/2048 channels. With dcn_in_stage5 set, the 3x3 convs of the
// last residual stage become deformable.
GraphSpec build_backbone_resnet50vd(bool dcn_in_stage5);

struct NeckOptions {
  ActKind act = ActKind::Mish;
  bool pan = true;  // false: stop after the top-down FPN half
  bool spp = true;
  bool dropblock = true;
  bool coordconv = true;
  int64_t dropblock_size = 3;
  double keep_prob = 0.9;
};

// Top-down FPN (c5 -> p5 -> p4 -> p3, upsample + concat, SPP in the first
// stage) followed by a bottom-up PAN (n3 -> n4 -> n5, stride-2 conv +
// concat) with an identity skip from each FPN output onto the same-level
// PAN block output. Output widths are 128/256/512 at strides 8/16/32.
GraphSpec build_pan_neck(int64_t c3_ch, int64_t c4_ch, int64_t c5_ch,
                         const NeckOptions& opts = {});

struct HeadOptions {
  std::vector<int64_t> in_channels = {128, 256, 512};
  ActKind act = ActKind::LeakyRelu;
  bool coordconv = true;
};

// Per level: a 3x3 stem conv doubling the width, then a 1x1 conv emitting
// anchors_per_level * (5 + num_classes + (iou_aware ? 1 : 0)) channels.
GraphSpec build_head(int64_t num_classes, int64_t anchors_per_level,
                     bool iou_aware, const HeadOptions& opts = {});

int64_t head_out_channels(int64_t num_classes, int64_t anchors_per_level,
                          bool iou_aware);

// Incremental configurations of the ablation ladder.
//   A: FPN neck, leaky-relu activations, eval size 608
//   B: + PAN + mish                      (608)
//   C: + input size 640
//   D: + larger training size list       (same graph as C)
//   E: + soft-label IoU-aware loss       (same graph as C/D)
// All variants carry the IoU-aware head channel; D -> E changes only the
// loss formulation.
enum class Variant { A, B, C, D, E };

Variant variant_from_name(const std::string& name);
const char* variant_name(Variant v);

struct ModelConfig {
  Variant variant = Variant::E;
  int64_t num_classes = 80;
  int64_t anchors_per_level = 3;
  int frozen_stages = 0;
  ActKind neck_act_override = ActKind::Linear;  // Linear: use variant default

  NeckOptions neck_options() const;
  int64_t default_input_size() const;  // 608 for A/B, 640 for C/D/E
  bool large_size_list() const;        // D, E
  bool soft_label_iou_loss() const;    // E
};

// Full graph: backbone + neck + head, single entry "image" (3 channels),
// outputs head.l3.out / head.l4.out / head.l5.out at strides 8/16/32.
GraphSpec build_ppyolov2(const ModelConfig& config);

}  // namespace pptk

#endif  // PPTK_PPYOLOV2_HPP_
