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

#ifndef PPTK_POSTPROCESS_HPP_
#define PPTK_POSTPROCESS_HPP_

#include <array>
#include <cstdint>
#include <vector>

#include "pptk/boxes.hpp"
#include "pptk/tensor.hpp"

namespace pptk {

struct Detection {
  BBox bbox;  // input-image pixels, clipped to bounds
  int64_t class_id = 0;
  double score = 0.0;
};

// One candidate per (cell, anchor) before thresholding/NMS.
struct DecodedCandidate {
  BBox bbox;  // clipped to [0, input_size]
  double objectness = 0.0;
  std::vector<double> class_probs;
  double iou_pred = 0.0;
};

// center = (sigmoid(t) + cell) * stride, size = anchor * exp(t).
// Returns (cx, cy, w, h) in input pixels.
std::array<double, 4> decode_box_center(double tx, double ty, double tw,
                                        double th, int64_t grid_x,
                                        int64_t grid_y, double anchor_w,
                                        double anchor_h, int64_t stride);

// Decodes one level's raw head tensor (1 x A*(5+C+1) x H x W). Zero-area
// boxes after clipping are dropped.
std::vector<DecodedCandidate> decode_boxes(
    const TensorF32& head, const std::vector<std::array<double, 2>>& anchors,
    int64_t stride, int64_t input_size, int64_t num_classes);

// objectness^(1-alpha) * iou_pred^alpha * class_prob; alpha in [0,1].
// alpha = 0 bypasses the IoU prediction exactly.
double fuse_score(double objectness, double class_prob, double iou_pred,
                  double alpha);

struct NmsConfig {
  double iou_thresh = 0.45;
  double score_thresh = 0.01;
  int64_t max_dets = 100;
};

// Greedy per-class NMS: drop below score_thresh, sort by score descending
// (ties: lower class_id first, then lexicographic bbox), keep a box iff its
// IoU with every kept same-class box is <= iou_thresh, truncate to max_dets.
std::vector<Detection> nms(const std::vector<Detection>& dets,
                           const NmsConfig& config);

// Full per-image pipeline: decode each level, fuse scores, run NMS.
std::vector<Detection> postprocess(
    const std::vector<TensorF32>& head_outputs,
    const std::vector<std::vector<std::array<double, 2>>>& anchors,
    const std::vector<int64_t>& strides, int64_t input_size,
    int64_t num_classes, double alpha, const NmsConfig& config);

}  // namespace pptk

#endif  // PPTK_POSTPROCESS_HPP_
