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

#ifndef PPTK_LOSSES_HPP_
#define PPTK_LOSSES_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "pptk/boxes.hpp"
#include "pptk/tensor.hpp"

namespace pptk {

// One IoU-prediction training sample: t is the IoU of the matched
// ground-truth box (the soft label), p the raw logit of the IoU branch.
struct IoUAwareSample {
  double t = 0.0;
  double p = 0.0;
  bool positive = false;
};

// Soft-label binary cross-entropy -t*log(sigmoid(p)) - (1-t)*log(1-sigmoid(p)),
// evaluated in the standard overflow-safe form. t must lie in [0,1].
double iou_aware_loss(double t, double p);

// Sum over positive samples only.
double iou_aware_loss(const std::vector<IoUAwareSample>& samples);

// d/dp of the loss above: sigmoid(p) - t.
double iou_aware_loss_grad(double t, double p);

struct GroundTruthBox {
  BBox bbox;
  int64_t class_id = 0;
  double weight = 1.0;  // mixup weight carried through the pipeline
};

struct AnchorLayout {
  std::vector<int64_t> strides;
  // per level, (w, h) priors in input pixels
  std::vector<std::vector<std::array<double, 2>>> sizes;

  // The nine COCO priors, three per level, smallest at stride 8.
  static AnchorLayout coco_yolov3();
  int64_t anchors_per_level() const { return int64_t(sizes[0].size()); }
};

// Per-prediction labels over every (level, anchor, cell).
enum class CellLabel : int8_t { Negative = 0, Positive = 1, Ignored = -1 };

struct MatchResult {
  struct Positive {
    int level = 0;
    int64_t grid_y = 0;
    int64_t grid_x = 0;
    int64_t anchor = 0;
    int64_t gt = 0;  // index into the ground-truth list
  };
  std::vector<Positive> positives;
  // labels[level][ (anchor*grid + gy)*grid + gx ]
  std::vector<std::vector<CellLabel>> labels;
  std::vector<int64_t> grids;
  int64_t input_size = 0;

  CellLabel label(int level, int64_t anchor, int64_t gy, int64_t gx) const {
    int64_t g = grids[size_t(level)];
    return labels[size_t(level)][size_t((anchor * g + gy) * g + gx)];
  }
};

// YOLOv3-style assignment: each ground truth goes to the anchor with the
// best shape IoU (boxes centered at the origin) across all levels, in the
// cell containing its center. Anchors overlapping any ground truth above
// ignore_thresh, without being positive, are ignored. Ties break toward the
// lowest (level, anchor) pair; ground truths are processed in canonical
// (bbox, class) order and a cell/anchor slot is claimed at most once.
MatchResult match_anchors(const std::vector<GroundTruthBox>& gts,
                          const AnchorLayout& anchors, int64_t input_size,
                          double ignore_thresh = 0.7);

struct LossReport {
  double box_loss = 0.0;
  double obj_loss = 0.0;
  double cls_loss = 0.0;
  double iou_aware_loss = 0.0;
  int64_t num_positives = 0;
};

// Companion losses over raw head outputs (one rank-4 tensor per level,
// n = 1, channels = anchors * (5 + num_classes + 1)). Objectness and class
// terms are binary cross-entropy; the box term is 1 - IoU of the decoded
// box against its target; the IoU-aware term applies the soft-label loss
// with t detached from the geometry. Sums are reported, not means.
LossReport detection_losses(const std::vector<TensorF32>& head_outputs,
                            const MatchResult& matches,
                            const std::vector<GroundTruthBox>& gts,
                            const AnchorLayout& anchors, int64_t num_classes);

std::string loss_report_to_json(const LossReport& report);

}  // namespace pptk

#endif  // PPTK_LOSSES_HPP_
