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

#ifndef PPTK_EVALMAP_HPP_
#define PPTK_EVALMAP_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "pptk/boxes.hpp"

namespace pptk {

struct GroundTruth {
  int64_t image_id = 0;
  BBox bbox;
  int64_t category_id = 0;
  double area = 0.0;  // from the bbox unless the annotation provides one
  bool iscrowd = false;
};

struct EvalDetection {
  int64_t image_id = 0;
  BBox bbox;
  int64_t category_id = 0;
  double score = 0.0;
};

enum class DetFlag : int8_t { FP = 0, TP = 1, Ignored = 2 };

// Greedy matching at one IoU threshold, score-descending input order: each
// detection takes the unmatched same-class/same-image ground truth with the
// highest IoU >= thresh. Crowd ground truths absorb detections (intersection
// over detection area) without being consumed, marking them Ignored.
std::vector<DetFlag> match_for_eval(const std::vector<EvalDetection>& dets,
                                    const std::vector<GroundTruth>& gts,
                                    double iou_thresh);

// 101-point interpolated AP: precision envelope (running max from the
// right), sampled at recalls {0, 0.01, ..., 1.0}. Flags must be in score
// order; Ignored entries do not count. Returns 0 when num_gt is 0.
double average_precision(const std::vector<DetFlag>& flags, int64_t num_gt);

struct MetricsReport {
  double ap = 0.0;      // mean over IoU 0.50:0.05:0.95
  double ap50 = 0.0;
  double ap75 = 0.0;
  double ap_small = 0.0;   // ground-truth area <  32^2
  double ap_medium = 0.0;  // 32^2 <= area <= 96^2
  double ap_large = 0.0;   // area > 96^2
};

// COCO-protocol evaluation: per-category AP averaged over categories with
// at least one counted ground truth; at most 100 detections per image;
// detections sorted by score with (image_id, bbox) tie-breaking. For the
// size buckets, out-of-range ground truths are ignored rather than failed,
// and unmatched detections outside the range do not count as FP.
MetricsReport evaluate(const std::vector<EvalDetection>& dets,
                       const std::vector<GroundTruth>& gts);

std::string metrics_to_json(const MetricsReport& m);
MetricsReport metrics_from_json(const std::string& text);

}  // namespace pptk

#endif  // PPTK_EVALMAP_HPP_
