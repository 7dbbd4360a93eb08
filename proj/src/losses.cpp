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

#include "pptk/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "pptk/activations.hpp"
#include "pptk/head_layout.hpp"

namespace pptk {

namespace {

// Overflow-safe -t*log(sigmoid(p)) - (1-t)*log(1-sigmoid(p)).
double bce_with_logit(double target, double logit) {
  return std::max(logit, 0.0) - logit * target +
         std::log1p(std::exp(-std::abs(logit)));
}

}  // namespace

double iou_aware_loss(double t, double p) {
  check(t >= 0.0 && t <= 1.0, "iou_aware_loss: t must be in [0,1]");
  return bce_with_logit(t, p);
}

double iou_aware_loss(const std::vector<IoUAwareSample>& samples) {
  double total = 0.0;
  for (const auto& s : samples) {
    if (!s.positive) continue;
    total += iou_aware_loss(s.t, s.p);
  }
  return total;
}

double iou_aware_loss_grad(double t, double p) { return sigmoid(p) - t; }

AnchorLayout AnchorLayout::coco_yolov3() {
  AnchorLayout a;
  a.strides = {8, 16, 32};
  a.sizes = {
      {{10, 13}, {16, 30}, {33, 23}},
      {{30, 61}, {62, 45}, {59, 119}},
      {{116, 90}, {156, 198}, {373, 326}},
  };
  return a;
}

namespace {

// IoU of two boxes sharing a center, determined by width/height only.
double shape_iou(double w1, double h1, double w2, double h2) {
  double inter = std::min(w1, w2) * std::min(h1, h2);
  double uni = w1 * h1 + w2 * h2 - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

}  // namespace

MatchResult match_anchors(const std::vector<GroundTruthBox>& gts,
                          const AnchorLayout& anchors, int64_t input_size,
                          double ignore_thresh) {
  check(input_size % 32 == 0, "input_size must be divisible by 32");
  for (const auto& gt : gts)
    check(gt.bbox.area() > 0.0, "ground truth with zero area rejected");

  MatchResult result;
  result.input_size = input_size;
  int levels = int(anchors.strides.size());
  for (int l = 0; l < levels; ++l) {
    int64_t grid = input_size / anchors.strides[size_t(l)];
    result.grids.push_back(grid);
    result.labels.emplace_back(
        size_t(anchors.sizes[size_t(l)].size() * grid * grid),
        CellLabel::Negative);
  }

  // canonical processing order makes the result independent of input order
  std::vector<int64_t> order(gts.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int64_t a, int64_t b) {
    if (gts[size_t(a)].bbox != gts[size_t(b)].bbox)
      return gts[size_t(a)].bbox < gts[size_t(b)].bbox;
    return gts[size_t(a)].class_id < gts[size_t(b)].class_id;
  });

  auto slot = [&](int level, int64_t anchor, int64_t gy, int64_t gx) -> size_t {
    int64_t g = result.grids[size_t(level)];
    return size_t((anchor * g + gy) * g + gx);
  };

  for (int64_t gi : order) {
    const GroundTruthBox& gt = gts[size_t(gi)];
    double gw = gt.bbox.width(), gh = gt.bbox.height();
    int best_level = 0;
    int64_t best_anchor = 0;
    double best = -1.0;
    for (int l = 0; l < levels; ++l) {
      for (size_t a = 0; a < anchors.sizes[size_t(l)].size(); ++a) {
        double v = shape_iou(gw, gh, anchors.sizes[size_t(l)][a][0],
                             anchors.sizes[size_t(l)][a][1]);
        if (v > best) {  // ties keep the lowest (level, anchor)
          best = v;
          best_level = l;
          best_anchor = int64_t(a);
        }
      }
    }
    double cx = 0.5 * (gt.bbox.x1 + gt.bbox.x2);
    double cy = 0.5 * (gt.bbox.y1 + gt.bbox.y2);
    int64_t stride = anchors.strides[size_t(best_level)];
    int64_t grid = result.grids[size_t(best_level)];
    int64_t gx = std::clamp<int64_t>(int64_t(cx / double(stride)), 0, grid - 1);
    int64_t gy = std::clamp<int64_t>(int64_t(cy / double(stride)), 0, grid - 1);

    size_t idx = slot(best_level, best_anchor, gy, gx);
    if (result.labels[size_t(best_level)][idx] == CellLabel::Positive)
      continue;  // slot already claimed by an earlier ground truth
    result.labels[size_t(best_level)][idx] = CellLabel::Positive;
    result.positives.push_back({best_level, gy, gx, best_anchor, gi});
  }

  // anchors overlapping a ground truth strongly enough are not negatives
  for (int l = 0; l < levels; ++l) {
    int64_t stride = anchors.strides[size_t(l)];
    int64_t grid = result.grids[size_t(l)];
    for (size_t a = 0; a < anchors.sizes[size_t(l)].size(); ++a) {
      double aw = anchors.sizes[size_t(l)][a][0];
      double ah = anchors.sizes[size_t(l)][a][1];
      for (int64_t gy = 0; gy < grid; ++gy) {
        for (int64_t gx = 0; gx < grid; ++gx) {
          size_t idx = slot(l, int64_t(a), gy, gx);
          if (result.labels[size_t(l)][idx] == CellLabel::Positive) continue;
          double cx = (double(gx) + 0.5) * double(stride);
          double cy = (double(gy) + 0.5) * double(stride);
          BBox anchor_box{cx - aw / 2, cy - ah / 2, cx + aw / 2, cy + ah / 2};
          for (const auto& gt : gts) {
            if (iou(anchor_box, gt.bbox) > ignore_thresh) {
              result.labels[size_t(l)][idx] = CellLabel::Ignored;
              break;
            }
          }
        }
      }
    }
  }
  return result;
}

LossReport detection_losses(const std::vector<TensorF32>& head_outputs,
                            const MatchResult& matches,
                            const std::vector<GroundTruthBox>& gts,
                            const AnchorLayout& anchors, int64_t num_classes) {
  size_t levels = anchors.strides.size();
  check(head_outputs.size() == levels, "one head tensor per level expected");
  HeadLayout layout{num_classes};
  int64_t A = anchors.anchors_per_level();

  for (size_t l = 0; l < levels; ++l) {
    const TensorF32& t = head_outputs[l];
    check(t.rank() == 4 && t.dim(0) == 1, "head tensors must be 1xCxHxW");
    check(t.dim(1) == layout.channels(A),
          "head channel count does not match anchors/classes");
    check(t.dim(2) == matches.grids[l] && t.dim(3) == matches.grids[l],
          "head tensor grid does not match the match geometry");
  }

  LossReport report;
  // objectness over every non-ignored prediction
  for (size_t l = 0; l < levels; ++l) {
    const TensorF32& t = head_outputs[l];
    int64_t grid = matches.grids[l];
    for (int64_t a = 0; a < A; ++a)
      for (int64_t gy = 0; gy < grid; ++gy)
        for (int64_t gx = 0; gx < grid; ++gx) {
          CellLabel label = matches.label(int(l), a, gy, gx);
          if (label == CellLabel::Ignored) continue;
          double target = label == CellLabel::Positive ? 1.0 : 0.0;
          report.obj_loss += bce_with_logit(target, t.at(0, layout.obj(a), gy, gx));
        }
  }

  for (const auto& pos : matches.positives) {
    const GroundTruthBox& gt = gts[size_t(pos.gt)];
    const TensorF32& t = head_outputs[size_t(pos.level)];
    int64_t stride = anchors.strides[size_t(pos.level)];
    double aw = anchors.sizes[size_t(pos.level)][size_t(pos.anchor)][0];
    double ah = anchors.sizes[size_t(pos.level)][size_t(pos.anchor)][1];

    double tx = t.at(0, layout.tx(pos.anchor), pos.grid_y, pos.grid_x);
    double ty = t.at(0, layout.ty(pos.anchor), pos.grid_y, pos.grid_x);
    double tw = t.at(0, layout.tw(pos.anchor), pos.grid_y, pos.grid_x);
    double th = t.at(0, layout.th(pos.anchor), pos.grid_y, pos.grid_x);
    double cx = (sigmoid(tx) + double(pos.grid_x)) * double(stride);
    double cy = (sigmoid(ty) + double(pos.grid_y)) * double(stride);
    double w = aw * std::exp(tw);
    double h = ah * std::exp(th);
    BBox pred{cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2};

    double overlap = iou(pred, gt.bbox);
    report.box_loss += gt.weight * (1.0 - overlap);
    for (int64_t c = 0; c < num_classes; ++c) {
      double target = c == gt.class_id ? 1.0 : 0.0;
      report.cls_loss +=
          gt.weight * bce_with_logit(target, t.at(0, layout.cls(pos.anchor, c),
                                                  pos.grid_y, pos.grid_x));
    }
    // t is the measured IoU, treated as a constant label
    report.iou_aware_loss +=
        gt.weight * iou_aware_loss(overlap, t.at(0, layout.iou(pos.anchor),
                                                 pos.grid_y, pos.grid_x));
    ++report.num_positives;
  }
  return report;
}

std::string loss_report_to_json(const LossReport& r) {
  nlohmann::ordered_json j;
  j["box_loss"] = r.box_loss;
  j["obj_loss"] = r.obj_loss;
  j["cls_loss"] = r.cls_loss;
  j["iou_aware_loss"] = r.iou_aware_loss;
  j["num_positives"] = r.num_positives;
  return j.dump(2);
}

}  // namespace pptk
