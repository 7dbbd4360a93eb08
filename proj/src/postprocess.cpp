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

#include "pptk/postprocess.hpp"

#include <algorithm>
#include <cmath>

#include "pptk/activations.hpp"
#include "pptk/head_layout.hpp"

namespace pptk {

std::array<double, 4> decode_box_center(double tx, double ty, double tw,
                                        double th, int64_t grid_x,
                                        int64_t grid_y, double anchor_w,
                                        double anchor_h, int64_t stride) {
  double cx = (sigmoid(tx) + double(grid_x)) * double(stride);
  double cy = (sigmoid(ty) + double(grid_y)) * double(stride);
  double w = anchor_w * std::exp(tw);
  double h = anchor_h * std::exp(th);
  return {cx, cy, w, h};
}

std::vector<DecodedCandidate> decode_boxes(
    const TensorF32& head, const std::vector<std::array<double, 2>>& anchors,
    int64_t stride, int64_t input_size, int64_t num_classes) {
  HeadLayout layout{num_classes};
  int64_t A = int64_t(anchors.size());
  check(head.rank() == 4 && head.dim(0) == 1, "head tensor must be 1xCxHxW");
  check(head.dim(1) == layout.channels(A),
        "head channels do not match anchors_per_level*(5+num_classes+1)");

  int64_t grid_h = head.dim(2), grid_w = head.dim(3);
  std::vector<DecodedCandidate> out;
  out.reserve(size_t(A * grid_h * grid_w));
  for (int64_t gy = 0; gy < grid_h; ++gy) {
    for (int64_t gx = 0; gx < grid_w; ++gx) {
      for (int64_t a = 0; a < A; ++a) {
        auto [cx, cy, w, h] = decode_box_center(
            head.at(0, layout.tx(a), gy, gx), head.at(0, layout.ty(a), gy, gx),
            head.at(0, layout.tw(a), gy, gx), head.at(0, layout.th(a), gy, gx),
            gx, gy, anchors[size_t(a)][0], anchors[size_t(a)][1], stride);
        BBox box{cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2};
        box = box.clipped(double(input_size), double(input_size));
        if (box.area() <= 0.0) continue;

        DecodedCandidate cand;
        cand.bbox = box;
        cand.objectness = sigmoid(head.at(0, layout.obj(a), gy, gx));
        cand.class_probs.resize(size_t(num_classes));
        for (int64_t c = 0; c < num_classes; ++c)
          cand.class_probs[size_t(c)] = sigmoid(head.at(0, layout.cls(a, c), gy, gx));
        cand.iou_pred = sigmoid(head.at(0, layout.iou(a), gy, gx));
        out.push_back(std::move(cand));
      }
    }
  }
  return out;
}

double fuse_score(double objectness, double class_prob, double iou_pred,
                  double alpha) {
  check(alpha >= 0.0 && alpha <= 1.0, "fuse_score: alpha must be in [0,1]");
  if (alpha == 0.0) return objectness * class_prob;
  if (alpha == 1.0) return iou_pred * class_prob;
  return std::pow(objectness, 1.0 - alpha) * std::pow(iou_pred, alpha) *
         class_prob;
}

namespace {

// score descending; ties prefer the lower class, then the smaller box
bool det_order(const Detection& a, const Detection& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.class_id != b.class_id) return a.class_id < b.class_id;
  return a.bbox < b.bbox;
}

}  // namespace

std::vector<Detection> nms(const std::vector<Detection>& dets,
                           const NmsConfig& config) {
  std::vector<Detection> sorted;
  sorted.reserve(dets.size());
  for (const auto& d : dets)
    if (d.score >= config.score_thresh) sorted.push_back(d);
  std::sort(sorted.begin(), sorted.end(), det_order);

  std::vector<Detection> kept;
  for (const auto& d : sorted) {
    bool suppressed = false;
    for (const auto& k : kept) {
      if (k.class_id != d.class_id) continue;
      if (iou(k.bbox, d.bbox) > config.iou_thresh) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) kept.push_back(d);
  }
  if (int64_t(kept.size()) > config.max_dets) kept.resize(size_t(config.max_dets));
  return kept;
}

std::vector<Detection> postprocess(
    const std::vector<TensorF32>& head_outputs,
    const std::vector<std::vector<std::array<double, 2>>>& anchors,
    const std::vector<int64_t>& strides, int64_t input_size,
    int64_t num_classes, double alpha, const NmsConfig& config) {
  check(head_outputs.size() == anchors.size() &&
            head_outputs.size() == strides.size(),
        "postprocess: level counts disagree");
  std::vector<Detection> all;
  for (size_t l = 0; l < head_outputs.size(); ++l) {
    auto cands = decode_boxes(head_outputs[l], anchors[l], strides[l],
                              input_size, num_classes);
    for (const auto& c : cands) {
      for (int64_t cls = 0; cls < num_classes; ++cls) {
        double score = fuse_score(c.objectness, c.class_probs[size_t(cls)],
                                  c.iou_pred, alpha);
        if (score < config.score_thresh) continue;
        all.push_back({c.bbox, cls, score});
      }
    }
  }
  return nms(all, config);
}

}  // namespace pptk
