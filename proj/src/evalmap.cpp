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

#include "pptk/evalmap.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

namespace pptk {

namespace {

constexpr double kSmallMax = 32.0 * 32.0;
constexpr double kMediumMax = 96.0 * 96.0;

// score desc, then (image_id, bbox, category) for reproducible ties
bool eval_det_order(const EvalDetection& a, const EvalDetection& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.image_id != b.image_id) return a.image_id < b.image_id;
  if (a.bbox != b.bbox) return a.bbox < b.bbox;
  return a.category_id < b.category_id;
}

// overlap used for matching: IoU, except crowd regions which use
// intersection over detection area so they can absorb any overlapping hit
double overlap(const EvalDetection& det, const GroundTruth& gt) {
  if (!gt.iscrowd) return iou(det.bbox, gt.bbox);
  double inter = intersection_area(det.bbox, gt.bbox);
  double da = det.bbox.area();
  return da > 0.0 ? inter / da : 0.0;
}

// Greedy matcher over one (image, category) group. `gt_ignored` marks
// ground truths that absorb matches without scoring (crowd or out of the
// area range); `det_ignorable` marks detections that may drop out of the
// ranking when unmatched. Detections must arrive score-descending.
void match_group(const std::vector<EvalDetection>& dets,
                 const std::vector<size_t>& det_idx,
                 const std::vector<GroundTruth>& gts,
                 const std::vector<size_t>& gt_idx,
                 const std::vector<bool>& gt_ignored, double thresh,
                 const std::function<bool(const EvalDetection&)>& det_ignorable,
                 std::vector<DetFlag>& flags) {
  // consider non-ignored ground truths first so they win IoU ties
  std::vector<size_t> order(gt_idx.size());
  for (size_t i = 0; i < gt_idx.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return !gt_ignored[a] && gt_ignored[b];
  });

  std::vector<bool> taken(gt_idx.size(), false);
  for (size_t di : det_idx) {
    const EvalDetection& det = dets[di];
    double best_iou = thresh;
    int64_t best = -1;
    for (size_t oi : order) {
      const GroundTruth& gt = gts[gt_idx[oi]];
      if (taken[oi] && !gt.iscrowd) continue;
      // once a real match exists, ignored ground truths cannot displace it
      if (best >= 0 && !gt_ignored[size_t(best)] && gt_ignored[oi]) break;
      double v = overlap(det, gt);
      if (v < best_iou) continue;
      best_iou = v;
      best = int64_t(oi);
    }
    if (best < 0) {
      flags[di] = det_ignorable(det) ? DetFlag::Ignored : DetFlag::FP;
    } else {
      taken[size_t(best)] = true;
      flags[di] = gt_ignored[size_t(best)] ? DetFlag::Ignored : DetFlag::TP;
    }
  }
}

struct Grouped {
  std::vector<EvalDetection> dets;  // capped and globally sorted
  // (image, category) -> indices into dets (score order) / gts
  std::map<std::pair<int64_t, int64_t>, std::vector<size_t>> det_groups;
  std::map<std::pair<int64_t, int64_t>, std::vector<size_t>> gt_groups;
  std::set<int64_t> categories;  // categories present in the ground truth
};

Grouped group_inputs(const std::vector<EvalDetection>& dets,
                     const std::vector<GroundTruth>& gts, int64_t per_image_cap) {
  Grouped g;
  std::map<int64_t, std::vector<EvalDetection>> by_image;
  for (const auto& d : dets) by_image[d.image_id].push_back(d);
  for (auto& [id, list] : by_image) {
    std::sort(list.begin(), list.end(), eval_det_order);
    if (int64_t(list.size()) > per_image_cap) list.resize(size_t(per_image_cap));
    g.dets.insert(g.dets.end(), list.begin(), list.end());
  }
  std::sort(g.dets.begin(), g.dets.end(), eval_det_order);
  for (size_t i = 0; i < g.dets.size(); ++i)
    g.det_groups[{g.dets[i].image_id, g.dets[i].category_id}].push_back(i);
  for (size_t i = 0; i < gts.size(); ++i) {
    g.gt_groups[{gts[i].image_id, gts[i].category_id}].push_back(i);
    g.categories.insert(gts[i].category_id);
  }
  return g;
}

}  // namespace

std::vector<DetFlag> match_for_eval(const std::vector<EvalDetection>& dets,
                                    const std::vector<GroundTruth>& gts,
                                    double iou_thresh) {
  for (size_t i = 1; i < dets.size(); ++i)
    check(dets[i - 1].score >= dets[i].score,
          "match_for_eval expects score-descending detections");

  std::map<std::pair<int64_t, int64_t>, std::vector<size_t>> det_groups, gt_groups;
  for (size_t i = 0; i < dets.size(); ++i)
    det_groups[{dets[i].image_id, dets[i].category_id}].push_back(i);
  for (size_t i = 0; i < gts.size(); ++i)
    gt_groups[{gts[i].image_id, gts[i].category_id}].push_back(i);

  std::vector<DetFlag> flags(dets.size(), DetFlag::FP);
  for (const auto& [key, det_idx] : det_groups) {
    std::vector<size_t> gt_idx;
    if (auto it = gt_groups.find(key); it != gt_groups.end()) gt_idx = it->second;
    std::vector<bool> ignored(gt_idx.size(), false);
    for (size_t i = 0; i < gt_idx.size(); ++i)
      ignored[i] = gts[gt_idx[i]].iscrowd;
    match_group(dets, det_idx, gts, gt_idx, ignored, iou_thresh,
                [](const EvalDetection&) { return false; }, flags);
  }
  return flags;
}

double average_precision(const std::vector<DetFlag>& flags, int64_t num_gt) {
  check(num_gt >= 0, "num_gt must be >= 0");
  if (num_gt == 0) return 0.0;

  std::vector<double> recall, precision;
  int64_t tp = 0, fp = 0;
  for (DetFlag f : flags) {
    if (f == DetFlag::Ignored) continue;
    (f == DetFlag::TP ? tp : fp)++;
    recall.push_back(double(tp) / double(num_gt));
    precision.push_back(double(tp) / double(tp + fp));
  }
  // envelope: precision becomes its running max from the right
  for (size_t i = precision.size(); i-- > 1;)
    precision[i - 1] = std::max(precision[i - 1], precision[i]);

  double total = 0.0;
  size_t j = 0;
  for (int r = 0; r <= 100; ++r) {
    double target = double(r) / 100.0;
    while (j < recall.size() && recall[j] < target) ++j;
    if (j < precision.size()) total += precision[j];
  }
  return total / 101.0;
}

MetricsReport evaluate(const std::vector<EvalDetection>& dets,
                       const std::vector<GroundTruth>& gts) {
  Grouped g = group_inputs(dets, gts, 100);

  auto eval_range = [&](const std::function<bool(double)>& in_range,
                        double thresh) -> double {
    double sum = 0.0;
    int64_t counted = 0;
    for (int64_t cat : g.categories) {
      std::vector<DetFlag> flags(g.dets.size(), DetFlag::FP);
      std::vector<size_t> cat_dets;
      int64_t num_gt = 0;
      // every (image, cat) group containing dets or gts participates
      std::set<int64_t> images;
      for (const auto& [key, idx] : g.gt_groups)
        if (key.second == cat) images.insert(key.first);
      for (const auto& [key, idx] : g.det_groups)
        if (key.second == cat) images.insert(key.first);
      for (int64_t img : images) {
        std::pair<int64_t, int64_t> key{img, cat};
        std::vector<size_t> det_idx, gt_idx;
        if (auto it = g.det_groups.find(key); it != g.det_groups.end())
          det_idx = it->second;
        if (auto it = g.gt_groups.find(key); it != g.gt_groups.end())
          gt_idx = it->second;
        std::vector<bool> ignored(gt_idx.size(), false);
        for (size_t i = 0; i < gt_idx.size(); ++i) {
          const GroundTruth& gt = gts[gt_idx[i]];
          ignored[i] = gt.iscrowd || !in_range(gt.area);
          if (!ignored[i]) ++num_gt;
        }
        match_group(g.dets, det_idx, gts, gt_idx, ignored, thresh,
                    [&](const EvalDetection& d) { return !in_range(d.bbox.area()); },
                    flags);
        cat_dets.insert(cat_dets.end(), det_idx.begin(), det_idx.end());
      }
      if (num_gt == 0) continue;
      // restrict to this category's detections, back in global score order
      std::sort(cat_dets.begin(), cat_dets.end());
      std::vector<DetFlag> cat_flags;
      cat_flags.reserve(cat_dets.size());
      for (size_t i : cat_dets) cat_flags.push_back(flags[i]);
      sum += average_precision(cat_flags, num_gt);
      ++counted;
    }
    return counted > 0 ? sum / double(counted) : 0.0;
  };

  auto all = [](double) { return true; };
  auto small = [](double a) { return a < kSmallMax; };
  auto medium = [](double a) { return a >= kSmallMax && a <= kMediumMax; };
  auto large = [](double a) { return a > kMediumMax; };

  MetricsReport m;
  double sum = 0.0, sum_s = 0.0, sum_m = 0.0, sum_l = 0.0;
  for (int t = 0; t < 10; ++t) {
    double thresh = (50 + 5 * t) / 100.0;
    double ap_all = eval_range(all, thresh);
    sum += ap_all;
    sum_s += eval_range(small, thresh);
    sum_m += eval_range(medium, thresh);
    sum_l += eval_range(large, thresh);
    if (t == 0) m.ap50 = ap_all;
    if (t == 5) m.ap75 = ap_all;
  }
  m.ap = sum / 10.0;
  m.ap_small = sum_s / 10.0;
  m.ap_medium = sum_m / 10.0;
  m.ap_large = sum_l / 10.0;
  return m;
}

std::string metrics_to_json(const MetricsReport& m) {
  nlohmann::ordered_json j;
  j["AP"] = m.ap;
  j["AP50"] = m.ap50;
  j["AP75"] = m.ap75;
  j["APS"] = m.ap_small;
  j["APM"] = m.ap_medium;
  j["APL"] = m.ap_large;
  return j.dump(2);
}

MetricsReport metrics_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  MetricsReport m;
  m.ap = j.at("AP").get<double>();
  m.ap50 = j.at("AP50").get<double>();
  m.ap75 = j.at("AP75").get<double>();
  m.ap_small = j.at("APS").get<double>();
  m.ap_medium = j.at("APM").get<double>();
  m.ap_large = j.at("APL").get<double>();
  return m;
}

}  // namespace pptk
