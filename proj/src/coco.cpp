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

#include "pptk/coco.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace pptk {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

nlohmann::json parse_or_throw(const std::string& text, const std::string& path) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path + ": parse error at byte " +
                          std::to_string(e.byte) + ": " + e.what());
  }
}

BBox bbox_from_xywh(const nlohmann::json& arr, const std::string& path) {
  check(arr.is_array() && arr.size() == 4, path + ": bbox must be [x,y,w,h]");
  double x = arr[0].get<double>();
  double y = arr[1].get<double>();
  double w = arr[2].get<double>();
  double h = arr[3].get<double>();
  return {x, y, x + w, y + h};
}

EvalDetection det_from_json(const nlohmann::json& j, const std::string& path) {
  EvalDetection d;
  d.image_id = j.at("image_id").get<int64_t>();
  d.category_id = j.at("category_id").get<int64_t>();
  d.bbox = bbox_from_xywh(j.at("bbox"), path);
  d.score = j.at("score").get<double>();
  return d;
}

}  // namespace

std::vector<GroundTruth> load_coco_annotations(const std::string& path) {
  nlohmann::json j = parse_or_throw(read_file(path), path);
  check(j.contains("annotations"), path + ": missing 'annotations'");
  std::vector<GroundTruth> gts;
  for (const auto& a : j["annotations"]) {
    GroundTruth gt;
    gt.image_id = a.at("image_id").get<int64_t>();
    gt.category_id = a.at("category_id").get<int64_t>();
    gt.bbox = bbox_from_xywh(a.at("bbox"), path);
    gt.iscrowd = a.value("iscrowd", 0) != 0;
    gt.area = a.contains("area") ? a["area"].get<double>() : gt.bbox.area();
    check(gt.area > 0.0 || gt.iscrowd, path + ": zero-area annotation");
    gts.push_back(gt);
  }
  return gts;
}

std::vector<EvalDetection> load_coco_results(const std::string& path) {
  std::string text = read_file(path);
  std::vector<EvalDetection> dets;
  // sniff: a JSON array, or one object per line
  size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '[') {
    nlohmann::json j = parse_or_throw(text, path);
    for (const auto& item : j) dets.push_back(det_from_json(item, path));
    return dets;
  }
  std::istringstream lines(text);
  std::string line;
  size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    dets.push_back(det_from_json(
        parse_or_throw(line, path + ":" + std::to_string(line_no)), path));
  }
  return dets;
}

void save_coco_results(const std::string& path,
                       const std::vector<EvalDetection>& dets) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  for (const auto& d : dets) {
    nlohmann::ordered_json j;
    j["image_id"] = d.image_id;
    j["category_id"] = d.category_id;
    j["bbox"] = {d.bbox.x1, d.bbox.y1, d.bbox.width(), d.bbox.height()};
    j["score"] = d.score;
    out << j.dump() << "\n";
  }
  if (!out) throw IoError("short write: " + path);
}

std::vector<EvalDetection> to_eval_detections(const std::vector<Detection>& dets,
                                              int64_t image_id,
                                              int64_t category_id_base) {
  std::vector<EvalDetection> out;
  out.reserve(dets.size());
  for (const auto& d : dets)
    out.push_back({image_id, d.bbox, category_id_base + d.class_id, d.score});
  return out;
}

}  // namespace pptk
