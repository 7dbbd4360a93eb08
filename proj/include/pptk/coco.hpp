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

#ifndef PPTK_COCO_HPP_
#define PPTK_COCO_HPP_

#include <string>
#include <vector>

#include "pptk/evalmap.hpp"
#include "pptk/postprocess.hpp"

namespace pptk {

// COCO-style annotation JSON, subset: images, annotations, categories.
// Annotation bboxes are [x, y, width, height]; area falls back to w*h.
std::vector<GroundTruth> load_coco_annotations(const std::string& path);

// Result files: either a JSON array or JSON lines of
// {image_id, category_id, bbox: [x, y, w, h], score}.
std::vector<EvalDetection> load_coco_results(const std::string& path);

// Emits JSON lines, one detection per line, in input order.
void save_coco_results(const std::string& path,
                       const std::vector<EvalDetection>& dets);

std::vector<EvalDetection> to_eval_detections(
    const std::vector<Detection>& dets, int64_t image_id,
    int64_t category_id_base = 0);

}  // namespace pptk

#endif  // PPTK_COCO_HPP_
