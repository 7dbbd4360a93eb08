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

#ifndef PPTK_BOXES_HPP_
#define PPTK_BOXES_HPP_

#include <algorithm>

namespace pptk {

// Axis-aligned box in pixels, corner convention (x2 >= x1, y2 >= y1).
struct BBox {
  double x1 = 0, y1 = 0, x2 = 0, y2 = 0;

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double area() const { return width() * height(); }
  bool valid() const { return x2 >= x1 && y2 >= y1; }

  BBox clipped(double w, double h) const {
    return {std::clamp(x1, 0.0, w), std::clamp(y1, 0.0, h),
            std::clamp(x2, 0.0, w), std::clamp(y2, 0.0, h)};
  }

  bool operator==(const BBox&) const = default;
  // lexicographic (x1, y1, x2, y2); used for deterministic tie-breaking
  auto operator<=>(const BBox&) const = default;
};

inline double intersection_area(const BBox& a, const BBox& b) {
  double w = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  double h = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (w <= 0.0 || h <= 0.0) return 0.0;
  return w * h;
}

// Intersection over union; 0 when the union is empty.
inline double iou(const BBox& a, const BBox& b) {
  double inter = intersection_area(a, b);
  double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

}  // namespace pptk

#endif  // PPTK_BOXES_HPP_
