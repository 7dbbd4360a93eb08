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

#ifndef PPTK_HEAD_LAYOUT_HPP_
#define PPTK_HEAD_LAYOUT_HPP_

#include <cstdint>

namespace pptk {

// Channel layout of a raw head tensor: per anchor, a contiguous block of
// [tx, ty, tw, th, obj, cls_0 .. cls_{C-1}, iou].
struct HeadLayout {
  int64_t num_classes = 80;

  int64_t block() const { return 6 + num_classes; }
  int64_t tx(int64_t a) const { return a * block() + 0; }
  int64_t ty(int64_t a) const { return a * block() + 1; }
  int64_t tw(int64_t a) const { return a * block() + 2; }
  int64_t th(int64_t a) const { return a * block() + 3; }
  int64_t obj(int64_t a) const { return a * block() + 4; }
  int64_t cls(int64_t a, int64_t c) const { return a * block() + 5 + c; }
  int64_t iou(int64_t a) const { return a * block() + 5 + num_classes; }
  int64_t channels(int64_t anchors) const { return anchors * block(); }
};

}  // namespace pptk

#endif  // PPTK_HEAD_LAYOUT_HPP_
