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

#ifndef PPTK_AUGMENT_HPP_
#define PPTK_AUGMENT_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "pptk/boxes.hpp"
#include "pptk/rng.hpp"
#include "pptk/tensor.hpp"

namespace pptk {

// Unit of work of the preprocessing chain: CHW image in [0,1] (until
// normalize), boxes in pixels, labels and per-box mixup weights aligned 1:1.
struct Sample {
  TensorF32 image;
  std::vector<BBox> boxes;
  std::vector<int64_t> labels;
  std::vector<double> box_weights;

  int64_t channels() const { return image.dim(0); }
  int64_t height() const { return image.dim(1); }
  int64_t width() const { return image.dim(2); }
  void validate() const;
};

struct SizeList {
  std::vector<int64_t> sizes;  // strictly increasing, divisible by 32

  static SizeList base();   // [320, 352, ..., 608]
  static SizeList large();  // [320, 352, ..., 768]
  void validate() const;
};

constexpr double kMixupBetaAlpha = 1.5;
constexpr double kMixupBetaBeta = 1.5;

// RGB normalization constants applied channel-wise as (x - mean) / std.
constexpr double kNormMean[3] = {0.485, 0.456, 0.406};
constexpr double kNormStd[3] = {0.229, 0.224, 0.225};

// lambda*a + (1-lambda)*b with boxes/labels concatenated and a's weights
// scaled by lambda, b's by 1-lambda. Images must share a shape.
Sample mixup_with_lambda(const Sample& a, const Sample& b, double lambda);

// lambda ~ Beta(1.5, 1.5)
Sample mixup(const Sample& a, const Sample& b, Rng& rng);

// Each random_* stage draws its own Bernoulli(p) trigger and reports it
// through `triggered` when given.

// When triggered: brightness +-0.125, contrast x[0.5,1.5], saturation
// x[0.5,1.5], hue +-18 degrees, in that order, clamped to [0,1].
Sample random_color_distort(const Sample& s, Rng& rng, double p = 0.5,
                            bool* triggered = nullptr);

// When triggered: places the image on a ratio-r canvas (r in [1,4] per
// side) at a random offset, filled with the normalization means.
Sample random_expand(const Sample& s, Rng& rng, double p = 0.5,
                     bool* triggered = nullptr);

// When triggered: samples a window meeting a minimum-IoU constraint drawn
// from {0.1, 0.3, 0.5, 0.7, 0.9, none}; keeps boxes whose centers fall
// inside, clipped to the window. Gives up after 50 attempts. Identity when
// the sample has no boxes.
Sample random_crop(const Sample& s, Rng& rng, double p = 0.5,
                   bool* triggered = nullptr);

// Horizontal mirror; (x1, x2) -> (W - x2, W - x1).
Sample random_flip(const Sample& s, Rng& rng, double p = 0.5,
                   bool* triggered = nullptr);

Sample normalize(const Sample& s);
Sample denormalize(const Sample& s);

// Uniform over the list.
int64_t sample_input_size(Rng& rng, const SizeList& list);

// Bilinear square resize; boxes scale proportionally.
Sample resize_bilinear(const Sample& s, int64_t out_h, int64_t out_w);

struct AppliedOps {
  bool mixup = false;
  double mixup_lambda = 1.0;
  bool color_distort = false;
  bool expand = false;
  bool crop = false;
  bool flip = false;
  int64_t target_size = 0;
};

struct PipelineResult {
  Sample sample;
  AppliedOps applied;
};

// Fixed order: mixup, color distort, expand, crop, flip, normalize,
// resize to a size drawn from the list.
PipelineResult run_pipeline(const Sample& a, const std::optional<Sample>& b,
                            Rng& rng, const SizeList& sizes);

}  // namespace pptk

#endif  // PPTK_AUGMENT_HPP_
