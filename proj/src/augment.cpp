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

#include "pptk/augment.hpp"

#include <algorithm>
#include <cmath>

namespace pptk {

void Sample::validate() const {
  check(image.rank() == 3, "sample image must be CHW");
  check(boxes.size() == labels.size() && boxes.size() == box_weights.size(),
        "boxes, labels and weights must be aligned");
  double w = double(width()), h = double(height());
  for (const auto& b : boxes) {
    check(b.valid(), "sample box has negative extent");
    check(b.x1 >= -1e-6 && b.y1 >= -1e-6 && b.x2 <= w + 1e-6 && b.y2 <= h + 1e-6,
          "sample box out of image bounds");
  }
  for (double bw : box_weights)
    check(bw >= 0.0 && bw <= 1.0, "box weight outside [0,1]");
}

SizeList SizeList::base() {
  SizeList l;
  for (int64_t s = 320; s <= 608; s += 32) l.sizes.push_back(s);
  return l;
}

SizeList SizeList::large() {
  SizeList l;
  for (int64_t s = 320; s <= 768; s += 32) l.sizes.push_back(s);
  return l;
}

void SizeList::validate() const {
  check(!sizes.empty(), "size list is empty");
  for (size_t i = 0; i < sizes.size(); ++i) {
    check(sizes[i] % 32 == 0, "sizes must be divisible by 32");
    if (i > 0) check(sizes[i] > sizes[i - 1], "sizes must be strictly increasing");
  }
}

Sample mixup_with_lambda(const Sample& a, const Sample& b, double lambda) {
  check(a.image.same_shape(b.image), "mixup images must share a shape");
  Sample out;
  out.image = a.image;
  for (int64_t i = 0; i < out.image.numel(); ++i)
    out.image[i] = float(lambda * double(a.image[i]) +
                         (1.0 - lambda) * double(b.image[i]));
  out.boxes = a.boxes;
  out.labels = a.labels;
  for (double w : a.box_weights) out.box_weights.push_back(w * lambda);
  out.boxes.insert(out.boxes.end(), b.boxes.begin(), b.boxes.end());
  out.labels.insert(out.labels.end(), b.labels.begin(), b.labels.end());
  for (double w : b.box_weights) out.box_weights.push_back(w * (1.0 - lambda));
  return out;
}

Sample mixup(const Sample& a, const Sample& b, Rng& rng) {
  return mixup_with_lambda(a, b, rng.beta(kMixupBetaAlpha, kMixupBetaBeta));
}

namespace {

struct Hsv {
  double h, s, v;  // h in [0,360)
};

Hsv rgb_to_hsv(double r, double g, double b) {
  double mx = std::max({r, g, b});
  double mn = std::min({r, g, b});
  double d = mx - mn;
  double h = 0.0;
  if (d > 0.0) {
    if (mx == r)
      h = 60.0 * std::fmod((g - b) / d, 6.0);
    else if (mx == g)
      h = 60.0 * ((b - r) / d + 2.0);
    else
      h = 60.0 * ((r - g) / d + 4.0);
  }
  if (h < 0.0) h += 360.0;
  double s = mx > 0.0 ? d / mx : 0.0;
  return {h, s, mx};
}

void hsv_to_rgb(const Hsv& hsv, double& r, double& g, double& b) {
  double c = hsv.v * hsv.s;
  double hp = hsv.h / 60.0;
  double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
  double m = hsv.v - c;
  double rr = 0, gg = 0, bb = 0;
  if (hp < 1)      { rr = c; gg = x; }
  else if (hp < 2) { rr = x; gg = c; }
  else if (hp < 3) { gg = c; bb = x; }
  else if (hp < 4) { gg = x; bb = c; }
  else if (hp < 5) { rr = x; bb = c; }
  else             { rr = c; bb = x; }
  r = rr + m;
  g = gg + m;
  b = bb + m;
}

float clamp01(double v) { return float(std::clamp(v, 0.0, 1.0)); }

}  // namespace

Sample random_color_distort(const Sample& s, Rng& rng, double p,
                            bool* triggered) {
  bool fire = rng.bernoulli(p);
  if (triggered) *triggered = fire;
  if (!fire) return s;
  Sample out = s;
  double brightness = rng.uniform(-0.125, 0.125);
  double contrast = rng.uniform(0.5, 1.5);
  double saturation = rng.uniform(0.5, 1.5);
  double hue = rng.uniform(-18.0, 18.0);

  int64_t n = out.image.numel();
  for (int64_t i = 0; i < n; ++i)
    out.image[i] = clamp01(double(out.image[i]) + brightness);
  for (int64_t i = 0; i < n; ++i)
    out.image[i] = clamp01(double(out.image[i]) * contrast);

  if (out.channels() == 3) {
    int64_t hw = out.height() * out.width();
    for (int64_t i = 0; i < hw; ++i) {
      Hsv hsv = rgb_to_hsv(out.image[i], out.image[hw + i], out.image[2 * hw + i]);
      hsv.s = std::clamp(hsv.s * saturation, 0.0, 1.0);
      hsv.h = std::fmod(hsv.h + hue + 360.0, 360.0);
      double r, g, b;
      hsv_to_rgb(hsv, r, g, b);
      out.image[i] = clamp01(r);
      out.image[hw + i] = clamp01(g);
      out.image[2 * hw + i] = clamp01(b);
    }
  }
  return out;
}

Sample random_expand(const Sample& s, Rng& rng, double p, bool* triggered) {
  bool fire = rng.bernoulli(p);
  if (triggered) *triggered = fire;
  if (!fire) return s;
  double ratio = rng.uniform(1.0, 4.0);
  int64_t h = s.height(), w = s.width(), c = s.channels();
  int64_t out_h = int64_t(std::floor(double(h) * ratio));
  int64_t out_w = int64_t(std::floor(double(w) * ratio));
  if (out_h == h && out_w == w) return s;
  int64_t off_y = rng.uniform_int(out_h - h + 1);
  int64_t off_x = rng.uniform_int(out_w - w + 1);

  Sample out;
  out.image = TensorF32({c, out_h, out_w});
  for (int64_t ch = 0; ch < c; ++ch) {
    float fill = c == 3 ? float(kNormMean[ch]) : 0.5f;
    for (int64_t i = 0; i < out_h * out_w; ++i)
      out.image[ch * out_h * out_w + i] = fill;
  }
  for (int64_t ch = 0; ch < c; ++ch)
    for (int64_t y = 0; y < h; ++y)
      for (int64_t x = 0; x < w; ++x)
        out.image[(ch * out_h + off_y + y) * out_w + off_x + x] =
            s.image[(ch * h + y) * w + x];

  out.labels = s.labels;
  out.box_weights = s.box_weights;
  for (const auto& b : s.boxes)
    out.boxes.push_back({b.x1 + double(off_x), b.y1 + double(off_y),
                         b.x2 + double(off_x), b.y2 + double(off_y)});
  return out;
}

Sample random_crop(const Sample& s, Rng& rng, double p, bool* triggered) {
  if (triggered) *triggered = false;
  if (s.boxes.empty()) return s;
  bool fire = rng.bernoulli(p);
  if (triggered) *triggered = fire;
  if (!fire) return s;

  static const double kMinIoUMenu[] = {0.1, 0.3, 0.5, 0.7, 0.9, -1.0};
  double constraint = kMinIoUMenu[rng.uniform_int(6)];
  double W = double(s.width()), H = double(s.height());

  for (int attempt = 0; attempt < 50; ++attempt) {
    double cw = rng.uniform(0.3, 1.0) * W;
    double ch = rng.uniform(0.3, 1.0) * H;
    if (ch / cw < 0.5 || ch / cw > 2.0) continue;
    double x0 = rng.uniform(0.0, W - cw);
    double y0 = rng.uniform(0.0, H - ch);
    BBox window{x0, y0, x0 + cw, y0 + ch};

    if (constraint > 0.0) {
      bool ok = true;
      for (const auto& b : s.boxes)
        if (iou(window, b) < constraint) {
          ok = false;
          break;
        }
      if (!ok) continue;
    }

    Sample out;
    std::vector<size_t> kept;
    for (size_t i = 0; i < s.boxes.size(); ++i) {
      const BBox& b = s.boxes[i];
      double cx = 0.5 * (b.x1 + b.x2), cy = 0.5 * (b.y1 + b.y2);
      if (cx < window.x1 || cx >= window.x2 || cy < window.y1 || cy >= window.y2)
        continue;
      kept.push_back(i);
    }
    if (kept.empty()) continue;

    int64_t ix0 = int64_t(std::floor(x0));
    int64_t iy0 = int64_t(std::floor(y0));
    int64_t ow = std::min<int64_t>(int64_t(std::ceil(cw)), s.width() - ix0);
    int64_t oh = std::min<int64_t>(int64_t(std::ceil(ch)), s.height() - iy0);
    out.image = TensorF32({s.channels(), oh, ow});
    for (int64_t c = 0; c < s.channels(); ++c)
      for (int64_t y = 0; y < oh; ++y)
        for (int64_t x = 0; x < ow; ++x)
          out.image[(c * oh + y) * ow + x] =
              s.image[(c * s.height() + iy0 + y) * s.width() + ix0 + x];

    for (size_t i : kept) {
      const BBox& b = s.boxes[i];
      BBox nb{std::clamp(b.x1 - double(ix0), 0.0, double(ow)),
              std::clamp(b.y1 - double(iy0), 0.0, double(oh)),
              std::clamp(b.x2 - double(ix0), 0.0, double(ow)),
              std::clamp(b.y2 - double(iy0), 0.0, double(oh))};
      out.boxes.push_back(nb);
      out.labels.push_back(s.labels[i]);
      out.box_weights.push_back(s.box_weights[i]);
    }
    return out;
  }
  return s;
}

Sample random_flip(const Sample& s, Rng& rng, double p, bool* triggered) {
  bool fire = rng.bernoulli(p);
  if (triggered) *triggered = fire;
  if (!fire) return s;
  Sample out = s;
  int64_t c = s.channels(), h = s.height(), w = s.width();
  for (int64_t ch = 0; ch < c; ++ch)
    for (int64_t y = 0; y < h; ++y)
      for (int64_t x = 0; x < w; ++x)
        out.image[(ch * h + y) * w + x] = s.image[(ch * h + y) * w + (w - 1 - x)];
  for (auto& b : out.boxes) {
    double x1 = b.x1, x2 = b.x2;
    b.x1 = double(w) - x2;
    b.x2 = double(w) - x1;
  }
  return out;
}

Sample normalize(const Sample& s) {
  check(s.channels() == 3, "normalize expects an RGB image");
  Sample out = s;
  int64_t hw = s.height() * s.width();
  for (int64_t c = 0; c < 3; ++c)
    for (int64_t i = 0; i < hw; ++i)
      out.image[c * hw + i] =
          float((double(s.image[c * hw + i]) - kNormMean[c]) / kNormStd[c]);
  return out;
}

Sample denormalize(const Sample& s) {
  check(s.channels() == 3, "denormalize expects an RGB image");
  Sample out = s;
  int64_t hw = s.height() * s.width();
  for (int64_t c = 0; c < 3; ++c)
    for (int64_t i = 0; i < hw; ++i)
      out.image[c * hw + i] =
          float(double(s.image[c * hw + i]) * kNormStd[c] + kNormMean[c]);
  return out;
}

int64_t sample_input_size(Rng& rng, const SizeList& list) {
  list.validate();
  return list.sizes[size_t(rng.uniform_int(int64_t(list.sizes.size())))];
}

Sample resize_bilinear(const Sample& s, int64_t out_h, int64_t out_w) {
  check(out_h >= 1 && out_w >= 1, "resize target must be positive");
  int64_t c = s.channels(), h = s.height(), w = s.width();
  Sample out;
  out.image = TensorF32({c, out_h, out_w});
  double sy = double(h) / double(out_h);
  double sx = double(w) / double(out_w);
  for (int64_t ch = 0; ch < c; ++ch) {
    for (int64_t y = 0; y < out_h; ++y) {
      double fy = std::clamp((double(y) + 0.5) * sy - 0.5, 0.0, double(h - 1));
      int64_t y0 = int64_t(fy);
      int64_t y1 = std::min(y0 + 1, h - 1);
      double wy = fy - double(y0);
      for (int64_t x = 0; x < out_w; ++x) {
        double fx = std::clamp((double(x) + 0.5) * sx - 0.5, 0.0, double(w - 1));
        int64_t x0 = int64_t(fx);
        int64_t x1 = std::min(x0 + 1, w - 1);
        double wx = fx - double(x0);
        auto px = [&](int64_t yy, int64_t xx) {
          return double(s.image[(ch * h + yy) * w + xx]);
        };
        out.image[(ch * out_h + y) * out_w + x] =
            float(px(y0, x0) * (1 - wy) * (1 - wx) + px(y0, x1) * (1 - wy) * wx +
                  px(y1, x0) * wy * (1 - wx) + px(y1, x1) * wy * wx);
      }
    }
  }
  double rx = double(out_w) / double(w);
  double ry = double(out_h) / double(h);
  for (const auto& b : s.boxes)
    out.boxes.push_back({b.x1 * rx, b.y1 * ry, b.x2 * rx, b.y2 * ry});
  out.labels = s.labels;
  out.box_weights = s.box_weights;
  return out;
}

PipelineResult run_pipeline(const Sample& a, const std::optional<Sample>& b,
                            Rng& rng, const SizeList& sizes) {
  PipelineResult result;
  Sample cur;
  if (b.has_value()) {
    double lambda = rng.beta(kMixupBetaAlpha, kMixupBetaBeta);
    cur = mixup_with_lambda(a, *b, lambda);
    result.applied.mixup = true;
    result.applied.mixup_lambda = lambda;
  } else {
    cur = a;
  }

  cur = random_color_distort(cur, rng, 0.5, &result.applied.color_distort);
  cur = random_expand(cur, rng, 0.5, &result.applied.expand);
  cur = random_crop(cur, rng, 0.5, &result.applied.crop);
  cur = random_flip(cur, rng, 0.5, &result.applied.flip);

  cur = normalize(cur);
  int64_t target = sample_input_size(rng, sizes);
  result.applied.target_size = target;
  result.sample = resize_bilinear(cur, target, target);
  return result;
}

}  // namespace pptk
