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

#include "pptk/schedule.hpp"

#include <cmath>

namespace pptk {

void LRScheduleConfig::validate() const {
  check(base_lr > 0.0, "base_lr must be positive");
  check(warmup_iters >= 0 && total_iters > 0, "bad iteration counts");
  for (size_t i = 0; i < milestones.size(); ++i) {
    check(milestones[i] < total_iters, "milestones must precede total_iters");
    if (i > 0)
      check(milestones[i] > milestones[i - 1], "milestones must increase");
  }
  if (!milestones.empty())
    check(warmup_iters < milestones[0], "warmup must end before the first milestone");
}

double lr_at(const LRScheduleConfig& config, int64_t iter) {
  config.validate();
  check(iter >= 0 && iter <= config.total_iters, "iteration out of range");
  if (iter < config.warmup_iters)
    return config.base_lr * double(iter) / double(config.warmup_iters);
  if (config.variant == LRVariant::Step) {
    double lr = config.base_lr;
    for (int64_t m : config.milestones)
      if (iter >= m) lr *= config.decay_factor;
    return lr;
  }
  double span = double(config.total_iters - config.warmup_iters);
  double progress = double(iter - config.warmup_iters) / span;
  return 0.5 * config.base_lr * (1.0 + std::cos(M_PI * progress));
}

std::vector<double> clip_gradients(const std::vector<double>& grads,
                                   double max_norm) {
  check(max_norm > 0.0, "max_norm must be positive");
  double sq = 0.0;
  for (double g : grads) sq += g * g;
  double norm = std::sqrt(sq);
  if (norm <= max_norm) return grads;
  double scale = max_norm / norm;
  std::vector<double> out;
  out.reserve(grads.size());
  for (double g : grads) out.push_back(g * scale);
  return out;
}

}  // namespace pptk
