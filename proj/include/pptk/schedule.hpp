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

#ifndef PPTK_SCHEDULE_HPP_
#define PPTK_SCHEDULE_HPP_

#include <cstdint>
#include <vector>

#include "pptk/common.hpp"

namespace pptk {

enum class LRVariant { Step, Cosine };

// Defaults follow the 500K-iteration SGD recipe: linear warmup to 0.005
// over 4K iterations, /10 at 400K and 450K. The cosine variant decays to
// zero from the warmup end; it underperformed step decay at full scale in
// the source experiments, so it stays opt-in.
struct LRScheduleConfig {
  double base_lr = 0.005;
  int64_t warmup_iters = 4000;
  std::vector<int64_t> milestones = {400000, 450000};
  double decay_factor = 0.1;
  int64_t total_iters = 500000;
  LRVariant variant = LRVariant::Step;
  double momentum = 0.9;
  double weight_decay = 0.0005;

  void validate() const;
};

// Warmup: base_lr * iter / warmup_iters. Step: base_lr * factor^(#milestones
// <= iter), the decay applying from the milestone iteration onward. Cosine:
// 0.5 * base_lr * (1 + cos(pi * (iter - warmup) / (total - warmup))).
double lr_at(const LRScheduleConfig& config, int64_t iter);

// Scales the vector to max_norm when its L2 norm exceeds it; identity
// otherwise. Direction is preserved exactly.
std::vector<double> clip_gradients(const std::vector<double>& grads,
                                   double max_norm);

constexpr double kDefaultClipMaxNorm = 35.0;

}  // namespace pptk

#endif  // PPTK_SCHEDULE_HPP_
