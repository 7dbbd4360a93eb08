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

#ifndef PPTK_ACTIVATIONS_HPP_
#define PPTK_ACTIVATIONS_HPP_

#include <algorithm>
#include <cmath>

namespace pptk {

// max(x,0) + log1p(exp(-|x|)): equal to log(1+e^x) but safe for large |x|.
inline double softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

// x * tanh(softplus(x))
inline double mish(double x) { return x * std::tanh(softplus(x)); }

inline double mish_grad(double x) {
  double t = std::tanh(softplus(x));
  return t + x * (1.0 - t * t) * sigmoid(x);
}

// x * sigmoid(x)
inline double silu(double x) { return x * sigmoid(x); }

inline double silu_grad(double x) {
  double s = sigmoid(x);
  return s * (1.0 + x * (1.0 - s));
}

inline double leaky_relu(double x, double slope = 0.1) {
  return x >= 0.0 ? x : slope * x;
}

}  // namespace pptk

#endif  // PPTK_ACTIVATIONS_HPP_
