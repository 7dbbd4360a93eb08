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

#ifndef PPTK_TENSOR_HPP_
#define PPTK_TENSOR_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "pptk/common.hpp"

namespace pptk {

// Dense row-major float32 tensor. Images and feature maps are NCHW.
class TensorF32 {
 public:
  TensorF32() = default;
  explicit TensorF32(std::vector<int64_t> dims, float fill = 0.0f);
  TensorF32(std::vector<int64_t> dims, std::vector<float> data);

  int64_t rank() const { return int64_t(dims_.size()); }
  int64_t dim(int64_t i) const { return dims_[size_t(i)]; }
  const std::vector<int64_t>& dims() const { return dims_; }
  int64_t numel() const { return int64_t(data_.size()); }

  float* data() { return data_.data(); }
  const float* data() const { return data_.data(); }
  float& operator[](int64_t i) { return data_[size_t(i)]; }
  float operator[](int64_t i) const { return data_[size_t(i)]; }

  // NCHW accessors; valid only for rank-4 tensors.
  float& at(int64_t n, int64_t c, int64_t h, int64_t w) {
    return data_[size_t(((n * dims_[1] + c) * dims_[2] + h) * dims_[3] + w)];
  }
  float at(int64_t n, int64_t c, int64_t h, int64_t w) const {
    return data_[size_t(((n * dims_[1] + c) * dims_[2] + h) * dims_[3] + w)];
  }

  bool same_shape(const TensorF32& other) const { return dims_ == other.dims_; }

  // Portable tensor file: magic "PPTK", u32 rank, u32 extents, f32 payload,
  // all little-endian, payload row-major.
  void save(const std::string& path) const;
  static TensorF32 load(const std::string& path);

 private:
  std::vector<int64_t> dims_;
  std::vector<float> data_;
};

}  // namespace pptk

#endif  // PPTK_TENSOR_HPP_
