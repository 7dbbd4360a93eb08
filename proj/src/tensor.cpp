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

#include "pptk/tensor.hpp"

#include <bit>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <thread>

static_assert(std::endian::native == std::endian::little,
              "tensor file IO assumes a little-endian host");

namespace pptk {

namespace {
int64_t product(const std::vector<int64_t>& dims) {
  int64_t n = 1;
  for (int64_t d : dims) {
    check(d >= 1, "tensor extents must be >= 1");
    n *= d;
  }
  return n;
}
}  // namespace

TensorF32::TensorF32(std::vector<int64_t> dims, float fill)
    : dims_(std::move(dims)), data_(size_t(product(dims_)), fill) {}

TensorF32::TensorF32(std::vector<int64_t> dims, std::vector<float> data)
    : dims_(std::move(dims)), data_(std::move(data)) {
  check(product(dims_) == int64_t(data_.size()),
        "tensor data length does not match extents");
}

void TensorF32::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write("PPTK", 4);
  uint32_t rank32 = uint32_t(dims_.size());
  out.write(reinterpret_cast<const char*>(&rank32), 4);
  for (int64_t d : dims_) {
    uint32_t e = uint32_t(d);
    out.write(reinterpret_cast<const char*>(&e), 4);
  }
  out.write(reinterpret_cast<const char*>(data_.data()),
            std::streamsize(data_.size() * sizeof(float)));
  if (!out) throw IoError("short write: " + path);
}

TensorF32 TensorF32::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "PPTK", 4) != 0)
    throw IoError("not a PPTK tensor file: " + path);
  uint32_t rank32 = 0;
  in.read(reinterpret_cast<char*>(&rank32), 4);
  if (!in || rank32 > 8) throw IoError("bad tensor rank in " + path);
  std::vector<int64_t> dims(rank32);
  for (uint32_t i = 0; i < rank32; ++i) {
    uint32_t e = 0;
    in.read(reinterpret_cast<char*>(&e), 4);
    if (!in || e == 0) throw IoError("bad tensor extent in " + path);
    dims[i] = e;
  }
  int64_t n = product(dims);
  std::vector<float> data(static_cast<size_t>(n));
  in.read(reinterpret_cast<char*>(data.data()), std::streamsize(n * 4));
  if (!in) throw IoError("truncated tensor payload in " + path);
  return TensorF32(std::move(dims), std::move(data));
}

int max_threads() {
  if (const char* env = std::getenv("PPTK_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : int(hw);
}

}  // namespace pptk
