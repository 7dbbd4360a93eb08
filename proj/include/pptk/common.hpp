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

#ifndef PPTK_COMMON_HPP_
#define PPTK_COMMON_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pptk {

// Error taxonomy; the CLI maps these to distinct exit codes.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : Error {
  using Error::Error;
};
struct ValidationError : Error {
  using Error::Error;
};
struct NumericError : Error {
  using Error::Error;
};

inline void check(bool cond, const std::string& msg) {
  if (!cond) throw ValidationError(msg);
}

// Worker-thread cap resolved from PPTK_THREADS (0 or unset -> hardware default).
int max_threads();

}  // namespace pptk

#endif  // PPTK_COMMON_HPP_
