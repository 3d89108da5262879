// Copyright 2026 The Learnprof Authors
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

#ifndef LEARNPROF_COMMON_ERROR_HPP
#define LEARNPROF_COMMON_ERROR_HPP

#include <stdexcept>
#include <string>

namespace learnprof {

enum class ErrorCode {
  kInvalidArgument = 1,
  kParse,
  kValidation,
  kNotFound,
  kIo,
  kInsufficientData,
  kNumerical,
  kUnavailable,
};

// All recoverable failures inside the core are reported with this type; the
// C API maps `code()` onto its status enum.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace learnprof

#endif  // LEARNPROF_COMMON_ERROR_HPP
