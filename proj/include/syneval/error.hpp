/* Copyright 2026 The Syneval Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef SYNEVAL_ERROR_HPP_
#define SYNEVAL_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace syneval {

enum class ErrorKind {
  kFormat,
  kTruncation,
  kDimensionMismatch,
  kEmptySet,
  kTooFewSamples,
  kInvalidArgument,
  kUndefinedDirection,
  kEmbedderMismatch,
  kNumerical,
  kIo,
  kManifest,
};

std::string_view ErrorKindName(ErrorKind kind);

// Every failure raised by the library carries a kind so callers (the CLI in
// particular) can map it onto a stable exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace syneval

#endif  // SYNEVAL_ERROR_HPP_
