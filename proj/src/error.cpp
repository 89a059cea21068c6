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

#include "syneval/error.hpp"

namespace syneval {

std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kFormat: return "format error";
    case ErrorKind::kTruncation: return "truncation error";
    case ErrorKind::kDimensionMismatch: return "dimension mismatch";
    case ErrorKind::kEmptySet: return "empty set";
    case ErrorKind::kTooFewSamples: return "too few samples";
    case ErrorKind::kInvalidArgument: return "invalid argument";
    case ErrorKind::kUndefinedDirection: return "undefined direction";
    case ErrorKind::kEmbedderMismatch: return "embedder mismatch";
    case ErrorKind::kNumerical: return "numerical error";
    case ErrorKind::kIo: return "I/O error";
    case ErrorKind::kManifest: return "manifest error";
  }
  return "error";
}

}  // namespace syneval
