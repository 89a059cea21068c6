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

// Command-line front end. Exit codes: 0 success, 1 computation or format
// failure, 2 usage or manifest failure.

#ifndef SYNEVAL_CLI_HPP_
#define SYNEVAL_CLI_HPP_

#include <cstdint>
#include <ostream>

namespace syneval {

inline constexpr char kToolkitVersion[] = "0.1.0";
inline constexpr std::uint64_t kDefaultSeed = 42;

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace syneval

#endif  // SYNEVAL_CLI_HPP_
