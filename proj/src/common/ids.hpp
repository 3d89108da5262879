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

#ifndef LEARNPROF_COMMON_IDS_HPP
#define LEARNPROF_COMMON_IDS_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>

namespace learnprof {

// 8-4-4-4-12 hexadecimal, either case.
bool is_uuid(std::string_view s);

// Exactly 40 hexadecimal characters (a git commit hash).
bool is_commit_hash(std::string_view s);

// Version-4 style UUID drawn from `rng`; lower-case.
std::string random_uuid(std::mt19937_64& rng);

// Parses "YYYY-MM-DD[THH:MM[:SS[.fff]]][Z|+HH:MM|-HH:MM]" into Unix
// milliseconds. Missing zone means UTC.
std::optional<std::int64_t> parse_iso8601_ms(std::string_view s);

// splitmix64 finalizer; used to derive independent RNG streams.
std::uint64_t mix64(std::uint64_t x);

std::uint64_t fnv1a64(std::string_view s);

}  // namespace learnprof

#endif  // LEARNPROF_COMMON_IDS_HPP
