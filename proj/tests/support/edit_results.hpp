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


#ifndef LEARNPROF_TESTS_SUPPORT_EDIT_RESULTS_HPP
#define LEARNPROF_TESTS_SUPPORT_EDIT_RESULTS_HPP

#include <array>

// Published before/after accuracies for twelve textbook edits, with the
// reported effect size and whether the corrected test was significant.
namespace learnprof::testing {

struct EditResult {
  const char* name;
  double before;
  double n_before;
  double after;
  double n_after;
  double reported_d;
  bool significant;
};

inline constexpr std::array<EditResult, 12> kEditResults = {{
    {"Semver dependency deduplication", 0.18, 593, 0.70, 543, 1.24, true},
    {"Rust lacks inheritance", 0.29, 234, 0.74, 3511, 1.03, true},
    {"Match expressions and ownership", 0.39, 522, 0.74, 4970, 0.78, true},
    {"Send vs. Sync", 0.25, 639, 0.49, 538, 0.52, true},
    {"String slice diagram", 0.23, 575, 0.43, 7188, 0.41, true},
    {"Heap allocation with strings", 0.13, 265, 0.27, 3636, 0.32, true},
    {"Rules of lifetime inference", 0.26, 177, 0.40, 2887, 0.29, true},
    {"Traits vs. templates", 0.38, 234, 0.49, 3511, 0.21, true},
    {"Trait objects and type inference", 0.09, 654, 0.18, 544, 0.27, true},
    {"Refutable patterns", 0.17, 549, 0.25, 499, 0.21, true},
    {"Declarative macros take items", 0.19, 340, 0.23, 312, 0.09, false},
    {"Dereferencing vector elements", 0.15, 311, 0.18, 4001, 0.07, false},
}};

}  // namespace learnprof::testing

#endif  // LEARNPROF_TESTS_SUPPORT_EDIT_RESULTS_HPP
