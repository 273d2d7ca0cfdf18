// Copyright 2026 The Authors.
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

#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "pmuplan/errors.hpp"

namespace pmuplan {

// Exact C(n, k); throws UsageError when the value does not fit in 64 bits.
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  unsigned __int128 acc = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // acc * (n - k + i) / i stays integral at every step.
    acc = acc * (n - k + i) / i;
    if (acc > std::numeric_limits<std::uint64_t>::max()) {
      throw UsageError("C(" + std::to_string(n) + ", " + std::to_string(k) +
                       ") overflows 64 bits");
    }
  }
  return static_cast<std::uint64_t>(acc);
}

inline std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  if (p > std::numeric_limits<std::uint64_t>::max()) {
    throw UsageError("combination count overflows 64 bits");
  }
  return static_cast<std::uint64_t>(p);
}

// Calls visit(span) for every k-subset of `pool`, in lexicographic order of
// positions. With a sorted pool this is lexicographic order of the subsets.
template <typename T, typename Visit>
void for_each_combination(std::span<const T> pool, std::size_t k, Visit&& visit) {
  const std::size_t n = pool.size();
  if (k > n) return;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  std::vector<T> current(k);
  while (true) {
    for (std::size_t i = 0; i < k; ++i) current[i] = pool[idx[i]];
    visit(std::span<const T>(current));
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace pmuplan
