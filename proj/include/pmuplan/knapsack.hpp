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

// Sequential-investment toy problem: a 0/1 knapsack solved either optimally
// for each budget, or as a priority list that never revokes a pick.
//
// The priority list is what a planner gets by raising the budget from zero:
// whenever the unspent budget first covers some remaining item, the
// highest-value affordable item is bought (ties: lower weight, then lower
// index). Because the budget grows continuously, the affordable items at
// that moment are the lightest remaining ones, so the pick order does not
// depend on the final budget.

#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "pmuplan/errors.hpp"

namespace pmuplan {

inline constexpr std::size_t kMaxEnumeratedItems = 25;
inline constexpr std::size_t kMaxSweepItems = 20;

struct KnapsackInstance {
  std::vector<double> values;
  std::vector<double> weights;
  std::vector<std::string> labels;

  std::size_t size() const { return values.size(); }
};

inline KnapsackInstance make_knapsack(std::vector<double> values,
                                      std::vector<double> weights,
                                      std::vector<std::string> labels = {}) {
  if (values.empty()) throw UsageError("knapsack instance has no items");
  if (values.size() != weights.size()) {
    throw UsageError("knapsack values and weights differ in length");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) throw UsageError("item values must be finite");
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i])) {
      throw UsageError("item weights must be positive and finite");
    }
  }
  if (labels.empty()) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      labels.push_back("x" + std::to_string(i + 1));
    }
  }
  if (labels.size() != values.size()) {
    throw UsageError("knapsack labels differ in length");
  }
  return {std::move(values), std::move(weights), std::move(labels)};
}

// max 7x1 + 5x2 + 4x3 + x4  s.t.  4x1 + 2x2 + 3x3 + 6x4 <= b
inline KnapsackInstance illustrative_knapsack() {
  return make_knapsack({7, 5, 4, 1}, {4, 2, 3, 6});
}

struct KnapsackSolution {
  std::vector<std::size_t> items;  // optimal: ascending; greedy: purchase order
  double objective = 0.0;
};

namespace detail {

// Lexicographic order of the ascending index lists encoded by two masks.
inline bool mask_lex_less(std::uint64_t a, std::uint64_t b) {
  if (a == b) return false;
  const int d = std::countr_zero(a ^ b);
  if (a >> d & 1) return (b >> d) != 0;
  return (a >> d) == 0;
}

inline std::vector<std::size_t> mask_items(std::uint64_t mask) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; mask >> i; ++i) {
    if (mask >> i & 1) out.push_back(i);
  }
  return out;
}

inline double mask_sum(const std::vector<double>& x, std::uint64_t mask) {
  double s = 0.0;
  for (std::size_t i = 0; mask >> i; ++i) {
    if (mask >> i & 1) s += x[i];
  }
  return s;
}

inline void check_budget(double budget) {
  if (!(budget >= 0.0)) throw UsageError("budget must be non-negative");
}

}  // namespace detail

// Exhaustive 0/1 optimum; ties go to the lexicographically smallest set.
inline KnapsackSolution optimal_solve(const KnapsackInstance& inst, double budget) {
  detail::check_budget(budget);
  if (inst.size() > kMaxEnumeratedItems) {
    throw UsageError("exhaustive knapsack limited to " +
                     std::to_string(kMaxEnumeratedItems) + " items");
  }
  const std::uint64_t subsets = std::uint64_t{1} << inst.size();
  std::uint64_t best = 0;
  double best_value = 0.0;
  for (std::uint64_t mask = 1; mask < subsets; ++mask) {
    if (detail::mask_sum(inst.weights, mask) > budget) continue;
    const double v = detail::mask_sum(inst.values, mask);
    if (v > best_value || (v == best_value && detail::mask_lex_less(mask, best))) {
      best = mask;
      best_value = v;
    }
  }
  return {detail::mask_items(best), best_value};
}

inline KnapsackSolution greedy_solve(const KnapsackInstance& inst, double budget) {
  detail::check_budget(budget);
  std::vector<bool> taken(inst.size(), false);
  // Weight of the taken items plus `extra`, summed in index order so that
  // affordability flips exactly at the subset weights the sweep uses.
  auto weight_with = [&](std::size_t extra) {
    double w = 0.0;
    for (std::size_t i = 0; i < inst.size(); ++i) {
      if (taken[i] || i == extra) w += inst.weights[i];
    }
    return w;
  };
  KnapsackSolution sol;
  while (sol.items.size() < inst.size()) {
    double lightest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < inst.size(); ++i) {
      if (!taken[i]) lightest = std::min(lightest, inst.weights[i]);
    }
    // Unspent budget is `lightest` at the moment anything becomes affordable.
    std::size_t pick = inst.size();
    for (std::size_t i = 0; i < inst.size(); ++i) {
      if (taken[i] || inst.weights[i] > lightest) continue;
      if (pick == inst.size() || inst.values[i] > inst.values[pick]) pick = i;
    }
    if (weight_with(pick) > budget) break;
    taken[pick] = true;
    sol.objective += inst.values[pick];
    sol.items.push_back(pick);
  }
  return sol;
}

enum class KnapsackMethod { kOptimal, kGreedy };

struct BreakpointRow {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();  // exclusive
  std::vector<std::size_t> items;
  double objective = 0.0;
};

struct BudgetBreakpointTable {
  KnapsackMethod method = KnapsackMethod::kOptimal;
  std::vector<BreakpointRow> rows;

  // Row whose [lo, hi) interval holds `budget`.
  const BreakpointRow& at(double budget) const {
    for (const auto& row : rows) {
      if (budget >= row.lo && budget < row.hi) return row;
    }
    throw UsageError("budget outside the table");
  }
};

// Both solutions are piecewise constant in the budget and can only change
// where the budget equals some subset weight, so each candidate budget
// starts an interval; consecutive intervals with identical solutions merge.
inline BudgetBreakpointTable budget_sweep(const KnapsackInstance& inst,
                                          KnapsackMethod method) {
  if (inst.size() > kMaxSweepItems) {
    throw UsageError("budget sweep limited to " + std::to_string(kMaxSweepItems) +
                     " items");
  }
  const std::uint64_t subsets = std::uint64_t{1} << inst.size();
  std::vector<std::uint64_t> order(subsets);
  std::iota(order.begin(), order.end(), std::uint64_t{0});
  std::vector<double> weight(subsets);
  for (std::uint64_t m = 0; m < subsets; ++m) weight[m] = detail::mask_sum(inst.weights, m);
  std::stable_sort(order.begin(), order.end(),
                   [&](auto a, auto b) { return weight[a] < weight[b]; });

  BudgetBreakpointTable table;
  table.method = method;
  auto push = [&](double lo, std::vector<std::size_t> items, double objective) {
    if (!table.rows.empty()) {
      BreakpointRow& last = table.rows.back();
      if (last.items == items) return;
      last.hi = lo;
    }
    table.rows.push_back({lo, std::numeric_limits<double>::infinity(),
                          std::move(items), objective});
  };

  // Optimal: running best over subsets sorted by weight.
  std::uint64_t best = 0;
  double best_value = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    const double level = weight[order[i]];
    for (; i < order.size() && weight[order[i]] == level; ++i) {
      const std::uint64_t m = order[i];
      if (method != KnapsackMethod::kOptimal) continue;
      const double v = detail::mask_sum(inst.values, m);
      if (v > best_value || (v == best_value && detail::mask_lex_less(m, best))) {
        best = m;
        best_value = v;
      }
    }
    if (method == KnapsackMethod::kOptimal) {
      push(level, detail::mask_items(best), best_value);
    } else {
      KnapsackSolution s = greedy_solve(inst, level);
      push(level, std::move(s.items), s.objective);
    }
  }
  return table;
}

}  // namespace pmuplan
