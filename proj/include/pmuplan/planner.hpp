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

// Multi-stage placement planning on top of a fixed base set ν.
//
// The greedy planner builds a priority list: each stage keeps every earlier
// pick and adds the one bus that minimizes the objective. The
// budget-constrained planner re-optimizes from scratch for each stage size by
// exhaustive enumeration, and may drop earlier picks.
//
// Candidate values within `tie_tol` of the incumbent do not replace it, so
// ties go to the lowest bus id (greedy) or the lexicographically smallest
// set (budget).

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pmuplan/combinatorics.hpp"
#include "pmuplan/errors.hpp"
#include "pmuplan/network.hpp"
#include "pmuplan/parallel.hpp"
#include "pmuplan/submodularity.hpp"

namespace pmuplan {

inline constexpr double kPlanTieTolerance = 1e-12;
inline constexpr std::uint64_t kDefaultEnumerationCap = 10'000'000;

struct PlanOptions {
  double tie_tol = kPlanTieTolerance;
  std::uint64_t enum_cap = kDefaultEnumerationCap;
  unsigned workers = 0;
};

struct StageResult {
  std::size_t stage = 0;
  BusSet selected;  // additions beyond ν, ascending
  double metric_value = 0.0;
};

struct PriorityList {
  BusSet base;
  std::vector<BusId> order;
  std::vector<double> stage_values;  // objective after each prefix of `order`

  StageResult stage(std::size_t k) const {
    StageResult r;
    r.stage = k;
    r.selected = make_bus_set({order.begin(), order.begin() + k});
    r.metric_value = stage_values.at(k - 1);
    return r;
  }
};

namespace detail {

template <typename Eval>
double evaluate_with_context(const Eval& eval, const std::string& context) {
  try {
    return eval();
  } catch (const Error& e) {
    rethrow_with_context(e, context);
  }
}

inline std::string describe(std::span<const BusId> buses) {
  std::string out;
  for (BusId b : buses) {
    if (!out.empty()) out += ",";
    out += std::to_string(b);
  }
  return out;
}

inline BusSet candidates(const BusSet& omega, const BusSet& nu) {
  if (!std::includes(omega.begin(), omega.end(), nu.begin(), nu.end())) {
    throw UsageError("base set nu must be a subset of the bus set");
  }
  return set_difference(omega, nu);
}

}  // namespace detail

inline PriorityList greedy_plan(const BusSet& omega, const BusSet& nu,
                                const SetMetric& metric, std::size_t stages,
                                const PlanOptions& options = {}) {
  const BusSet pool = detail::candidates(omega, nu);
  if (stages > pool.size()) {
    throw UsageError("requested " + std::to_string(stages) +
                     " stages but only " + std::to_string(pool.size()) +
                     " buses are outside nu");
  }
  PriorityList plan;
  plan.base = nu;
  BusSet current = nu;
  BusSet remaining = pool;
  for (std::size_t stage = 1; stage <= stages; ++stage) {
    const std::vector<double> values =
        parallel_map(remaining.size(), options.workers, [&](std::size_t i) {
          return detail::evaluate_with_context(
              [&] { return metric(with_bus(current, remaining[i])); },
              "stage " + std::to_string(stage) + ", candidate bus " +
                  std::to_string(remaining[i]));
        });
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
      if (values[i] < values[best] - options.tie_tol) best = i;
    }
    const BusId pick = remaining[best];
    plan.order.push_back(pick);
    plan.stage_values.push_back(values[best]);
    current = with_bus(current, pick);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return plan;
}

inline std::uint64_t budget_subset_count(const BusSet& omega, const BusSet& nu,
                                         std::size_t k) {
  return binomial(detail::candidates(omega, nu).size(), k);
}

inline StageResult budget_constrained_plan(const BusSet& omega, const BusSet& nu,
                                           const SetMetric& metric, std::size_t k,
                                           const PlanOptions& options = {}) {
  const BusSet pool = detail::candidates(omega, nu);
  if (k > pool.size()) {
    throw UsageError("cannot choose " + std::to_string(k) + " of " +
                     std::to_string(pool.size()) + " candidate buses");
  }
  const std::uint64_t required = binomial(pool.size(), k);
  if (required > options.enum_cap) {
    throw EnumerationCapError(required, options.enum_cap);
  }

  std::optional<StageResult> best;
  std::vector<BusSet> block;
  auto flush = [&] {
    const std::vector<double> values =
        parallel_map(block.size(), options.workers, [&](std::size_t i) {
          return detail::evaluate_with_context(
              [&] { return metric(set_union(nu, block[i])); },
              "candidate set {" + detail::describe(block[i]) + "}");
        });
    for (std::size_t i = 0; i < block.size(); ++i) {
      if (!best || values[i] < best->metric_value - options.tie_tol) {
        best = StageResult{k, block[i], values[i]};
      }
    }
    block.clear();
  };
  constexpr std::size_t kBlock = 4096;
  for_each_combination<BusId>(pool, k, [&](std::span<const BusId> subset) {
    block.emplace_back(subset.begin(), subset.end());
    if (block.size() == kBlock) flush();
  });
  flush();
  return *best;
}

struct StageComparison {
  std::size_t stage = 0;
  StageResult budget;
  StageResult greedy;
  bool sets_differ = false;
  bool greedy_worse = false;  // greedy value exceeds budget value beyond tie_tol
};

struct PlanComparison {
  BusSet base;
  PriorityList greedy;
  std::vector<StageComparison> stages;
};

inline PlanComparison compare_plans(const BusSet& omega, const BusSet& nu,
                                    const SetMetric& metric, std::size_t stages,
                                    const PlanOptions& options = {}) {
  for (std::size_t k = 1; k <= stages; ++k) {
    const std::uint64_t required = budget_subset_count(omega, nu, k);
    if (required > options.enum_cap) {
      throw EnumerationCapError(required, options.enum_cap);
    }
  }
  PlanComparison cmp;
  cmp.base = nu;
  cmp.greedy = greedy_plan(omega, nu, metric, stages, options);
  for (std::size_t k = 1; k <= stages; ++k) {
    StageComparison row;
    row.stage = k;
    row.budget = budget_constrained_plan(omega, nu, metric, k, options);
    row.greedy = cmp.greedy.stage(k);
    row.sets_differ = row.budget.selected != row.greedy.selected;
    row.greedy_worse =
        row.greedy.metric_value > row.budget.metric_value + options.tie_tol;
    cmp.stages.push_back(std::move(row));
  }
  return cmp;
}

}  // namespace pmuplan
