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

#include <gtest/gtest.h>

#include <map>
#include <random>

#include "pmuplan/estimation.hpp"
#include "pmuplan/planner.hpp"
#include "test_support.hpp"

namespace pmuplan {
namespace {

using testing::ieee14;
using testing::kNu14;

SetMetric metric14() {
  return make_sensitivity_metric(testing::shared_ieee14(), testing::pmu_state());
}

TEST(GreedyPlan, Ieee14FirstStages) {
  const PriorityList plan = greedy_plan(ieee14().omega(), kNu14, metric14(), 3);
  ASSERT_EQ(plan.order.size(), 3u);
  EXPECT_EQ(plan.order[0], 8);
  const double reference[] = {0.7368, 0.7143, 0.6957};
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(plan.stage_values[i], reference[i], 1e-3);
  // Lowest id among the exactly tied candidates.
  EXPECT_EQ(plan.order, (std::vector<BusId>{8, 1, 3}));
}

TEST(GreedyPlan, ReferencePicksAreTiedOptima) {
  // The reference sequence 8, 14, 11 picks a minimizer at each stage too.
  const SetMetric f = metric14();
  BusSet current = kNu14;
  for (BusId pick : {8, 14, 11}) {
    double best = 1e9;
    for (BusId c : set_difference(ieee14().omega(), current)) {
      best = std::min(best, f(with_bus(current, c)));
    }
    EXPECT_NEAR(f(with_bus(current, pick)), best, 1e-12);
    current = with_bus(current, pick);
  }
}

TEST(GreedyPlan, FinalStageAndEdgeCases) {
  const PriorityList plan = greedy_plan(ieee14().omega(), kNu14, metric14(), 10);
  EXPECT_NEAR(plan.stage_values.back(), 0.5882, 1e-3);
  EXPECT_EQ(make_bus_set(plan.order), set_difference(ieee14().omega(), kNu14));
  EXPECT_TRUE(greedy_plan(ieee14().omega(), kNu14, metric14(), 0).order.empty());
  EXPECT_THROW(greedy_plan(ieee14().omega(), kNu14, metric14(), 11), UsageError);
  EXPECT_THROW(greedy_plan(ieee14().omega(), {2, 99}, metric14(), 1), UsageError);
}

TEST(GreedyPlan, PrefixConsistency) {
  const PriorityList plan = greedy_plan(ieee14().omega(), kNu14, metric14(), 10);
  for (std::size_t k = 2; k <= 10; ++k) {
    const BusSet prev = plan.stage(k - 1).selected;
    const BusSet cur = plan.stage(k).selected;
    EXPECT_EQ(cur, with_bus(prev, plan.order[k - 1]));
  }
}

TEST(GreedyPlan, ErrorsNameStageAndCandidate) {
  const SetMetric f = [](const BusSet& q) -> double {
    if (std::binary_search(q.begin(), q.end(), 5)) throw UnobservableError(1);
    return static_cast<double>(q.size());
  };
  try {
    greedy_plan({1, 2, 3, 4, 5}, {1}, f, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::kNumerical);
    EXPECT_NE(std::string(e.what()).find("stage 1, candidate bus 5"), std::string::npos);
  }
}

TEST(BudgetPlan, Ieee14Examples) {
  const StageResult k3 = budget_constrained_plan(ieee14().omega(), kNu14, metric14(), 3);
  EXPECT_EQ(k3.selected, (BusSet{8, 10, 11}));
  EXPECT_NEAR(k3.metric_value, 0.6818, 1e-3);
  const StageResult k6 = budget_constrained_plan(ieee14().omega(), kNu14, metric14(), 6);
  EXPECT_EQ(k6.selected, (BusSet{8, 10, 11, 12, 13, 14}));
  EXPECT_NEAR(k6.metric_value, 0.6296, 1e-3);
  const StageResult all = budget_constrained_plan(ieee14().omega(), kNu14, metric14(), 10);
  EXPECT_EQ(all.selected, set_difference(ieee14().omega(), kNu14));
  const PriorityList plan = greedy_plan(ieee14().omega(), kNu14, metric14(), 10);
  EXPECT_DOUBLE_EQ(all.metric_value, plan.stage_values.back());
}

TEST(BudgetPlan, LexicographicTieBreak) {
  // Every pair has the same value; the first pair wins.
  const SetMetric f = [](const BusSet& q) { return static_cast<double>(q.size()); };
  EXPECT_EQ(budget_constrained_plan({1, 2, 3, 4, 5}, {3}, f, 2).selected, (BusSet{1, 2}));
}

TEST(BudgetPlan, EnumerationCap) {
  const BusSet nu = greedy_observable_cover(testing::ieee118(), 12).buses;
  const SetMetric never = [](const BusSet&) -> double { throw std::logic_error("evaluated"); };
  try {
    budget_constrained_plan(testing::ieee118().omega(), nu, never, 20);
    FAIL();
  } catch (const EnumerationCapError& e) {
    EXPECT_EQ(exit_code_for(e.category()), 4);
    EXPECT_EQ(e.cap(), kDefaultEnumerationCap);
    EXPECT_GT(e.required(), e.cap());
  }
  PlanOptions small;
  small.enum_cap = 44;
  EXPECT_THROW(budget_constrained_plan(ieee14().omega(), kNu14, metric14(), 2, small),
               EnumerationCapError);
  EXPECT_NO_THROW(budget_constrained_plan(ieee14().omega(), kNu14, metric14(), 2,
                                          PlanOptions{kPlanTieTolerance, 45, 1}));
}

TEST(ComparePlans, Ieee14Summary) {
  const PlanComparison cmp = compare_plans(ieee14().omega(), kNu14, metric14(), 10);
  ASSERT_EQ(cmp.stages.size(), 10u);
  const double budget[] = {0.7368, 0.7143, 0.6818, 0.6667, 0.6538,
                           0.6296, 0.6207, 0.6129, 0.6061, 0.5882};
  for (std::size_t i = 0; i < 10; ++i) {
    EXPECT_NEAR(cmp.stages[i].budget.metric_value, budget[i], 1e-3) << "stage " << i + 1;
    EXPECT_LE(cmp.stages[i].budget.metric_value,
              cmp.stages[i].greedy.metric_value + kPlanTieTolerance);
  }
  EXPECT_FALSE(cmp.stages[0].sets_differ);
  EXPECT_FALSE(cmp.stages[9].sets_differ);
  EXPECT_TRUE(cmp.stages[2].greedy_worse);
  EXPECT_TRUE(cmp.stages[5].greedy_worse);
}

TEST(ComparePlans, ReferenceBudgetSetsAreTiedOptima) {
  const SetMetric f = metric14();
  const std::vector<BusSet> reference = {
      {8},
      {8, 14},
      {8, 10, 11},
      {1, 8, 10, 11},
      {1, 8, 10, 11, 14},
      {8, 10, 11, 12, 13, 14},
      {1, 8, 10, 11, 12, 13, 14},
      {1, 5, 8, 10, 11, 12, 13, 14},
      {1, 3, 4, 8, 10, 11, 12, 13, 14},
      {1, 3, 4, 5, 8, 10, 11, 12, 13, 14},
  };
  for (std::size_t k = 1; k <= 10; ++k) {
    const StageResult best = budget_constrained_plan(ieee14().omega(), kNu14, f, k);
    EXPECT_NEAR(f(set_union(kNu14, reference[k - 1])), best.metric_value, 1e-12)
        << "stage " << k;
  }
}

TEST(ComparePlans, SingleStageIdentical) {
  const PlanComparison cmp = compare_plans(ieee14().omega(), kNu14, metric14(), 1);
  EXPECT_FALSE(cmp.stages[0].sets_differ);
  EXPECT_FALSE(cmp.stages[0].greedy_worse);
}

TEST(ComparePlans, Deterministic) {
  const PlanComparison a = compare_plans(ieee14().omega(), kNu14, metric14(), 5,
                                         PlanOptions{kPlanTieTolerance, kDefaultEnumerationCap, 1});
  const PlanComparison b = compare_plans(ieee14().omega(), kNu14, metric14(), 5,
                                         PlanOptions{kPlanTieTolerance, kDefaultEnumerationCap, 4});
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(a.stages[i].budget.selected, b.stages[i].budget.selected);
    EXPECT_EQ(a.stages[i].greedy.selected, b.stages[i].greedy.selected);
    EXPECT_EQ(a.stages[i].budget.metric_value, b.stages[i].budget.metric_value);
  }
}

TEST(Dominance, RandomSmallConfigurations) {
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 3 + trial % 8;
    const auto net = std::make_shared<const NetworkCase>(testing::random_network(n, rng));
    const BusSet nu = testing::random_subset(net->omega(), 1 + rng() % (n / 2), rng);
    MetricOptions opt = testing::pmu_state();
    opt.channel_limit = 64;
    const SetMetric f = make_sensitivity_metric(net, opt);
    const std::size_t stages = net->bus_count() - nu.size();
    const PlanComparison cmp = compare_plans(net->omega(), nu, f, stages);
    for (const StageComparison& row : cmp.stages) {
      EXPECT_LE(row.budget.metric_value, row.greedy.metric_value + kPlanTieTolerance);
    }
    EXPECT_EQ(cmp.stages.back().budget.selected, cmp.stages.back().greedy.selected);
    EXPECT_EQ(cmp.stages.back().budget.metric_value, cmp.stages.back().greedy.metric_value);
  }
}

}  // namespace
}  // namespace pmuplan
