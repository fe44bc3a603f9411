#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "slicewb/core.hpp"
#include "slicewb/error.hpp"

using namespace slicewb;

TEST(Core, SliceCostExamples) {
  EXPECT_DOUBLE_EQ(slice_cost({1, 0.1}, {1.0, 1.0}), 1.1);
  EXPECT_DOUBLE_EQ(slice_cost({0, 0.0}, {3.0, 7.0}), 0.0);
  EXPECT_DOUBLE_EQ(slice_cost({4, 0.25}, {2.0, 4.0}), 9.0);
}

TEST(Core, TotalCostExamples) {
  const std::vector<Action> converged{{1, 0.1}, {2, 0.1}, {1, 0.1}};
  EXPECT_NEAR(total_cost(converged, {1.0, 1.0}), 4.3, 1e-12);
  EXPECT_DOUBLE_EQ(total_cost(std::vector<Action>{}, {1.0, 1.0}), 0.0);
  const std::vector<Action> hard{{4, 0.0}, {4, 0.0}, {4, 0.0}};
  EXPECT_DOUBLE_EQ(total_cost(hard, {1.0, 1.0}), 12.0);
}

TEST(Core, NormalizedPerformanceExamples) {
  const SliceSpec spec{"a", 12.0, 10.0};
  EXPECT_DOUBLE_EQ(normalized_performance({12.0, 10.0}, spec), 1.0);
  EXPECT_DOUBLE_EQ(normalized_performance({24.0, 10.0}, spec), 1.5);
  EXPECT_DOUBLE_EQ(normalized_performance({0.0, 0.0}, spec), 0.0);
}

TEST(Core, SlaCheck) {
  EXPECT_TRUE(meets_sla({12.0, 10.0}, 12.0, 10.0));
  EXPECT_FALSE(meets_sla({11.9, 30.0}, 12.0, 10.0));
  EXPECT_FALSE(meets_sla({30.0, 9.9}, 12.0, 10.0));
}

TEST(Core, Bounds) {
  EXPECT_TRUE(within_bounds({0, 0.0}, 12));
  EXPECT_TRUE(within_bounds({12, 1.0}, 12));
  EXPECT_FALSE(within_bounds({13, 0.0}, 12));
  EXPECT_FALSE(within_bounds({-1, 0.0}, 12));
  EXPECT_FALSE(within_bounds({1, 1.01}, 12));
  EXPECT_FALSE(within_bounds({1, -0.01}, 12));
}

TEST(CoreProperty, CostIsLinearAndPermutationInvariant) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> xs(0, 6);
  std::uniform_real_distribution<double> ws(0.0, 0.5), us(0.1, 5.0);
  for (int trial = 0; trial < 500; ++trial) {
    const CostParams p{us(rng), us(rng)};
    const Action a{xs(rng), ws(rng)}, b{xs(rng), ws(rng)};
    EXPECT_NEAR(slice_cost({a.svrb + b.svrb, a.sw + b.sw}, p), slice_cost(a, p) + slice_cost(b, p), 1e-12);

    std::vector<Action> list;
    for (int i = 0; i < 5; ++i) list.push_back({xs(rng), ws(rng)});
    const double before = total_cost(list, p);
    std::shuffle(list.begin(), list.end(), rng);
    EXPECT_NEAR(total_cost(list, p), before, 1e-12);
  }
}

TEST(CoreProperty, NormalizedPerformanceMonotone) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> v(0.0, 40.0), d(0.0, 5.0);
  const SliceSpec spec{"a", 12.0, 10.0};
  for (int trial = 0; trial < 500; ++trial) {
    const PerfVector p{v(rng), v(rng)};
    const double base = normalized_performance(p, spec);
    EXPECT_GE(normalized_performance({p.throughput + d(rng), p.fps}, spec), base);
    EXPECT_GE(normalized_performance({p.throughput, p.fps + d(rng)}, spec), base);
  }
}

TEST(Core, ErrorKindNames) {
  EXPECT_STREQ(to_string(ErrorKind::CapacityExceeded), "capacity_exceeded");
  const Error e(ErrorKind::Validation, "bad", "slots");
  EXPECT_EQ(e.kind(), ErrorKind::Validation);
  EXPECT_EQ(e.field(), "slots");
}
