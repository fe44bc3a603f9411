#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "oracles.hpp"
#include "slicewb/coordinator.hpp"
#include "slicewb/error.hpp"

using namespace slicewb;

TEST(Coordinator, AuxiliaryExamples) {
  const std::vector<double> x1{2, 3}, y1{0, 0};
  const auto z1 = update_auxiliary(x1, y1, 12);
  EXPECT_DOUBLE_EQ(z1[0], 2.0);
  EXPECT_DOUBLE_EQ(z1[1], 3.0);

  const std::vector<double> x2{5, 6}, y2{1, 1};
  const auto z2 = update_auxiliary(x2, y2, 10);
  EXPECT_DOUBLE_EQ(z2[0], 4.5);
  EXPECT_DOUBLE_EQ(z2[1], 5.5);

  const std::vector<double> x3{-1, -2}, y3{0, 0};
  const auto z3 = update_auxiliary(x3, y3, 10);
  EXPECT_DOUBLE_EQ(z3[0], 0.5);
  EXPECT_DOUBLE_EQ(z3[1], -0.5);
}

TEST(Coordinator, AuxiliaryMatchesBruteForce) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-6.0, 12.0);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 1 + trial % 3;
    const int cap = 4 + trial % 9;
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = std::round(u(rng));
      y[i] = u(rng) / 3.0;
    }
    const auto z = update_auxiliary(x, y, cap);
    oracle::Vec c(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = x[i] + y[i];
    const auto ref = oracle::slab_bruteforce(c, cap);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(z[i], ref[i], 0.02);
  }
}

TEST(CoordinatorProperty, AuxiliaryStaysInSlab) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-30.0, 30.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 1 + trial % 5;
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = u(rng);
      y[i] = u(rng);
    }
    const auto z = update_auxiliary(x, y, 12);
    const double sum = std::accumulate(z.begin(), z.end(), 0.0);
    EXPECT_GE(sum, -1e-9);
    EXPECT_LE(sum, 12.0 + 1e-9);
  }
}

TEST(Coordinator, DualExamples) {
  const std::vector<double> y{-5, -5, -5}, x{4, 4, 4}, z{1, 1, 1};
  for (double v : dual_update(y, x, z)) EXPECT_DOUBLE_EQ(v, -2.0);
  const std::vector<double> y2{0, 0}, x2{4, 4}, z2{3, 5};
  const auto out = dual_update(y2, x2, z2);
  EXPECT_DOUBLE_EQ(out[0], 1.0);
  EXPECT_DOUBLE_EQ(out[1], -1.0);
  EXPECT_EQ(dual_update(y2, x2, x2), y2);
  EXPECT_THROW(dual_update(y, x2, z2), Error);
}

TEST(Coordinator, Resize) {
  CoordinatorState s;
  s.ids = {"a", "b", "c"};
  s.z = {1, 2, 3};
  s.y = {-1, -2, -3};
  s.last_w = {0.1, 0.2, 0.3};
  const std::vector<SliceId> none, gone{"b"};
  const auto shrunk = resize(s, none, gone);
  EXPECT_EQ(shrunk.ids, (std::vector<SliceId>{"a", "c"}));
  EXPECT_EQ(shrunk.z, (std::vector<double>{1, 3}));
  EXPECT_EQ(shrunk.y, (std::vector<double>{-1, -3}));
  const std::vector<SliceId> back{"b"};
  const auto grown = resize(shrunk, back, none);
  EXPECT_EQ(grown.ids.back(), "b");
  EXPECT_EQ(grown.z.back(), 1.0);
  EXPECT_EQ(grown.y.back(), -2.0);

  CoordinatorState empty;
  empty.dual_init = -5.0;
  const auto first = resize(empty, back, none);
  EXPECT_EQ(first.y.front(), -5.0);
}

TEST(Coordinator, EnforceCapacity) {
  std::vector<int> v{8, 8, 8};
  enforce_capacity(v, 12, 1);
  EXPECT_EQ(v, (std::vector<int>{4, 4, 4}));
  std::vector<int> w{2, 9, 2};
  enforce_capacity(w, 12, 1);
  EXPECT_EQ(w, (std::vector<int>{2, 8, 2}));
  std::vector<int> ok{1, 2, 3};
  enforce_capacity(ok, 12, 1);
  EXPECT_EQ(ok, (std::vector<int>{1, 2, 3}));
  std::vector<int> bad{5, 5, 5};
  EXPECT_THROW(enforce_capacity(bad, 2, 1), Error);
}

TEST(Coordinator, SingleSliceReachesConsensusInOneIteration) {
  std::map<SliceId, SliceAgent> agents;
  agents.emplace("a", SliceAgent("a", {}, FeatureSet::ActionAndContext, 1));
  const std::vector<SliceSpec> active{{"a"}};
  CoordinatorState state = resize(CoordinatorState{}, std::vector<SliceId>{"a"}, {});
  state.y = {0.0};
  OrchestrationParams params;
  params.grid = CandidateGrid::make(12, 1, 0.1);
  const Probe probe = [](const std::map<SliceId, Action>& acts) {
    std::map<SliceId, PerfVector> out;
    for (const auto& [id, a] : acts) out[id] = {3.5 * a.svrb, 30.0};
    return out;
  };
  const auto r = orchestrate_slot(agents, active, probe, state, params, 0);
  EXPECT_EQ(r.iterations, 1);
  EXPECT_EQ(r.primal_residual, 0.0);
  EXPECT_EQ(state.y[0], 0.0);
}

TEST(Coordinator, RejectsOutOfSyncState) {
  std::map<SliceId, SliceAgent> agents;
  agents.emplace("a", SliceAgent("a", {}, FeatureSet::ActionAndContext, 1));
  const std::vector<SliceSpec> active{{"a"}};
  CoordinatorState state;
  OrchestrationParams params;
  params.grid = CandidateGrid::make(12, 1, 0.1);
  const Probe probe = [](const std::map<SliceId, Action>&) { return std::map<SliceId, PerfVector>{}; };
  EXPECT_THROW(orchestrate_slot(agents, active, probe, state, params, 0), Error);
}
