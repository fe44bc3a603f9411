#include <gtest/gtest.h>

#include <cmath>

#include "slicewb/replay_buffer.hpp"

using namespace slicewb;

TEST(ReplayBuffer, PushIntoEmpty) {
  ReplayBuffer<int> b(3, 0.9, 2.0);
  b.push(7);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(b.entries().front().priority, 2.0);
}

TEST(ReplayBuffer, EvictsOldestWhenFull) {
  ReplayBuffer<int> b(3);
  for (int v : {1, 2, 3, 4}) b.push(v);
  ASSERT_EQ(b.size(), 3u);
  EXPECT_EQ(b.entries()[0].value, 2);
  EXPECT_EQ(b.entries()[2].value, 4);
}

TEST(ReplayBuffer, PrioritiesDecayGeometrically) {
  const double gamma = 0.8;
  ReplayBuffer<int> b(10, gamma);
  for (int k = 1; k <= 6; ++k) {
    b.push(k);
    EXPECT_NEAR(b.entries().front().priority, std::pow(gamma, k - 1), 1e-15);
  }
}

TEST(ReplayBuffer, SampleReturnsAllWhenAskingForMore) {
  ReplayBuffer<int> b(5);
  for (int v : {1, 2, 3}) b.push(v);
  Rng rng(1);
  EXPECT_EQ(b.sample(3, rng).size(), 3u);
  EXPECT_EQ(b.sample(10, rng).size(), 3u);
}

TEST(ReplayBuffer, PrioritizedFrequency) {
  // With decay 1/3 the older entry carries priority 1/3 against 1, so the
  // newer one should come first with probability 0.75.
  ReplayBuffer<int> b(2, 1.0 / 3.0);
  b.push(0);
  b.push(1);
  Rng rng(123);
  int hits = 0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) hits += b.sample(1, rng).front()->value == 1;
  EXPECT_NEAR(static_cast<double>(hits) / draws, 0.75, 0.02);
}

TEST(ReplayBuffer, UniformPrioritiesSampleUniformly) {
  ReplayBuffer<int> b(4, 1.0);
  for (int v = 0; v < 4; ++v) b.push(v);
  Rng rng(9);
  int counts[4] = {};
  const int draws = 40000;
  for (int i = 0; i < draws; ++i) ++counts[b.sample(1, rng).front()->value];
  const double sd = std::sqrt(draws * 0.25 * 0.75);
  for (int c : counts) EXPECT_NEAR(c, draws / 4.0, 3.0 * sd);
}

TEST(ReplayBuffer, SampleWithoutReplacementInBufferOrder) {
  ReplayBuffer<int> b(6, 0.7);
  for (int v = 0; v < 6; ++v) b.push(v);
  Rng rng(2);
  for (int i = 0; i < 200; ++i) {
    const auto s = b.sample(4, rng);
    ASSERT_EQ(s.size(), 4u);
    for (std::size_t k = 1; k < s.size(); ++k) EXPECT_LT(s[k - 1]->stamp, s[k]->stamp);
  }
}

TEST(ReplayBuffer, EraseIf) {
  ReplayBuffer<int> b(5);
  for (int v : {1, 2, 3, 4}) b.push(v);
  EXPECT_EQ(b.erase_if([](int v) { return v % 2 == 0; }), 2u);
  ASSERT_EQ(b.size(), 2u);
  EXPECT_EQ(b.entries()[0].value, 1);
  EXPECT_EQ(b.entries()[1].value, 3);
}

TEST(ReplayBufferProperty, InvariantsUnderPushes) {
  ReplayBuffer<int> b(7, 0.95);
  long last_stamp = -1;
  for (int v = 0; v < 100; ++v) {
    b.push(v);
    ASSERT_LE(b.size(), 7u);
    EXPECT_EQ(b.entries().front().value, std::max(0, v - 6));
    for (const auto& e : b.entries()) EXPECT_GT(e.priority, 0.0);
    EXPECT_GT(b.entries().back().stamp, last_stamp);
    last_stamp = b.entries().back().stamp;
  }
}

TEST(ReplayBuffer, RejectsBadConfig) {
  EXPECT_THROW(ReplayBuffer<int>(0), std::invalid_argument);
  EXPECT_THROW(ReplayBuffer<int>(3, 0.0), std::invalid_argument);
  EXPECT_THROW(ReplayBuffer<int>(3, 1.5), std::invalid_argument);
}
