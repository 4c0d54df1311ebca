#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "cloudsteg/framing.hpp"
#include "cloudsteg/sender.hpp"
#include "oracles.hpp"

using namespace cloudsteg;

TEST(Tcv, Examples) {
  EXPECT_EQ(encode_tcv(BitSequence{1, 0, 1, 0}, 5000).durations_ms, (std::vector<std::int64_t>{5000, 5000, 5000, 5000}));
  EXPECT_EQ(encode_tcv(BitSequence{1, 0, 1, 1, 1, 0, 0, 0, 0}, 3000).durations_ms,
            (std::vector<std::int64_t>{3000, 3000, 9000, 12000}));
  EXPECT_EQ(encode_tcv(BitSequence{1}, 10).durations_ms, (std::vector<std::int64_t>{10}));
}

TEST(Tcv, Errors) {
  try {
    encode_tcv(BitSequence{0, 1}, 1000);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LeadingZero);
  }
  EXPECT_THROW(encode_tcv(BitSequence{}, 1000), Error);
  EXPECT_THROW(encode_tcv(BitSequence{1}, 0), Error);
}

TEST(Schedule, ThresholdAppliesOncePerRun) {
  const auto s = build_access_schedule(encode_tcv(BitSequence{1, 1, 1, 1}, 300), SenderConfig{300, 5, 0.9});
  ASSERT_EQ(s.accessor_count(), 5u);
  for (const auto& list : s.intervals) {
    ASSERT_EQ(list.size(), 1u);
    EXPECT_EQ(list[0].start_ms, 0.0);
    EXPECT_EQ(list[0].end_ms, 1170.0);
  }
  EXPECT_EQ(s.access_time_ms(), 1170.0);
}

TEST(Schedule, SmallExamples) {
  const auto full = build_access_schedule(encode_tcv(BitSequence{1}, 1000), SenderConfig{1000, 1, 1.0});
  EXPECT_EQ(full.intervals[0][0].end_ms, 1000.0);

  const auto s = build_access_schedule(encode_tcv(BitSequence{1, 0, 1}, 1000), SenderConfig{1000, 2, 0.9});
  for (const auto& list : s.intervals) {
    ASSERT_EQ(list.size(), 2u);
    EXPECT_EQ(list[0].start_ms, 0.0);
    EXPECT_EQ(list[0].end_ms, 900.0);
    EXPECT_EQ(list[1].start_ms, 2000.0);
    EXPECT_EQ(list[1].end_ms, 2900.0);
  }
  EXPECT_EQ(s.total_duration_ms, 3000);
}

TEST(Schedule, InvalidConfig) {
  const auto tcv = encode_tcv(BitSequence{1}, 1000);
  EXPECT_THROW(build_access_schedule(tcv, SenderConfig{1000, 0, 0.9}), Error);
  EXPECT_THROW(build_access_schedule(tcv, SenderConfig{1000, 1, 0.0}), Error);
  EXPECT_THROW(build_access_schedule(tcv, SenderConfig{1000, 1, 1.5}), Error);
  EXPECT_THROW(build_access_schedule(tcv, SenderConfig{500, 1, 0.9}), Error);
}

TEST(Schedule, MatchesBruteForceOnRandomMessages) {
  std::mt19937_64 rng(5);
  const double ths[] = {0.4, 0.5, 0.65, 0.9, 1.0};
  for (int trial = 0; trial < 500; ++trial) {
    BitSequence msg{1};
    msg.append(BitSequence::random(rng() % 60, rng()));
    const std::int64_t bt = 100 * static_cast<std::int64_t>(1 + rng() % 100);
    const double th = ths[rng() % 5];
    const int n = 1 + static_cast<int>(rng() % 8);
    const auto tcv = encode_tcv(msg, bt);
    EXPECT_EQ(std::accumulate(tcv.durations_ms.begin(), tcv.durations_ms.end(), std::int64_t{0}),
              static_cast<std::int64_t>(msg.size()) * bt);

    const auto s = build_access_schedule(tcv, SenderConfig{bt, n, th});
    const auto expected = oracle::schedule(msg.to_string(), static_cast<double>(bt), th);
    ASSERT_EQ(s.accessor_count(), static_cast<std::size_t>(n));
    for (const auto& list : s.intervals) {
      ASSERT_EQ(list.size(), expected.size());
      for (std::size_t i = 0; i < list.size(); ++i) {
        EXPECT_DOUBLE_EQ(list[i].start_ms, expected[i].first);
        EXPECT_DOUBLE_EQ(list[i].end_ms, expected[i].second);
      }
    }

    double run_total = 0.0;
    for (std::size_t i = 0; i < tcv.durations_ms.size(); i += 2) run_total += static_cast<double>(tcv.durations_ms[i]);
    const double runs = static_cast<double>(expected.size());
    EXPECT_NEAR(s.access_time_ms(), run_total - runs * (1.0 - th) * static_cast<double>(bt), 1e-6);

    for (std::size_t i = 0; i < msg.size(); ++i) {
      const double a = static_cast<double>(i) * static_cast<double>(bt);
      const double b = a + th * static_cast<double>(bt);
      bool any = false;
      for (const auto& iv : s.intervals[0]) any = any || (iv.start_ms < b && iv.end_ms > a);
      ASSERT_EQ(any ? 1 : 0, msg[i]) << "bit " << i;
    }
  }
}

TEST(Schedule, EncapsulatedMessagesAlwaysSchedule) {
  const auto s = schedule_message(framing::encapsulate(BitSequence::random(96, 1)), SenderConfig{});
  EXPECT_GT(s.total_duration_ms, 0);
  EXPECT_EQ(s.accessor_count(), 5u);
}
