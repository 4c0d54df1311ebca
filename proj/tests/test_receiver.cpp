#include <gtest/gtest.h>

#include <functional>
#include <numeric>
#include <random>

#include "cloudsteg/channel_sim.hpp"
#include "cloudsteg/experiment.hpp"
#include "cloudsteg/framing.hpp"
#include "cloudsteg/receiver.hpp"
#include "oracles.hpp"

using namespace cloudsteg;

namespace {

DecoderConfig decoder(std::int64_t bt, std::int64_t pri) {
  DecoderConfig d;
  d.bit_time_ms = bt;
  d.pri_ms = pri;
  return d;
}

ContentionTrace noiseless_trace(const BitSequence& payload, std::int64_t bt, std::int64_t pri, int n, double th,
                                std::int64_t lead) {
  const auto s = schedule_message(framing::encapsulate(payload), SenderConfig{bt, n, th});
  std::int64_t run = lead + s.total_duration_ms + 2 * bt;
  run = (run + pri - 1) / pri * pri;
  return simulate(s, DiskModel::affine(), InterfererProfile::none(), pri, run, lead, 1);
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::ParseError;
}

}  // namespace

TEST(DecoderConfig, Validation) {
  EXPECT_NO_THROW(decoder(10000, 400).validate());
  EXPECT_NO_THROW(decoder(10000, 10000).validate());
  EXPECT_EQ(decoder(10000, 10000).samples_per_bit(), 1u);
  EXPECT_EQ(code_of([] { decoder(10000, 300).validate(); }), ErrorCode::InvalidSpec);
  EXPECT_EQ(code_of([] { decoder(1000, 2000).validate(); }), ErrorCode::InvalidSpec);
}

TEST(WindowVariance, MatchesDirectComputation) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(50.0, 7.0);
  std::vector<double> x(300);
  for (auto& v : x) v = g(rng);
  for (std::size_t w : {2u, 5u, 25u}) {
    detail::WindowVariance var(x, w);
    for (std::size_t s = 0; s + w <= x.size(); ++s) {
      ASSERT_NEAR(var.at(s), oracle::population_variance(x, s, w), 1e-9);
    }
  }
}

TEST(Gab, SkewedExample) {
  const std::vector<double> avg{10, 10, 10, 2};
  const auto est = decode_with_gab(avg, DecoderConfig{});
  EXPECT_EQ(est.decoded.to_string(), "1110");
  EXPECT_DOUBLE_EQ(est.gab_final, 6.0);
  ASSERT_GE(est.gab_trajectory.size(), 2u);
  EXPECT_DOUBLE_EQ(est.gab_trajectory[0], 8.0);
  // Magnitude of the first correction: 0.5 |N1 - N0| (V1 - V0) / (N1 + N0).
  EXPECT_DOUBLE_EQ(est.gab_trajectory[0] - est.gab_trajectory[1], 0.5 * 2 * 8 / 4);
}

TEST(Gab, BalancedStopsAfterOneZeroCorrection) {
  const std::vector<double> avg{12, 3, 12, 3, 3, 12};
  const auto est = decode_with_gab(avg, DecoderConfig{});
  ASSERT_EQ(est.gab_trajectory.size(), 2u);
  EXPECT_DOUBLE_EQ(est.gab_trajectory[0], est.gab_trajectory[1]);
  EXPECT_EQ(est.decoded.to_string(), "101001");
}

TEST(Gab, ConvergesToMidpointOnTwoLevelFamily) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> level(1.0, 100.0);
  for (int trial = 0; trial < 500; ++trial) {
    const double v0 = level(rng);
    const double v1 = v0 + 0.01 + level(rng);
    const std::size_t ones = 1 + rng() % 40;
    const std::size_t zeros = 1 + rng() % 40;
    std::vector<double> avg;
    std::string truth;
    for (std::size_t i = 0; i < ones + zeros; ++i) {
      const bool one = (rng() % (ones + zeros)) < ones;
      avg.push_back(one ? v1 : v0);
      truth.push_back(one ? '1' : '0');
    }
    if (truth.find('1') == std::string::npos || truth.find('0') == std::string::npos) continue;
    const auto est = decode_with_gab(avg, DecoderConfig{});
    ASSERT_EQ(est.decoded.to_string(), truth);
    ASSERT_NEAR(est.gab_final, 0.5 * (v0 + v1), 1e-9 * v1);
    ASSERT_LE(est.gab_trajectory.size(), 33u);
  }
}

TEST(Gab, CorrectsWhereGlobalMeanMisclassifies) {
  for (std::size_t ones = 4; ones < 30; ++ones) {
    std::vector<double> avg(ones, 10.0);
    avg.push_back(7.9);
    avg.push_back(2.0);
    const double global = std::accumulate(avg.begin(), avg.end(), 0.0) / static_cast<double>(avg.size());
    ASSERT_GT(global, 7.9);
    const auto est = decode_with_gab(avg, DecoderConfig{});
    EXPECT_EQ(est.decoded.to_string(), std::string(ones + 1, '1') + "0") << ones;
  }
}

TEST(Gab, Errors) {
  EXPECT_EQ(code_of([] { decode_with_gab(std::vector<double>{5, 5, 5}, DecoderConfig{}); }),
            ErrorCode::ConstantSignal);
  EXPECT_EQ(code_of([] { decode_with_gab(std::vector<double>{5}, DecoderConfig{}); }), ErrorCode::ConstantSignal);
}

TEST(SymbolSync, Examples) {
  EXPECT_EQ(symbol_sync(BitSequence::from_string("001010101010101010111100001101")), 18u);
  EXPECT_EQ(symbol_sync(framing::encapsulate(BitSequence{})), 16u);
  EXPECT_EQ(symbol_sync(BitSequence::from_string("1010101011110000")), 8u);
  EXPECT_EQ(code_of([] { symbol_sync(BitSequence::from_string("1010101")); }), ErrorCode::SyncNotFound);
  EXPECT_EQ(code_of([] { symbol_sync(BitSequence::from_string("110011001100")); }), ErrorCode::SyncNotFound);
  // A run flush against the end leaves no room for the marker.
  EXPECT_EQ(code_of([] { symbol_sync(BitSequence::from_string("0001010101010")); }), ErrorCode::SyncNotFound);
}

TEST(SymbolSync, PrefersRunFollowedByStartMarker) {
  const auto bits = BitSequence::from_string("1010101010001110101010101111000010100001111");
  const std::size_t end = symbol_sync(bits);
  EXPECT_TRUE(bits.matches_at(end, framing::start_marker()));
}

TEST(FrameSync, SpanAndErrors) {
  const auto frame = framing::encapsulate(BitSequence::from_string("10111"));
  const auto [b, e] = frame_sync(frame, 16);
  EXPECT_EQ(b, 24u);
  EXPECT_EQ(framing::destuff_bits(frame.slice(b, e)).to_string(), "10111");
  EXPECT_EQ(code_of([&] { frame_sync(frame, 15); }), ErrorCode::NoStartMarker);
  EXPECT_EQ(code_of([&] { frame_sync(frame.slice(0, frame.size() - 2), 16); }), ErrorCode::NoEndMarker);
}

TEST(BitStart, AgreesWithBruteForceOracleForEveryPhase) {
  const std::int64_t bt = 2000;
  const std::int64_t pri = 200;
  const std::size_t spb = 10;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto payload = BitSequence::random(24, seed);
    for (std::int64_t lead = 0; lead < 3 * bt; lead += pri) {
      const auto t = noiseless_trace(payload, bt, pri, 5, 1.0, lead);
      const auto values = t.values();
      const std::size_t truth = static_cast<std::size_t>(lead / pri) % spb;
      ASSERT_EQ(oracle::best_offset(values, spb), truth);
      ASSERT_EQ(detect_bit_start(t, decoder(bt, pri)), truth) << "lead " << lead;
    }
  }
}

TEST(BitStart, Errors) {
  const std::vector<double> flat(100, 10.0);
  EXPECT_EQ(code_of([&] { detect_bit_start(flat, decoder(1000, 100)); }), ErrorCode::AmbiguousPhase);
  const std::vector<double> tiny(20, 10.0);
  EXPECT_EQ(code_of([&] { detect_bit_start(tiny, decoder(1000, 100)); }), ErrorCode::AmbiguousPhase);
}

TEST(Decode, RoundTripsEveryTableRowNoiseless) {
  std::mt19937_64 rng(21);
  for (const auto& row : bandwidth_rows()) {
    for (int trial = 0; trial < 6; ++trial) {
      const auto payload = BitSequence::random(rng() % 97, rng());
      const std::int64_t lead = static_cast<std::int64_t>(rng() % 3) * row.bit_time_ms +
                                static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(row.bit_time_ms / row.pri_ms)) * row.pri_ms;
      const auto t = noiseless_trace(payload, row.bit_time_ms, row.pri_ms, row.n_accessors, row.threshold, lead);
      ASSERT_EQ(decode_message(t, decoder(row.bit_time_ms, row.pri_ms)), payload)
          << "bt " << row.bit_time_ms << " lead " << lead << " payload " << payload.to_string();
    }
  }
}

TEST(Decode, FlatTraceFails) {
  ContentionTrace t;
  t.pri_ms = 400;
  for (std::int64_t i = 0; i < 200; ++i) t.samples.push_back({i * 400, 10.0});
  const auto diag = decode_with_diagnostics(t, decoder(10000, 400));
  ASSERT_TRUE(diag.error.has_value());
  EXPECT_TRUE(diag.error->phase() == Phase::BitStart || diag.error->phase() == Phase::SymbolSync ||
              diag.error->phase() == Phase::BitDecision);
  EXPECT_THROW(decode_message(t, decoder(10000, 400)), Error);
}

TEST(Decode, PriMismatchRejected) {
  const auto t = noiseless_trace(BitSequence{1, 0}, 10000, 400, 5, 0.9, 0);
  EXPECT_EQ(code_of([&] { decode_message(t, decoder(10000, 200)); }), ErrorCode::InvalidSpec);
}

TEST(Decode, DiagnosticsFilledOnSuccess) {
  const auto payload = BitSequence::from_string("1100101");
  const auto t = noiseless_trace(payload, 2000, 200, 5, 0.5, 3400);
  const auto diag = decode_with_diagnostics(t, decoder(2000, 200));
  ASSERT_FALSE(diag.error.has_value()) << diag.error->what();
  EXPECT_EQ(*diag.payload, payload);
  ASSERT_TRUE(diag.offset_samples.has_value());
  // Pulses last half a bit from phase 7, so any window start in [2, 7]
  // holds each pulse whole.
  const std::size_t phase = (diag.trim_start + *diag.offset_samples) % 10;
  EXPECT_GE(phase, 2u);
  EXPECT_LE(phase, 7u);
  EXPECT_TRUE(diag.estimates.has_value());
  EXPECT_TRUE(diag.sync_end.has_value());
}

TEST(Decode, TransmissionStartFindsFirstRise) {
  std::vector<double> x(100, 10.0);
  for (std::size_t i = 60; i < 70; ++i) x[i] = 20.0;
  EXPECT_EQ(find_transmission_start(x, 5), 50u);
  EXPECT_EQ(find_transmission_start(std::vector<double>(100, 10.0), 5), 0u);
}
