#pragma once

// Sender side: run-length timing vector and per-accessor access schedule.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cloudsteg/bits.hpp"
#include "cloudsteg/error.hpp"

namespace cloudsteg {

// Alternating access/idle run durations in ms, starting with access.
struct TimeChangeVector {
  std::vector<std::int64_t> durations_ms;
  std::int64_t bit_time_ms = 0;

  std::int64_t total_ms() const {
    std::int64_t sum = 0;
    for (auto d : durations_ms) sum += d;
    return sum;
  }

  friend bool operator==(const TimeChangeVector&, const TimeChangeVector&) = default;
};

struct SenderConfig {
  std::int64_t bit_time_ms = 10000;
  int n_accessors = 5;
  double threshold = 0.9;

  void validate() const {
    if (bit_time_ms < 1) throw Error(ErrorCode::InvalidSpec, "bit_time_ms must be >= 1");
    if (n_accessors < 1) throw Error(ErrorCode::InvalidSpec, "n_accessors must be >= 1");
    if (!(threshold > 0.0 && threshold <= 1.0)) {
      throw Error(ErrorCode::InvalidSpec, "threshold must lie in (0, 1]");
    }
  }
};

// Half-open [start_ms, end_ms) on the virtual timeline.
struct Interval {
  double start_ms = 0.0;
  double end_ms = 0.0;

  double length() const { return end_ms - start_ms; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct AccessSchedule {
  // One interval list per accessor task.
  std::vector<std::vector<Interval>> intervals;
  std::int64_t total_duration_ms = 0;

  std::size_t accessor_count() const { return intervals.size(); }

  // Access time of a single accessor.
  double access_time_ms(std::size_t accessor = 0) const {
    double sum = 0.0;
    if (accessor < intervals.size()) {
      for (const auto& iv : intervals[accessor]) sum += iv.length();
    }
    return sum;
  }
};

inline TimeChangeVector encode_tcv(const BitSequence& message, std::int64_t bit_time_ms) {
  if (bit_time_ms < 1) throw Error(ErrorCode::InvalidSpec, "bit_time_ms must be >= 1");
  if (message.empty()) throw Error(ErrorCode::InvalidSpec, "message must not be empty");
  if (message[0] != 1) throw Error(ErrorCode::LeadingZero, "message must start with binary 1");

  TimeChangeVector tcv;
  tcv.bit_time_ms = bit_time_ms;
  std::int64_t run = 1;
  for (std::size_t i = 1; i < message.size(); ++i) {
    if (message[i] == message[i - 1]) {
      ++run;
    } else {
      tcv.durations_ms.push_back(run * bit_time_ms);
      run = 1;
    }
  }
  tcv.durations_ms.push_back(run * bit_time_ms);
  return tcv;
}

// Each access run is cut short by (1 - th) * B_T at its final bit; idle runs
// are exact. All accessors share one interval list.
inline AccessSchedule build_access_schedule(const TimeChangeVector& tcv, const SenderConfig& config) {
  config.validate();
  if (tcv.bit_time_ms != config.bit_time_ms) {
    throw Error(ErrorCode::InvalidSpec, "TCV bit time does not match sender bit time");
  }
  const double bit = static_cast<double>(config.bit_time_ms);
  const double kept_last_bit = config.threshold * bit;

  std::vector<Interval> runs;
  std::int64_t t = 0;
  for (std::size_t i = 0; i < tcv.durations_ms.size(); ++i) {
    const std::int64_t d = tcv.durations_ms[i];
    if (d <= 0 || d % config.bit_time_ms != 0) {
      throw Error(ErrorCode::InvalidSpec, "TCV duration must be a positive multiple of the bit time");
    }
    if (i % 2 == 0) {
      const double start = static_cast<double>(t);
      const double end = start + (static_cast<double>(d) - bit) + kept_last_bit;
      if (!(end > start)) {
        throw Error(ErrorCode::DegenerateInterval, "access run of " + std::to_string(d) + " ms trimmed to nothing");
      }
      runs.push_back({start, end});
    }
    t += d;
  }

  AccessSchedule schedule;
  schedule.total_duration_ms = t;
  schedule.intervals.assign(static_cast<std::size_t>(config.n_accessors), runs);
  return schedule;
}

inline AccessSchedule schedule_message(const BitSequence& message, const SenderConfig& config) {
  return build_access_schedule(encode_tcv(message, config.bit_time_ms), config);
}

}  // namespace cloudsteg
