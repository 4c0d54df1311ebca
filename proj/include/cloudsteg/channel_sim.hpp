#pragma once

// Virtual-time model of a shared disk.
//
// The receiver's probe reads complete every raw_sample_period_ms. A read
// spanning [t, t + period) observes
//
//   base_latency + slope * mean_served_load(t, t + period) + noise
//
// where served load is the number of concurrently active accessors (sender
// plus interferer). With saturation_accessors > 0 the disk serves at most
// that many accessors at once; excess demand queues as a fluid backlog that
// keeps the disk saturated until it drains. Noise is Gaussian with standard
// deviation noise_stddev_ms per raw read, optionally AR(1)-correlated with
// time constant noise_correlation_ms. Raw reads are averaged into windows of
// pri_ms.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>

#include "cloudsteg/error.hpp"
#include "cloudsteg/sender.hpp"

namespace cloudsteg {

enum class NoisePreset { Ideal, Moderate, Harsh };

inline double noise_stddev(NoisePreset preset) {
  switch (preset) {
    case NoisePreset::Ideal: return 0.0;
    case NoisePreset::Moderate: return 1.0;
    case NoisePreset::Harsh: return 4.0;
  }
  return 0.0;
}

struct DiskModel {
  double base_latency_ms = 10.0;
  double contention_slope_ms = 2.0;
  double noise_stddev_ms = 0.0;
  std::int64_t raw_sample_period_ms = 10;
  // 0 disables the overload term.
  int saturation_accessors = 0;
  // 0 gives independent noise per raw read.
  double noise_correlation_ms = 0.0;

  // Plain affine model: expected sample = base + slope * k for every k.
  static DiskModel affine(NoisePreset preset = NoisePreset::Ideal) {
    DiskModel m;
    m.noise_stddev_ms = noise_stddev(preset);
    return m;
  }

  // Affine model plus accessor overload above 12 concurrent accessors and
  // slowly varying background noise. Default for experiments.
  static DiskModel calibrated(NoisePreset preset = NoisePreset::Ideal) {
    DiskModel m = affine(preset);
    m.saturation_accessors = 12;
    m.noise_correlation_ms = 2000.0;
    return m;
  }

  void validate() const {
    if (!(base_latency_ms > 0.0)) throw Error(ErrorCode::InvalidConfig, "base_latency_ms must be > 0");
    if (!(contention_slope_ms > 0.0)) throw Error(ErrorCode::InvalidConfig, "contention_slope_ms must be > 0");
    if (!(noise_stddev_ms >= 0.0)) throw Error(ErrorCode::InvalidConfig, "noise_stddev_ms must be >= 0");
    if (raw_sample_period_ms < 1) throw Error(ErrorCode::InvalidConfig, "raw_sample_period_ms must be >= 1");
    if (saturation_accessors < 0) throw Error(ErrorCode::InvalidConfig, "saturation_accessors must be >= 0");
    if (!(noise_correlation_ms >= 0.0)) throw Error(ErrorCode::InvalidConfig, "noise_correlation_ms must be >= 0");
  }

  double expected_latency(double served_load) const {
    return base_latency_ms + contention_slope_ms * served_load;
  }
};

struct InterfererProfile {
  enum class Kind { None, Benchmark, Stress };

  Kind kind = Kind::None;
  int load = 0;
  std::int64_t period_ms = 10000;
  std::int64_t burst_ms = 2000;
  std::int64_t phase_ms = 0;

  static InterfererProfile none() { return {}; }

  // Periodic benchmark bursts: load 3 for 2 s every 10 s.
  static InterfererProfile benchmark() {
    InterfererProfile p;
    p.kind = Kind::Benchmark;
    p.load = 3;
    return p;
  }

  // Constant heavy load for the whole run.
  static InterfererProfile stress() {
    InterfererProfile p;
    p.kind = Kind::Stress;
    p.load = 10;
    return p;
  }

  void validate() const {
    if (load < 0) throw Error(ErrorCode::InvalidConfig, "interferer.load must be >= 0");
    if (kind == Kind::Benchmark) {
      if (period_ms < 1) throw Error(ErrorCode::InvalidConfig, "interferer.period_ms must be >= 1");
      if (burst_ms < 0 || burst_ms > period_ms) {
        throw Error(ErrorCode::InvalidConfig, "interferer.burst_ms must lie in [0, period_ms]");
      }
    }
  }

  int active_accessors(double t_ms) const {
    switch (kind) {
      case Kind::None: return 0;
      case Kind::Stress: return load;
      case Kind::Benchmark: {
        const double period = static_cast<double>(period_ms);
        double phase = std::fmod(t_ms - static_cast<double>(phase_ms), period);
        if (phase < 0) phase += period;
        return phase < static_cast<double>(burst_ms) ? load : 0;
      }
    }
    return 0;
  }
};

inline std::string to_string(InterfererProfile::Kind kind) {
  switch (kind) {
    case InterfererProfile::Kind::None: return "none";
    case InterfererProfile::Kind::Benchmark: return "benchmark";
    case InterfererProfile::Kind::Stress: return "stress";
  }
  return "none";
}

struct TraceSample {
  std::int64_t window_start_ms = 0;
  double avg_access_time_ms = 0.0;

  friend bool operator==(const TraceSample&, const TraceSample&) = default;
};

struct ContentionTrace {
  std::int64_t pri_ms = 0;
  std::vector<TraceSample> samples;
  // Set for control-probe (third party) observations.
  bool observer = false;

  std::vector<double> values() const {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.avg_access_time_ms);
    return out;
  }

  std::size_t size() const { return samples.size(); }
};

namespace detail {

// Piecewise-constant function on [0, end): value on [start, next.start).
struct Segment {
  double start;
  double value;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Total demand (sender accessors + interferer) as a step function.
inline std::vector<Segment> demand_profile(const AccessSchedule& schedule, const InterfererProfile& interferer,
                                           double lead_in, double end) {
  struct Event {
    double t;
    int delta;
  };
  std::vector<Event> events;
  for (const auto& accessor : schedule.intervals) {
    for (const auto& iv : accessor) {
      events.push_back({lead_in + iv.start_ms, +1});
      events.push_back({lead_in + iv.end_ms, -1});
    }
  }
  switch (interferer.kind) {
    case InterfererProfile::Kind::None: break;
    case InterfererProfile::Kind::Stress:
      events.push_back({0.0, interferer.load});
      break;
    case InterfererProfile::Kind::Benchmark: {
      const auto period = interferer.period_ms;
      std::int64_t phase = interferer.phase_ms % period;
      if (phase > 0) phase -= period;
      for (std::int64_t t = phase; static_cast<double>(t) < end; t += period) {
        const double b0 = std::max(0.0, static_cast<double>(t));
        const double b1 = static_cast<double>(t + interferer.burst_ms);
        if (b1 <= b0) continue;
        events.push_back({b0, interferer.load});
        events.push_back({b1, -interferer.load});
      }
      break;
    }
  }
  std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) { return a.t < b.t; });

  std::vector<Segment> out{{0.0, 0.0}};
  int level = 0;
  for (std::size_t i = 0; i < events.size();) {
    const double t = events[i].t;
    while (i < events.size() && events[i].t == t) level += events[i++].delta;
    if (t >= end) break;
    if (out.back().start == t) {
      out.back().value = level;
    } else if (out.back().value != level) {
      out.push_back({t, static_cast<double>(level)});
    }
  }
  return out;
}

// Load actually seen by the probe when the disk serves at most `capacity`
// accessors; queued demand keeps it saturated until drained.
inline std::vector<Segment> served_profile(const std::vector<Segment>& demand, int capacity, double end) {
  if (capacity <= 0) return demand;
  const double cap = capacity;
  std::vector<Segment> out;
  auto emit = [&out](double t, double v) {
    if (!out.empty() && out.back().start == t) {
      out.back().value = v;
    } else if (out.empty() || out.back().value != v) {
      out.push_back({t, v});
    }
  };
  double backlog = 0.0;
  for (std::size_t i = 0; i < demand.size(); ++i) {
    const double a = demand[i].start;
    const double b = (i + 1 < demand.size()) ? demand[i + 1].start : end;
    const double k = demand[i].value;
    if (k > cap) {
      emit(a, cap);
      backlog += (k - cap) * (b - a);
    } else if (backlog > 0.0) {
      emit(a, cap);
      if (k < cap) {
        const double drain_end = a + backlog / (cap - k);
        if (drain_end < b) {
          emit(drain_end, k);
          backlog = 0.0;
        } else {
          backlog -= (cap - k) * (b - a);
        }
      }
    } else {
      emit(a, k);
    }
  }
  return out;
}

}  // namespace detail

// Noise-free probe load as a step function of virtual time; exposed for
// analytic checks.
inline std::vector<detail::Segment> served_load_profile(const AccessSchedule& schedule, const DiskModel& disk,
                                                        const InterfererProfile& interferer,
                                                        std::int64_t run_duration_ms, std::int64_t lead_in_ms) {
  const double end = static_cast<double>(run_duration_ms);
  return detail::served_profile(
      detail::demand_profile(schedule, interferer, static_cast<double>(lead_in_ms), end),
      disk.saturation_accessors, end);
}

inline ContentionTrace simulate(const AccessSchedule& schedule, const DiskModel& disk,
                                const InterfererProfile& interferer, std::int64_t pri_ms,
                                std::int64_t run_duration_ms, std::int64_t lead_in_ms, std::uint64_t seed) {
  disk.validate();
  interferer.validate();
  if (pri_ms < 1) throw Error(ErrorCode::InvalidSpec, "pri_ms must be >= 1");
  if (run_duration_ms < 1) throw Error(ErrorCode::InvalidSpec, "run_duration_ms must be >= 1");
  if (lead_in_ms < 0) throw Error(ErrorCode::InvalidSpec, "lead_in_ms must be >= 0");
  if (run_duration_ms < lead_in_ms + schedule.total_duration_ms) {
    throw Error(ErrorCode::InvalidSpec, "run_duration_ms shorter than lead-in plus transmission");
  }
  if (run_duration_ms % pri_ms != 0) {
    throw Error(ErrorCode::WindowMismatch,
                "pri " + std::to_string(pri_ms) + " ms does not divide run duration " + std::to_string(run_duration_ms));
  }
  if (pri_ms % disk.raw_sample_period_ms != 0) {
    throw Error(ErrorCode::WindowMismatch, "pri " + std::to_string(pri_ms) +
                                               " ms is not a multiple of the raw sample period " +
                                               std::to_string(disk.raw_sample_period_ms));
  }

  const auto load = served_load_profile(schedule, disk, interferer, run_duration_ms, lead_in_ms);

  boost::random::mt19937_64 rng{detail::splitmix64(seed)};
  boost::random::normal_distribution<double> gauss(0.0, 1.0);
  const double raw = static_cast<double>(disk.raw_sample_period_ms);
  const bool noisy = disk.noise_stddev_ms > 0.0;
  const double rho = disk.noise_correlation_ms > 0.0 ? std::exp(-raw / disk.noise_correlation_ms) : 0.0;
  const double innovation = std::sqrt(1.0 - rho * rho);
  const double floor = 0.1 * disk.base_latency_ms;
  double state = 0.0;
  bool first = true;

  const std::int64_t raw_per_window = pri_ms / disk.raw_sample_period_ms;
  const std::int64_t windows = run_duration_ms / pri_ms;

  ContentionTrace trace;
  trace.pri_ms = pri_ms;
  trace.samples.reserve(static_cast<std::size_t>(windows));

  std::size_t seg = 0;
  for (std::int64_t w = 0; w < windows; ++w) {
    double window_sum = 0.0;
    for (std::int64_t r = 0; r < raw_per_window; ++r) {
      const double t0 = static_cast<double>(w * pri_ms) + static_cast<double>(r) * raw;
      const double t1 = t0 + raw;
      // Time-weighted mean load over the read.
      while (seg + 1 < load.size() && load[seg + 1].start <= t0) ++seg;
      double integral = 0.0;
      for (std::size_t s = seg; s < load.size() && load[s].start < t1; ++s) {
        const double a = std::max(t0, load[s].start);
        const double b = (s + 1 < load.size()) ? std::min(t1, load[s + 1].start) : t1;
        if (b > a) integral += load[s].value * (b - a);
      }
      double value = disk.expected_latency(integral / raw);
      if (noisy) {
        const double z = gauss(rng);
        state = first ? z : rho * state + innovation * z;
        first = false;
        value += disk.noise_stddev_ms * state;
      }
      window_sum += std::max(value, floor);
    }
    trace.samples.push_back({w * pri_ms, window_sum / static_cast<double>(raw_per_window)});
  }
  return trace;
}

// Passive third-party observer of the same disk; no interferer.
inline ContentionTrace control_probe_trace(const AccessSchedule& schedule, const DiskModel& disk, std::int64_t pri_ms,
                                           std::int64_t run_duration_ms, std::int64_t lead_in_ms,
                                           std::uint64_t seed) {
  ContentionTrace trace =
      simulate(schedule, disk, InterfererProfile::none(), pri_ms, run_duration_ms, lead_in_ms, seed);
  trace.observer = true;
  return trace;
}

}  // namespace cloudsteg
