#pragma once

// BER measurement: encapsulate -> schedule -> simulate -> decode, repeated
// over seeds, and parameter sweeps on top of it.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cloudsteg/bits.hpp"
#include "cloudsteg/channel_sim.hpp"
#include "cloudsteg/error.hpp"
#include "cloudsteg/format.hpp"
#include "cloudsteg/framing.hpp"
#include "cloudsteg/receiver.hpp"
#include "cloudsteg/sender.hpp"

namespace cloudsteg {

struct ChannelParams {
  std::int64_t bit_time_ms = 10000;
  std::int64_t pri_ms = 400;
  int n_accessors = 5;
  double threshold = 0.9;
  DiskModel disk = DiskModel::calibrated(NoisePreset::Moderate);
  InterfererProfile interferer;
  std::uint64_t base_seed = 1;
  // Negative: lead-in drawn per repetition from [B_T, 2 B_T).
  std::int64_t lead_in_ms = -1;
  // Idle bit times appended after the transmission.
  std::int64_t tail_bits = 2;

  SenderConfig sender() const { return {bit_time_ms, n_accessors, threshold}; }

  DecoderConfig decoder() const {
    DecoderConfig d;
    d.bit_time_ms = bit_time_ms;
    d.pri_ms = pri_ms;
    return d;
  }
};

struct PayloadSpec {
  std::optional<BitSequence> bits;
  std::size_t random_length = 96;
  std::uint64_t seed = 2014;

  BitSequence materialize() const { return bits ? *bits : BitSequence::random(random_length, seed); }
};

struct SweepAxis {
  std::string name;  // bt, pri, n, th, sigma
  std::vector<double> values;
};

struct ExperimentSpec {
  ChannelParams channel;
  PayloadSpec payload;
  int repetitions = 3;
  std::optional<SweepAxis> sweep_axis;
};

struct BerReport {
  std::vector<std::pair<std::string, std::string>> parameter_point;
  double ber = 0.0;
  int decode_failures = 0;
  std::vector<double> per_run_ber;
  std::vector<std::uint64_t> seeds;

  friend bool operator==(const BerReport&, const BerReport&) = default;
};

inline void validate(const ExperimentSpec& spec) {
  const auto& c = spec.channel;
  auto invalid = [](const std::string& param, const std::string& why) {
    throw Error(ErrorCode::InvalidSpec, param + ": " + why);
  };
  if (spec.repetitions < 1) invalid("repetitions", "must be >= 1");
  if (c.bit_time_ms < 1) invalid("bt", "must be >= 1");
  if (c.pri_ms < 1) invalid("pri", "must be >= 1");
  if (c.bit_time_ms % c.pri_ms != 0) {
    invalid("pri", std::to_string(c.pri_ms) + " ms does not divide bt " + std::to_string(c.bit_time_ms) + " ms");
  }
  if (c.n_accessors < 1) invalid("n", "must be >= 1");
  if (!(c.threshold > 0.0 && c.threshold <= 1.0)) invalid("th", "must lie in (0, 1]");
  if (c.tail_bits < 0) invalid("tail_bits", "must be >= 0");
  try {
    c.disk.validate();
    c.interferer.validate();
  } catch (const Error& e) {
    invalid("channel config", e.what());
  }
  if (c.pri_ms % c.disk.raw_sample_period_ms != 0) {
    invalid("pri", std::to_string(c.pri_ms) + " ms is not a multiple of raw_sample_period_ms " +
                       std::to_string(c.disk.raw_sample_period_ms));
  }
}

struct RunSetup {
  std::int64_t lead_in_ms = 0;
  std::int64_t run_duration_ms = 0;
};

inline RunSetup run_setup(const ChannelParams& c, const AccessSchedule& schedule, std::uint64_t seed) {
  RunSetup setup;
  setup.lead_in_ms = c.lead_in_ms >= 0
                         ? c.lead_in_ms
                         : c.bit_time_ms + static_cast<std::int64_t>(detail::splitmix64(seed ^ 0x5EEDull) %
                                                                     static_cast<std::uint64_t>(c.bit_time_ms));
  const std::int64_t needed = setup.lead_in_ms + schedule.total_duration_ms + c.tail_bits * c.bit_time_ms;
  setup.run_duration_ms = (needed + c.pri_ms - 1) / c.pri_ms * c.pri_ms;
  return setup;
}

// Fraction of payload bits lost in one run; a failed decode loses all.
inline double run_bit_error_rate(const BitSequence& sent, const std::optional<BitSequence>& received) {
  if (!received) return 1.0;
  if (sent.empty()) return received->empty() ? 0.0 : 1.0;
  const std::size_t errors = std::min(bit_errors(sent, *received), sent.size());
  return static_cast<double>(errors) / static_cast<double>(sent.size());
}

inline BerReport run_ber(const ExperimentSpec& spec) {
  validate(spec);
  const auto& c = spec.channel;
  const BitSequence payload = spec.payload.materialize();
  const AccessSchedule schedule = schedule_message(framing::encapsulate(payload), c.sender());
  const DecoderConfig decoder = c.decoder();

  BerReport report;
  std::size_t lost_bits = 0;
  for (int i = 0; i < spec.repetitions; ++i) {
    const std::uint64_t seed = c.base_seed + static_cast<std::uint64_t>(i);
    const RunSetup setup = run_setup(c, schedule, seed);
    const ContentionTrace trace =
        simulate(schedule, c.disk, c.interferer, c.pri_ms, setup.run_duration_ms, setup.lead_in_ms, seed);
    std::optional<BitSequence> received;
    try {
      received = decode_message(trace, decoder);
    } catch (const Error&) {
      ++report.decode_failures;
    }
    const double run_ber = run_bit_error_rate(payload, received);
    report.per_run_ber.push_back(run_ber);
    report.seeds.push_back(seed);
    if (!payload.empty()) {
      lost_bits += received ? std::min(bit_errors(payload, *received), payload.size()) : payload.size();
    }
  }
  if (payload.empty()) {
    double sum = 0.0;
    for (double b : report.per_run_ber) sum += b;
    report.ber = sum / static_cast<double>(spec.repetitions);
  } else {
    report.ber = static_cast<double>(lost_bits) /
                 (static_cast<double>(spec.repetitions) * static_cast<double>(payload.size()));
  }
  return report;
}

// One row of the bandwidth table: bit time with its probing interval,
// accessor count and threshold.
struct BandwidthRow {
  std::int64_t bit_time_ms;
  std::int64_t pri_ms;
  int n_accessors;
  double threshold;

  double bandwidth_bps() const { return 1000.0 / static_cast<double>(bit_time_ms); }
};

inline const std::vector<BandwidthRow>& bandwidth_rows() {
  static const std::vector<BandwidthRow> rows{
      {1000, 40, 2, 0.4},   {2000, 200, 5, 0.5},  {3000, 200, 5, 0.65}, {4000, 200, 5, 0.75},
      {5000, 200, 5, 0.8},  {8000, 400, 5, 0.85}, {10000, 400, 5, 0.9},
  };
  return rows;
}

inline ExperimentSpec with_row(ExperimentSpec spec, const BandwidthRow& row) {
  spec.channel.bit_time_ms = row.bit_time_ms;
  spec.channel.pri_ms = row.pri_ms;
  spec.channel.n_accessors = row.n_accessors;
  spec.channel.threshold = row.threshold;
  return spec;
}

// Returns a copy of `spec` with one parameter replaced. A bit time listed in
// the bandwidth table also takes that row's pri, n and th.
inline ExperimentSpec with_parameter(ExperimentSpec spec, const std::string& name, double value) {
  auto& c = spec.channel;
  if (name == "bt") {
    c.bit_time_ms = static_cast<std::int64_t>(value);
    for (const auto& row : bandwidth_rows()) {
      if (row.bit_time_ms == c.bit_time_ms) return with_row(std::move(spec), row);
    }
  } else if (name == "pri") {
    c.pri_ms = static_cast<std::int64_t>(value);
  } else if (name == "n") {
    c.n_accessors = static_cast<int>(value);
  } else if (name == "th") {
    c.threshold = value;
  } else if (name == "sigma") {
    c.disk.noise_stddev_ms = value;
  } else {
    throw Error(ErrorCode::InvalidSpec, "sweep axis: unknown parameter '" + name + "'");
  }
  return spec;
}

inline std::vector<BerReport> sweep(const ExperimentSpec& spec) {
  if (!spec.sweep_axis) throw Error(ErrorCode::InvalidSpec, "sweep axis: missing");
  const auto& axis = *spec.sweep_axis;
  std::vector<BerReport> reports;
  reports.reserve(axis.values.size());
  for (double value : axis.values) {
    ExperimentSpec point = with_parameter(spec, axis.name, value);
    point.sweep_axis.reset();
    BerReport r = run_ber(point);
    r.parameter_point = {{axis.name, format_number(value)}};
    reports.push_back(std::move(r));
  }
  return reports;
}

inline std::vector<BerReport> bandwidth_sweep(const ExperimentSpec& spec) {
  std::vector<BerReport> reports;
  for (const auto& row : bandwidth_rows()) {
    BerReport r = run_ber(with_row(spec, row));
    r.parameter_point = {{"bt", std::to_string(row.bit_time_ms)},
                         {"sb_bps", format_number(row.bandwidth_bps())},
                         {"pri", std::to_string(row.pri_ms)},
                         {"n", std::to_string(row.n_accessors)},
                         {"th", format_number(row.threshold)}};
    reports.push_back(std::move(r));
  }
  return reports;
}

// BER under no interferer, periodic benchmark bursts, and constant stress,
// all with the same seeds.
inline std::vector<BerReport> robustness_scenarios(const ExperimentSpec& base) {
  const std::pair<const char*, InterfererProfile> scenarios[] = {
      {"none", InterfererProfile::none()},
      {"benchmark", InterfererProfile::benchmark()},
      {"stress", InterfererProfile::stress()},
  };
  std::vector<BerReport> reports;
  for (const auto& [name, profile] : scenarios) {
    ExperimentSpec spec = base;
    spec.channel.interferer = profile;
    BerReport r = run_ber(spec);
    r.parameter_point = {{"interferer", name}};
    reports.push_back(std::move(r));
  }
  return reports;
}

}  // namespace cloudsteg
