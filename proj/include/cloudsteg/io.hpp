#pragma once

// Text formats: contention-trace CSV, access-schedule lines, key-value
// channel config, BER report CSV, and decoder diagnostics.

#include <charconv>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cloudsteg/channel_sim.hpp"
#include "cloudsteg/error.hpp"
#include "cloudsteg/experiment.hpp"
#include "cloudsteg/format.hpp"
#include "cloudsteg/receiver.hpp"
#include "cloudsteg/sender.hpp"

namespace cloudsteg::io {

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = s.find(sep, pos);
    out.push_back(trim(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view text, std::string_view what) {
  text = trim(text);
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::ParseError, std::string(what) + ": cannot parse '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace detail

inline constexpr std::string_view kTraceHeader = "window_start_ms,avg_access_time_ms";

inline void write_trace_csv(std::ostream& out, const ContentionTrace& trace) {
  out << kTraceHeader << '\n';
  for (const auto& s : trace.samples) out << s.window_start_ms << ',' << format_number(s.avg_access_time_ms) << '\n';
}

inline std::string trace_to_csv(const ContentionTrace& trace) {
  std::ostringstream out;
  write_trace_csv(out, trace);
  return out.str();
}

// pri is inferred from the spacing of window starts.
inline ContentionTrace read_trace_csv(std::istream& in) {
  ContentionTrace trace;
  std::string line;
  bool header_seen = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = detail::trim(line);
    if (text.empty() || text.front() == '#') continue;
    if (!header_seen) {
      if (text != kTraceHeader) {
        throw Error(ErrorCode::ParseError, "trace CSV header must be '" + std::string(kTraceHeader) + "'");
      }
      header_seen = true;
      continue;
    }
    const auto fields = detail::split(text, ',');
    if (fields.size() != 2) {
      throw Error(ErrorCode::ParseError, "trace CSV line " + std::to_string(line_no) + ": expected 2 fields");
    }
    trace.samples.push_back({detail::parse_number<std::int64_t>(fields[0], "window_start_ms"),
                             detail::parse_number<double>(fields[1], "avg_access_time_ms")});
  }
  if (!header_seen) throw Error(ErrorCode::ParseError, "trace CSV is empty");
  if (trace.samples.size() >= 2) {
    trace.pri_ms = trace.samples[1].window_start_ms - trace.samples[0].window_start_ms;
    for (std::size_t i = 1; i < trace.samples.size(); ++i) {
      if (trace.samples[i].window_start_ms - trace.samples[i - 1].window_start_ms != trace.pri_ms) {
        throw Error(ErrorCode::ParseError, "trace windows are not contiguous at row " + std::to_string(i));
      }
    }
  }
  return trace;
}

// "# total_duration_ms <T>" followed by "accessor_id start_ms end_ms" lines.
inline void write_schedule(std::ostream& out, const AccessSchedule& schedule) {
  out << "# total_duration_ms " << schedule.total_duration_ms << '\n';
  out << "# accessors " << schedule.accessor_count() << '\n';
  for (std::size_t a = 0; a < schedule.intervals.size(); ++a) {
    for (const auto& iv : schedule.intervals[a]) {
      out << a << ' ' << format_number(iv.start_ms) << ' ' << format_number(iv.end_ms) << '\n';
    }
  }
}

inline AccessSchedule read_schedule(std::istream& in) {
  AccessSchedule schedule;
  std::string line;
  while (std::getline(in, line)) {
    const auto text = detail::trim(line);
    if (text.empty()) continue;
    std::istringstream fields{std::string(text)};
    if (text.front() == '#') {
      std::string hash, key, value;
      fields >> hash >> key >> value;
      if (key == "total_duration_ms") {
        schedule.total_duration_ms = detail::parse_number<std::int64_t>(value, key);
      } else if (key == "accessors") {
        const auto n = detail::parse_number<std::size_t>(value, key);
        if (schedule.intervals.size() < n) schedule.intervals.resize(n);
      }
      continue;
    }
    std::string id, start, end, extra;
    fields >> id >> start >> end;
    if (end.empty() || (fields >> extra)) {
      throw Error(ErrorCode::ParseError, "schedule line must be 'accessor_id start_ms end_ms': " + std::string(text));
    }
    const auto a = detail::parse_number<std::size_t>(id, "accessor_id");
    const Interval iv{detail::parse_number<double>(start, "start_ms"), detail::parse_number<double>(end, "end_ms")};
    if (!(iv.end_ms > iv.start_ms) || iv.start_ms < 0) {
      throw Error(ErrorCode::ParseError, "schedule interval must satisfy 0 <= start < end: " + std::string(text));
    }
    if (schedule.intervals.size() <= a) schedule.intervals.resize(a + 1);
    auto& list = schedule.intervals[a];
    if (!list.empty() && list.back().end_ms > iv.start_ms) {
      throw Error(ErrorCode::ParseError, "schedule intervals must be sorted and disjoint per accessor");
    }
    list.push_back(iv);
    if (iv.end_ms > static_cast<double>(schedule.total_duration_ms)) {
      schedule.total_duration_ms = static_cast<std::int64_t>(iv.end_ms + 0.999999);
    }
  }
  return schedule;
}

struct ChannelConfig {
  DiskModel disk = DiskModel::calibrated();
  InterfererProfile interferer;
};

// Keys: base_latency_ms, contention_slope_ms, noise_stddev_ms,
// raw_sample_period_ms, saturation_accessors, noise_correlation_ms,
// interferer.kind (none|benchmark|stress), interferer.load,
// interferer.period_ms, interferer.burst_ms, interferer.phase_ms.
// Lines are "key = value"; '#' starts a comment. A kind line resets the
// interferer to that kind's preset before later keys refine it.
inline ChannelConfig read_channel_config(std::istream& in, ChannelConfig config = {}) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view text = line;
    if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
    text = detail::trim(text);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::InvalidConfig, "config line " + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = detail::trim(text.substr(0, eq));
    const auto value = detail::trim(text.substr(eq + 1));
    const std::string k(key);
    auto& d = config.disk;
    auto& f = config.interferer;
    if (k == "base_latency_ms") {
      d.base_latency_ms = detail::parse_number<double>(value, k);
    } else if (k == "contention_slope_ms") {
      d.contention_slope_ms = detail::parse_number<double>(value, k);
    } else if (k == "noise_stddev_ms") {
      d.noise_stddev_ms = detail::parse_number<double>(value, k);
    } else if (k == "raw_sample_period_ms") {
      d.raw_sample_period_ms = detail::parse_number<std::int64_t>(value, k);
    } else if (k == "saturation_accessors") {
      d.saturation_accessors = detail::parse_number<int>(value, k);
    } else if (k == "noise_correlation_ms") {
      d.noise_correlation_ms = detail::parse_number<double>(value, k);
    } else if (k == "interferer.kind") {
      if (value == "none") {
        f = InterfererProfile::none();
      } else if (value == "benchmark") {
        f = InterfererProfile::benchmark();
      } else if (value == "stress") {
        f = InterfererProfile::stress();
      } else {
        throw Error(ErrorCode::InvalidConfig, "interferer.kind must be none, benchmark or stress");
      }
    } else if (k == "interferer.load") {
      f.load = detail::parse_number<int>(value, k);
    } else if (k == "interferer.period_ms") {
      f.period_ms = detail::parse_number<std::int64_t>(value, k);
    } else if (k == "interferer.burst_ms") {
      f.burst_ms = detail::parse_number<std::int64_t>(value, k);
    } else if (k == "interferer.phase_ms") {
      f.phase_ms = detail::parse_number<std::int64_t>(value, k);
    } else {
      throw Error(ErrorCode::InvalidConfig, "unknown config key '" + k + "'");
    }
  }
  config.disk.validate();
  config.interferer.validate();
  return config;
}

// One row per parameter point: parameter columns, ber, decode_failures,
// seeds (';'-separated).
inline void write_report_csv(std::ostream& out, const std::vector<BerReport>& reports) {
  if (reports.empty()) {
    out << "ber,decode_failures,seeds\n";
    return;
  }
  for (const auto& [name, value] : reports.front().parameter_point) out << name << ',';
  out << "ber,decode_failures,seeds\n";
  for (const auto& r : reports) {
    for (const auto& [name, value] : r.parameter_point) out << value << ',';
    out << format_number(r.ber) << ',' << r.decode_failures << ',';
    for (std::size_t i = 0; i < r.seeds.size(); ++i) out << (i ? ";" : "") << r.seeds[i];
    out << '\n';
  }
}

// Fixed-width table, one line per report.
inline void write_summary_table(std::ostream& out, const std::vector<BerReport>& reports) {
  if (reports.empty()) return;
  auto pad = [](std::string s, std::size_t w) {
    if (s.size() < w) s.append(w - s.size(), ' ');
    return s;
  };
  for (const auto& [name, value] : reports.front().parameter_point) out << pad(name, 12);
  out << pad("BER [%]", 12) << "failures\n";
  for (const auto& r : reports) {
    for (const auto& [name, value] : r.parameter_point) out << pad(value, 12);
    std::ostringstream ber;
    ber.precision(2);
    ber << std::fixed << 100.0 * r.ber;
    out << pad(ber.str(), 12) << r.decode_failures << '/' << r.seeds.size() << '\n';
  }
}

// Rows of kind,index,value: trim_start, offset, gab (trajectory),
// bit_avg, bit, sync_end, payload_begin, payload_end, error.
inline void write_diagnostics_csv(std::ostream& out, const DecodeDiagnostics& diag) {
  out << "kind,index,value\n";
  out << "trim_start,0," << diag.trim_start << '\n';
  if (diag.offset_samples) out << "offset,0," << *diag.offset_samples << '\n';
  if (diag.estimates) {
    const auto& e = *diag.estimates;
    for (std::size_t i = 0; i < e.gab_trajectory.size(); ++i) {
      out << "gab," << i << ',' << format_number(e.gab_trajectory[i]) << '\n';
    }
    for (std::size_t i = 0; i < e.per_bit_avg.size(); ++i) {
      out << "bit_avg," << i << ',' << format_number(e.per_bit_avg[i]) << '\n';
    }
    for (std::size_t i = 0; i < e.decoded.size(); ++i) out << "bit," << i << ',' << int(e.decoded[i]) << '\n';
  }
  if (diag.sync_end) out << "sync_end,0," << *diag.sync_end << '\n';
  if (diag.payload_span) {
    out << "payload_begin,0," << diag.payload_span->first << '\n';
    out << "payload_end,0," << diag.payload_span->second << '\n';
  }
  if (diag.error) out << "error,0," << to_string(diag.error->code()) << ' ' << to_string(diag.error->phase()) << '\n';
}

}  // namespace cloudsteg::io
