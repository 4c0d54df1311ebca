#pragma once

// Receiver pipeline: transmission-start search, bit-start detection by
// minimum subsequence variance, per-bit averaging with an iteratively
// corrected decision level, symbol sync on the alternating preamble, and
// frame sync on the start/end markers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cloudsteg/bits.hpp"
#include "cloudsteg/channel_sim.hpp"
#include "cloudsteg/error.hpp"
#include "cloudsteg/framing.hpp"

namespace cloudsteg {

struct DecoderConfig {
  std::int64_t bit_time_ms = 10000;
  std::int64_t pri_ms = 400;
  double variance_epsilon = 1e-9;
  int max_gab_iterations = 32;
  // Drop leading idle windows before bit-start detection.
  bool trim_leading_idle = true;

  std::size_t samples_per_bit() const { return static_cast<std::size_t>(bit_time_ms / pri_ms); }

  // A single sample per bit is accepted: there is exactly one phase and
  // bit-start detection is trivial.
  void validate() const {
    if (pri_ms < 1) throw Error(ErrorCode::InvalidSpec, "pri_ms must be >= 1");
    if (bit_time_ms < pri_ms || bit_time_ms % pri_ms != 0) {
      throw Error(ErrorCode::InvalidSpec, "pri " + std::to_string(pri_ms) + " ms does not divide bit time " +
                                              std::to_string(bit_time_ms) + " ms");
    }
    if (!(variance_epsilon >= 0.0)) throw Error(ErrorCode::InvalidSpec, "variance_epsilon must be >= 0");
    if (max_gab_iterations < 1) throw Error(ErrorCode::InvalidSpec, "max_gab_iterations must be >= 1");
  }
};

struct BitEstimates {
  std::size_t offset_samples = 0;
  std::vector<double> per_bit_avg;
  BitSequence decoded;
  double gab_final = 0.0;
  // Initial level followed by each corrected level.
  std::vector<double> gab_trajectory;
};

namespace detail {

// Population variance of equal-length windows via centred prefix sums.
class WindowVariance {
 public:
  WindowVariance(std::span<const double> x, std::size_t width) : width_(width) {
    long double mean = 0.0L;
    for (double v : x) mean += v;
    if (!x.empty()) mean /= static_cast<long double>(x.size());
    sum_.assign(x.size() + 1, 0.0L);
    sq_.assign(x.size() + 1, 0.0L);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const long double c = static_cast<long double>(x[i]) - mean;
      sum_[i + 1] = sum_[i] + c;
      sq_[i + 1] = sq_[i] + c * c;
    }
  }

  double at(std::size_t start) const {
    const long double n = static_cast<long double>(width_);
    const long double s = sum_[start + width_] - sum_[start];
    const long double q = sq_[start + width_] - sq_[start];
    const long double var = q / n - (s / n) * (s / n);
    return var > 0.0L ? static_cast<double>(var) : 0.0;
  }

 private:
  std::size_t width_;
  std::vector<long double> sum_;
  std::vector<long double> sq_;
};

inline double mean_of(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

}  // namespace detail

// Index into `samples` from which decoding should start: a couple of bit
// times before the first window exceeding the trailing mean by three
// trailing standard deviations. Zero when no such window exists.
inline std::size_t find_transmission_start(std::span<const double> samples, std::size_t samples_per_bit) {
  const std::size_t w = samples_per_bit;
  if (w < 2 || samples.size() <= w) return 0;
  double sum = 0.0;
  double sq = 0.0;
  for (std::size_t i = 0; i < w; ++i) {
    sum += samples[i];
    sq += samples[i] * samples[i];
  }
  for (std::size_t i = w; i < samples.size(); ++i) {
    const double m = sum / static_cast<double>(w);
    const double var = std::max(0.0, sq / static_cast<double>(w) - m * m);
    const double tol = 1e-9 * std::abs(m);
    if (samples[i] > m + 3.0 * std::sqrt(var) + tol) return i >= 2 * w ? i - 2 * w : 0;
    sum += samples[i] - samples[i - w];
    sq += samples[i] * samples[i] - samples[i - w] * samples[i - w];
  }
  return 0;
}

// Votes per candidate offset (mod samples_per_bit). Each disjoint
// bit-length window evaluates every same-length window starting inside it
// and votes for the start of minimum variance. When several starts tie,
// only the ends of the tied run vote: a bit boundary always sits at one
// end. Ends created by the upper window's own edges (the run continues
// outside it) do not vote. Windows whose variance spread is within
// variance_epsilon abstain.
inline std::vector<std::size_t> phase_votes(std::span<const double> samples, const DecoderConfig& config) {
  config.validate();
  const std::size_t spb = config.samples_per_bit();
  std::vector<std::size_t> votes(spb, 0);
  if (spb == 1 || samples.size() < spb) return votes;

  const detail::WindowVariance variance(samples, spb);
  const std::size_t last_start = samples.size() - spb;
  std::vector<double> window(spb);
  std::vector<char> tied(spb);
  const std::size_t upper_count = samples.size() / spb;
  for (std::size_t u = 0; u < upper_count; ++u) {
    const std::size_t base = u * spb;
    std::size_t count = 0;
    for (std::size_t j = 0; j < spb && base + j <= last_start; ++j) window[count++] = variance.at(base + j);
    if (count == 0) continue;
    const auto [lo, hi] = std::minmax_element(window.begin(), window.begin() + count);
    if (*hi - *lo <= config.variance_epsilon) continue;
    const double tie = *lo + 1e-12 * (1.0 + *lo);
    for (std::size_t j = 0; j < count; ++j) tied[j] = window[j] <= tie;

    const bool continues_left = base > 0 && variance.at(base - 1) <= tie;
    const bool continues_right = base + count <= last_start && variance.at(base + count) <= tie;
    for (std::size_t j = 0; j < count; ++j) {
      if (!tied[j]) continue;
      const bool left_end = j == 0 ? !continues_left : !tied[j - 1];
      const bool right_end = j + 1 == count ? !continues_right : !tied[j + 1];
      if (left_end || right_end) ++votes[j];
    }
  }
  return votes;
}

// Offsets ordered by vote count (descending, ties toward the smaller
// offset), keeping those with at least half of the top count.
inline std::vector<std::size_t> phase_candidates(std::span<const double> samples, const DecoderConfig& config) {
  const auto votes = phase_votes(samples, config);
  std::vector<std::size_t> order;
  if (config.samples_per_bit() == 1) return {0};
  const std::size_t top = *std::max_element(votes.begin(), votes.end());
  if (top == 0) return order;
  for (std::size_t j = 0; j < votes.size(); ++j) {
    if (2 * votes[j] >= top) order.push_back(j);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return votes[a] > votes[b]; });
  return order;
}

// Modal bit-start offset in samples; a single sample per bit has only one
// phase.
inline std::size_t detect_bit_start(std::span<const double> samples, const DecoderConfig& config) {
  config.validate();
  const std::size_t spb = config.samples_per_bit();
  if (samples.size() < 3 * spb) {
    throw Error(ErrorCode::AmbiguousPhase, "trace holds fewer than three bit times", Phase::BitStart);
  }
  const auto candidates = phase_candidates(samples, config);
  if (candidates.empty()) {
    throw Error(ErrorCode::AmbiguousPhase, "no upper-level window shows a variance contrast", Phase::BitStart);
  }
  return candidates.front();
}

inline std::size_t detect_bit_start(const ContentionTrace& trace, const DecoderConfig& config) {
  const auto values = trace.values();
  return detect_bit_start(std::span<const double>(values), config);
}

inline std::vector<double> per_bit_averages(std::span<const double> samples, std::size_t offset_samples,
                                            const DecoderConfig& config) {
  config.validate();
  const std::size_t spb = config.samples_per_bit();
  if (offset_samples + spb > samples.size()) {
    throw Error(ErrorCode::InvalidSpec, "no full bit period after the offset", Phase::BitDecision);
  }
  std::vector<double> out;
  for (std::size_t i = offset_samples; i + spb <= samples.size(); i += spb) {
    out.push_back(detail::mean_of(samples.subspan(i, spb)));
  }
  return out;
}

inline std::vector<double> per_bit_averages(const ContentionTrace& trace, std::size_t offset_samples,
                                            const DecoderConfig& config) {
  const auto values = trace.values();
  return per_bit_averages(std::span<const double>(values), offset_samples, config);
}

// Decision level starts at the global mean G and is corrected to
//   G - (N1 - N0)(V1 - V0) / (2 (N1 + N0)),
// i.e. the midpoint of the two class means, until the classification is
// stable, the classes are balanced, or the iteration budget runs out.
inline BitEstimates decode_with_gab(std::span<const double> per_bit_avg, const DecoderConfig& config) {
  if (config.max_gab_iterations < 1) throw Error(ErrorCode::InvalidSpec, "max_gab_iterations must be >= 1");
  if (per_bit_avg.size() < 2) {
    throw Error(ErrorCode::ConstantSignal, "need at least two bit averages", Phase::BitDecision);
  }
  const auto [lo, hi] = std::minmax_element(per_bit_avg.begin(), per_bit_avg.end());
  if (*lo == *hi) throw Error(ErrorCode::ConstantSignal, "all bit averages are equal", Phase::BitDecision);

  const double global = detail::mean_of(per_bit_avg);
  auto classify = [&](double level) {
    std::vector<Bit> bits;
    bits.reserve(per_bit_avg.size());
    for (double v : per_bit_avg) bits.push_back(v > level ? 1 : 0);
    return bits;
  };

  BitEstimates est;
  est.per_bit_avg.assign(per_bit_avg.begin(), per_bit_avg.end());
  double level = global;
  est.gab_trajectory.push_back(level);
  std::vector<Bit> bits = classify(level);

  for (int iter = 0; iter < config.max_gab_iterations; ++iter) {
    std::size_t n1 = 0;
    double s1 = 0.0;
    double s0 = 0.0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
      if (bits[i]) {
        ++n1;
        s1 += per_bit_avg[i];
      } else {
        s0 += per_bit_avg[i];
      }
    }
    const std::size_t n0 = bits.size() - n1;
    if (n1 == 0 || n0 == 0) {
      throw Error(ErrorCode::AllOneClass,
                  "iteration " + std::to_string(iter) + " put every bit in class " + (n1 ? "1" : "0") +
                      " at level " + std::to_string(level),
                  Phase::BitDecision);
    }
    const double v1 = s1 / static_cast<double>(n1);
    const double v0 = s0 / static_cast<double>(n0);
    const double imbalance = static_cast<double>(n1) - static_cast<double>(n0);
    const double corrected = global - imbalance * (v1 - v0) / (2.0 * static_cast<double>(n1 + n0));
    est.gab_trajectory.push_back(corrected);
    level = corrected;
    if (n1 == n0) break;
    auto next = classify(level);
    const bool stable = next == bits;
    bits = std::move(next);
    if (stable) break;
  }

  est.gab_final = level;
  est.decoded = BitSequence(std::move(bits));
  return est;
}

inline std::size_t symbol_sync(const BitSequence& decoded) {
  if (decoded.empty()) throw Error(ErrorCode::SyncNotFound, "empty bit stream", Phase::SymbolSync);
  const std::size_t n = decoded.size();
  std::optional<std::size_t> fallback;
  std::size_t s = 0;
  while (s < n) {
    std::size_t e = s + 1;
    while (e < n && decoded[e] != decoded[e - 1]) ++e;
    // The preamble ends in 0; a trailing 1 of the run belongs to the start
    // marker that broke the alternation.
    const std::size_t sync_end = decoded[e - 1] == 1 ? e - 1 : e;
    const bool room_for_marker = sync_end + framing::kMarkerBits <= n;
    if (sync_end > s && sync_end - s >= framing::kMinSyncBits && room_for_marker) {
      if (decoded.matches_at(sync_end, framing::start_marker())) return sync_end;
      if (!fallback) fallback = sync_end;
    }
    s = e;
  }
  if (fallback) return *fallback;
  throw Error(ErrorCode::SyncNotFound, "no alternating run of at least 8 bits", Phase::SymbolSync);
}

inline std::pair<std::size_t, std::size_t> frame_sync(const BitSequence& decoded, std::size_t sync_end_index) {
  if (!decoded.matches_at(sync_end_index, framing::start_marker())) {
    throw Error(ErrorCode::NoStartMarker, "start marker missing at index " + std::to_string(sync_end_index),
                Phase::FrameSync);
  }
  const std::size_t begin = sync_end_index + framing::kMarkerBits;
  const std::size_t end = decoded.find(framing::end_marker(), begin);
  if (end == BitSequence::npos) {
    throw Error(ErrorCode::NoEndMarker, "end marker missing after index " + std::to_string(begin),
                Phase::FrameSync);
  }
  return {begin, end};
}

// Per-stage artifacts of one decode; filled as far as the pipeline got.
struct DecodeDiagnostics {
  std::size_t trim_start = 0;
  std::optional<std::size_t> offset_samples;
  std::optional<BitEstimates> estimates;
  std::optional<std::size_t> sync_end;
  std::optional<std::pair<std::size_t, std::size_t>> payload_span;
  std::optional<BitSequence> payload;
  std::optional<Error> error;
};

namespace detail {

inline BitSequence decode_at_offset(std::span<const double> body, std::size_t offset, const DecoderConfig& config,
                                    DecodeDiagnostics& diag) {
  auto tagged = [](const Error& e, Phase phase) { return e.phase() == Phase::None ? e.with_phase(phase) : e; };
  diag.offset_samples = offset;
  diag.estimates.reset();
  diag.sync_end.reset();
  diag.payload_span.reset();
  diag.payload.reset();
  try {
    const auto averages = per_bit_averages(body, offset, config);
    diag.estimates = decode_with_gab(averages, config);
  } catch (const Error& e) {
    throw tagged(e, Phase::BitDecision);
  }
  const BitSequence& bits = diag.estimates->decoded;
  diag.sync_end = symbol_sync(bits);
  diag.payload_span = frame_sync(bits, *diag.sync_end);
  try {
    diag.payload = framing::destuff_bits(bits.slice(diag.payload_span->first, diag.payload_span->second));
  } catch (const Error& e) {
    throw tagged(e, Phase::Destuffing);
  }
  return *diag.payload;
}

// Tries the bit-start candidates in rank order and keeps the first one
// that yields a complete frame; reports the top candidate's error if none
// does.
inline BitSequence run_decoder(std::span<const double> samples, const DecoderConfig& config,
                               DecodeDiagnostics& diag) {
  config.validate();
  const std::size_t spb = config.samples_per_bit();
  std::size_t trim = config.trim_leading_idle ? find_transmission_start(samples, spb) : 0;
  if (samples.size() - trim < 3 * spb) trim = 0;
  diag.trim_start = trim;
  const auto body = samples.subspan(trim);

  if (body.size() < 3 * spb) {
    throw Error(ErrorCode::AmbiguousPhase, "trace holds fewer than three bit times", Phase::BitStart);
  }
  const auto candidates = phase_candidates(body, config);
  if (candidates.empty()) {
    throw Error(ErrorCode::AmbiguousPhase, "no upper-level window shows a variance contrast", Phase::BitStart);
  }

  std::optional<Error> first_error;
  DecodeDiagnostics first_diag = diag;
  for (std::size_t offset : candidates) {
    DecodeDiagnostics attempt = diag;
    try {
      BitSequence payload = decode_at_offset(body, offset, config, attempt);
      diag = std::move(attempt);
      return payload;
    } catch (const Error& e) {
      if (!first_error) {
        first_error = e;
        first_diag = std::move(attempt);
      }
    }
  }
  diag = std::move(first_diag);
  throw *first_error;
}

}  // namespace detail

inline BitSequence decode_message(const ContentionTrace& trace, const DecoderConfig& config) {
  if (trace.pri_ms != 0 && trace.pri_ms != config.pri_ms) {
    throw Error(ErrorCode::InvalidSpec, "trace pri differs from decoder pri");
  }
  DecodeDiagnostics diag;
  const auto values = trace.values();
  return detail::run_decoder(values, config, diag);
}

// Same pipeline as decode_message; errors are captured instead of thrown.
inline DecodeDiagnostics decode_with_diagnostics(const ContentionTrace& trace, const DecoderConfig& config) {
  DecodeDiagnostics diag;
  const auto values = trace.values();
  try {
    if (trace.pri_ms != 0 && trace.pri_ms != config.pri_ms) {
      throw Error(ErrorCode::InvalidSpec, "trace pri differs from decoder pri");
    }
    detail::run_decoder(values, config, diag);
  } catch (const Error& e) {
    diag.error = e;
  }
  return diag;
}

}  // namespace cloudsteg
