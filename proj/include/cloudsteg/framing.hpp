#pragma once

// Bit stuffing and message encapsulation.
//
// Wire layout of an encapsulated message:
//
//   1010101010101010 | 11110000 | stuffed user data | 00001111
//   symbol sync        start      (no run >= 4)       end
//
// Stuffing inserts the complement after every run of three identical bits
// in the emitted stream, so neither marker (both contain a run of four) can
// appear inside the payload region.

#include <cstddef>

#include "cloudsteg/bits.hpp"
#include "cloudsteg/error.hpp"

namespace cloudsteg::framing {

inline constexpr std::size_t kStuffRun = 3;
inline constexpr std::size_t kSyncBits = 16;
inline constexpr std::size_t kMarkerBits = 8;
// Minimum number of trailing symbol-sync bits that must be intact.
inline constexpr std::size_t kMinSyncBits = 8;
inline constexpr std::size_t kOverheadBits = kSyncBits + 2 * kMarkerBits;

inline const BitSequence& symbol_sync() {
  static const BitSequence seq{1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0};
  return seq;
}

inline const BitSequence& start_marker() {
  static const BitSequence seq{1, 1, 1, 1, 0, 0, 0, 0};
  return seq;
}

inline const BitSequence& end_marker() {
  static const BitSequence seq{0, 0, 0, 0, 1, 1, 1, 1};
  return seq;
}

inline BitSequence stuff_bits(const BitSequence& payload) {
  BitSequence out;
  std::size_t run = 0;
  int last = -1;
  auto emit = [&](int bit) {
    run = (bit == last) ? run + 1 : 1;
    last = bit;
    out.push_back(bit);
  };
  for (Bit b : payload) {
    emit(b);
    if (run == kStuffRun) emit(1 - b);
  }
  return out;
}

inline BitSequence destuff_bits(const BitSequence& stuffed) {
  BitSequence out;
  std::size_t run = 0;
  int last = -1;
  bool skip_next = false;
  for (std::size_t i = 0; i < stuffed.size(); ++i) {
    const int bit = stuffed[i];
    run = (bit == last) ? run + 1 : 1;
    last = bit;
    if (run > kStuffRun) {
      throw Error(ErrorCode::MalformedStuffing,
                  "run of " + std::to_string(run) + " identical bits at index " + std::to_string(i));
    }
    if (skip_next) {
      skip_next = false;
    } else {
      out.push_back(bit);
    }
    if (run == kStuffRun) skip_next = true;
  }
  return out;
}

inline BitSequence encapsulate(const BitSequence& user_data) {
  BitSequence out = symbol_sync();
  out.append(start_marker());
  out.append(stuff_bits(user_data));
  out.append(end_marker());
  return out;
}

// Index of the first start marker that is immediately preceded by at least
// kMinSyncBits of the symbol-sync pattern, or npos.
inline std::size_t find_framed_start(const BitSequence& message) {
  const BitSequence tail = symbol_sync().slice(kSyncBits - kMinSyncBits, kSyncBits);
  for (std::size_t pos = kMinSyncBits; pos + kMarkerBits <= message.size(); ++pos) {
    if (message.matches_at(pos, start_marker()) && message.matches_at(pos - kMinSyncBits, tail)) {
      return pos;
    }
  }
  return BitSequence::npos;
}

// Leading noise before the symbol-sync region is tolerated.
inline BitSequence decapsulate(const BitSequence& message) {
  const std::size_t start = find_framed_start(message);
  if (start == BitSequence::npos) {
    throw Error(ErrorCode::NoStartMarker, "no start marker after a symbol-sync region");
  }
  const std::size_t payload_begin = start + kMarkerBits;
  const std::size_t end = message.find(end_marker(), payload_begin);
  if (end == BitSequence::npos) {
    throw Error(ErrorCode::NoEndMarker, "no end marker after position " + std::to_string(payload_begin));
  }
  return destuff_bits(message.slice(payload_begin, end));
}

}  // namespace cloudsteg::framing
