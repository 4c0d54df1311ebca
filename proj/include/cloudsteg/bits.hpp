#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include "cloudsteg/error.hpp"

namespace cloudsteg {

using Bit = std::uint8_t;

// Ordered sequence of binary symbols. Every element is exactly 0 or 1.
class BitSequence {
 public:
  BitSequence() = default;

  BitSequence(std::initializer_list<int> bits) {
    bits_.reserve(bits.size());
    for (int b : bits) push_back(b);
  }

  explicit BitSequence(std::vector<Bit> bits) : bits_(std::move(bits)) {
    for (Bit b : bits_) {
      if (b > 1) throw Error(ErrorCode::ParseError, "bit value must be 0 or 1");
    }
  }

  // Parses a string of '0'/'1' characters. Whitespace is ignored.
  static BitSequence from_string(std::string_view text) {
    BitSequence out;
    out.bits_.reserve(text.size());
    for (char c : text) {
      if (c == '0' || c == '1') {
        out.bits_.push_back(static_cast<Bit>(c - '0'));
      } else if (c != ' ' && c != '\t' && c != '\n' && c != '\r') {
        throw Error(ErrorCode::ParseError, std::string("invalid bit character '") + c + "'");
      }
    }
    return out;
  }

  // UTF-8 bytes of the text, most significant bit first.
  static BitSequence from_text(std::string_view text) {
    BitSequence out;
    out.bits_.reserve(text.size() * 8);
    for (unsigned char byte : text) {
      for (int i = 7; i >= 0; --i) out.bits_.push_back(static_cast<Bit>((byte >> i) & 1u));
    }
    return out;
  }

  static BitSequence random(std::size_t length, std::uint64_t seed) {
    boost::random::mt19937_64 rng{seed};
    boost::random::uniform_int_distribution<int> coin(0, 1);
    BitSequence out;
    out.bits_.reserve(length);
    for (std::size_t i = 0; i < length; ++i) out.bits_.push_back(static_cast<Bit>(coin(rng)));
    return out;
  }

  std::string to_string() const {
    std::string out;
    out.reserve(bits_.size());
    for (Bit b : bits_) out.push_back(static_cast<char>('0' + b));
    return out;
  }

  // Inverse of from_text; trailing bits that do not fill a byte are dropped.
  std::string to_text() const {
    std::string out;
    for (std::size_t i = 0; i + 8 <= bits_.size(); i += 8) {
      unsigned byte = 0;
      for (std::size_t j = 0; j < 8; ++j) byte = (byte << 1) | bits_[i + j];
      out.push_back(static_cast<char>(byte));
    }
    return out;
  }

  void push_back(int bit) {
    if (bit != 0 && bit != 1) throw Error(ErrorCode::ParseError, "bit value must be 0 or 1");
    bits_.push_back(static_cast<Bit>(bit));
  }

  void append(const BitSequence& other) {
    bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end());
  }

  BitSequence slice(std::size_t begin, std::size_t end) const {
    BitSequence out;
    out.bits_.assign(bits_.begin() + static_cast<std::ptrdiff_t>(begin),
                     bits_.begin() + static_cast<std::ptrdiff_t>(end));
    return out;
  }

  // True when `pattern` occurs at position `pos`.
  bool matches_at(std::size_t pos, const BitSequence& pattern) const {
    if (pos + pattern.size() > bits_.size()) return false;
    for (std::size_t i = 0; i < pattern.size(); ++i) {
      if (bits_[pos + i] != pattern[i]) return false;
    }
    return true;
  }

  // First occurrence of `pattern` at or after `from`, or npos.
  std::size_t find(const BitSequence& pattern, std::size_t from = 0) const {
    if (pattern.size() > bits_.size()) return npos;
    for (std::size_t pos = from; pos + pattern.size() <= bits_.size(); ++pos) {
      if (matches_at(pos, pattern)) return pos;
    }
    return npos;
  }

  std::size_t longest_run() const {
    std::size_t best = 0;
    std::size_t run = 0;
    for (std::size_t i = 0; i < bits_.size(); ++i) {
      run = (i > 0 && bits_[i] == bits_[i - 1]) ? run + 1 : 1;
      if (run > best) best = run;
    }
    return best;
  }

  std::size_t size() const noexcept { return bits_.size(); }
  bool empty() const noexcept { return bits_.empty(); }
  Bit operator[](std::size_t i) const { return bits_[i]; }
  std::span<const Bit> view() const noexcept { return bits_; }
  auto begin() const noexcept { return bits_.begin(); }
  auto end() const noexcept { return bits_.end(); }

  friend bool operator==(const BitSequence&, const BitSequence&) = default;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::vector<Bit> bits_;
};

// Number of positions where the two sequences differ; positions beyond the
// shorter sequence count as errors.
inline std::size_t bit_errors(const BitSequence& expected, const BitSequence& actual) {
  std::size_t errors = 0;
  const std::size_t common = std::min(expected.size(), actual.size());
  for (std::size_t i = 0; i < common; ++i) errors += expected[i] != actual[i];
  errors += std::max(expected.size(), actual.size()) - common;
  return errors;
}

}  // namespace cloudsteg
