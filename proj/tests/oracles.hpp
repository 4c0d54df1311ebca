// Independent reference implementations used as test oracles. They are
// written directly from the definitions and share no code with the library.
#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

// Complement inserted after every third equal bit of the emitted stream,
// stuffed bits included. Works on '0'/'1' strings.
inline std::string stuff(const std::string& p) {
  std::string out;
  for (char c : p) {
    out.push_back(c);
    const std::size_t n = out.size();
    if (n >= 3 && out[n - 1] == out[n - 2] && out[n - 2] == out[n - 3] &&
        (n == 3 || out[n - 4] != out[n - 1])) {
      out.push_back(c == '1' ? '0' : '1');
    }
  }
  return out;
}

inline std::size_t longest_run(const std::string& s) {
  std::size_t best = 0;
  std::size_t cur = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    cur = (i > 0 && s[i] == s[i - 1]) ? cur + 1 : 1;
    if (cur > best) best = cur;
  }
  return best;
}

inline std::string bits_of(std::uint64_t value, std::size_t len) {
  std::string s(len, '0');
  for (std::size_t i = 0; i < len; ++i) {
    if ((value >> (len - 1 - i)) & 1u) s[i] = '1';
  }
  return s;
}

// Walks the message bit by bit; every maximal run of 1s becomes one access
// interval whose final bit time is cut to th of its length.
inline std::vector<std::pair<double, double>> schedule(const std::string& message, double bit_time, double th) {
  std::vector<std::pair<double, double>> intervals;
  bool in_run = false;
  double run_start = 0.0;
  for (std::size_t i = 0; i <= message.size(); ++i) {
    const bool one = i < message.size() && message[i] == '1';
    const double t = static_cast<double>(i) * bit_time;
    if (one && !in_run) {
      in_run = true;
      run_start = t;
    } else if (!one && in_run) {
      in_run = false;
      intervals.emplace_back(run_start, t - bit_time + th * bit_time);
    }
  }
  return intervals;
}

// Piecewise-constant accessor count as (time, count) breakpoints.
struct LoadStep {
  double t;
  int count;
};

// Exact window average of base + slope * k(t) over [a, b).
inline double window_mean(const std::vector<std::pair<double, double>>& intervals, int accessors, double a, double b,
                          double base, double slope) {
  double covered = 0.0;
  for (const auto& [s, e] : intervals) {
    const double lo = s > a ? s : a;
    const double hi = e < b ? e : b;
    if (hi > lo) covered += hi - lo;
  }
  return base + slope * static_cast<double>(accessors) * covered / (b - a);
}

inline double population_variance(const std::vector<double>& x, std::size_t begin, std::size_t count) {
  double mean = 0.0;
  for (std::size_t i = 0; i < count; ++i) mean += x[begin + i];
  mean /= static_cast<double>(count);
  double var = 0.0;
  for (std::size_t i = 0; i < count; ++i) var += (x[begin + i] - mean) * (x[begin + i] - mean);
  return var / static_cast<double>(count);
}

// Offset in [0, spb) minimising the summed variance of all complete bit
// windows; smallest offset on ties.
inline std::size_t best_offset(const std::vector<double>& x, std::size_t spb) {
  std::size_t best = 0;
  double best_cost = std::numeric_limits<double>::infinity();
  for (std::size_t off = 0; off < spb; ++off) {
    double cost = 0.0;
    for (std::size_t w = off; w + spb <= x.size(); w += spb) cost += population_variance(x, w, spb);
    if (cost < best_cost - 1e-9) {
      best_cost = cost;
      best = off;
    }
  }
  return best;
}

}  // namespace oracle
