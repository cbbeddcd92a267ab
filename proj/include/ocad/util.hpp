#pragma once

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <string_view>
#include <system_error>

#include "ocad/error.hpp"

namespace ocad {

// Seeded random source with platform-independent derived distributions.
// std::*_distribution output is implementation defined, so the helpers below
// map raw mt19937_64 words to values themselves.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % n;
  }

  double exponential(double mean) { return -mean * std::log1p(-uniform()); }

  // Box-Muller; one variate per call.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  template <typename Vec>
  void shuffle(Vec& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
  if (v == 0.0) return "0";  // folds -0
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

// Fixed number of decimals, for human-facing tables.
inline std::string format_fixed(double v, int decimals) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                 std::chars_format::fixed, decimals);
  return std::string(buf.data(), ptr);
}

inline double parse_double(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorKind::kMalformedDocument,
                "not a number: '" + std::string(s) + "'");
  }
  return v;
}

namespace detail {

inline bool read_digits(std::string_view s, std::size_t& pos, int count,
                        long long& out) {
  if (pos + count > s.size()) return false;
  long long v = 0;
  for (int i = 0; i < count; ++i) {
    const char c = s[pos + i];
    if (c < '0' || c > '9') return false;
    v = v * 10 + (c - '0');
  }
  pos += count;
  out = v;
  return true;
}

}  // namespace detail

// Parses ISO-8601 date-times ("2023-07-12T10:00:00", optional fraction,
// optional 'Z' or +hh:mm / -hh:mm offset; a space may replace 'T') into
// seconds since the Unix epoch. Fractions are applied as an exact decimal so
// millisecond times round-trip bit for bit.
inline double parse_iso8601(std::string_view s) {
  auto fail = [&]() -> double {
    throw Error(ErrorKind::kMalformedDocument,
                "bad ISO-8601 timestamp: '" + std::string(s) + "'");
  };
  std::size_t pos = 0;
  long long year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
  if (!detail::read_digits(s, pos, 4, year)) return fail();
  if (pos >= s.size() || s[pos++] != '-') return fail();
  if (!detail::read_digits(s, pos, 2, month)) return fail();
  if (pos >= s.size() || s[pos++] != '-') return fail();
  if (!detail::read_digits(s, pos, 2, day)) return fail();
  if (pos < s.size()) {
    if (s[pos] != 'T' && s[pos] != 't' && s[pos] != ' ') return fail();
    ++pos;
    if (!detail::read_digits(s, pos, 2, hour)) return fail();
    if (pos >= s.size() || s[pos++] != ':') return fail();
    if (!detail::read_digits(s, pos, 2, minute)) return fail();
    if (pos < s.size() && s[pos] == ':') {
      ++pos;
      if (!detail::read_digits(s, pos, 2, second)) return fail();
    }
  }
  long long frac = 0;
  long long frac_scale = 1;
  if (pos < s.size() && (s[pos] == '.' || s[pos] == ',')) {
    ++pos;
    int digits = 0;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
      if (digits < 9) {
        frac = frac * 10 + (s[pos] - '0');
        frac_scale *= 10;
      }
      ++digits;
      ++pos;
    }
    if (digits == 0) return fail();
  }
  long long offset_seconds = 0;
  if (pos < s.size()) {
    const char c = s[pos];
    if (c == 'Z' || c == 'z') {
      ++pos;
    } else if (c == '+' || c == '-') {
      ++pos;
      long long oh = 0, om = 0;
      if (!detail::read_digits(s, pos, 2, oh)) return fail();
      if (pos < s.size() && s[pos] == ':') ++pos;
      if (pos < s.size() && !detail::read_digits(s, pos, 2, om)) return fail();
      offset_seconds = (oh * 3600 + om * 60) * (c == '+' ? 1 : -1);
    }
  }
  if (pos != s.size()) return fail();
  if (month < 1 || month > 12 || day < 1 || day > 31 || hour > 23 ||
      minute > 59 || second > 60) {
    return fail();
  }
  const std::chrono::year_month_day ymd{
      std::chrono::year{static_cast<int>(year)},
      std::chrono::month{static_cast<unsigned>(month)},
      std::chrono::day{static_cast<unsigned>(day)}};
  if (!ymd.ok()) return fail();
  const long long days =
      std::chrono::sys_days{ymd}.time_since_epoch().count();
  const long long whole =
      days * 86400 + hour * 3600 + minute * 60 + second - offset_seconds;
  return static_cast<double>(whole * frac_scale + frac) /
         static_cast<double>(frac_scale);
}

// UTC, millisecond precision: "2023-07-12T10:00:00.000Z".
inline std::string format_iso8601(double seconds) {
  const long long total_ms = std::llround(seconds * 1000.0);
  long long secs = total_ms / 1000;
  long long ms = total_ms % 1000;
  if (ms < 0) {
    ms += 1000;
    secs -= 1;
  }
  long long days = secs / 86400;
  long long rem = secs % 86400;
  if (rem < 0) {
    rem += 86400;
    days -= 1;
  }
  const std::chrono::year_month_day ymd{
      std::chrono::sys_days{std::chrono::days{days}}};
  std::array<char, 40> buf{};
  std::snprintf(buf.data(), buf.size(), "%04d-%02u-%02uT%02lld:%02lld:%02lld.%03lldZ",
                static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()), rem / 3600, (rem / 60) % 60,
                rem % 60, ms);
  return std::string(buf.data());
}

}  // namespace ocad
