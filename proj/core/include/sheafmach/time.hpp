#pragma once

#include <compare>
#include <cstdint>
#include <string>

#include "sheafmach/errors.hpp"

namespace sheafmach {

/// Non-negative span of time, stored as an integer count of nanoseconds.
///
/// Every section boundary, time-stamp and restriction window is a Duration, so
/// restriction and gluing are exact integer arithmetic. Conversion to seconds
/// divides by 1e9, which is correctly rounded: Duration::seconds(0.1).to_seconds()
/// returns exactly 0.1.
class Duration {
 public:
  using rep = std::int64_t;
  static constexpr rep kTicksPerSecond = 1'000'000'000;

  constexpr Duration() = default;

  static constexpr Duration from_ticks(rep ticks) {
    if (ticks < 0) throw RangeError("Duration: negative tick count");
    return Duration(ticks);
  }

  /// Rounds to the nearest nanosecond. Throws RangeError for negative or non-finite input.
  static Duration seconds(double s);

  static constexpr Duration zero() { return Duration(); }

  constexpr rep ticks() const noexcept { return ticks_; }
  double to_seconds() const noexcept {
    return static_cast<double>(ticks_) / static_cast<double>(kTicksPerSecond);
  }
  constexpr bool is_zero() const noexcept { return ticks_ == 0; }

  constexpr auto operator<=>(const Duration&) const = default;

  constexpr Duration& operator+=(Duration o) {
    ticks_ += o.ticks_;
    return *this;
  }
  /// Throws RangeError if the result would be negative.
  constexpr Duration& operator-=(Duration o) {
    if (o.ticks_ > ticks_) throw RangeError("Duration: negative difference");
    ticks_ -= o.ticks_;
    return *this;
  }
  friend constexpr Duration operator+(Duration a, Duration b) { return a += b; }
  friend constexpr Duration operator-(Duration a, Duration b) { return a -= b; }
  friend constexpr Duration operator*(Duration a, rep k) { return Duration::from_ticks(a.ticks_ * k); }

 private:
  constexpr explicit Duration(rep ticks) : ticks_(ticks) {}
  rep ticks_ = 0;
};

/// A point inside a section's window [0, length]; same representation as Duration.
using Time = Duration;

/// Exact decimal rendering of a duration in seconds ("1.5", "0.000000001", "20").
std::string format_seconds(Duration d);

/// Parses what format_seconds prints (and any decimal or exponent notation).
Duration parse_seconds(const std::string& text);

namespace literals {
inline Duration operator""_s(long double s) { return Duration::seconds(static_cast<double>(s)); }
inline Duration operator""_s(unsigned long long s) {
  return Duration::from_ticks(static_cast<Duration::rep>(s) * Duration::kTicksPerSecond);
}
}  // namespace literals

}  // namespace sheafmach
