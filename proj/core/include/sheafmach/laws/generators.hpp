#pragma once

#include <cstdint>
#include <random>

#include "sheafmach/behavior_type.hpp"
#include "sheafmach/section.hpp"

namespace sheafmach::laws {

/// Portable random source: mt19937_64 with explicit integer-to-range maps
/// (standard distributions differ between library implementations).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : g_(seed) {}

  std::uint64_t next() { return g_(); }
  /// Uniform integer in [lo, hi].
  std::int64_t integer(std::int64_t lo, std::int64_t hi);
  /// Uniform real in [lo, hi).
  double real(double lo, double hi);
  bool chance(double p) { return real(0.0, 1.0) < p; }
  template <class T>
  const T& pick(const std::vector<T>& xs) {
    return xs[static_cast<std::size_t>(integer(0, static_cast<std::int64_t>(xs.size()) - 1))];
  }

 private:
  std::mt19937_64 g_;
};

/// Shape of generated sections.
struct GenOptions {
  Duration max_length = Duration::from_ticks(5'000'000'000);
  /// Times (lengths, time-stamps, breakpoints) are multiples of this quantum.
  Duration quantum = Duration::from_ticks(1);
  std::size_t max_events = 12;
  std::size_t max_pieces = 6;
  double min_value = -3.0;
  double max_value = 3.0;
  double max_slope = 10.0;
  /// Continuous streams may jump between pieces.
  bool allow_jumps = false;
};

Value random_value(Rng& rng, const ValueDomain& d, const GenOptions& o);

/// Random time in [0, length] on the quantum grid.
Time random_time(Rng& rng, Duration length, const GenOptions& o);
Duration random_length(Rng& rng, const GenOptions& o);

EventSection random_events(Rng& rng, const ValueDomain& d, Duration length, const GenOptions& o);

/// Random piecewise trajectory with slope at most o.max_slope, values clamped to
/// [min_value, max_value]; carries bound o.max_slope when `certified`.
ContinuousSection random_continuous(Rng& rng, Duration length, const GenOptions& o, bool certified);

ClockSection random_clock(Rng& rng, Duration length, const GenOptions& o);

/// Random section of a behavior type.
Section random_section(Rng& rng, const BehaviorType& t, Duration length, const GenOptions& o);

/// Random section of type t whose first point equals `germ` (a length-0 section),
/// so that it glues after any section ending in that germ.
Section random_continuation(Rng& rng, const BehaviorType& t, const Section& germ, Duration length,
                            const GenOptions& o);

}  // namespace sheafmach::laws
