#pragma once

#include <optional>
#include <vector>

#include "sheafmach/time.hpp"

namespace sheafmach {

/// Ticks of a period-d clock seen through the window [0, length].
///
/// The tick set is {t1, t1 + d, ...} ∩ [0, length] with 0 <= t1 < d, so the
/// gap before the first tick and after the last one are both shorter than d.
/// A section without ticks is allowed for any length.
class ClockSection {
 public:
  /// Throws RangeError if period is zero or first_tick >= period or > length.
  ClockSection(Duration length, Duration period, std::optional<Time> first_tick);

  Duration length() const noexcept { return length_; }
  Duration period() const noexcept { return period_; }
  const std::optional<Time>& first_tick() const noexcept { return first_; }

  /// Explicit tick enumeration, ascending.
  std::vector<Time> ticks() const;
  std::size_t tick_count() const;
  std::optional<Time> last_tick() const;
  bool has_tick_at(Time t) const;

  /// In-place gluing. Throws CompatibilityError unless both sides agree at the
  /// seam (a tick there on both or neither) and the union keeps spacing d.
  void extend(const ClockSection& next);

  friend bool operator==(const ClockSection&, const ClockSection&) = default;

 private:
  Duration length_;
  Duration period_;
  std::optional<Time> first_;
};

/// Ticks inside [from, to], re-based. Throws RangeError on a bad window.
ClockSection restrict_to(const ClockSection& k, Time from, Time to);

ClockSection glue(const ClockSection& a, const ClockSection& b);

}  // namespace sheafmach
