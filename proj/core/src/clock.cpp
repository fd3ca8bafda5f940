#include "sheafmach/clock.hpp"

#include "sheafmach/errors.hpp"

namespace sheafmach {

ClockSection::ClockSection(Duration length, Duration period, std::optional<Time> first_tick)
    : length_(length), period_(period), first_(first_tick) {
  if (period_.is_zero()) throw RangeError("ClockSection: period must be positive");
  if (first_ && (*first_ >= period_ || *first_ > length_)) {
    throw RangeError("ClockSection: first tick must satisfy 0 <= t1 < d and t1 <= length");
  }
}

std::size_t ClockSection::tick_count() const {
  if (!first_) return 0;
  return static_cast<std::size_t>((length_ - *first_).ticks() / period_.ticks()) + 1;
}

std::optional<Time> ClockSection::last_tick() const {
  if (!first_) return std::nullopt;
  return *first_ + period_ * static_cast<Duration::rep>(tick_count() - 1);
}

std::vector<Time> ClockSection::ticks() const {
  std::vector<Time> out;
  if (!first_) return out;
  out.reserve(tick_count());
  for (Time t = *first_; t <= length_; t += period_) out.push_back(t);
  return out;
}

bool ClockSection::has_tick_at(Time t) const {
  return first_ && t >= *first_ && t <= length_ && (t - *first_).ticks() % period_.ticks() == 0;
}

void ClockSection::extend(const ClockSection& next) {
  if (next.period_ != period_) throw CompatibilityError("glue: clocks with different periods");
  if (has_tick_at(length_) != next.has_tick_at(Time::zero())) {
    throw CompatibilityError("glue: clocks disagree at the shared endpoint");
  }
  const Duration total = length_ + next.length_;
  std::optional<Time> first = first_;
  if (next.first_) {
    const Time theirs = length_ + *next.first_;
    if (const auto last = last_tick()) {
      if (theirs != *last && theirs - *last != period_) {
        throw CompatibilityError("glue: tick spacing across the seam differs from the period");
      }
    } else {
      if (theirs >= period_) throw CompatibilityError("glue: first tick too late after gluing");
      first = theirs;
    }
  } else if (const auto last = last_tick()) {
    if (total - *last >= period_) throw CompatibilityError("glue: gap after the last tick reaches the period");
  }
  length_ = total;
  first_ = first;
}

ClockSection restrict_to(const ClockSection& k, Time from, Time to) {
  if (from > to || to > k.length()) throw RangeError("restrict: window out of bounds");
  std::optional<Time> first;
  if (const auto& t1 = k.first_tick()) {
    const Duration::rep d = k.period().ticks();
    Duration::rep n = 0;
    if (from > *t1) n = ((from - *t1).ticks() + d - 1) / d;
    const Time t = *t1 + k.period() * n;
    if (t <= to) first = t - from;
  }
  return ClockSection(to - from, k.period(), first);
}

ClockSection glue(const ClockSection& a, const ClockSection& b) {
  ClockSection out = a;
  out.extend(b);
  return out;
}

}  // namespace sheafmach
