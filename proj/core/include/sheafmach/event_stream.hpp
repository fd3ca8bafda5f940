#pragma once

#include <algorithm>
#include <functional>
#include <utility>
#include <vector>

#include "sheafmach/errors.hpp"
#include "sheafmach/time.hpp"

namespace sheafmach {

/// A finite set of time-stamped values on the window [0, length].
///
/// Time-stamps are strictly increasing and lie in [0, length]. A length-0
/// stream holds at most one event, at t = 0.
template <class V>
class EventStream {
 public:
  struct Event {
    Time t;
    V value;

    friend bool operator==(const Event& a, const Event& b) { return a.t == b.t && a.value == b.value; }
  };

  EventStream() = default;
  explicit EventStream(Duration length) : length_(length) {}

  /// Throws RangeError if a time-stamp is outside [0, length] or not strictly increasing.
  EventStream(Duration length, std::vector<Event> events) : length_(length), events_(std::move(events)) {
    for (std::size_t i = 0; i < events_.size(); ++i) {
      if (events_[i].t > length_) throw RangeError("EventStream: time-stamp beyond length");
      if (i > 0 && !(events_[i - 1].t < events_[i].t)) {
        throw RangeError("EventStream: time-stamps must be strictly increasing");
      }
    }
  }

  Duration length() const noexcept { return length_; }
  const std::vector<Event>& events() const noexcept { return events_; }
  bool empty() const noexcept { return events_.empty(); }
  std::size_t size() const noexcept { return events_.size(); }

  /// Appends an event; it must be later than every stored one and within the length.
  void push_back(Time t, V value) {
    if (t > length_ || (!events_.empty() && !(events_.back().t < t))) {
      throw RangeError("EventStream::push_back: out-of-order or out-of-range time-stamp");
    }
    events_.push_back(Event{t, std::move(value)});
  }

  /// Event at time t, if any.
  const Event* find(Time t) const {
    auto it = std::lower_bound(events_.begin(), events_.end(), t,
                               [](const Event& e, Time x) { return e.t < x; });
    return (it != events_.end() && it->t == t) ? &*it : nullptr;
  }

  /// In-place gluing: *this becomes glue(*this, next).
  void extend(const EventStream& next) {
    check_compatible(next);
    const Duration offset = length_;
    auto it = next.events_.begin();
    if (it != next.events_.end() && it->t.is_zero()) ++it;  // the shared boundary event is stored once
    events_.reserve(events_.size() + static_cast<std::size_t>(next.events_.end() - it));
    for (; it != next.events_.end(); ++it) events_.push_back(Event{it->t + offset, it->value});
    length_ += next.length_;
  }

  /// In-place right-biased concatenation: the events of *this on [0, length)
  /// followed by `next` shifted by length. Total: never fails on boundary mismatch.
  void splice(const EventStream& next) {
    if (!events_.empty() && events_.back().t == length_) events_.pop_back();
    const Duration offset = length_;
    for (const auto& e : next.events_) events_.push_back(Event{e.t + offset, e.value});
    length_ += next.length_;
  }

  void check_compatible(const EventStream& next) const {
    const Event* mine = find(length_);
    const Event* theirs = next.find(Time::zero());
    const bool ok = (mine == nullptr && theirs == nullptr) ||
                    (mine != nullptr && theirs != nullptr && mine->value == theirs->value);
    if (!ok) throw CompatibilityError("glue: event streams disagree at the shared endpoint");
  }

  friend bool operator==(const EventStream& a, const EventStream& b) {
    return a.length_ == b.length_ && a.events_ == b.events_;
  }

 private:
  Duration length_;
  std::vector<Event> events_;
};

/// Restriction along [from, to]: events with from <= t <= to, re-based to start at 0.
/// Throws RangeError unless 0 <= from <= to <= e.length().
template <class V>
EventStream<V> restrict_to(const EventStream<V>& e, Time from, Time to) {
  if (from > to || to > e.length()) throw RangeError("restrict: window out of bounds");
  using Event = typename EventStream<V>::Event;
  const auto& ev = e.events();
  auto lo = std::lower_bound(ev.begin(), ev.end(), from, [](const Event& x, Time t) { return x.t < t; });
  auto hi = std::upper_bound(lo, ev.end(), to, [](Time t, const Event& x) { return t < x.t; });
  std::vector<Event> out;
  out.reserve(static_cast<std::size_t>(hi - lo));
  for (auto it = lo; it != hi; ++it) out.push_back(Event{it->t - from, it->value});
  return EventStream<V>(to - from, std::move(out));
}

/// The unique stream of length l1 + l2 restricting to a on [0, l1] and to b on [l1, l1 + l2].
/// Throws CompatibilityError unless a|[l1,l1] == b|[0,0].
template <class V>
EventStream<V> glue(const EventStream<V>& a, const EventStream<V>& b) {
  EventStream<V> out = a;
  out.extend(b);
  return out;
}

/// Ev(f): time-stamps unchanged, values mapped pointwise.
template <class V, class F>
auto map_events(const EventStream<V>& e, F&& f) {
  using W = std::decay_t<std::invoke_result_t<F&, const V&>>;
  std::vector<typename EventStream<W>::Event> out;
  out.reserve(e.size());
  for (const auto& x : e.events()) out.push_back({x.t, std::invoke(f, x.value)});
  return EventStream<W>(e.length(), std::move(out));
}

}  // namespace sheafmach
