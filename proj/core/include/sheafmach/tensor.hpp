#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "sheafmach/errors.hpp"
#include "sheafmach/event_stream.hpp"

namespace sheafmach {

/// Element of A ⊙ B = A + B + A×B: a left value, a right value, or both.
template <class A, class B>
class TensorValue {
 public:
  static TensorValue left(A a) { return TensorValue(std::move(a), std::nullopt); }
  static TensorValue right(B b) { return TensorValue(std::nullopt, std::move(b)); }
  static TensorValue both(A a, B b) { return TensorValue(std::move(a), std::move(b)); }

  bool has_left() const noexcept { return a_.has_value(); }
  bool has_right() const noexcept { return b_.has_value(); }
  bool is_both() const noexcept { return has_left() && has_right(); }
  const std::optional<A>& left_value() const noexcept { return a_; }
  const std::optional<B>& right_value() const noexcept { return b_; }

  friend bool operator==(const TensorValue&, const TensorValue&) = default;

 private:
  TensorValue(std::optional<A> a, std::optional<B> b) : a_(std::move(a)), b_(std::move(b)) {}
  std::optional<A> a_;
  std::optional<B> b_;
};

/// Ev(A) × Ev(B) → Ev(A ⊙ B). Throws TypeError on a length mismatch.
template <class A, class B>
EventStream<TensorValue<A, B>> zip_events(const EventStream<A>& ea, const EventStream<B>& eb) {
  if (ea.length() != eb.length()) throw TypeError("zip_events: streams have different lengths");
  using T = TensorValue<A, B>;
  std::vector<typename EventStream<T>::Event> out;
  out.reserve(ea.size() + eb.size());
  auto i = ea.events().begin();
  auto j = eb.events().begin();
  const auto ie = ea.events().end();
  const auto je = eb.events().end();
  while (i != ie || j != je) {
    if (j == je || (i != ie && i->t < j->t)) {
      out.push_back({i->t, T::left(i->value)});
      ++i;
    } else if (i == ie || j->t < i->t) {
      out.push_back({j->t, T::right(j->value)});
      ++j;
    } else {
      out.push_back({i->t, T::both(i->value, j->value)});
      ++i;
      ++j;
    }
  }
  return EventStream<T>(ea.length(), std::move(out));
}

/// Inverse of zip_events.
template <class A, class B>
std::pair<EventStream<A>, EventStream<B>> unzip_events(const EventStream<TensorValue<A, B>>& e) {
  EventStream<A> ea(e.length());
  EventStream<B> eb(e.length());
  for (const auto& x : e.events()) {
    if (x.value.has_left()) ea.push_back(x.t, *x.value.left_value());
    if (x.value.has_right()) eb.push_back(x.t, *x.value.right_value());
  }
  return {std::move(ea), std::move(eb)};
}

/// One component of an n-ary tensor value.
template <class V>
struct Slot {
  std::size_t index = 0;
  V value;

  friend bool operator==(const Slot&, const Slot&) = default;
};

/// n-ary zip: events at the union of time-stamps, each carrying the non-empty
/// list of components that fired, in slot order. Throws TypeError on length
/// mismatch or an empty family.
template <class V>
EventStream<std::vector<Slot<V>>> zip_slots(const std::vector<EventStream<V>>& es) {
  if (es.empty()) throw TypeError("zip_slots: empty family");
  const Duration len = es.front().length();
  for (const auto& e : es) {
    if (e.length() != len) throw TypeError("zip_slots: streams have different lengths");
  }
  using R = std::vector<Slot<V>>;
  std::vector<std::size_t> pos(es.size(), 0);
  EventStream<R> out(len);
  for (;;) {
    std::optional<Time> next;
    for (std::size_t k = 0; k < es.size(); ++k) {
      if (pos[k] < es[k].size()) {
        const Time t = es[k].events()[pos[k]].t;
        if (!next || t < *next) next = t;
      }
    }
    if (!next) break;
    R rec;
    for (std::size_t k = 0; k < es.size(); ++k) {
      if (pos[k] < es[k].size() && es[k].events()[pos[k]].t == *next) {
        rec.push_back(Slot<V>{k, es[k].events()[pos[k]].value});
        ++pos[k];
      }
    }
    out.push_back(*next, std::move(rec));
  }
  return out;
}

/// Inverse of zip_slots for a family of `n` streams. Throws RangeError on a
/// slot index >= n.
template <class V>
std::vector<EventStream<V>> unzip_slots(const EventStream<std::vector<Slot<V>>>& e, std::size_t n) {
  std::vector<EventStream<V>> out(n, EventStream<V>(e.length()));
  for (const auto& x : e.events()) {
    for (const auto& s : x.value) {
      if (s.index >= n) throw RangeError("unzip_slots: slot index out of range");
      out[s.index].push_back(x.t, s.value);
    }
  }
  return out;
}

}  // namespace sheafmach
