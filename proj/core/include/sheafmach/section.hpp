#pragma once

#include <variant>
#include <vector>

#include "sheafmach/clock.hpp"
#include "sheafmach/continuous_stream.hpp"
#include "sheafmach/event_stream.hpp"
#include "sheafmach/value.hpp"

namespace sheafmach {

using EventSection = EventStream<Value>;
using ContinuousSection = ContinuousStream<Value>;

/// Runtime section: the value passed between machines.
///
/// A section is an event stream, a continuous stream or a clock, or a product
/// of such sections sharing one length. The empty product is the unit section
/// (the terminal sheaf): it carries nothing but its length.
class Section {
 public:
  enum class Kind { Event, Continuous, Clock, Product };

  Section() : data_(std::vector<Section>{}) {}
  Section(EventSection e) : length_(e.length()), data_(std::move(e)) {}  // NOLINT(google-explicit-constructor)
  Section(ContinuousSection c) : length_(c.length()), data_(std::move(c)) {}  // NOLINT
  Section(ClockSection k) : length_(k.length()), data_(std::move(k)) {}  // NOLINT

  /// Throws TypeError if a part is itself a product or has another length.
  static Section product(Duration length, std::vector<Section> parts);
  static Section unit(Duration length) { return product(length, {}); }

  Kind kind() const noexcept { return static_cast<Kind>(data_.index()); }
  Duration length() const noexcept { return length_; }

  /// Throw TypeError on a kind mismatch.
  const EventSection& events() const;
  const ContinuousSection& continuous() const;
  const ClockSection& clock() const;
  const std::vector<Section>& parts() const;

  /// In-place gluing; CompatibilityError at a mismatched seam, TypeError on shape mismatch.
  void extend(const Section& next);
  /// In-place right-biased concatenation (never fails on a seam mismatch).
  void splice(const Section& next);

  friend bool operator==(const Section& a, const Section& b) {
    return a.length_ == b.length_ && a.data_ == b.data_;
  }
  friend bool operator!=(const Section& a, const Section& b) { return !(a == b); }

 private:
  Duration length_;
  std::variant<EventSection, ContinuousSection, ClockSection, std::vector<Section>> data_;
};

Section restrict_to(const Section& s, Time from, Time to);
Section glue(const Section& a, const Section& b);

/// The point section s|[length, length].
inline Section endpoint(const Section& s) { return restrict_to(s, s.length(), s.length()); }

}  // namespace sheafmach
