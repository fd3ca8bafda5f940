#include "sheafmach/section.hpp"

#include "sheafmach/errors.hpp"

namespace sheafmach {

Section Section::product(Duration length, std::vector<Section> parts) {
  for (const auto& p : parts) {
    if (p.kind() == Kind::Product) throw TypeError("product sections are flat");
    if (p.length() != length) throw TypeError("product parts must share the product length");
  }
  Section s;
  s.length_ = length;
  s.data_ = std::move(parts);
  return s;
}

const EventSection& Section::events() const {
  if (const auto* e = std::get_if<EventSection>(&data_)) return *e;
  throw TypeError("section is not an event stream");
}

const ContinuousSection& Section::continuous() const {
  if (const auto* c = std::get_if<ContinuousSection>(&data_)) return *c;
  throw TypeError("section is not a continuous stream");
}

const ClockSection& Section::clock() const {
  if (const auto* k = std::get_if<ClockSection>(&data_)) return *k;
  throw TypeError("section is not a clock");
}

const std::vector<Section>& Section::parts() const {
  if (const auto* p = std::get_if<std::vector<Section>>(&data_)) return *p;
  throw TypeError("section is not a product");
}

namespace {

template <bool Splice>
void join(Section& self, const Section& next, std::variant<EventSection, ContinuousSection, ClockSection,
                                                          std::vector<Section>>& data) {
  if (self.kind() != next.kind()) throw TypeError("cannot join sections of different kinds");
  if (auto* e = std::get_if<EventSection>(&data)) {
    if constexpr (Splice) e->splice(next.events()); else e->extend(next.events());
  } else if (auto* c = std::get_if<ContinuousSection>(&data)) {
    if constexpr (Splice) c->splice(next.continuous()); else c->extend(next.continuous());
  } else if (auto* k = std::get_if<ClockSection>(&data)) {
    // Clocks carry no values, so a seam mismatch has no right-biased repair.
    k->extend(next.clock());
  } else {
    auto& mine = std::get<std::vector<Section>>(data);
    const auto& theirs = next.parts();
    if (mine.size() != theirs.size()) throw TypeError("cannot join products of different arity");
    if constexpr (!Splice) {
      // Check every seam first so a failure leaves *this untouched.
      for (std::size_t i = 0; i < mine.size(); ++i) {
        Section probe = endpoint(mine[i]);
        probe.extend(restrict_to(theirs[i], Time::zero(), Time::zero()));
      }
    }
    for (std::size_t i = 0; i < mine.size(); ++i) {
      if constexpr (Splice) mine[i].splice(theirs[i]); else mine[i].extend(theirs[i]);
    }
  }
}

}  // namespace

void Section::extend(const Section& next) {
  join<false>(*this, next, data_);
  length_ += next.length_;
}

void Section::splice(const Section& next) {
  join<true>(*this, next, data_);
  length_ += next.length_;
}

Section restrict_to(const Section& s, Time from, Time to) {
  switch (s.kind()) {
    case Section::Kind::Event:
      return restrict_to(s.events(), from, to);
    case Section::Kind::Continuous:
      return restrict_to(s.continuous(), from, to);
    case Section::Kind::Clock:
      return restrict_to(s.clock(), from, to);
    case Section::Kind::Product:
      break;
  }
  if (from > to || to > s.length()) throw RangeError("restrict: window out of bounds");
  std::vector<Section> parts;
  parts.reserve(s.parts().size());
  for (const auto& p : s.parts()) parts.push_back(restrict_to(p, from, to));
  return Section::product(to - from, std::move(parts));
}

Section glue(const Section& a, const Section& b) {
  Section out = a;
  out.extend(b);
  return out;
}

}  // namespace sheafmach
