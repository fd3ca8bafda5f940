#include "sheafmach/laws/generators.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "sheafmach/errors.hpp"

namespace sheafmach::laws {

std::int64_t Rng::integer(std::int64_t lo, std::int64_t hi) {
  if (hi <= lo) return lo;
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(next());
  // Rejection sampling removes modulo bias.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t x = next();
  while (x >= limit) x = next();
  return lo + static_cast<std::int64_t>(x % span);
}

double Rng::real(double lo, double hi) {
  const double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

Value random_value(Rng& rng, const ValueDomain& d, const GenOptions& o) {
  if (d.is_tensor()) {
    Value::Record rec;
    for (std::size_t i = 0; i < d.components().size(); ++i) {
      if (rng.chance(0.5)) rec.push_back({i, random_value(rng, d.components()[i], o)});
    }
    if (rec.empty()) {
      const auto i = static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(d.components().size()) - 1));
      rec.push_back({i, random_value(rng, d.components()[i], o)});
    }
    return Value(std::move(rec));
  }
  if (d.name() == "real") return Value(std::round(rng.real(o.min_value, o.max_value) * 8.0) / 8.0);
  if (d.name() == "integer") return Value(rng.integer(-5, 5));
  if (d.name() == "polarity") return Value(rng.chance(0.5) ? 1 : -1);
  if (d.name() == "text") {
    static const std::vector<std::string> alphabet{"a", "b", "c"};
    return Value(rng.pick(alphabet));
  }
  throw TypeError("random_value: unsupported domain " + d.name());
}

Duration random_length(Rng& rng, const GenOptions& o) {
  const std::int64_t q = o.quantum.ticks();
  const std::int64_t n = o.max_length.ticks() / q;
  // Occasionally the degenerate length 0.
  if (rng.chance(0.03)) return Duration::zero();
  return Duration::from_ticks(rng.integer(1, std::max<std::int64_t>(n, 1)) * q);
}

Time random_time(Rng& rng, Duration length, const GenOptions& o) {
  const std::int64_t q = o.quantum.ticks();
  const std::int64_t n = length.ticks() / q;
  if (rng.chance(0.1)) return Time::zero();
  if (rng.chance(0.1)) return Duration::from_ticks(n * q);
  return Duration::from_ticks(rng.integer(0, n) * q);
}

EventSection random_events(Rng& rng, const ValueDomain& d, Duration length, const GenOptions& o) {
  std::set<std::int64_t> stamps;
  const auto n = static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(o.max_events)));
  for (std::size_t i = 0; i < n; ++i) stamps.insert(random_time(rng, length, o).ticks());
  EventSection e(length);
  for (auto t : stamps) e.push_back(Duration::from_ticks(t), random_value(rng, d, o));
  return e;
}

namespace {

double clamp_value(double v, const GenOptions& o) { return std::clamp(v, o.min_value, o.max_value); }

// Continues a piecewise-linear walk from `v0` and appends pieces covering `length`.
ContinuousSection walk(Rng& rng, double v0, Duration length, const GenOptions& o) {
  std::set<std::int64_t> cuts{0, length.ticks()};
  const auto n = static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(o.max_pieces) - 1));
  for (std::size_t i = 0; i < n; ++i) cuts.insert(random_time(rng, length, o).ticks());
  std::vector<std::int64_t> c(cuts.begin(), cuts.end());
  std::vector<ContinuousSection::Piece> pieces;
  double v = v0;
  for (std::size_t i = 0; i + 1 < c.size(); ++i) {
    const std::int64_t a = c[i];
    const std::int64_t b = c[i + 1];
    if (i > 0 && o.allow_jumps && rng.chance(0.3)) v = clamp_value(std::round(rng.real(o.min_value, o.max_value) * 8) / 8, o);
    const double dt = static_cast<double>(b - a) / Duration::kTicksPerSecond;
    const int kind = static_cast<int>(rng.integer(0, 2));
    if (kind == 0) {
      pieces.push_back({a, b, ContinuousSection::Constant{Value(v)}});
    } else if (kind == 1) {
      const double w = clamp_value(v + rng.real(-o.max_slope, o.max_slope) * dt, o);
      pieces.push_back({a, b, ContinuousSection::Linear{{a, Value(v)}, {b, Value(w)}}});
      v = w;
    } else {
      std::vector<ContinuousSection::Sample> s{{a, Value(v)}};
      std::set<std::int64_t> inner;
      const auto k = rng.integer(1, 6);
      for (std::int64_t j = 0; j < k; ++j) {
        const auto q = o.quantum.ticks();
        const auto lo = (a + q - 1) / q;
        const auto hi = b / q;
        if (hi >= lo) inner.insert(rng.integer(lo, hi) * q);
      }
      inner.erase(a);
      inner.insert(b);
      std::int64_t prev = a;
      for (auto t : inner) {
        const double d = static_cast<double>(t - prev) / Duration::kTicksPerSecond;
        v = clamp_value(v + rng.real(-o.max_slope, o.max_slope) * d, o);
        s.push_back({t, Value(v)});
        prev = t;
      }
      pieces.push_back({a, b, ContinuousSection::Sampled{std::move(s)}});
    }
  }
  if (length.is_zero()) pieces.push_back({0, 0, ContinuousSection::Constant{Value(v)}});
  return ContinuousSection(length, std::move(pieces));
}

}  // namespace

ContinuousSection random_continuous(Rng& rng, Duration length, const GenOptions& o, bool certified) {
  const double v0 = std::round(rng.real(o.min_value, o.max_value) * 8) / 8;
  auto c = walk(rng, v0, length, o);
  if (o.allow_jumps && !length.is_zero() && rng.chance(0.2)) {
    // A jump exactly at the right endpoint.
    c.splice(ContinuousSection::constant(Value(clamp_value(v0 + 0.5, o)), Duration::zero()));
  }
  c.set_codiscrete(o.allow_jumps);
  if (certified) c.set_lipschitz_bound(o.max_slope);
  return c;
}

ClockSection random_clock(Rng& rng, Duration length, const GenOptions& o) {
  const std::int64_t q = o.quantum.ticks();
  const Duration d = Duration::from_ticks(rng.integer(1, std::max<std::int64_t>(o.max_length.ticks() / q / 4, 1)) * q);
  if (rng.chance(0.1)) return ClockSection(length, d, std::nullopt);
  const Duration phase = Duration::from_ticks(rng.integer(0, d.ticks() / q - 1) * q);
  if (phase > length) return ClockSection(length, d, std::nullopt);
  return ClockSection(length, d, phase);
}

Section random_section(Rng& rng, const BehaviorType& t, Duration length, const GenOptions& o) {
  switch (t.kind()) {
    case BehaviorType::Kind::Event:
      return random_events(rng, t.domain(), length, o);
    case BehaviorType::Kind::Continuous: {
      GenOptions co = o;
      co.allow_jumps = o.allow_jumps && t.codiscrete();
      const bool certified = t.lipschitz_bound().has_value();
      if (certified && std::isfinite(*t.lipschitz_bound())) co.max_slope = std::min(co.max_slope, *t.lipschitz_bound());
      if (certified) co.allow_jumps = false;
      return random_continuous(rng, length, co, certified);
    }
    case BehaviorType::Kind::Clock: {
      const std::int64_t q = o.quantum.ticks();
      const Duration d = t.period();
      const auto steps = d.ticks() / q;
      std::optional<Time> first;
      if (steps > 0) {
        const Duration phase = Duration::from_ticks(rng.integer(0, steps - 1) * q);
        if (phase <= length) first = phase;
      }
      return ClockSection(length, d, first);
    }
    case BehaviorType::Kind::Product: {
      std::vector<Section> parts;
      for (const auto& p : t.parts()) parts.push_back(random_section(rng, p, length, o));
      return Section::product(length, std::move(parts));
    }
  }
  throw TypeError("random_section: unsupported type");
}

Section random_continuation(Rng& rng, const BehaviorType& t, const Section& germ, Duration length,
                            const GenOptions& o) {
  switch (t.kind()) {
    case BehaviorType::Kind::Event: {
      EventSection e = random_events(rng, t.domain(), length, o);
      std::vector<EventSection::Event> ev;
      if (!germ.events().empty()) ev.push_back({Time::zero(), germ.events().events().front().value});
      for (const auto& x : e.events()) {
        if (!x.t.is_zero()) ev.push_back(x);
      }
      return EventSection(length, std::move(ev));
    }
    case BehaviorType::Kind::Continuous: {
      const auto& g = germ.continuous();
      GenOptions co = o;
      co.allow_jumps = o.allow_jumps && t.codiscrete() && !t.lipschitz_bound();
      if (t.lipschitz_bound() && std::isfinite(*t.lipschitz_bound())) co.max_slope = std::min(co.max_slope, *t.lipschitz_bound());
      auto c = walk(rng, g.eval(Time::zero()).numeric(), length, co);
      c.set_codiscrete(g.codiscrete());
      c.set_lipschitz_bound(g.lipschitz_bound());
      return c;
    }
    case BehaviorType::Kind::Clock:
      throw TypeError("random_continuation: a clock continues deterministically");
    case BehaviorType::Kind::Product: {
      std::vector<Section> parts;
      for (std::size_t i = 0; i < t.parts().size(); ++i) {
        parts.push_back(random_continuation(rng, t.parts()[i], germ.parts()[i], length, o));
      }
      return Section::product(length, std::move(parts));
    }
  }
  throw TypeError("random_continuation: unsupported type");
}

}  // namespace sheafmach::laws
