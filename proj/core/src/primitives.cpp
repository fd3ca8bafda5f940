#include "sheafmach/primitives.hpp"

#include <algorithm>
#include <cmath>

#include "sheafmach/errors.hpp"

namespace sheafmach {

Section EventReactor::advance(const Section& window, Recorder*) {
  const auto& in = window.events().events();
  EventSection out(window.length());
  auto it = in.begin();
  if (!first_ && it != in.end() && it->t.is_zero()) {
    if (boundary_out_) out.push_back(Time::zero(), *boundary_out_);
    ++it;
  }
  boundary_out_.reset();
  for (; it != in.end(); ++it) {
    auto v = react(base_ + it->t, it->value);
    if (v) {
      if (it->t == window.length()) boundary_out_ = *v;
      out.push_back(it->t, std::move(*v));
    }
  }
  base_ += window.length();
  first_ = false;
  return out;
}

namespace {

class FilterProcess final : public EventReactor {
 public:
  explicit FilterProcess(std::shared_ptr<const std::function<bool(const Value&)>> keep) : keep_(std::move(keep)) {}
  std::unique_ptr<Process> clone() const override { return std::make_unique<FilterProcess>(*this); }

 protected:
  std::optional<Value> react(Time, const Value& v) override {
    if ((*keep_)(v)) return v;
    return std::nullopt;
  }

 private:
  std::shared_ptr<const std::function<bool(const Value&)>> keep_;
};

class PeriodicSamplerProcess final : public Process {
 public:
  PeriodicSamplerProcess(Duration period, Duration phase) : period_(period), phase_(phase) {}

  Section advance(const Section& window, Recorder*) override {
    const auto& c = window.continuous();
    const Duration w = window.length();
    EventSection out(w);
    // Local view of the clock: its ticks restricted to this window.
    Duration::rep k = 0;
    if (base_ > phase_) k = ((base_ - phase_).ticks() + period_.ticks() - 1) / period_.ticks();
    for (Time t = phase_ + period_ * k; t <= base_ + w; t += period_) {
      out.push_back(t - base_, c.eval(t - base_));
    }
    base_ += w;
    return out;
  }
  std::unique_ptr<Process> clone() const override { return std::make_unique<PeriodicSamplerProcess>(*this); }

 private:
  Duration period_;
  Duration phase_;
  Time base_;
};

class LevelCrossingProcess final : public Process {
 public:
  LevelCrossingProcess(double level, double anchor) : level_(level), anchor_(anchor) {}

  Section advance(const Section& window, Recorder*) override {
    const auto& c = window.continuous();
    const std::int64_t w = window.length().ticks();
    EventSection out(window.length());
    std::int64_t after = first_ ? -1 : std::max<std::int64_t>(after_abs_ - base_, 0);
    if (!first_ && boundary_out_) out.push_back(Time::zero(), *boundary_out_);
    boundary_out_.reset();

    auto value = [&](std::int64_t tau) { return c.eval(Duration::from_ticks(tau)); };
    auto hit = [&](const Value& v) { return reaches(std::fabs(v.numeric() - anchor_), level_); };
    auto emit = [&](std::int64_t tau, const Value& v) {
      out.push_back(Duration::from_ticks(tau), v);
      anchor_ = v.numeric();
      after = tau;
      if (tau == w) boundary_out_ = v;
    };

    // The input is affine between consecutive stored points, so |c - anchor| is
    // convex on each segment [p, q): a crossing is either at the first tick
    // searched or after a single false-to-true transition.
    const auto pts = c.points();
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      const std::int64_t p = pts[i].first;
      const std::int64_t q = pts[i + 1].first;
      if (q <= p) continue;
      for (;;) {
        const std::int64_t lo = std::max(p, after + 1);
        const std::int64_t hi = q - 1;
        if (lo > hi) break;
        const Value vlo = value(lo);
        if (hit(vlo)) {
          emit(lo, vlo);
          continue;
        }
        if (!hit(value(hi))) break;
        std::int64_t a = lo;  // false
        std::int64_t b = hi;  // true
        while (b - a > 1) {
          const std::int64_t m = a + (b - a) / 2;
          (hit(value(m)) ? b : a) = m;
        }
        emit(b, value(b));
      }
    }
    if (after < w) {
      const Value vw = value(w);
      if (hit(vw)) emit(w, vw);
    }
    after_abs_ = base_ + after;
    base_ += w;
    first_ = false;
    return out;
  }

  std::unique_ptr<Process> clone() const override { return std::make_unique<LevelCrossingProcess>(*this); }

 private:
  double level_;
  double anchor_;
  std::int64_t base_ = 0;
  std::int64_t after_abs_ = -1;
  bool first_ = true;
  std::optional<Value> boundary_out_;
};

class ZohProcess final : public Process {
 public:
  explicit ZohProcess(Value a0) : cur_(std::move(a0)) {}

  Section advance(const Section& window, Recorder*) override {
    const auto& in = window.events().events();
    const std::int64_t w = window.length().ticks();
    std::vector<ContinuousSection::Piece> pieces;
    std::int64_t prev = 0;
    auto it = in.begin();
    if (!first_ && it != in.end() && it->t.is_zero()) ++it;  // applied at the end of the previous window
    for (; it != in.end(); ++it) {
      const std::int64_t t = it->t.ticks();
      if (t > prev) pieces.push_back({prev, t, ContinuousSection::Constant{cur_}});
      prev = t;
      cur_ = it->value;
    }
    pieces.push_back({prev, w, ContinuousSection::Constant{cur_}});  // zero-length when an event sits at w
    first_ = false;
    ContinuousSection out(window.length(), std::move(pieces));
    out.set_codiscrete(true);
    return out;
  }
  std::unique_ptr<Process> clone() const override { return std::make_unique<ZohProcess>(*this); }

 private:
  Value cur_;
  bool first_ = true;
};

class CdsProcess final : public Process {
 public:
  explicit CdsProcess(std::shared_ptr<const CdsSpec> spec) : spec_(std::move(spec)), s_(spec_->s0), comp_(s_.size()) {}

  Section advance(const Section& window, Recorder*) override {
    const auto& c = window.continuous();
    const std::int64_t w = window.length().ticks();
    const std::int64_t h = spec_->step.ticks();
    std::vector<std::int64_t> grid{0};
    for (std::int64_t g = (base_ / h + 1) * h - base_; g < w; g += h) grid.push_back(g);
    for (const auto& p : c.pieces()) {
      if (p.start > 0 && p.start < w) grid.push_back(p.start);
    }
    if (w > 0) grid.push_back(w);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    std::vector<ContinuousSection::Sample> samples;
    samples.reserve(grid.size());
    samples.push_back({0, readout()});
    const std::size_t n = s_.size();
    std::vector<double> tmp(n);
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      const std::int64_t ta = grid[i];
      const std::int64_t tb = grid[i + 1];
      const auto& piece = c.pieces()[c.piece_index(Duration::from_ticks(ta))];
      const double hs = static_cast<double>(tb - ta) / Duration::kTicksPerSecond;
      const double ua = piece.at(static_cast<double>(ta)).numeric();
      const double um = piece.at(0.5 * static_cast<double>(ta + tb)).numeric();
      const double ub = piece.at(static_cast<double>(tb)).numeric();
      const auto k1 = spec_->dynamics(s_, ua);
      for (std::size_t j = 0; j < n; ++j) tmp[j] = s_[j] + 0.5 * hs * k1[j];
      const auto k2 = spec_->dynamics(tmp, um);
      for (std::size_t j = 0; j < n; ++j) tmp[j] = s_[j] + 0.5 * hs * k2[j];
      const auto k3 = spec_->dynamics(tmp, um);
      for (std::size_t j = 0; j < n; ++j) tmp[j] = s_[j] + hs * k3[j];
      const auto k4 = spec_->dynamics(tmp, ub);
      for (std::size_t j = 0; j < n; ++j) {
        // Compensated accumulation keeps long integrations of exact slopes exact.
        const double inc = hs / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        const double y = inc - comp_[j];
        const double t = s_[j] + y;
        comp_[j] = (t - s_[j]) - y;
        s_[j] = t;
        if (!std::isfinite(s_[j])) {
          throw NumericError("integrator state became non-finite",
                             static_cast<double>(base_ + tb) / Duration::kTicksPerSecond);
        }
      }
      samples.push_back({tb, readout()});
    }
    base_ += w;
    ContinuousSection out(window.length(), {{0, w, ContinuousSection::Sampled{std::move(samples)}}});
    out.set_lipschitz_bound(spec_->output_lipschitz);
    return out;
  }

  std::unique_ptr<Process> clone() const override { return std::make_unique<CdsProcess>(*this); }

 private:
  Value readout() const { return Value(spec_->readout(s_)); }

  std::shared_ptr<const CdsSpec> spec_;
  std::vector<double> s_;
  std::vector<double> comp_;
  std::int64_t base_ = 0;
};

class MapProcess final : public Process {
 public:
  MapProcess(std::shared_ptr<const std::function<double(double)>> f, std::int64_t h,
             std::shared_ptr<const std::function<std::optional<double>(std::optional<double>)>> bound)
      : f_(std::move(f)), h_(h), bound_(std::move(bound)) {}

  Section advance(const Section& window, Recorder*) override {
    const auto& c = window.continuous();
    const auto& f = *f_;
    std::vector<ContinuousSection::Piece> out;
    out.reserve(c.pieces().size());
    for (const auto& p : c.pieces()) {
      ContinuousSection::Piece q{p.start, p.end, {}};
      if (const auto* k = std::get_if<ContinuousSection::Constant>(&p.shape)) {
        q.shape = ContinuousSection::Constant{Value(f(k->value.numeric()))};
      } else if (const auto* s = std::get_if<ContinuousSection::Sampled>(&p.shape)) {
        std::vector<ContinuousSection::Sample> m;
        m.reserve(s->samples.size());
        for (const auto& x : s->samples) m.push_back({x.t, Value(f(x.v.numeric()))});
        q.shape = ContinuousSection::Sampled{std::move(m)};
      } else {
        q.shape = ContinuousSection::Sampled{resample(p, std::get<ContinuousSection::Linear>(p.shape))};
      }
      out.push_back(std::move(q));
    }
    ContinuousSection r(window.length(), std::move(out));
    r.set_lipschitz_bound((*bound_)(c.lipschitz_bound()));
    r.set_codiscrete(c.codiscrete());
    base_ += window.length().ticks();
    return r;
  }

  std::unique_ptr<Process> clone() const override { return std::make_unique<MapProcess>(*this); }

 private:
  // Samples at the anchors and the absolute grid k·h between them, keeping one
  // grid point beyond each end of the extent. The sample set depends only on
  // the piece itself, so restricting before or after the map agrees.
  std::vector<ContinuousSection::Sample> resample(const ContinuousSection::Piece& p,
                                                  const ContinuousSection::Linear& l) const {
    auto floor_grid = [&](std::int64_t local) {
      const std::int64_t abs = local + base_;
      std::int64_t g = abs >= 0 ? abs / h_ * h_ : -((-abs + h_ - 1) / h_) * h_;
      return g - base_;
    };
    auto ceil_grid = [&](std::int64_t local) {
      const std::int64_t g = floor_grid(local);
      return g == local ? g : g + h_;
    };
    const std::int64_t lo = std::max(l.a.t, floor_grid(p.start));
    const std::int64_t hi = std::min(l.b.t, ceil_grid(p.end));
    std::vector<ContinuousSection::Sample> out;
    auto push = [&](std::int64_t t) { out.push_back({t, Value((*f_)(p.at(static_cast<double>(t)).numeric()))}); };
    push(lo);
    for (std::int64_t g = ceil_grid(lo + 1); g < hi; g += h_) push(g);
    if (hi > lo) push(hi);
    return out;
  }

  std::shared_ptr<const std::function<double(double)>> f_;
  std::int64_t h_;
  std::shared_ptr<const std::function<std::optional<double>(std::optional<double>)>> bound_;
  std::int64_t base_ = 0;
};

}  // namespace

Machine filter(const ValueDomain& d, std::function<bool(const Value&)> keep) {
  auto k = std::make_shared<const std::function<bool(const Value&)>>(std::move(keep));
  return Machine("filter", BehaviorType::event(d), BehaviorType::event(d), InertiaMatrix::uniform(1, 1, Duration::zero()),
                 [k] { return std::make_unique<FilterProcess>(k); });
}

Machine periodic_sampler(Duration period, Duration phase, const ValueDomain& d) {
  if (period.is_zero() || phase >= period) throw RangeError("periodic_sampler: need 0 <= phase < period");
  return Machine("sample(" + format_seconds(period) + ")", BehaviorType::continuous(d), BehaviorType::event(d),
                 InertiaMatrix::uniform(1, 1, Duration::zero()),
                 [period, phase] { return std::make_unique<PeriodicSamplerProcess>(period, phase); });
}

Machine level_crossing_sampler(double level, double a0) {
  if (!(level > 0.0) || !std::isfinite(level)) throw RangeError("level_crossing_sampler: L must be positive");
  return Machine("level(" + encode_value(Value(level)) + ")",
                 BehaviorType::continuous(ValueDomain::real(), BehaviorType::kAnyLipschitz, true),
                 BehaviorType::event(ValueDomain::real()), InertiaMatrix::uniform(1, 1, Duration::zero()),
                 [level, a0] { return std::make_unique<LevelCrossingProcess>(level, a0); });
}

Machine zoh_reconstructor(const ValueDomain& d, Value a0) {
  if (!d.contains(a0)) throw TypeError("zoh_reconstructor: initial value outside the domain");
  return Machine("zoh", BehaviorType::event(d), BehaviorType::continuous(d, std::nullopt, true),
                 InertiaMatrix::uniform(1, 1, Duration::zero()),
                 [a0] { return std::make_unique<ZohProcess>(a0); });
}

Machine cds_machine(std::string name, CdsSpec spec) {
  if (spec.step.is_zero()) throw RangeError("cds_machine: step must be positive");
  if (!spec.dynamics || !spec.readout) throw TypeError("cds_machine: dynamics and readout are required");
  auto in = BehaviorType::continuous(ValueDomain::real(), std::nullopt, spec.input_codiscrete);
  auto out = BehaviorType::continuous(ValueDomain::real(), spec.output_lipschitz);
  auto s = std::make_shared<const CdsSpec>(std::move(spec));
  return Machine(std::move(name), in, out, InertiaMatrix::uniform(1, 1, Duration::zero()),
                 [s] { return std::make_unique<CdsProcess>(s); });
}

Machine map_continuous(std::string name, std::function<double(double)> f, BehaviorType in, BehaviorType out, Duration h,
                       std::function<std::optional<double>(std::optional<double>)> bound) {
  if (h.is_zero()) throw RangeError("map_continuous: grid step must be positive");
  if (in.kind() != BehaviorType::Kind::Continuous || out.kind() != BehaviorType::Kind::Continuous) {
    throw TypeError("map_continuous: continuous wires only");
  }
  auto fp = std::make_shared<const std::function<double(double)>>(std::move(f));
  auto bp = std::make_shared<const std::function<std::optional<double>(std::optional<double>)>>(
      bound ? std::move(bound) : [](std::optional<double>) { return std::optional<double>(); });
  const std::int64_t ht = h.ticks();
  return Machine(std::move(name), std::move(in), std::move(out), InertiaMatrix::uniform(1, 1, Duration::zero()),
                 [fp, ht, bp] { return std::make_unique<MapProcess>(fp, ht, bp); });
}

}  // namespace sheafmach
