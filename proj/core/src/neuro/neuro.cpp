#include "sheafmach/neuro/neuro.hpp"

#include <algorithm>
#include <cmath>

#include "sheafmach/combinators.hpp"
#include "sheafmach/errors.hpp"
#include "sheafmach/primitives.hpp"

namespace sheafmach::neuro {

CameraGeometry CameraGeometry::uniform(std::size_t n) {
  CameraGeometry g;
  for (std::size_t i = 0; i < n; ++i) g.dirs.push_back(2.0 * M_PI * static_cast<double>(i) / static_cast<double>(n));
  return g;
}

ValueDomain firing_domain(std::size_t n) {
  return ValueDomain::tensor(std::vector<ValueDomain>(n, ValueDomain::polarity()));
}

double sat(double b, double u) { return std::clamp(u, -b, b); }

Machine log_machine(double floor, Duration h) {
  if (!(floor > 0.0)) throw DomainError("log_machine: floor must be positive");
  const auto any = BehaviorType::continuous(ValueDomain::real(), BehaviorType::kAnyLipschitz, true);
  return map_continuous(
      "log",
      [floor](double x) {
        if (!(x >= floor)) throw DomainError("log_machine: input below the floor");
        return std::log(x);
      },
      any, any, h,
      [floor](std::optional<double> k) -> std::optional<double> {
        if (!k) return std::nullopt;
        return *k / floor;
      });
}

namespace {
struct PolarityState {
  double r = 0.0;
  std::int64_t q = 1;
};
}  // namespace

Machine polarity_machine(double contrast, double r0) {
  if (!(contrast > 0.0)) throw DomainError("contrast must be positive");
  return dds_machine<PolarityState>(
      "polarity", ValueDomain::real(), ValueDomain::polarity(),
      [contrast](const Value& v, const PolarityState& s) {
        const double r = v.as_real();
        const double dr = r - s.r;
        if (reaches(dr, contrast)) return PolarityState{r, 1};
        if (reaches(-dr, contrast)) return PolarityState{r, -1};
        return PolarityState{r, s.q};
      },
      [](const PolarityState& s) { return Value(s.q); }, PolarityState{r0, 1});
}

Machine pixel_machine(double contrast, double r0, double floor, Duration h) {
  if (!(contrast > 0.0)) throw DomainError("contrast must be positive");
  return compose_series({log_machine(floor, h), level_crossing_sampler(contrast, r0), polarity_machine(contrast, r0)});
}

Machine event_camera(const CameraGeometry& geom, double contrast, const std::vector<double>& r0, double floor,
                     Duration h) {
  if (geom.size() == 0) throw DomainError("event_camera: empty pixel set");
  if (r0.size() != geom.size()) throw DomainError("event_camera: one initial brightness per pixel required");
  std::vector<Machine> pixels;
  pixels.reserve(geom.size());
  for (std::size_t s = 0; s < geom.size(); ++s) pixels.push_back(pixel_machine(contrast, r0[s], floor, h));
  return tensor_parallel(pixels);
}

Machine heading_regulator(const RegulatorParams& p, RegulatorState x0) {
  if (!(p.decay > 0.0) || !(p.gain > 0.0)) throw DomainError("regulator: a and κ must be positive");
  const double a = p.decay;
  const double k = p.gain;
  const auto f = p.estimate;
  return timed_dds_machine<RegulatorState>(
      "regulator", firing_domain(f.size()), ValueDomain::real(),
      [a, k, f](double t, const Value& rec, const RegulatorState& x) {
        double sum = 0.0;
        for (const auto& e : rec.as_record()) sum += f.at(e.slot);
        return RegulatorState{t, std::exp(-a * (t - x.last_time)) * x.statistic - (k / a) * sum};
      },
      [](const RegulatorState& x) { return Value(x.statistic); }, x0);
}

Machine body_dynamics(const BodyParams& p) {
  if (!(p.saturation > 0.0)) throw DomainError("body: saturation bound must be positive");
  const double b = p.saturation;
  CdsSpec spec;
  spec.dynamics = [b](const std::vector<double>&, double u) { return std::vector<double>{sat(b, u)}; };
  spec.readout = [](const std::vector<double>& s) { return s[0]; };
  spec.s0 = {p.theta0};
  spec.step = p.h;
  spec.output_lipschitz = b;
  return compose_series(zoh_reconstructor(ValueDomain::real(), Value(p.u0)).labeled("u_zoh"),
                        cds_machine("integrator", std::move(spec)));
}

Machine observed_scene(const CameraGeometry& geom, const ReflectanceMap& m, double theta_bound, Duration h) {
  const auto in = BehaviorType::continuous(ValueDomain::real(), theta_bound);
  const double k = m.lipschitz() * theta_bound;
  const auto out = BehaviorType::continuous(ValueDomain::real(), k);
  std::vector<Machine> views;
  views.reserve(geom.size());
  for (std::size_t s = 0; s < geom.size(); ++s) {
    const double dir = geom.dirs[s];
    views.push_back(map_continuous(
        "view" + std::to_string(s), [m, dir](double theta) { return m(theta + dir); }, in, out, h,
        [km = m.lipschitz()](std::optional<double> kt) -> std::optional<double> {
          if (!kt) return std::nullopt;
          return km * *kt;
        }));
  }
  return compose_series(broadcast(in, geom.size()), tensor_parallel(views));
}

std::vector<double> estimator_values(const CameraGeometry& geom, Estimator kind, double theta_goal) {
  std::vector<double> f;
  f.reserve(geom.size());
  for (double d : geom.dirs) {
    switch (kind) {
      case Estimator::GoalRelative:
        f.push_back(wrap_angle(d - theta_goal));
        break;
      case Estimator::Mirrored:
        f.push_back(wrap_angle(-d - theta_goal));
        break;
      case Estimator::Table:
        throw DomainError("estimator_values: table estimators are given explicitly");
    }
  }
  return f;
}

Machine closed_loop(const LoopParams& p) {
  const auto& g = p.geometry;
  if (p.regulator.estimate.size() != g.size()) throw DomainError("closed_loop: one estimate per pixel required");
  std::vector<double> r0;
  r0.reserve(g.size());
  for (double d : g.dirs) r0.push_back(std::log(p.reflectance(p.body.theta0 + d)));
  const auto control = BehaviorType::event(ValueDomain::real());
  const Machine chain = compose_series({
      body_dynamics(p.body).labeled("theta"),
      observed_scene(g, p.reflectance, p.body.saturation, p.body.h).labeled("intensity"),
      event_camera(g, p.contrast, r0, p.reflectance.floor(), p.body.h).labeled("camera"),
      heading_regulator(p.regulator, RegulatorState{}).labeled("regulator"),
      delay(p.loop_delay, control, EventSection(p.loop_delay)),
  });
  return trace_feedback(chain, control, EventSection(Duration::zero()));
}

RunRecord run_closed_loop(const LoopParams& p, Duration duration) {
  return run(closed_loop(p), Section::unit(duration), p.loop_delay);
}

std::vector<TraceRow> sample_trace(const RunRecord& r, Duration interval, double statistic0) {
  if (interval.is_zero()) throw RangeError("sample_trace: interval must be positive");
  const auto& theta = r.state_trace.at("theta").continuous();
  const auto& u = r.state_trace.at("u_zoh").continuous();
  const auto& cam = r.state_trace.at("camera").events().events();
  const auto& reg = r.state_trace.at("regulator").events().events();
  std::vector<TraceRow> rows;
  std::size_t ci = 0;
  std::size_t ri = 0;
  double stat = statistic0;
  for (Time t = Time::zero(); t <= r.length; t += interval) {
    std::size_t n = 0;
    while (ci < cam.size() && cam[ci].t <= t) {
      ++n;
      ++ci;
    }
    while (ri < reg.size() && reg[ri].t <= t) stat = reg[ri++].value.as_real();
    rows.push_back(TraceRow{t, theta.eval(t).as_real(), u.eval(t).numeric(), n, stat});
  }
  return rows;
}

std::vector<PixelEvent> pixel_events(const RunRecord& r) {
  std::vector<PixelEvent> out;
  for (const auto& e : r.state_trace.at("camera").events().events()) {
    for (const auto& s : e.value.as_record()) {
      out.push_back(PixelEvent{e.t, s.slot, static_cast<int>(s.value.as_integer())});
    }
  }
  return out;
}

}  // namespace sheafmach::neuro
