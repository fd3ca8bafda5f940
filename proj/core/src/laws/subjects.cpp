#include <cmath>

#include "sheafmach/combinators.hpp"
#include "sheafmach/laws/laws.hpp"
#include "sheafmach/neuro/neuro.hpp"
#include "sheafmach/primitives.hpp"

namespace sheafmach::laws {

namespace {

constexpr std::int64_t kMs = 1'000'000;

ContractOptions options(std::uint64_t seed, std::size_t n, double max_seconds, double lo = -3.0, double hi = 3.0) {
  ContractOptions o;
  o.n = n;
  o.seed = seed;
  o.grid = Duration::from_ticks(kMs);
  o.gen.quantum = Duration::from_ticks(kMs / 4);
  o.gen.max_length = Duration::seconds(max_seconds);
  o.gen.min_value = lo;
  o.gen.max_value = hi;
  o.gen.allow_jumps = true;
  return o;
}

}  // namespace

std::vector<ContractSubject> standard_contract_subjects(std::uint64_t seed, std::size_t n) {
  using neuro::CameraGeometry;
  const Duration h = Duration::from_ticks(kMs);
  std::vector<ContractSubject> out;
  auto add = [&](const char* label, Machine m, ContractOptions o) {
    o.seed = seed ^ (out.size() * 0x9e3779b97f4a7c15ULL);
    o.label = label;
    out.push_back({std::move(m), std::move(o)});
  };

  add("delay", delay(Duration::from_ticks(500 * kMs), BehaviorType::event(ValueDomain::text()), EventSection(Duration::from_ticks(500 * kMs))),
      options(seed, n, 3.0));
  add("filter", filter(ValueDomain::integer(), [](const Value& v) { return v.as_integer() % 2 == 0; }), options(seed, n, 3.0));
  add("periodic-sampler", periodic_sampler(Duration::from_ticks(100 * kMs), Duration::from_ticks(30 * kMs), ValueDomain::real()),
      options(seed, n, 3.0));
  add("level-crossing", level_crossing_sampler(0.5, 0.0), options(seed, n, 3.0));
  add("zoh", zoh_reconstructor(ValueDomain::real(), Value(0.0)), options(seed, n, 3.0));
  add("dds", dds_machine<std::int64_t>(
          "running-sum", ValueDomain::integer(), ValueDomain::integer(),
          [](const Value& v, const std::int64_t& s) { return s + v.as_integer(); },
          [](const std::int64_t& s) { return Value(s); }, 0),
      options(seed, n, 3.0));
  {
    CdsSpec spec;
    spec.dynamics = [](const std::vector<double>& s, double a) { return std::vector<double>{a - s[0]}; };
    spec.readout = [](const std::vector<double>& s) { return s[0]; };
    spec.s0 = {0.0};
    spec.step = h;
    spec.input_codiscrete = true;
    add("cds", cds_machine("relax", spec), options(seed, n, 3.0));
  }

  const auto geom = CameraGeometry::uniform(4);
  const double floor = 1e-6;
  add("log", neuro::log_machine(floor, h), options(seed, n, 3.0, 0.5, 3.0));
  add("polarity", neuro::polarity_machine(0.3, 0.0), options(seed, n, 3.0));
  add("pixel", neuro::pixel_machine(0.3, 0.0, floor, h), options(seed, n, 3.0, 0.5, 3.0));
  add("camera", neuro::event_camera(geom, 0.3, std::vector<double>(geom.size(), 0.0), floor, h), options(seed, n, 2.0, 0.5, 3.0));
  {
    neuro::RegulatorParams rp{1.0, 0.03, neuro::estimator_values(geom, neuro::Estimator::Mirrored, 0.0)};
    add("regulator", neuro::heading_regulator(rp, {}), options(seed, n, 3.0));
  }
  add("body", neuro::body_dynamics({1.0, 0.5, -0.5, h}), options(seed, n, 3.0));
  const auto refl = neuro::ReflectanceMap::fourier(2.0, {1.0}, {}, floor);
  add("scene", neuro::observed_scene(geom, refl, 1.0, h), options(seed, n, 3.0));
  {
    neuro::LoopParams lp;
    lp.geometry = geom;
    lp.reflectance = refl;
    lp.contrast = 0.03;
    lp.regulator = {1.0, 0.03, neuro::estimator_values(geom, neuro::Estimator::Mirrored, 0.0)};
    lp.body = {1.0, 0.5, -0.5, h};
    auto o = options(seed, n, 0.5);
    o.step_hints = {lp.loop_delay};
    add("closed-loop", neuro::closed_loop(lp), o);
  }
  return out;
}

}  // namespace sheafmach::laws
