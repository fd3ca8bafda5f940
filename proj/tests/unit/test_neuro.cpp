#include <cmath>

#include "doctest.h"
#include "sheafmach/combinators.hpp"
#include "sheafmach/neuro/neuro.hpp"
#include "sheafmach/primitives.hpp"

using namespace sheafmach;
using namespace sheafmach::literals;
using namespace sheafmach::neuro;

namespace {

constexpr double kPi = 3.14159265358979323846;
const Duration kMs = Duration::from_ticks(1'000'000);

// f sampled every millisecond over [0, len], with a Lipschitz certificate k.
ContinuousSection grid_of(double (*f)(double), Duration len, double k) {
  std::vector<std::pair<Time, Value>> pts;
  for (std::int64_t i = 0; i * kMs.ticks() <= len.ticks(); ++i) {
    const Time t = Duration::from_ticks(i * kMs.ticks());
    pts.emplace_back(t, Value(f(t.to_seconds())));
  }
  auto c = ContinuousSection::sampled(pts);
  c.set_lipschitz_bound(k);
  return c;
}

EventSection ev(Duration len, std::vector<std::pair<Duration, Value>> xs) {
  EventSection e(len);
  for (auto& [t, v] : xs) e.push_back(t, v);
  return e;
}

std::vector<std::pair<double, std::int64_t>> polarities(const Section& s) {
  std::vector<std::pair<double, std::int64_t>> out;
  for (const auto& e : s.events().events()) out.emplace_back(e.t.to_seconds(), e.value.as_integer());
  return out;
}

ContinuousSection bounded_constant(double v, Duration len, double k = 0.0) {
  auto c = ContinuousSection::constant(v, len);
  c.set_lipschitz_bound(k);
  return c;
}

}  // namespace

TEST_CASE("log machine") {
  const auto lg = log_machine(1e-6, kMs);
  CHECK(run(lg, bounded_constant(1.0, 2_s), 0.5_s).output.continuous().eval(1_s) == Value(0.0));
  const auto e1 = run(lg, bounded_constant(std::exp(1.0), 2_s), 0.5_s).output.continuous();
  for (double t : {0.0, 0.7, 2.0}) CHECK(e1.eval(Duration::seconds(t)).as_real() == doctest::Approx(1.0).epsilon(1e-15));

  // Linear 1 -> e^2 over one second.
  auto ramp = ContinuousSection::linear(1.0, std::exp(2.0), 1_s);
  ramp.set_lipschitz_bound(std::exp(2.0) - 1.0);
  const auto out = run(lg, ramp, 0.25_s).output.continuous();
  for (std::int64_t i = 0; i <= 1000; ++i) {
    const Time t = Duration::from_ticks(i * kMs.ticks());
    const double x = 1.0 + (std::exp(2.0) - 1.0) * t.to_seconds();
    CHECK(std::abs(out.eval(t).as_real() - std::log(x)) <= 1e-12);
  }
  CHECK(out.lipschitz_bound() == doctest::Approx((std::exp(2.0) - 1.0) / 1e-6));

  CHECK_THROWS_AS(run(lg, bounded_constant(0.0, 1_s), 1_s), DomainError);
}

TEST_CASE("pixel: exponential intensity fires once per unit of log-brightness") {
  const auto px = pixel_machine(1.0, 0.0, 1e-6, kMs);
  const auto up = run(px, grid_of([](double t) { return std::exp(t); }, 3_s, std::exp(3.0)), 0.1_s).output;
  const auto ups = polarities(up);
  REQUIRE(ups.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(std::abs(ups[i].first - static_cast<double>(i + 1)) <= 1e-6);
    CHECK(ups[i].second == 1);
  }
  const auto down = run(px, grid_of([](double t) { return std::exp(-t); }, 3_s, 1.0), 0.1_s).output;
  const auto downs = polarities(down);
  REQUIRE(downs.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(std::abs(downs[i].first - static_cast<double>(i + 1)) <= 1e-6);
    CHECK(downs[i].second == -1);
  }
  CHECK(run(px, bounded_constant(2.0, 3_s), 1_s).output.events().empty());
}

TEST_CASE("pixel composite equals manual chaining") {
  const double c = 0.2;
  const auto x = grid_of([](double t) { return 2.0 + std::sin(3.0 * t); }, 4_s, 3.0);
  const auto lg = log_machine(1e-6, kMs);
  const auto a = run(lg, x, 0.1_s).output;
  const auto b = run(level_crossing_sampler(c, std::log(2.0)), a, 0.1_s).output;
  const auto p = run(polarity_machine(c, std::log(2.0)), b, 0.1_s).output;
  CHECK(run(pixel_machine(c, std::log(2.0), 1e-6, kMs), x, 0.1_s).output == p);
  // Polarity is the sign of the change since the previous anchor.
  double anchor = std::log(2.0);
  const auto& crossings = b.events().events();
  REQUIRE(crossings.size() == p.events().size());
  REQUIRE(!crossings.empty());
  for (std::size_t i = 0; i < crossings.size(); ++i) {
    const double r = crossings[i].value.as_real();
    CHECK(p.events().events()[i].value.as_integer() == (r > anchor ? 1 : -1));
    // One tick of the steepest log-brightness slope, sqrt(3) per second.
    CHECK(std::abs(std::abs(r - anchor) - c) <= std::sqrt(3.0) * 1e-9);
    anchor = r;
  }
}

TEST_CASE("polarity machine keeps state below the contrast") {
  const auto pm = polarity_machine(0.5, 0.0);
  const auto in = ev(4_s, {{1_s, 0.5}, {2_s, 0.7}, {3_s, 0.1}});
  const auto out = polarities(run(pm, in, 1_s).output);
  REQUIRE(out.size() == 3);
  CHECK(out[0].second == 1);
  CHECK(out[1].second == 1);   // |0.2| < C: previous polarity repeated
  CHECK(out[2].second == -1);  // 0.1 - 0.7 <= -C
}

TEST_CASE("event camera") {
  const auto geom = CameraGeometry::uniform(3);
  const auto cam = event_camera(geom, 0.3, {0.0, 0.0, 0.0}, 1e-6, kMs);
  auto c1 = bounded_constant(1.0, 3_s);
  SUBCASE("constant light is silent") {
    const auto in = Section::product(3_s, {c1, c1, c1});
    CHECK(run(cam, in, 0.5_s).output.events().empty());
  }
  SUBCASE("a single crossing pixel") {
    const auto ramp = grid_of([](double t) { return std::exp(0.5 * t); }, 3_s, 3.0);
    const auto in = Section::product(3_s, {c1, ramp, c1});
    const auto out = run(cam, in, 0.5_s).output.events();
    REQUIRE(out.size() == 5);  // log-brightness 1.5 with C = 0.3
    for (const auto& e : out.events()) {
      REQUIRE(e.value.as_record().size() == 1);
      CHECK(e.value.as_record()[0].slot == 1);
      CHECK(e.value.as_record()[0].value == Value(1));
    }
    // Factorization: unzipped output equals per-pixel runs.
    const auto per = unzip_records(out, 3);
    const auto px = pixel_machine(0.3, 0.0, 1e-6, kMs);
    CHECK(Section(per[1]) == run(px, ramp, 0.5_s).output);
    CHECK(per[0].empty());
    CHECK(per[2].empty());
  }
  SUBCASE("identical inputs fire together") {
    const auto wave = grid_of([](double t) { return 2.0 + std::cos(2.0 * t); }, 3_s, 2.0);
    const auto in = Section::product(3_s, {wave, c1, wave});
    const auto out = run(cam, in, 0.5_s).output.events();
    REQUIRE(!out.empty());
    for (const auto& e : out.events()) {
      const auto& rec = e.value.as_record();
      REQUIRE(rec.size() == 2);
      CHECK(rec[0].slot == 0);
      CHECK(rec[1].slot == 2);
      CHECK(rec[0].value == rec[1].value);
    }
  }
}

TEST_CASE("heading regulator") {
  auto fire = [](std::size_t pixel) { return Value(Value::Record{{pixel, Value(1)}}); };
  SUBCASE("no events") {
    const auto reg = heading_regulator({1.0, 2.0, {0.5, 0.0}}, {});
    CHECK(run(reg, EventSection(3_s), 1_s).output.events().empty());
  }
  SUBCASE("direct evaluation") {
    const auto reg = heading_regulator({1.0, 2.0, {0.5, 0.0}}, {0.0, 0.0});
    const auto out = run(reg, ev(3_s, {{1_s, fire(0)}}), 1_s).output.events();
    REQUIRE(out.size() == 1);
    CHECK(out.events()[0].t == 1_s);
    CHECK(out.events()[0].value.as_real() == doctest::Approx(-1.0).epsilon(1e-15));
  }
  SUBCASE("pure decay") {
    const auto reg = heading_regulator({1.0, 2.0, {0.0, 0.0}}, {0.0, 4.0});
    const auto out = run(reg, ev(3_s, {{1_s, fire(0)}, {2_s, fire(1)}}), 0.3_s).output.events();
    REQUIRE(out.size() == 2);
    CHECK(out.events()[0].value.as_real() == doctest::Approx(4.0 * std::exp(-1.0)).epsilon(1e-14));
    CHECK(out.events()[1].value.as_real() == doctest::Approx(4.0 * std::exp(-2.0)).epsilon(1e-14));
  }
  SUBCASE("decay law between consecutive events") {
    const auto reg = heading_regulator({0.7, 1.0, {0.0, 0.0}}, {0.0, -3.0});
    const auto out = run(reg, ev(5_s, {{0.4_s, fire(1)}, {1.5_s, fire(0)}, {4.25_s, fire(1)}}), 1_s).output.events();
    const auto& e = out.events();
    REQUIRE(e.size() == 3);
    for (std::size_t i = 1; i < e.size(); ++i) {
      const double dt = (e[i].t - e[i - 1].t).to_seconds();
      CHECK(e[i].value.as_real() == doctest::Approx(std::exp(-0.7 * dt) * e[i - 1].value.as_real()).epsilon(1e-14));
    }
  }
  SUBCASE("a record firing several pixels decays once") {
    const auto reg = heading_regulator({1.0, 1.0, {0.25, 0.5}}, {0.0, 1.0});
    Value both(Value::Record{{0, Value(1)}, {1, Value(-1)}});
    const auto out = run(reg, ev(2_s, {{1_s, both}}), 1_s).output.events();
    CHECK(out.events()[0].value.as_real() == doctest::Approx(std::exp(-1.0) - 0.75).epsilon(1e-14));
  }
}

TEST_CASE("body dynamics") {
  SUBCASE("no control keeps the heading") {
    const auto body = body_dynamics({1.0, 0.25, 0.0, kMs});
    const auto th = run(body, EventSection(2_s), 0.5_s).output.continuous();
    CHECK(th.eval(2_s) == Value(0.25));
  }
  SUBCASE("saturated slope") {
    const auto body = body_dynamics({1.0, 0.0, 0.0, kMs});
    const auto th = run(body, ev(3_s, {{0_s, 2.0}}), 0.5_s).output.continuous();
    CHECK(std::abs(th.eval(3_s).as_real() - 3.0) <= 1e-12);
    for (double t : {0.5, 1.2345, 2.0}) CHECK(std::abs(th.eval(Duration::seconds(t)).as_real() - t) <= 1e-12);
  }
  SUBCASE("piecewise linear") {
    const auto body = body_dynamics({1.0, 0.0, 0.0, kMs});
    const auto th = run(body, ev(2_s, {{0_s, 0.5}, {1_s, -0.5}}), 0.5_s).output.continuous();
    CHECK(std::abs(th.eval(1_s).as_real() - 0.5) <= 1e-12);
    CHECK(std::abs(th.eval(2_s).as_real()) <= 1e-12);
    CHECK(std::abs(th.eval(1.5_s).as_real() - 0.25) <= 1e-12);
  }
  SUBCASE("Lipschitz in b") {
    const auto body = body_dynamics({0.8, 0.0, 0.3, kMs});
    const auto th = run(body, ev(3_s, {{0.5_s, -4.0}, {1.25_s, 0.1}, {2_s, 3.0}}), 0.25_s).output.continuous();
    CHECK(th.satisfies_lipschitz(0.8));
    CHECK(th.lipschitz_bound() == 0.8);
  }
}

TEST_CASE("observed scene") {
  const auto m = ReflectanceMap::fourier(2.0, {1.0}, {}, 1e-6);
  SUBCASE("constant heading gives constant intensities") {
    const auto geom = CameraGeometry::uniform(4);
    const auto out = run(observed_scene(geom, m, 1.0, kMs), bounded_constant(0.3, 2_s), 0.5_s).output;
    for (std::size_t i = 0; i < 4; ++i) {
      const auto& c = out.parts()[i].continuous();
      CHECK(c.eval(1.3_s).as_real() == doctest::Approx(2.0 + std::cos(0.3 + geom.dirs[i])).epsilon(1e-15));
      CHECK(c.pieces().size() == 1);
    }
  }
  SUBCASE("one pixel along a ramp") {
    CameraGeometry one{{0.0}};
    const Duration len = Duration::seconds(kPi);
    auto theta = ContinuousSection::linear(0.0, len.to_seconds(), len);
    theta.set_lipschitz_bound(1.0);
    const auto out = run(observed_scene(one, m, 1.0, kMs), theta, 0.1_s).output;
    const auto& c = out.parts()[0].continuous();
    for (std::int64_t i = 0; i * kMs.ticks() <= len.ticks(); ++i) {
      const Time t = Duration::from_ticks(i * kMs.ticks());
      CHECK(std::abs(c.eval(t).as_real() - (2.0 + std::cos(t.to_seconds()))) <= 1e-12);
    }
    CHECK(c.lipschitz_bound() == doctest::Approx(1.0));
  }
  SUBCASE("opposite pixels under an even map are reflections") {
    CameraGeometry two{{0.0, kPi}};
    const auto theta = grid_of([](double t) { return std::sin(t); }, 2_s, 1.0);
    const auto out = run(observed_scene(two, m, 1.0, kMs), theta, 0.25_s).output;
    const auto theta_ref = grid_of([](double t) { return -std::sin(t); }, 2_s, 1.0);
    const auto refl = run(observed_scene(two, m, 1.0, kMs), theta_ref, 0.25_s).output;
    for (double t : {0.0, 0.5, 1.0, 1.7}) {
      const Time x = Duration::seconds(t);
      // m even: m(θ + π) at heading θ equals m(-θ + π) at the mirrored heading.
      CHECK(out.parts()[1].continuous().eval(x).as_real() ==
            doctest::Approx(refl.parts()[1].continuous().eval(x).as_real()).epsilon(1e-14));
      CHECK(out.parts()[0].continuous().eval(x).as_real() ==
            doctest::Approx(refl.parts()[0].continuous().eval(x).as_real()).epsilon(1e-14));
    }
  }
}

TEST_CASE("reflectance maps") {
  const auto m = ReflectanceMap::fourier(2.0, {1.0, 0.0}, {0.0, 0.5}, 1e-6);
  CHECK(m(0.0) == doctest::Approx(3.0));
  CHECK(m(2 * kPi + 0.4) == doctest::Approx(m(0.4)));
  CHECK(m.lipschitz() == doctest::Approx(2.0));
  const auto t = ReflectanceMap::table({1.0, 2.0, 3.0, 2.0}, 1e-6);
  CHECK(t(0.0) == doctest::Approx(1.0));
  CHECK(t(kPi / 2) == doctest::Approx(2.0));
  CHECK(t(kPi / 4) == doctest::Approx(1.5));
  CHECK(ReflectanceMap::fourier(0.0, {1.0}, {}, 0.1)(kPi) == doctest::Approx(0.1));
  CHECK(wrap_angle(3 * kPi / 2) == doctest::Approx(-kPi / 2));
  CHECK(wrap_angle(kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(-kPi) == doctest::Approx(kPi));
}

TEST_CASE("closed loop") {
  SUBCASE("constant scene is silent and the heading holds") {
    LoopParams p;
    p.geometry = CameraGeometry::uniform(16);
    p.reflectance = ReflectanceMap::constant(1.5, 1e-6);
    p.regulator = {1.0, 1.0, estimator_values(p.geometry, Estimator::GoalRelative, 0.0)};
    p.body = {1.0, 0.5, 0.0, kMs};
    const auto r = run_closed_loop(p, 10_s);
    CHECK(pixel_events(r).empty());
    const auto& th = r.state_trace.at("theta").continuous();
    CHECK(th.eval(10_s) == Value(0.5));
    CHECK(th.eval(3.3_s) == Value(0.5));
  }
  SUBCASE("the loop wire agrees with the fed-back output") {
    LoopParams p;
    p.geometry = CameraGeometry::uniform(8);
    p.reflectance = ReflectanceMap::fourier(2.0, {1.0}, {}, 1e-6);
    p.contrast = 0.03;
    p.regulator = {1.0, 0.03, estimator_values(p.geometry, Estimator::Mirrored, 0.0)};
    p.body = {1.0, 0.5, -0.5, kMs};
    const auto r = run_closed_loop(p, 3_s);
    const auto& loop = r.state_trace.at("loop").events();
    const auto& reg = r.state_trace.at("regulator").events();
    // The loop wire is the regulator output delayed by ε.
    CHECK(Section(loop) == run(delay(p.loop_delay, BehaviorType::event(ValueDomain::real()), EventSection(p.loop_delay)),
                               reg, 0.5_s)
                               .output);
    CHECK(!pixel_events(r).empty());
    // Identical parameters reproduce the run exactly.
    CHECK(run_closed_loop(p, 3_s) == r);
  }
}

TEST_CASE("estimators") {
  const auto g = CameraGeometry::uniform(4);
  const auto gr = estimator_values(g, Estimator::GoalRelative, 0.0);
  const auto mi = estimator_values(g, Estimator::Mirrored, 0.0);
  CHECK(gr[1] == doctest::Approx(kPi / 2));
  CHECK(mi[1] == doctest::Approx(-kPi / 2));
  CHECK(gr[2] == doctest::Approx(kPi));
  CHECK(std::abs(mi[2]) == doctest::Approx(kPi));
}
