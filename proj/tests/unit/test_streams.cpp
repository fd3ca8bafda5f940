#include <cmath>

#include "doctest.h"
#include "sheafmach/clock.hpp"
#include "sheafmach/continuous_stream.hpp"
#include "sheafmach/event_stream.hpp"
#include "sheafmach/section.hpp"
#include "sheafmach/serialize.hpp"
#include "sheafmach/tensor.hpp"

using namespace sheafmach;
using namespace sheafmach::literals;

namespace {

EventStream<std::string> traffic_light() {
  return EventStream<std::string>(60_s, {{20_s, "redToOrange"},
                                         {25_s, "orangeToGreen"},
                                         {45_s, "greenToOrange"},
                                         {50_s, "orangeToRed"}});
}

}  // namespace

TEST_CASE("event restriction keeps the inclusive window") {
  const auto e = traffic_light();
  const auto r = restrict_to(e, 15_s, 30_s);
  CHECK(r.length() == 15_s);
  REQUIRE(r.size() == 2);
  CHECK(r.events()[0] == EventStream<std::string>::Event{5_s, "redToOrange"});
  CHECK(r.events()[1] == EventStream<std::string>::Event{10_s, "orangeToGreen"});

  CHECK(restrict_to(e, 0_s, 60_s) == e);

  const auto point = restrict_to(e, 20_s, 20_s);
  CHECK(point.length() == 0_s);
  REQUIRE(point.size() == 1);
  CHECK(point.events()[0].t == 0_s);
  CHECK(point.events()[0].value == "redToOrange");

  CHECK_THROWS_AS(restrict_to(e, 30_s, 15_s), RangeError);
  CHECK_THROWS_AS(restrict_to(e, 10_s, 61_s), RangeError);
}

TEST_CASE("event streams reject unordered or out-of-window stamps") {
  using E = EventStream<int>;
  CHECK_THROWS_AS(E(2_s, {{1_s, 0}, {1_s, 1}}), RangeError);
  CHECK_THROWS_AS(E(2_s, {{3_s, 0}}), RangeError);
  CHECK_THROWS_AS(E(0_s, {{0_s, 0}, {1_s, 0}}), RangeError);
}

TEST_CASE("event gluing") {
  using E = EventStream<std::string>;
  CHECK(glue(E(2_s), E(3_s)) == E(5_s));

  const E e1(2_s, {{2_s, "x"}});
  const E e2(3_s, {{0_s, "x"}, {1_s, "y"}});
  const E g = glue(e1, e2);
  CHECK(g == E(5_s, {{2_s, "x"}, {3_s, "y"}}));
  CHECK(restrict_to(g, 0_s, 2_s) == e1);
  CHECK(restrict_to(g, 2_s, 5_s) == e2);

  CHECK_THROWS_AS(glue(e1, E(3_s)), CompatibilityError);
  CHECK_THROWS_AS(glue(e1, E(3_s, {{0_s, "z"}})), CompatibilityError);
  CHECK_THROWS_AS(glue(E(2_s), e2), CompatibilityError);
}

TEST_CASE("event splice is right-biased at the seam") {
  using E = EventStream<int>;
  E a(2_s, {{1_s, 1}, {2_s, 2}});
  a.splice(E(1_s, {{0_s, 3}}));
  CHECK(a == E(3_s, {{1_s, 1}, {2_s, 3}}));
}

TEST_CASE("map_events") {
  const EventStream<int> e(4_s, {{1_s, 2}, {3_s, -3}});
  CHECK(map_events(e, [](int x) { return x; }) == e);
  const auto c = map_events(e, [](int) { return 7; });
  CHECK(c.events()[0].value == 7);
  CHECK(c.events()[1].t == 3_s);
  CHECK(map_events(e, [](int x) { return x * x; }) == EventStream<int>(4_s, {{1_s, 4}, {3_s, 9}}));
}

TEST_CASE("continuous restriction and gluing") {
  using C = ContinuousStream<double>;
  const auto five = C::constant(5.0, 10_s);
  CHECK(restrict_to(five, 3_s, 7_s) == C::constant(5.0, 4_s));

  const auto up = C::linear(0.0, 2.0, 2_s);
  CHECK(up.eval(0.5_s) == 0.5);
  const auto tent = glue(up, C::linear(2.0, 0.0, 2_s));
  CHECK(tent.length() == 4_s);
  CHECK(tent.eval(2_s) == 2.0);
  for (int i = 0; i <= 400; ++i) {
    const double t = i * 0.01;
    const double expected = t <= 2.0 ? t : 4.0 - t;
    CHECK(tent.eval(Duration::seconds(t)) == doctest::Approx(expected).epsilon(1e-15));
  }
  CHECK_THROWS_AS(glue(up, C::constant(3.0, 1_s)), CompatibilityError);
  CHECK_THROWS_AS(five.eval(11_s), RangeError);
}

TEST_CASE("continuous split and glue round-trip exactly") {
  using C = ContinuousStream<double>;
  std::vector<std::pair<Time, double>> grid;
  for (int i = 0; i <= 100; ++i) grid.emplace_back(Duration::seconds(i * 0.1), std::sin(i * 0.1));
  const auto s = C::sampled(grid);
  for (Time cut : {0_s, 1_s, 3.05_s, 7.3333_s, 10_s}) {
    const auto a = restrict_to(s, 0_s, cut);
    const auto b = restrict_to(s, cut, 10_s);
    CHECK(glue(a, b) == s);
  }
  const auto mid = restrict_to(s, 2.5_s, 6.5_s);
  CHECK(restrict_to(mid, 1_s, 2_s) == restrict_to(s, 3.5_s, 4.5_s));
  CHECK(mid.eval(0_s) == s.eval(2.5_s));
}

TEST_CASE("zero-order hold stream keeps the right limit at jumps") {
  using C = ContinuousStream<double>;
  C z = C::constant(0.0, 1_s);
  z.splice(C::constant(5.0, 1_s));
  z.splice(C::constant(7.0, 1_s));
  CHECK(z.codiscrete());
  CHECK(z.eval(1_s) == 5.0);
  CHECK(z.eval_left(1_s) == 0.0);
  CHECK(z.eval(3_s) == 7.0);
  // A jump at the right endpoint survives restriction as a zero-length piece.
  const auto head = restrict_to(z, 0_s, 2_s);
  CHECK(head.eval(2_s) == 7.0);
  CHECK(head.eval_left(2_s) == 5.0);
  CHECK(glue(head, restrict_to(z, 2_s, 3_s)) == z);
}

TEST_CASE("lipschitz certificate checks stored points") {
  using C = ContinuousStream<double>;
  const auto up = C::linear(0.0, 2.0, 2_s);
  CHECK(up.satisfies_lipschitz(1.0));
  CHECK_FALSE(up.satisfies_lipschitz(0.9));
  C jump = C::constant(0.0, 1_s);
  jump.splice(C::constant(1.0, 1_s));
  CHECK_FALSE(jump.satisfies_lipschitz(100.0));
}

TEST_CASE("clock sections") {
  const ClockSection k(6_s, 2_s, 0.5_s);
  CHECK(k.ticks() == std::vector<Time>{0.5_s, 2.5_s, 4.5_s});
  const auto r = restrict_to(k, 2_s, 6_s);
  CHECK(r.ticks() == std::vector<Time>{0.5_s, 2.5_s});
  CHECK(r.first_tick() == 0.5_s);
  CHECK(restrict_to(k, 1_s, 2_s).tick_count() == 0);

  const ClockSection a(4_s, 2_s, 0.5_s);
  const auto g = glue(a, a);
  CHECK(g.length() == 8_s);
  CHECK(g.ticks() == std::vector<Time>{0.5_s, 2.5_s, 4.5_s, 6.5_s});
  CHECK_THROWS_AS(glue(a, ClockSection(4_s, 2_s, 1_s)), CompatibilityError);
  CHECK_THROWS_AS(ClockSection(4_s, 2_s, 2_s), RangeError);
}

TEST_CASE("binary zip and unzip") {
  using A = EventStream<std::string>;
  const A ea(3_s, {{1_s, "x"}});
  const A eb(3_s, {{2_s, "y"}});
  const auto z = zip_events(ea, eb);
  REQUIRE(z.size() == 2);
  CHECK(z.events()[0].value == TensorValue<std::string, std::string>::left("x"));
  CHECK(z.events()[1].value == TensorValue<std::string, std::string>::right("y"));
  const auto both = zip_events(ea, A(3_s, {{1_s, "y"}}));
  REQUIRE(both.size() == 1);
  CHECK(both.events()[0].value.is_both());
  CHECK(zip_events(A(3_s), A(3_s)).empty());
  CHECK(unzip_events(z) == std::pair{ea, eb});
  CHECK_THROWS_AS(zip_events(ea, A(2_s)), TypeError);
}

TEST_CASE("n-ary zip and unzip") {
  using E = EventStream<int>;
  const std::vector<E> es{E(3_s, {{1_s, 1}}), E(3_s), E(3_s, {{1_s, -1}, {2_s, 1}})};
  const auto z = zip_slots(es);
  REQUIRE(z.size() == 2);
  CHECK(z.events()[0].value.size() == 2);
  CHECK(z.events()[1].value == std::vector<Slot<int>>{{2, 1}});
  CHECK(unzip_slots(z, 3) == es);
}

TEST_CASE("section text round-trip") {
  ContinuousSection c = ContinuousSection::linear(Value(0.0), Value(1.0), 2_s);
  c.set_lipschitz_bound(0.5);
  ContinuousSection z = ContinuousSection::constant(Value(1.0), 1_s);
  z.splice(ContinuousSection::constant(Value(3.5), 1_s));
  z = restrict_to(z, 0.5_s, 1_s);
  const std::vector<Section> all{
      Section(EventSection(2_s, {{0_s, Value("a\"b")}, {1.5_s, Value(Value::Record{{0, 1}, {3, -1}})}})),
      Section(restrict_to(c, 0.25_s, 1.75_s)),
      Section(z),
      Section(ClockSection(5_s, 2_s, 1_s)),
      Section::product(1_s, {Section(EventSection(1_s)), Section(ClockSection(1_s, 2_s, std::nullopt))}),
      Section::unit(3_s)};
  for (const auto& s : all) {
    const std::string text = section_to_string(s);
    CHECK(section_from_string(text) == s);
    CHECK(section_to_string(section_from_string(text)) == text);
  }
}
