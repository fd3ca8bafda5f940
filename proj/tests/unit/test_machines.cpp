#include <cmath>

#include "doctest.h"
#include "sheafmach/combinators.hpp"
#include "sheafmach/primitives.hpp"

using namespace sheafmach;
using namespace sheafmach::literals;

namespace {

EventSection ev(Duration len, std::vector<std::pair<Duration, Value>> xs) {
  EventSection e(len);
  for (auto& [t, v] : xs) e.push_back(t, v);
  return e;
}

ContinuousSection with_bound(ContinuousSection c, double k) {
  c.set_lipschitz_bound(k);
  return c;
}

const auto kReal = ValueDomain::real();
const auto kText = ValueDomain::text();

}  // namespace

TEST_CASE("filter") {
  const auto e = ev(4_s, {{1_s, 1}, {2_s, -1}, {3_s, 1}});
  const auto pol = ValueDomain::polarity();
  CHECK(run(filter(pol, [](const Value&) { return true; }), e, 1_s).output == Section(e));
  CHECK(run(filter(pol, [](const Value&) { return false; }), e, 1_s).output == Section(EventSection(4_s)));
  const auto plus = filter(pol, [](const Value& v) { return v.as_integer() == 1; });
  CHECK(run(plus, e, 0.7_s).output == Section(ev(4_s, {{1_s, 1}, {3_s, 1}})));
}

TEST_CASE("delay shifts by ε") {
  const auto d = delay(0.5_s, BehaviorType::event(kText), EventSection(0.5_s));
  CHECK(d.inertiality() == 0.5_s);
  const auto in = ev(3_s, {{1_s, "x"}});
  CHECK(run(d, in, 0.25_s).output == Section(ev(3_s, {{1.5_s, "x"}})));
  CHECK(run(d, in, 3_s).output == Section(ev(3_s, {{1.5_s, "x"}})));

  const auto in2 = ev(3_s, {{0_s, "a"}, {1.2_s, "b"}, {2.5_s, "c"}, {3_s, "d"}});
  const auto out = run(d, in2, 0.3_s).output;
  CHECK(restrict_to(out, 0.5_s, 3_s) == restrict_to(Section(in2), 0_s, 2.5_s));

  const auto cont = BehaviorType::continuous(kReal);
  const auto dc = delay(1_s, cont, ContinuousSection::constant(2.0, 1_s));
  CHECK(run(dc, ContinuousSection::constant(2.0, 5_s), 0.5_s).output == Section(ContinuousSection::constant(2.0, 5_s)));

  CHECK_THROWS_AS(delay(0.5_s, BehaviorType::event(kText), EventSection(1_s)), RangeError);
  CHECK_THROWS_AS(delay(0_s, BehaviorType::event(kText), EventSection(0_s)), RangeError);
}

TEST_CASE("periodic sampler") {
  const auto s = periodic_sampler(2_s, 0.5_s, kReal);
  CHECK(run(s, ContinuousSection::constant(7.0, 6_s), 1_s).output ==
        Section(ev(6_s, {{0.5_s, 7.0}, {2.5_s, 7.0}, {4.5_s, 7.0}})));
  CHECK(run(s, ContinuousSection::constant(7.0, 0.3_s), 1_s).output == Section(EventSection(0.3_s)));
  const auto z = periodic_sampler(2_s, 0_s, kReal);
  CHECK(run(z, ContinuousSection::linear(0.0, 6.0, 6_s), 0.5_s).output ==
        Section(ev(6_s, {{0_s, 0.0}, {2_s, 2.0}, {4_s, 4.0}, {6_s, 6.0}})));
}

TEST_CASE("level-crossing sampler") {
  const auto lc = level_crossing_sampler(1.0, 0.0);
  const auto ramp = with_bound(ContinuousSection::linear(0.0, 5.0, 5_s), 1.0);
  for (Duration h : {5_s, 1_s, 0.3_s, 0.001_s}) {
    CHECK(run(lc, ramp, h).output == Section(ev(5_s, {{1_s, 1.0}, {2_s, 2.0}, {3_s, 3.0}, {4_s, 4.0}, {5_s, 5.0}})));
  }
  CHECK(run(lc, with_bound(ContinuousSection::constant(0.0, 5_s), 0.0), 1_s).output == Section(EventSection(5_s)));

  std::vector<std::pair<Time, Value>> sine;
  for (int i = 0; i <= 1000; ++i) {
    const Time t = Duration::from_ticks(static_cast<Duration::rep>(std::llround(M_PI * 1e9 * i / 1000)));
    sine.emplace_back(t, std::sin(t.to_seconds()));
  }
  const auto wave = with_bound(ContinuousSection::sampled(sine), 1.0);
  CHECK(run(level_crossing_sampler(2.0, 0.0), wave, 0.1_s).output.events().empty());

  CHECK_THROWS_AS(run(lc, ContinuousSection::linear(0.0, 5.0, 5_s), 1_s), TypeError);
  CHECK_THROWS_AS(level_crossing_sampler(0.0, 0.0), RangeError);
}

TEST_CASE("zero-order hold") {
  const auto z = zoh_reconstructor(kReal, 0.0);
  const auto in = ev(3_s, {{1_s, 5.0}, {2_s, 7.0}});
  for (Duration h : {3_s, 1_s, 0.4_s}) {
    const auto out = run(z, in, h).output.continuous();
    CHECK(out.codiscrete());
    CHECK(out.eval(0.5_s) == Value(0.0));
    CHECK(out.eval(1_s) == Value(5.0));
    CHECK(out.eval_left(2_s) == Value(5.0));
    CHECK(out.eval(2_s) == Value(7.0));
    CHECK(out.eval(3_s) == Value(7.0));
    CHECK(out.pieces().size() == 3);
  }
  CHECK(run(z, EventSection(3_s), 1_s).output.continuous() ==
        ContinuousSection::constant(0.0, 3_s).set_codiscrete(true));

  // Reconstruct, then read back at the original event times.
  const auto out = run(z, in, 1_s).output.continuous();
  for (const auto& e : in.events()) CHECK(out.eval(e.t) == e.value);
}

TEST_CASE("DDS") {
  const auto keep = dds_machine<std::int64_t>(
      "keep", kReal, ValueDomain::integer(), [](const Value&, const std::int64_t& s) { return s; },
      [](const std::int64_t& s) { return Value(s); }, 9);
  const auto in = ev(4_s, {{1_s, 0.5}, {2_s, 1.5}, {4_s, 2.5}});
  CHECK(run(keep, in, 1_s).output == Section(ev(4_s, {{1_s, 9}, {2_s, 9}, {4_s, 9}})));

  const auto counter = dds_machine<std::int64_t>(
      "count", kReal, ValueDomain::integer(), [](const Value&, const std::int64_t& s) { return s + 1; },
      [](const std::int64_t& s) { return Value(s); }, 0);
  for (Duration h : {4_s, 1_s, 0.5_s}) {
    CHECK(run(counter, in, h).output == Section(ev(4_s, {{1_s, 1}, {2_s, 2}, {4_s, 3}})));
  }
}

TEST_CASE("CDS integrator") {
  CdsSpec still{[](const std::vector<double>&, double) { return std::vector<double>{0.0}; },
                [](const std::vector<double>& s) { return 2.0 * s[0]; }, {1.5}, Duration::seconds(1e-3), {}, true};
  const auto out = run(cds_machine("still", still), ContinuousSection::constant(0.0, 1_s), 0.1_s).output.continuous();
  for (const auto& [t, v] : out.points()) CHECK(v == Value(3.0));

  CdsSpec integrate{[](const std::vector<double>&, double a) { return std::vector<double>{a}; },
                    [](const std::vector<double>& s) { return s[0]; }, {0.0}, Duration::seconds(1e-3), {}, true};
  const auto s2 = run(cds_machine("int", integrate), ContinuousSection::constant(1.0, 2_s), 0.1_s).output.continuous();
  CHECK(std::fabs(s2.eval(2_s).as_real() - 2.0) < 1e-15);

  CdsSpec decay{[](const std::vector<double>& s, double) { return std::vector<double>{-s[0]}; },
                [](const std::vector<double>& s) { return s[0]; }, {1.0}, Duration::seconds(1e-3), {}, true};
  const auto s3 = run(cds_machine("decay", decay), ContinuousSection::constant(0.0, 1_s), 0.25_s).output.continuous();
  CHECK(std::fabs(s3.eval(1_s).as_real() - std::exp(-1.0)) < 1e-9);

  CdsSpec blow{[](const std::vector<double>& s, double) { return std::vector<double>{s[0] * s[0]}; },
               [](const std::vector<double>& s) { return s[0]; }, {1.0}, Duration::seconds(1e-2), {}, true};
  try {
    run(cds_machine("blow", blow), ContinuousSection::constant(0.0, 3_s), 1_s);
    FAIL("expected divergence");
  } catch (const NumericError& e) {
    CHECK(e.blow_up_time() > 0.9);
    CHECK(e.blow_up_time() < 1.5);
  }
}

TEST_CASE("series composition") {
  const auto pass = filter(kText, [](const Value&) { return true; });
  const auto d = delay(0.5_s, BehaviorType::event(kText), EventSection(0.5_s));
  const auto in = ev(3_s, {{0_s, "a"}, {1_s, "x"}, {2.75_s, "y"}});
  const auto direct = run(d, in, 0.2_s).output;
  CHECK(run(compose_series(pass, d), in, 0.2_s).output == direct);
  CHECK(run(compose_series(d, pass), in, 0.2_s).output == direct);
  CHECK(compose_series(d, d).inertiality() == 1_s);
  CHECK(run(compose_series(d, d), in, 0.2_s).output == run(delay(1_s, BehaviorType::event(kText), EventSection(1_s)), in, 0.2_s).output);
  CHECK_THROWS_AS(compose_series(pass, zoh_reconstructor(kReal, 0.0)), TypeError);
}

TEST_CASE("tensor composition") {
  const auto pass = filter(kText, [](const Value&) { return true; });
  const auto t = tensor_parallel(pass, pass);
  CHECK(t.input_type() == BehaviorType::event(ValueDomain::tensor({kText, kText})));
  const auto a = ev(3_s, {{1_s, "x"}});
  const auto b = ev(3_s, {{1_s, "y"}, {2_s, "z"}});
  const Section zipped = zip_records({a, b});
  CHECK(run(t, zipped, 0.5_s).output == zipped);

  const auto d = delay(0.5_s, BehaviorType::event(kText), EventSection(0.5_s));
  const auto dd = tensor_parallel(d, d);
  CHECK(run(dd, zipped, 0.5_s).output ==
        Section(zip_records({run(d, a, 0.5_s).output.events(), run(d, b, 0.5_s).output.events()})));

  // Event inputs are zipped; mixed outputs fall back to a flat product.
  const auto z = zoh_reconstructor(kReal, 0.0);
  const auto mixed = tensor_parallel(z, d);
  CHECK(mixed.input_type().kind() == BehaviorType::Kind::Event);
  CHECK(mixed.output_type().kind() == BehaviorType::Kind::Product);
  const auto out = run(mixed, zip_records({ev(3_s, {{1_s, 2.0}}), a}), 1_s).output;
  CHECK(out.parts()[1] == run(d, a, 1_s).output);
  CHECK(out.parts()[0].continuous().eval(2_s) == Value(2.0));
}

TEST_CASE("trace") {
  const auto txt = BehaviorType::event(kText);
  const auto d = delay(0.5_s, txt, EventSection(0.5_s));
  // Pass-through on A next to a delay on C, on a flat product wire.
  const auto flat = Machine("id×del", BehaviorType::product({txt, txt}), BehaviorType::product({txt, txt}),
                            InertiaMatrix::parallel({InertiaMatrix::diagonal(1, 0_s), InertiaMatrix::diagonal(1, 0.5_s)}),
                            [d] {
                              struct P final : Process {
                                std::unique_ptr<Process> del;
                                explicit P(std::unique_ptr<Process> p) : del(std::move(p)) {}
                                Section advance(const Section& w, Recorder* r) override {
                                  return Section::product(w.length(), {w.parts()[0], del->advance(w.parts()[1], r)});
                                }
                                std::unique_ptr<Process> clone() const override { return std::make_unique<P>(del->clone()); }
                              };
                              return std::make_unique<P>(d.start());
                            });
  const auto tr = trace_feedback(flat, txt, EventSection(0_s));
  CHECK(tr.input_type() == txt);
  const auto in = ev(3_s, {{1_s, "x"}});
  const auto r = run(tr, in, 0.2_s);
  CHECK(r.output == Section(in));
  CHECK(r.state_trace.at("loop") == Section(EventSection(3_s)));

  const auto bad = Machine("id×id", BehaviorType::product({txt, txt}), BehaviorType::product({txt, txt}),
                           InertiaMatrix::diagonal(2, 0_s), [] { return std::unique_ptr<Process>(); });
  CHECK_THROWS_AS(trace_feedback(bad, txt, EventSection(0_s)), TypeError);
}
