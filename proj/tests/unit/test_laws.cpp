#include <doctest.h>

#include "sheafmach/laws/laws.hpp"
#include "sheafmach/primitives.hpp"
#include "sheafmach/combinators.hpp"

using namespace sheafmach;
using namespace sheafmach::laws;

namespace {

const LawResult* first_failure(const LawReport& r) {
  for (const auto& x : r.results) {
    if (!x.passed) return &x;
  }
  return nullptr;
}

bool has_event_at(const Section& s, Time t) {
  if (s.kind() == Section::Kind::Event) return s.events().find(t) != nullptr;
  if (s.kind() == Section::Kind::Product) {
    for (const auto& p : s.parts()) {
      if (has_event_at(p, t)) return true;
    }
  }
  return false;
}

}  // namespace

TEST_CASE("rng maps are portable and in range") {
  Rng a(7), b(7);
  for (int i = 0; i < 1000; ++i) {
    const auto x = a.integer(-3, 3);
    CHECK(x == b.integer(-3, 3));
    CHECK(x >= -3);
    CHECK(x <= 3);
    const double u = a.real(0.0, 1.0);
    b.real(0.0, 1.0);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("generated sections have their requested type") {
  Rng rng(3);
  GenOptions o;
  o.quantum = Duration::from_ticks(1'000'000);
  o.allow_jumps = true;
  const std::vector<BehaviorType> types{
      BehaviorType::event(ValueDomain::text()),
      BehaviorType::event(ValueDomain::tensor({ValueDomain::polarity(), ValueDomain::integer()})),
      BehaviorType::continuous(ValueDomain::real(), 10.0),
      BehaviorType::continuous(ValueDomain::real(), std::nullopt, true),
      BehaviorType::product({BehaviorType::event(ValueDomain::real()), BehaviorType::continuous(ValueDomain::real())}),
  };
  for (const auto& t : types) {
    for (int i = 0; i < 200; ++i) {
      const Section s = random_section(rng, t, random_length(rng, o), o);
      CHECK(t.admits(s));
      if (s.kind() == Section::Kind::Continuous && t.lipschitz_bound()) CHECK(s.continuous().satisfies_lipschitz(10.0));
    }
  }
}

TEST_CASE("continuations glue onto their germ") {
  Rng rng(5);
  GenOptions o;
  o.quantum = Duration::from_ticks(1'000'000);
  const auto t = BehaviorType::product({BehaviorType::event(ValueDomain::text()), BehaviorType::continuous(ValueDomain::real(), 10.0)});
  for (int i = 0; i < 200; ++i) {
    const Section x = random_section(rng, t, Duration::seconds(1.0), o);
    const Section y = random_continuation(rng, t, endpoint(x), Duration::seconds(0.5), o);
    CHECK_NOTHROW(glue(x, y));
  }
}

TEST_CASE("case encoding round-trips") {
  Rng rng(11);
  GenOptions o;
  for (int i = 0; i < 50; ++i) {
    Case c{"gluing.existence[product]",
           {random_section(rng,
                           BehaviorType::product({BehaviorType::event(ValueDomain::text()),
                                                  BehaviorType::continuous(ValueDomain::real(), std::nullopt, true)}),
                           random_length(rng, o), o)},
           {random_time(rng, Duration::seconds(1.0), o)}};
    CHECK(decode_case(encode_case(c)) == c);
  }
}

TEST_CASE("sheaf suites pass on the standard algebra") {
  SuiteOptions so;
  so.n = 300;
  so.seed = 9;
  for (const auto& rep : {check_presheaf_laws(so), check_gluing(so), check_monoidal(so), check_functor_laws(so)}) {
    INFO(rep.to_text());
    CHECK(rep.passed());
    CHECK(rep.cases() == so.n * rep.results.size());
  }
}

TEST_CASE("suites are reproducible from the seed") {
  SuiteOptions so;
  so.n = 50;
  so.seed = 4;
  so.mutation = Mutation::RestrictExclusive;
  const auto a = check_presheaf_laws(so);
  const auto b = check_presheaf_laws(so);
  CHECK(a.to_json() == b.to_json());
}

TEST_CASE("exclusive-right-end restriction is caught with a boundary event") {
  SuiteOptions so;
  so.n = 1000;
  so.seed = 1;
  so.mutation = Mutation::RestrictExclusive;
  const auto rep = check_presheaf_laws(so);
  CHECK_FALSE(rep.passed());
  const LawResult* f = first_failure(rep);
  REQUIRE(f != nullptr);
  REQUIRE(f->counterexample);
  const Section& x = f->counterexample->sections.at(0);
  CHECK(has_event_at(x, x.length()));
  // Replaying reproduces the failure under the mutation only.
  CHECK(replay(decode_case(encode_case(*f->counterexample)), Mutation::RestrictExclusive));
  CHECK_FALSE(replay(*f->counterexample, Mutation::None));
  CHECK(rep.to_json().find("\"counterexample\"") != std::string::npos);
}

TEST_CASE("glue that drops boundary events is caught and shrunk to a minimal case") {
  SuiteOptions so;
  so.n = 1000;
  so.seed = 2;
  so.mutation = Mutation::GlueDropBoundary;
  const auto rep = check_gluing(so);
  CHECK_FALSE(rep.passed());
  const LawResult* f = first_failure(rep);
  REQUIRE(f != nullptr);
  REQUIRE(f->counterexample);
  const Case& c = *f->counterexample;
  auto fails = [&](const Case& k) { return replay(k, Mutation::GlueDropBoundary).has_value(); };
  CHECK(fails(c));
  // Local minimality: dropping any one event, or trimming the window, makes it pass.
  for (std::size_t i = 0; i < c.sections.size(); ++i) {
    const Section& s = c.sections[i];
    if (s.kind() != Section::Kind::Event) continue;
    for (std::size_t j = 0; j < s.events().size(); ++j) {
      auto ev = s.events().events();
      ev.erase(ev.begin() + static_cast<std::ptrdiff_t>(j));
      Case k = c;
      k.sections[i] = EventSection(s.length(), ev);
      CHECK_FALSE(fails(k));
    }
    if (s.length() > Duration::zero()) {
      Case k = c;
      const Duration one = Duration::from_ticks(1);
      for (auto& x : k.sections) x = restrict_to(x, Time::zero(), x.length() - std::min(one, x.length()));
      CHECK_FALSE(fails(k));
    }
  }
}

TEST_CASE("machine contracts: delay and ZOH pass") {
  ContractOptions o;
  o.n = 100;
  o.gen.quantum = Duration::from_ticks(250'000);
  o.gen.max_length = Duration::seconds(3.0);
  const auto eps = Duration::seconds(0.5);
  const auto d = check_machine_contract(delay(eps, BehaviorType::event(ValueDomain::text()), EventSection(eps)), o);
  INFO(d.to_text());
  CHECK(d.passed());
  CHECK(d.results.size() == 4);
  const auto z = check_machine_contract(zoh_reconstructor(ValueDomain::real(), Value(0.0)), o);
  INFO(z.to_text());
  CHECK(z.passed());
  CHECK(z.results.size() == 3);  // inertiality is vacuous at zero lead
}

TEST_CASE("an acausal machine fails causality with a minimal counterexample") {
  ContractOptions o;
  o.n = 200;
  o.gen.quantum = Duration::from_ticks(1'000'000);
  o.gen.max_length = Duration::seconds(3.0);
  const auto rep = check_machine_contract(acausal_machine(), o);
  CHECK_FALSE(rep.passed());
  const LawResult* f = first_failure(rep);
  REQUIRE(f != nullptr);
  CHECK(f->law == "contract.acausal.causality");
  REQUIRE(f->counterexample);
  // Two events are required: one before the cut and one after it.
  CHECK(f->counterexample->sections.at(0).events().size() == 2);
  CHECK(replay(*f->counterexample));
}

TEST_CASE("suite selector validation") {
  CHECK(is_suite("all"));
  CHECK(is_suite("gluing"));
  CHECK_FALSE(is_suite("sheaves"));
  SuiteOptions so;
  so.n = 0;
  CHECK_THROWS_AS(run_suites("gluing", so), Error);
  so.n = 1;
  CHECK_THROWS_AS(run_suites("nope", so), Error);
}
