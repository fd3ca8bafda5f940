#include "sheafmach/laws/laws.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "sheafmach/combinators.hpp"
#include "sheafmach/errors.hpp"
#include "sheafmach/serialize.hpp"

namespace sheafmach::laws {

// ---------------------------------------------------------------------------
// Algebras

namespace {

template <class F>
Section map_event_parts(const Section& s, F&& f) {
  switch (s.kind()) {
    case Section::Kind::Event:
      return f(s.events());
    case Section::Kind::Product: {
      std::vector<Section> parts;
      for (const auto& p : s.parts()) parts.push_back(map_event_parts(p, f));
      return Section::product(s.length(), std::move(parts));
    }
    default:
      return s;
  }
}

EventSection without_event_at(const EventSection& e, Time t) {
  std::vector<EventSection::Event> ev;
  for (const auto& x : e.events()) {
    if (x.t != t) ev.push_back(x);
  }
  return EventSection(e.length(), std::move(ev));
}

}  // namespace

SectionAlgebra SectionAlgebra::standard() {
  return {[](const Section& s, Time a, Time b) { return restrict_to(s, a, b); },
          [](const Section& a, const Section& b) { return sheafmach::glue(a, b); }};
}

std::optional<Mutation> parse_mutation(const std::string& name) {
  if (name == "none") return Mutation::None;
  if (name == "restrict-exclusive") return Mutation::RestrictExclusive;
  if (name == "glue-drop-boundary") return Mutation::GlueDropBoundary;
  if (name == "acausal") return Mutation::Acausal;
  return std::nullopt;
}

SectionAlgebra mutated_algebra(Mutation m) {
  SectionAlgebra alg = SectionAlgebra::standard();
  if (m == Mutation::RestrictExclusive) {
    alg.restrict = [](const Section& s, Time a, Time b) {
      const Section r = restrict_to(s, a, b);
      return map_event_parts(r, [&](const EventSection& e) -> Section { return without_event_at(e, r.length()); });
    };
  } else if (m == Mutation::GlueDropBoundary) {
    alg.glue = [](const Section& a, const Section& b) {
      const Section g = sheafmach::glue(a, b);
      return map_event_parts(g, [&](const EventSection& e) -> Section { return without_event_at(e, a.length()); });
    };
  }
  return alg;
}

// ---------------------------------------------------------------------------
// Cases

std::string encode_case(const Case& c) {
  std::ostringstream os;
  os << "case " << c.law << "\nparams " << c.params.size();
  for (auto t : c.params) os << ' ' << format_seconds(t);
  os << "\nsections " << c.sections.size() << '\n';
  for (const auto& s : c.sections) write_section(os, s);
  return os.str();
}

Case decode_case(const std::string& text) {
  std::istringstream is(text);
  Case c;
  std::string word;
  if (!(is >> word) || word != "case") throw Error("case: expected 'case <law>'");
  std::getline(is >> std::ws, c.law);
  if (c.law.empty()) throw Error("case: missing law name");
  std::size_t n = 0;
  if (!(is >> word) || word != "params" || !(is >> n)) throw Error("case: expected 'params <n>'");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(is >> word)) throw Error("case: missing parameter");
    c.params.push_back(parse_seconds(word));
  }
  if (!(is >> word) || word != "sections" || !(is >> n)) throw Error("case: expected 'sections <n>'");
  is.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
  for (std::size_t i = 0; i < n; ++i) c.sections.push_back(read_section(is));
  return c;
}

// ---------------------------------------------------------------------------
// Shrinking

namespace {

std::size_t count_events(const Section& s) {
  switch (s.kind()) {
    case Section::Kind::Event:
      return s.events().size();
    case Section::Kind::Product: {
      std::size_t n = 0;
      for (const auto& p : s.parts()) n += count_events(p);
      return n;
    }
    default:
      return 0;
  }
}

// Removes the k-th event in depth-first order.
Section remove_event(const Section& s, std::size_t& k) {
  if (s.kind() == Section::Kind::Event) {
    const auto& ev = s.events().events();
    if (k < ev.size()) {
      auto copy = ev;
      copy.erase(copy.begin() + static_cast<std::ptrdiff_t>(k));
      k = std::numeric_limits<std::size_t>::max();
      return EventSection(s.length(), std::move(copy));
    }
    if (k != std::numeric_limits<std::size_t>::max()) k -= ev.size();
    return s;
  }
  if (s.kind() == Section::Kind::Product) {
    std::vector<Section> parts;
    for (const auto& p : s.parts()) parts.push_back(remove_event(p, k));
    return Section::product(s.length(), std::move(parts));
  }
  return s;
}

std::string tag_of(const std::string& failure) { return failure.substr(0, failure.find(':')); }

std::optional<std::string> guarded(const LawCheck& check, const Case& c) {
  try {
    return check(c);
  } catch (const std::exception& e) {
    return std::string("exception: ") + e.what();
  }
}

// Window cuts tried by the shrinker, largest first.
std::vector<Duration> cuts_for(Duration len) {
  const std::int64_t l = len.ticks();
  std::set<std::int64_t> out;
  for (std::int64_t c : {l / 2, l / 4, std::int64_t{1'000'000}, std::int64_t{1'000}, std::int64_t{1}}) {
    if (c > 0 && c <= l) out.insert(c);
  }
  std::vector<Duration> v;
  for (auto it = out.rbegin(); it != out.rend(); ++it) v.push_back(Duration::from_ticks(*it));
  return v;
}

}  // namespace

Case shrink(Case c, const LawCheck& check) {
  const auto first = guarded(check, c);
  if (!first) return c;
  const std::string tag = tag_of(*first);
  auto still_fails = [&](const Case& cand) {
    const auto f = guarded(check, cand);
    return f && tag_of(*f) == tag;
  };

  bool progress = true;
  while (progress) {
    progress = false;
    for (std::size_t i = 0; i < c.sections.size() && !progress; ++i) {
      const std::size_t n = count_events(c.sections[i]);
      for (std::size_t k = 0; k < n; ++k) {
        Case cand = c;
        std::size_t idx = k;
        cand.sections[i] = remove_event(c.sections[i], idx);
        if (still_fails(cand)) {
          c = std::move(cand);
          progress = true;
          break;
        }
      }
    }
    if (progress) continue;
    Duration longest = Duration::zero();
    for (const auto& s : c.sections) longest = std::max(longest, s.length());
    for (Duration cut : cuts_for(longest)) {
      for (bool from_left : {false, true}) {
        Case cand = c;
        for (auto& s : cand.sections) {
          const Duration d = std::min(cut, s.length());
          s = from_left ? restrict_to(s, d, s.length()) : restrict_to(s, Time::zero(), s.length() - d);
        }
        if (still_fails(cand)) {
          c = std::move(cand);
          progress = true;
          break;
        }
      }
      if (progress) break;
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// Reports

bool LawReport::passed() const {
  return std::all_of(results.begin(), results.end(), [](const LawResult& r) { return r.passed; });
}

std::size_t LawReport::cases() const {
  std::size_t n = 0;
  for (const auto& r : results) n += r.cases;
  return n;
}

std::string LawReport::to_text() const {
  std::ostringstream os;
  os << "suite " << suite << " seed=" << seed << " n=" << n << ": " << (passed() ? "PASS" : "FAIL") << " ("
     << cases() << " cases, " << std::fixed << std::setprecision(2) << seconds << " s)\n";
  for (const auto& r : results) {
    os << "  " << (r.passed ? "ok   " : "FAIL ") << r.law << " [" << r.cases << "]\n";
    if (!r.passed) {
      os << "    " << r.failure << "\n";
      if (r.counterexample) {
        std::istringstream lines(encode_case(*r.counterexample));
        for (std::string line; std::getline(lines, line);) os << "    | " << line << "\n";
      }
    }
  }
  return os.str();
}

std::string LawReport::to_json() const {
  nlohmann::ordered_json j;
  j["suite"] = suite;
  j["seed"] = seed;
  j["n"] = n;
  j["status"] = passed() ? "pass" : "fail";
  j["cases"] = cases();
  j["laws"] = nlohmann::ordered_json::array();
  for (const auto& r : results) {
    nlohmann::ordered_json l;
    l["law"] = r.law;
    l["status"] = r.passed ? "pass" : "fail";
    l["cases"] = r.cases;
    if (!r.passed) {
      l["failure"] = r.failure;
      if (r.counterexample) l["counterexample"] = encode_case(*r.counterexample);
    }
    j["laws"].push_back(std::move(l));
  }
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// Suites

namespace {

using Generator = std::function<Case(Rng&)>;

struct LawDef {
  std::string name;
  Generator generate;
  LawCheck check;
};

std::uint64_t mix(std::uint64_t seed, std::uint64_t salt) {
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t hash_name(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) h = (h ^ ch) * 1099511628211ULL;
  return h;
}

LawResult run_law(const LawDef& def, std::size_t n, std::uint64_t seed) {
  LawResult res;
  res.law = def.name;
  Rng rng(mix(seed, hash_name(def.name)));
  for (std::size_t i = 0; i < n; ++i) {
    Case c = def.generate(rng);
    c.law = def.name;
    ++res.cases;
    if (guarded(def.check, c)) {
      Case small = shrink(std::move(c), def.check);
      res.passed = false;
      res.failure = guarded(def.check, small).value_or("failure did not reproduce after shrinking");
      res.counterexample = std::move(small);
      break;
    }
  }
  return res;
}

LawReport run_laws(const std::string& suite, const std::vector<LawDef>& defs, const SuiteOptions& o) {
  const auto t0 = std::chrono::steady_clock::now();
  LawReport rep;
  rep.suite = suite;
  rep.seed = o.seed;
  rep.n = o.n;
  for (const auto& d : defs) rep.results.push_back(run_law(d, o.n, o.seed));
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

// Section kinds exercised by the sheaf suites.
struct Kind {
  std::string name;
  BehaviorType type;
  bool jumps = false;
};

const std::vector<Kind>& kinds() {
  static const std::vector<Kind> k{
      {"event", BehaviorType::event(ValueDomain::text()), false},
      {"continuous", BehaviorType::continuous(ValueDomain::real(), 10.0), false},
      {"jump", BehaviorType::continuous(ValueDomain::real(), std::nullopt, true), true},
      {"clock", BehaviorType::clock(Duration::from_ticks(1)), false},
      {"product",
       BehaviorType::product({BehaviorType::event(ValueDomain::integer()),
                              BehaviorType::continuous(ValueDomain::real(), std::nullopt, true)}),
       true},
  };
  return k;
}

GenOptions random_options(Rng& rng, bool jumps) {
  GenOptions o;
  static const std::vector<std::int64_t> quanta{1, 1'000, 1'000'000, 250'000'000};
  o.quantum = Duration::from_ticks(rng.pick(quanta));
  o.max_length = Duration::from_ticks(5'000'000'000);
  o.allow_jumps = jumps;
  return o;
}

Section random_of(Rng& rng, const Kind& k, Duration len, const GenOptions& o) {
  if (k.type.kind() == BehaviorType::Kind::Clock) return random_clock(rng, len, o);
  return random_section(rng, k.type, len, o);
}

// Points where defects tend to hide: 0, the length, event times, piece ends, ticks.
std::vector<Time> landmarks(const Section& s) {
  std::set<std::int64_t> out{0, s.length().ticks()};
  switch (s.kind()) {
    case Section::Kind::Event:
      for (const auto& e : s.events().events()) out.insert(e.t.ticks());
      break;
    case Section::Kind::Continuous:
      for (const auto& p : s.continuous().pieces()) out.insert(std::clamp<std::int64_t>(p.start, 0, s.length().ticks()));
      break;
    case Section::Kind::Clock: {
      const auto ticks = s.clock().ticks();
      for (std::size_t i = 0; i < std::min<std::size_t>(ticks.size(), 64); ++i) out.insert(ticks[i].ticks());
      break;
    }
    case Section::Kind::Product:
      for (const auto& p : s.parts()) {
        for (auto t : landmarks(p)) out.insert(t.ticks());
      }
      break;
  }
  std::vector<Time> v;
  for (auto t : out) v.push_back(Duration::from_ticks(t));
  return v;
}

Time pick_time(Rng& rng, const Section& s, const GenOptions& o) {
  if (rng.chance(0.5)) return rng.pick(landmarks(s));
  return random_time(rng, s.length(), o);
}

// Puts an event at t into every event part of s (type t) that lacks one.
Section force_event(Rng& rng, const Section& s, const BehaviorType& type, Time t, const GenOptions& o) {
  if (s.kind() == Section::Kind::Product) {
    std::vector<Section> parts;
    for (std::size_t i = 0; i < s.parts().size(); ++i) parts.push_back(force_event(rng, s.parts()[i], type.parts()[i], t, o));
    return Section::product(s.length(), std::move(parts));
  }
  if (s.kind() != Section::Kind::Event || s.events().find(t) != nullptr) return s;
  auto ev = s.events().events();
  ev.insert(std::lower_bound(ev.begin(), ev.end(), t, [](const EventSection::Event& x, Time y) { return x.t < y; }),
            EventSection::Event{t, random_value(rng, type.domain(), o)});
  return EventSection(s.length(), std::move(ev));
}

Time clamp_time(Time t, Time lo, Time hi) { return std::clamp(t, lo, hi); }

std::string describe(const char* tag, const std::string& what) { return std::string(tag) + ": " + what; }

// -- presheaf ----------------------------------------------------------------

std::vector<LawDef> presheaf_defs(const SectionAlgebra& alg) {
  std::vector<LawDef> defs;
  for (const auto& k : kinds()) {
    defs.push_back({"presheaf.identity[" + k.name + "]",
                    [k](Rng& rng) {
                      const auto o = random_options(rng, k.jumps);
                      Section x = random_of(rng, k, random_length(rng, o), o);
                      if (rng.chance(0.5)) x = force_event(rng, x, k.type, x.length(), o);
                      if (rng.chance(0.3)) x = force_event(rng, x, k.type, Time::zero(), o);
                      return Case{"", {x}, {}};
                    },
                    [alg](const Case& c) -> std::optional<std::string> {
                      const Section& x = c.sections.at(0);
                      if (alg.restrict(x, Time::zero(), x.length()) != x) {
                        return describe("identity", "restriction to the whole window changed the section");
                      }
                      return std::nullopt;
                    }});
    defs.push_back({"presheaf.composition[" + k.name + "]",
                    [k](Rng& rng) {
                      const auto o = random_options(rng, k.jumps);
                      Section x = random_of(rng, k, random_length(rng, o), o);
                      Time a = pick_time(rng, x, o);
                      Time b = pick_time(rng, x, o);
                      if (b < a) std::swap(a, b);
                      x = force_event(rng, x, k.type, rng.chance(0.5) ? a : b, o);
                      const Section inner = restrict_to(x, a, b);
                      Time c1 = pick_time(rng, inner, o);
                      Time d1 = pick_time(rng, inner, o);
                      if (d1 < c1) std::swap(c1, d1);
                      return Case{"", {x}, {a, b, c1, d1}};
                    },
                    [alg](const Case& c) -> std::optional<std::string> {
                      const Section& x = c.sections.at(0);
                      const Time a = clamp_time(c.params.at(0), Time::zero(), x.length());
                      const Time b = clamp_time(c.params.at(1), a, x.length());
                      const Time p = clamp_time(c.params.at(2), Time::zero(), b - a);
                      const Time q = clamp_time(c.params.at(3), p, b - a);
                      const Section lhs = alg.restrict(alg.restrict(x, a, b), p, q);
                      const Section rhs = alg.restrict(x, a + p, a + q);
                      if (lhs != rhs) {
                        return describe("composition", "restricting along [" + format_seconds(a) + "," +
                                                           format_seconds(b) + "] then [" + format_seconds(p) + "," +
                                                           format_seconds(q) + "] differs from the composite window");
                      }
                      return std::nullopt;
                    }});
  }
  return defs;
}

// -- gluing ------------------------------------------------------------------

Section perturb(Rng& rng, const Section& x, const BehaviorType& type, const GenOptions& o) {
  switch (x.kind()) {
    case Section::Kind::Event: {
      auto ev = x.events().events();
      const int op = static_cast<int>(rng.integer(0, 3));
      auto free_time = [&]() -> std::optional<Time> {
        for (int tries = 0; tries < 16; ++tries) {
          const Time t = random_time(rng, x.length(), o);
          if (x.events().find(t) == nullptr) return t;
        }
        return std::nullopt;
      };
      auto other_value = [&](const Value& v) {
        if (v.is_integer()) return Value(v.as_integer() + 1);
        return Value(v.as_text() == "a" ? std::string("b") : std::string("a"));
      };
      if (op == 0 || ev.empty()) {  // add
        if (auto t = free_time()) {
          ev.insert(std::lower_bound(ev.begin(), ev.end(), *t,
                                     [](const EventSection::Event& e, Time y) { return e.t < y; }),
                    EventSection::Event{*t, random_value(rng, type.domain(), o)});
        }
      } else if (op == 1) {  // remove
        ev.erase(ev.begin() + rng.integer(0, static_cast<std::int64_t>(ev.size()) - 1));
      } else if (op == 2) {  // move
        const auto i = static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(ev.size()) - 1));
        if (auto t = free_time()) {
          EventSection::Event moved{*t, ev[i].value};
          ev.erase(ev.begin() + static_cast<std::ptrdiff_t>(i));
          ev.insert(std::lower_bound(ev.begin(), ev.end(), *t,
                                     [](const EventSection::Event& e, Time y) { return e.t < y; }),
                    moved);
        }
      } else {  // bump
        auto& e = ev[static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(ev.size()) - 1))];
        e.value = other_value(e.value);
      }
      return EventSection(x.length(), std::move(ev));
    }
    case Section::Kind::Continuous: {
      const auto& c = x.continuous();
      auto pieces = c.pieces();
      auto& p = pieces[static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(pieces.size()) - 1))];
      const double delta = 0.5;
      if (auto* k = std::get_if<ContinuousSection::Constant>(&p.shape)) {
        k->value = Value(k->value.as_real() + delta);
      } else if (auto* l = std::get_if<ContinuousSection::Linear>(&p.shape)) {
        l->b.v = Value(l->b.v.as_real() + delta);
      } else if (auto* s = std::get_if<ContinuousSection::Sampled>(&p.shape)) {
        auto& v = s->samples[static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(s->samples.size()) - 1))].v;
        v = Value(v.as_real() + delta);
      }
      ContinuousSection y(c.length(), std::move(pieces));
      y.set_lipschitz_bound(c.lipschitz_bound()).set_codiscrete(c.codiscrete());
      return y;
    }
    case Section::Kind::Clock: {
      const auto& k = x.clock();
      const std::int64_t d = k.period().ticks();
      std::optional<Time> first;
      if (!k.first_tick()) {
        first = Time::zero();
      } else if (d > 1) {
        first = Duration::from_ticks((k.first_tick()->ticks() + 1 + rng.integer(0, d - 2)) % d);
      }
      if (first && *first > k.length()) first.reset();
      return ClockSection(k.length(), k.period(), first);
    }
    case Section::Kind::Product: {
      auto parts = x.parts();
      if (parts.empty()) return x;
      const auto i = static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(parts.size()) - 1));
      parts[i] = perturb(rng, parts[i], type.parts()[i], o);
      return Section::product(x.length(), std::move(parts));
    }
  }
  return x;
}

std::vector<LawDef> gluing_defs(const SectionAlgebra& alg) {
  std::vector<LawDef> defs;
  for (const auto& k : kinds()) {
    defs.push_back({"gluing.existence[" + k.name + "]",
                    [k](Rng& rng) {
                      const auto o = random_options(rng, k.jumps);
                      Section x = random_of(rng, k, random_length(rng, o), o);
                      const Time s = pick_time(rng, x, o);
                      if (rng.chance(0.5)) x = force_event(rng, x, k.type, s, o);
                      return Case{"", {x}, {s}};
                    },
                    [alg](const Case& c) -> std::optional<std::string> {
                      const Section& x = c.sections.at(0);
                      const Time s = clamp_time(c.params.at(0), Time::zero(), x.length());
                      const Section a = alg.restrict(x, Time::zero(), s);
                      const Section b = alg.restrict(x, s, x.length());
                      const Section g = alg.glue(a, b);
                      if (alg.restrict(g, Time::zero(), s) != a || alg.restrict(g, s, g.length()) != b) {
                        return describe("existence", "glued section does not restrict to its pieces at " +
                                                         format_seconds(s));
                      }
                      if (g != x) return describe("existence", "split at " + format_seconds(s) + " then glue is not the identity");
                      return std::nullopt;
                    }});
    defs.push_back({"gluing.uniqueness[" + k.name + "]",
                    [k](Rng& rng) {
                      const auto o = random_options(rng, k.jumps);
                      Section x = random_of(rng, k, random_length(rng, o), o);
                      const Time s = pick_time(rng, x, o);
                      if (rng.chance(0.5)) x = force_event(rng, x, k.type, s, o);
                      Section y = perturb(rng, x, k.type, o);
                      return Case{"", {x, y}, {s}};
                    },
                    [alg](const Case& c) -> std::optional<std::string> {
                      const Section& x = c.sections.at(0);
                      const Section& y = c.sections.at(1);
                      if (x == y || x.length() != y.length()) return std::nullopt;
                      const Time s = clamp_time(c.params.at(0), Time::zero(), x.length());
                      if (alg.restrict(x, Time::zero(), s) == alg.restrict(y, Time::zero(), s) &&
                          alg.restrict(x, s, x.length()) == alg.restrict(y, s, y.length())) {
                        return describe("uniqueness", "two different sections agree on both sides of " +
                                                          format_seconds(s));
                      }
                      return std::nullopt;
                    }});
    defs.push_back({"gluing.compatibility[" + k.name + "]",
                    [k](Rng& rng) {
                      const auto o = random_options(rng, k.jumps);
                      Section x = random_of(rng, k, random_length(rng, o), o);
                      const Time s = pick_time(rng, x, o);
                      if (rng.chance(0.5)) x = force_event(rng, x, k.type, s, o);
                      Section a = restrict_to(x, Time::zero(), s);
                      Section b = rng.chance(0.5) ? restrict_to(x, s, x.length())
                                                  : random_of(rng, k, x.length() - s, o);
                      return Case{"", {a, b}, {}};
                    },
                    [alg, k](const Case& c) -> std::optional<std::string> {
                      const Section& a = c.sections.at(0);
                      const Section& b = c.sections.at(1);
                      const bool agree = endpoint(a) == restrict_to(b, Time::zero(), Time::zero());
                      std::optional<Section> g;
                      try {
                        g = alg.glue(a, b);
                      } catch (const CompatibilityError&) {
                        // Clocks also need the tick spacing across the seam.
                        if (agree && k.type.kind() != BehaviorType::Kind::Clock) {
                          return describe("compatibility", "glue rejected sections that agree at the seam");
                        }
                        return std::nullopt;
                      }
                      if (!agree) return describe("compatibility", "glue accepted sections that disagree at the seam");
                      if (alg.restrict(*g, Time::zero(), a.length()) != a ||
                          alg.restrict(*g, a.length(), g->length()) != b) {
                        return describe("compatibility", "glued section does not restrict to its pieces");
                      }
                      return std::nullopt;
                    }});
  }
  return defs;
}

// -- monoidal ----------------------------------------------------------------

const ValueDomain& pair_domain() {
  static const ValueDomain d = ValueDomain::tensor({ValueDomain::text(), ValueDomain::integer()});
  return d;
}

// Two streams of one length that often share time-stamps and boundary events.
Case paired(Rng& rng) {
  auto o = random_options(rng, false);
  const Duration len = random_length(rng, o);
  EventSection a = random_events(rng, ValueDomain::text(), len, o);
  EventSection b = random_events(rng, ValueDomain::integer(), len, o);
  if (rng.chance(0.5)) {
    std::vector<EventSection::Event> shared;
    for (const auto& e : a.events()) {
      if (rng.chance(0.6)) shared.push_back({e.t, Value(rng.integer(-5, 5))});
    }
    b = EventSection(len, std::move(shared));
  }
  const BehaviorType text_type = BehaviorType::event(ValueDomain::text());
  const BehaviorType int_type = BehaviorType::event(ValueDomain::integer());
  Section sa = a;
  Section sb = b;
  for (Time t : {Time::zero(), len}) {
    if (rng.chance(0.3)) sa = force_event(rng, sa, text_type, t, o);
    if (rng.chance(0.3)) sb = force_event(rng, sb, int_type, t, o);
  }
  Time s = pick_time(rng, sa, o);
  Time e = pick_time(rng, sb, o);
  if (e < s) std::swap(s, e);
  return Case{"", {sa, sb}, {s, e}};
}

std::vector<LawDef> monoidal_defs(const SectionAlgebra& alg) {
  std::vector<LawDef> defs;
  defs.push_back({"monoidal.zip_unzip", paired, [](const Case& c) -> std::optional<std::string> {
                    const auto& a = c.sections.at(0).events();
                    const auto& b = c.sections.at(1).events();
                    if (a.length() != b.length()) return std::nullopt;
                    const auto back = unzip_records(zip_records({a, b}), 2);
                    if (back.size() != 2 || back[0] != a || back[1] != b) {
                      return describe("zip_unzip", "unzip after zip is not the identity");
                    }
                    return std::nullopt;
                  }});
  defs.push_back({"monoidal.unzip_zip",
                  [](Rng& rng) {
                    auto o = random_options(rng, false);
                    Section z = random_events(rng, pair_domain(), random_length(rng, o), o);
                    return Case{"", {z}, {}};
                  },
                  [](const Case& c) -> std::optional<std::string> {
                    const auto& z = c.sections.at(0).events();
                    if (zip_records(unzip_records(z, 2)) != z) return describe("unzip_zip", "zip after unzip is not the identity");
                    return std::nullopt;
                  }});
  defs.push_back({"monoidal.restriction", paired, [alg](const Case& c) -> std::optional<std::string> {
                    const auto& a = c.sections.at(0);
                    const auto& b = c.sections.at(1);
                    if (a.length() != b.length()) return std::nullopt;
                    const Time s = clamp_time(c.params.at(0), Time::zero(), a.length());
                    const Time e = clamp_time(c.params.at(1), s, a.length());
                    const Section lhs = alg.restrict(zip_records({a.events(), b.events()}), s, e);
                    const Section rhs = zip_records({alg.restrict(a, s, e).events(), alg.restrict(b, s, e).events()});
                    if (lhs != rhs) {
                      return describe("restriction", "zip does not commute with restriction to [" + format_seconds(s) +
                                                         "," + format_seconds(e) + "]");
                    }
                    return std::nullopt;
                  }});
  return defs;
}

// -- functor -----------------------------------------------------------------

// Small family of maps on integer values, indexed by a parameter.
Value apply_map(std::int64_t which, const Value& v) {
  const std::int64_t x = v.as_integer();
  switch (which % 4) {
    case 0: return Value(x + 1);
    case 1: return Value(2 * x);
    case 2: return Value(x * x);
    default: return Value(x < 0 ? std::int64_t{-1} : std::int64_t{1});
  }
}

Case functor_case(Rng& rng) {
  auto o = random_options(rng, false);
  Section x = random_events(rng, ValueDomain::integer(), random_length(rng, o), o);
  Time s = pick_time(rng, x, o);
  Time e = pick_time(rng, x, o);
  if (e < s) std::swap(s, e);
  return Case{"", {x}, {Duration::from_ticks(rng.integer(0, 3)), Duration::from_ticks(rng.integer(0, 3)), s, e}};
}

std::vector<LawDef> functor_defs(const SectionAlgebra& alg) {
  std::vector<LawDef> defs;
  defs.push_back({"functor.identity", functor_case, [](const Case& c) -> std::optional<std::string> {
                    const auto& x = c.sections.at(0).events();
                    if (map_events(x, [](const Value& v) { return v; }) != x) return describe("identity", "Ev(id) is not the identity");
                    return std::nullopt;
                  }});
  defs.push_back({"functor.composition", functor_case, [](const Case& c) -> std::optional<std::string> {
                    const auto& x = c.sections.at(0).events();
                    const auto f = c.params.at(0).ticks();
                    const auto g = c.params.at(1).ticks();
                    const auto lhs = map_events(x, [&](const Value& v) { return apply_map(g, apply_map(f, v)); });
                    const auto rhs = map_events(map_events(x, [&](const Value& v) { return apply_map(f, v); }),
                                                [&](const Value& v) { return apply_map(g, v); });
                    if (lhs != rhs) return describe("composition", "Ev(g . f) differs from Ev(g) . Ev(f)");
                    return std::nullopt;
                  }});
  defs.push_back({"functor.naturality", functor_case, [alg](const Case& c) -> std::optional<std::string> {
                    const Section& x = c.sections.at(0);
                    const auto f = c.params.at(0).ticks();
                    const Time s = clamp_time(c.params.at(2), Time::zero(), x.length());
                    const Time e = clamp_time(c.params.at(3), s, x.length());
                    auto fm = [&](const Value& v) { return apply_map(f, v); };
                    const Section lhs = alg.restrict(map_events(x.events(), fm), s, e);
                    const Section rhs = map_events(alg.restrict(x, s, e).events(), fm);
                    if (lhs != rhs) return describe("naturality", "Ev(f) does not commute with restriction");
                    return std::nullopt;
                  }});
  return defs;
}

}  // namespace

LawReport check_presheaf_laws(const SuiteOptions& o) {
  return run_laws("presheaf", presheaf_defs(mutated_algebra(o.mutation)), o);
}
LawReport check_gluing(const SuiteOptions& o) { return run_laws("gluing", gluing_defs(mutated_algebra(o.mutation)), o); }
LawReport check_monoidal(const SuiteOptions& o) {
  return run_laws("monoidal", monoidal_defs(mutated_algebra(o.mutation)), o);
}
LawReport check_functor_laws(const SuiteOptions& o) {
  return run_laws("functor", functor_defs(mutated_algebra(o.mutation)), o);
}

// ---------------------------------------------------------------------------
// Machine contracts

namespace {

bool has_clock(const BehaviorType& t) {
  if (t.kind() == BehaviorType::Kind::Clock) return true;
  if (t.kind() == BehaviorType::Kind::Product) {
    return std::any_of(t.parts().begin(), t.parts().end(), has_clock);
  }
  return false;
}

std::string contract_label(const Machine& m, const ContractOptions& o) {
  if (!o.label.empty()) return o.label;
  std::string s = m.name();
  for (char& ch : s) {
    if (std::isspace(static_cast<unsigned char>(ch))) ch = '_';
  }
  return s;
}

// Case layout: sections {x} or {x, x'}; params {t, step_hint}.
std::vector<LawDef> contract_defs(const Machine& m, const ContractOptions& o) {
  const Duration grid = o.grid;
  const std::string prefix = "contract." + contract_label(m, o) + ".";
  auto checks_law = [&](const Machine&, const char* check) { return prefix + check; };
  auto hints = o.step_hints;
  if (hints.empty()) {
    for (std::int64_t k : {1, 7, 50, 250, 1000, 100000}) hints.push_back(Duration::from_ticks(grid.ticks() * k));
  }
  auto gen_input = [m, o, grid](Rng& rng) {
    const std::int64_t steps = std::max<std::int64_t>(o.gen.max_length.ticks() / grid.ticks(), 1);
    const Duration len = Duration::from_ticks(rng.integer(rng.chance(0.05) ? 0 : 1, steps) * grid.ticks());
    return random_section(rng, m.input_type(), len, o.gen);
  };
  auto gen_t = [grid](Rng& rng, Duration len) {
    return Duration::from_ticks(rng.integer(0, len.ticks() / grid.ticks()) * grid.ticks());
  };
  auto params_of = [](const Case& c) {
    return std::pair{c.params.at(0), c.params.at(1)};
  };

  std::vector<LawDef> defs;
  defs.push_back({checks_law(m, "totality"),
                  [=](Rng& rng) {
                    Section x = gen_input(rng);
                    return Case{"", {x}, {Time::zero(), rng.pick(hints)}};
                  },
                  [m](const Case& c) -> std::optional<std::string> {
                    try {
                      const RunRecord r = run(m, c.sections.at(0), c.params.at(1));
                      if (r.output.length() != c.sections.at(0).length()) return describe("totality", "output length differs from input length");
                      if (!m.output_type().admits(r.output)) return describe("totality", "output is not of the declared type");
                    } catch (const std::exception& e) {
                      return describe("totality", std::string("rejected a type-correct input: ") + e.what());
                    }
                    return std::nullopt;
                  }});
  defs.push_back({checks_law(m, "determinism"),
                  [=](Rng& rng) {
                    Section x = gen_input(rng);
                    return Case{"", {x}, {Time::zero(), rng.pick(hints)}};
                  },
                  [m](const Case& c) -> std::optional<std::string> {
                    const RunRecord a = run(m, c.sections.at(0), c.params.at(1));
                    const RunRecord b = run(m, c.sections.at(0), c.params.at(1));
                    if (!(a == b)) return describe("determinism", "two runs on the same input differ");
                    return std::nullopt;
                  }});
  defs.push_back({checks_law(m, "causality"),
                  [=](Rng& rng) {
                    Section x = gen_input(rng);
                    return Case{"", {x}, {gen_t(rng, x.length()), rng.pick(hints)}};
                  },
                  [m, grid, params_of](const Case& c) -> std::optional<std::string> {
                    const Section& x = c.sections.at(0);
                    auto [t, h] = params_of(c);
                    t = Duration::from_ticks(std::min(t, x.length()).ticks() / grid.ticks() * grid.ticks());
                    const RunRecord full = run(m, x, h);
                    const RunRecord prefix = run(m, restrict_to(x, Time::zero(), t), h);
                    if (!(restrict_to(full, Time::zero(), t) == prefix)) {
                      return describe("causality", "the run on the prefix [0," + format_seconds(t) +
                                                       "] differs from the restricted run");
                    }
                    return std::nullopt;
                  }});
  const auto eps = m.inertiality();
  if (eps && !eps->is_zero() && !has_clock(m.input_type())) {
    const Duration e = *eps;
    defs.push_back({checks_law(m, "inertiality"),
                    [=](Rng& rng) {
                      Section x = gen_input(rng);
                      const Time t = gen_t(rng, x.length());
                      const Section head = restrict_to(x, Time::zero(), t);
                      Section x2 = glue(head, random_continuation(rng, m.input_type(), endpoint(head), x.length() - t, o.gen));
                      return Case{"", {x, x2}, {t, rng.pick(hints)}};
                    },
                    [m, e, params_of](const Case& c) -> std::optional<std::string> {
                      const Section& x = c.sections.at(0);
                      const Section& y = c.sections.at(1);
                      auto [t, h] = params_of(c);
                      if (x.length() != y.length()) return std::nullopt;
                      t = std::min(t, x.length());
                      if (restrict_to(x, Time::zero(), t) != restrict_to(y, Time::zero(), t)) return std::nullopt;
                      const Time u = std::min(t + e, x.length());
                      const Section ox = restrict_to(run(m, x, h).output, Time::zero(), u);
                      const Section oy = restrict_to(run(m, y, h).output, Time::zero(), u);
                      if (ox != oy) {
                        return describe("inertiality", "inputs agreeing on [0," + format_seconds(t) +
                                                           "] give outputs that differ before " + format_seconds(u));
                      }
                      return std::nullopt;
                    }});
  }
  return defs;
}

}  // namespace

LawReport check_machine_contract(const Machine& m, const ContractOptions& o) {
  SuiteOptions so;
  so.n = o.n;
  so.seed = o.seed;
  auto rep = run_laws("contract." + contract_label(m, o), contract_defs(m, o), so);
  return rep;
}

namespace {

class AcausalProcess final : public Process {
 public:
  Section advance(const Section& window, Recorder*) override {
    const auto& in = window.events();
    std::vector<EventSection::Event> out;
    const Value last = in.empty() ? Value(0.0) : in.events().back().value;
    for (const auto& e : in.events()) {
      if (e.t.is_zero() && boundary_) {
        out.push_back({e.t, *boundary_});
      } else {
        out.push_back({e.t, last});
      }
    }
    boundary_.reset();
    if (!out.empty() && out.back().t == in.length()) boundary_ = out.back().value;
    started_ = true;
    return EventSection(in.length(), std::move(out));
  }
  std::unique_ptr<Process> clone() const override { return std::make_unique<AcausalProcess>(*this); }

 private:
  bool started_ = false;
  std::optional<Value> boundary_;
};

}  // namespace

Machine acausal_machine() {
  return Machine("acausal", BehaviorType::event(ValueDomain::real()), BehaviorType::event(ValueDomain::real()),
                 InertiaMatrix::uniform(1, 1, Duration::zero()), [] { return std::make_unique<AcausalProcess>(); });
}

// ---------------------------------------------------------------------------
// Suite driver

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"presheaf", "gluing", "monoidal", "functor", "machines"};
  return names;
}

bool is_suite(const std::string& name) {
  return name == "all" || std::find(suite_names().begin(), suite_names().end(), name) != suite_names().end();
}

namespace {

LawReport check_machines(const SuiteOptions& o) {
  const auto t0 = std::chrono::steady_clock::now();
  LawReport rep;
  rep.suite = "machines";
  rep.seed = o.seed;
  rep.n = o.n;
  auto subjects = standard_contract_subjects(o.seed, o.n);
  if (o.mutation == Mutation::Acausal) {
    ContractOptions co;
    co.n = o.n;
    co.seed = o.seed;
    co.gen.quantum = Duration::from_ticks(1'000'000);
    co.gen.max_length = Duration::from_ticks(3'000'000'000);
    subjects.insert(subjects.begin(), ContractSubject{acausal_machine(), co});
  }
  for (const auto& s : subjects) {
    auto r = check_machine_contract(s.machine, s.options);
    for (auto& x : r.results) rep.results.push_back(std::move(x));
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace

std::vector<LawReport> run_suites(const std::string& selector, const SuiteOptions& o) {
  if (!is_suite(selector)) throw Error("unknown suite '" + selector + "'");
  if (o.n == 0) throw Error("case count must be at least 1");
  std::vector<LawReport> out;
  auto want = [&](const char* name) { return selector == "all" || selector == name; };
  if (want("presheaf")) out.push_back(check_presheaf_laws(o));
  if (want("gluing")) out.push_back(check_gluing(o));
  if (want("monoidal")) out.push_back(check_monoidal(o));
  if (want("functor")) out.push_back(check_functor_laws(o));
  if (want("machines")) out.push_back(check_machines(o));
  return out;
}

std::optional<std::string> replay(const Case& c, Mutation m) {
  const SectionAlgebra alg = mutated_algebra(m);
  std::vector<std::vector<LawDef>> families{presheaf_defs(alg), gluing_defs(alg), monoidal_defs(alg), functor_defs(alg)};
  if (c.law.rfind("contract.", 0) == 0) {
    auto subjects = standard_contract_subjects(1, 1);
    ContractOptions co;
    subjects.push_back({acausal_machine(), co});
    for (const auto& s : subjects) families.push_back(contract_defs(s.machine, s.options));
  }
  for (const auto& fam : families) {
    for (const auto& d : fam) {
      if (d.name == c.law) return guarded(d.check, c);
    }
  }
  throw Error("replay: unknown law '" + c.law + "'");
}

}  // namespace sheafmach::laws
