#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sheafmach/laws/generators.hpp"
#include "sheafmach/machine.hpp"

namespace sheafmach::laws {

/// Restriction and gluing as injectable functions, so broken variants can be
/// run through the same suites.
struct SectionAlgebra {
  std::function<Section(const Section&, Time, Time)> restrict;
  std::function<Section(const Section&, const Section&)> glue;

  static SectionAlgebra standard();
};

/// Deliberate defects used to check that the suites catch them.
enum class Mutation {
  None,
  RestrictExclusive,  ///< restriction drops events at the right endpoint
  GlueDropBoundary,   ///< gluing drops the event at the seam
  Acausal,            ///< the machine suite includes a machine that peeks ahead
};

std::optional<Mutation> parse_mutation(const std::string& name);
SectionAlgebra mutated_algebra(Mutation m);

/// One generated instance of a law: the sections it mentions and its time parameters.
struct Case {
  std::string law;
  std::vector<Section> sections;
  std::vector<Time> params;

  friend bool operator==(const Case&, const Case&) = default;
};

std::string encode_case(const Case& c);
/// Throws Error on malformed text.
Case decode_case(const std::string& text);

/// Returns a description of the violation, or nullopt when the law holds.
using LawCheck = std::function<std::optional<std::string>(const Case&)>;

/// Greedy shrinking: repeatedly drops single events and shortens the window
/// while the case still fails. The result is locally minimal.
Case shrink(Case c, const LawCheck& check);

struct LawResult {
  std::string law;
  std::size_t cases = 0;
  bool passed = true;
  std::optional<Case> counterexample;
  std::string failure;
};

struct LawReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::vector<LawResult> results;
  double seconds = 0.0;

  bool passed() const;
  std::size_t cases() const;
  std::string to_text() const;
  std::string to_json() const;
};

struct SuiteOptions {
  std::size_t n = 1000;
  std::uint64_t seed = 1;
  Mutation mutation = Mutation::None;
};

/// Suites: presheaf, gluing, monoidal, functor, machines; "all" runs every one.
const std::vector<std::string>& suite_names();
bool is_suite(const std::string& name);
/// Throws Error for an unknown suite or n == 0.
std::vector<LawReport> run_suites(const std::string& selector, const SuiteOptions& opts);

LawReport check_presheaf_laws(const SuiteOptions& opts);
LawReport check_gluing(const SuiteOptions& opts);
LawReport check_monoidal(const SuiteOptions& opts);
LawReport check_functor_laws(const SuiteOptions& opts);

/// Re-checks a serialized counterexample against the standard (or mutated) algebra.
std::optional<std::string> replay(const Case& c, Mutation m = Mutation::None);

/// Input generation for machine contracts. Prefix points and window steps are
/// drawn on `grid`, which must be a multiple of any integrator step of the machine.
struct ContractOptions {
  std::size_t n = 200;
  std::uint64_t seed = 1;
  GenOptions gen;
  Duration grid = Duration::from_ticks(1'000'000);
  /// Window sizes tried by the repeat-run and restriction checks.
  std::vector<Duration> step_hints;
  /// Name used in law identifiers (default: the machine name with blanks replaced).
  std::string label;
};

/// Determinism, totality, inertiality and causality of one machine.
LawReport check_machine_contract(const Machine& m, const ContractOptions& opts);

/// A machine whose output at each input event is the value of the last event in
/// the current window: it depends on the future.
Machine acausal_machine();

struct ContractSubject {
  Machine machine;
  ContractOptions options;
};

/// The catalogue of machines the machine suite checks.
std::vector<ContractSubject> standard_contract_subjects(std::uint64_t seed, std::size_t n);

}  // namespace sheafmach::laws
