#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sheafmach/behavior_type.hpp"
#include "sheafmach/section.hpp"

namespace sheafmach {

/// Named sections recorded while a machine runs (the observable part of its state sheaf).
class Recorder {
 public:
  /// Glues `s` onto the tap `label`; the first call for a label starts it.
  void record(const std::string& label, const Section& s);
  const std::map<std::string, Section>& taps() const noexcept { return taps_; }
  std::map<std::string, Section> take() { return std::move(taps_); }

 private:
  std::map<std::string, Section> taps_;
};

/// Mutable run-state of a machine.
///
/// advance() receives the input on the next window [t, t + w] in local
/// coordinates [0, w] and returns the output on the same window. Windows are
/// consecutive: the first starts at absolute time 0, each later one starts
/// where the previous ended and repeats its endpoint (the shared point of two
/// compatible sections). Outputs of consecutive windows must glue.
class Process {
 public:
  virtual ~Process() = default;
  virtual Section advance(const Section& window, Recorder* rec) = 0;
  virtual std::unique_ptr<Process> clone() const = 0;
};

/// Dependency leads between ports: entry [out][in] is the smallest delay with
/// which output port `out` can react to input port `in`; nullopt means the
/// output never depends on that input.
class InertiaMatrix {
 public:
  using Entry = std::optional<Duration>;

  InertiaMatrix() = default;
  InertiaMatrix(std::size_t outs, std::size_t ins, Entry fill);
  static InertiaMatrix uniform(std::size_t outs, std::size_t ins, Duration eps) { return {outs, ins, eps}; }
  static InertiaMatrix diagonal(std::size_t n, Duration eps);

  std::size_t outputs() const noexcept { return outs_; }
  std::size_t inputs() const noexcept { return ins_; }
  const Entry& at(std::size_t out, std::size_t in) const { return m_[out * ins_ + in]; }
  Entry& at(std::size_t out, std::size_t in) { return m_[out * ins_ + in]; }

  /// Smallest entry, nullopt if no output depends on any input.
  Entry min() const;

  /// Series composition (first `a`, then `b`): min-plus product b ∘ a.
  static InertiaMatrix series(const InertiaMatrix& a, const InertiaMatrix& b);
  /// Block-diagonal sum.
  static InertiaMatrix parallel(const std::vector<InertiaMatrix>& parts);

  friend bool operator==(const InertiaMatrix&, const InertiaMatrix&) = default;

 private:
  std::size_t outs_ = 0;
  std::size_t ins_ = 0;
  std::vector<Entry> m_;
};

/// A total, deterministic machine: typed input and output wires, an inertia
/// budget, and a factory for fresh run-states. Machines are immutable values.
class Machine {
 public:
  using Factory = std::function<std::unique_ptr<Process>()>;

  Machine(std::string name, BehaviorType input, BehaviorType output, InertiaMatrix inertia, Factory factory);

  const std::string& name() const noexcept { return name_; }
  const BehaviorType& input_type() const noexcept { return input_; }
  const BehaviorType& output_type() const noexcept { return output_; }
  const InertiaMatrix& inertia() const noexcept { return inertia_; }
  /// Scalar inertiality ε: the smallest lead over all port pairs (nullopt: no dependency at all).
  InertiaMatrix::Entry inertiality() const { return inertia_.min(); }

  /// Label under which series composition records this machine's output ("" = not recorded).
  const std::string& output_label() const noexcept { return label_; }
  Machine labeled(std::string label) const;

  std::unique_ptr<Process> start() const { return factory_(); }

 private:
  std::string name_;
  BehaviorType input_;
  BehaviorType output_;
  InertiaMatrix inertia_;
  Factory factory_;
  std::string label_;
};

/// Input, output and recorded internal sections of one run.
struct RunRecord {
  Section input;
  std::map<std::string, Section> state_trace;
  Section output;
  Duration length;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

/// Sub-window of a record (every section restricted along [from, to]).
RunRecord restrict_to(const RunRecord& r, Time from, Time to);

/// First time at which a section holds a non-finite value.
std::optional<Time> first_non_finite(const Section& s);

/// Runs `m` on `input` in windows [k·h, (k+1)·h] with h = step_hint.
/// Throws TypeError if the input does not have the machine's input type,
/// NumericError for non-finite input values, RangeError if step_hint is 0.
RunRecord run(const Machine& m, const Section& input, Duration step_hint);

/// Runs a process on `input` over consecutive windows of size step_hint
/// starting at the process's current time; the building block of run().
Section drive(Process& p, const Section& input, Duration step_hint, Recorder* rec);

}  // namespace sheafmach
