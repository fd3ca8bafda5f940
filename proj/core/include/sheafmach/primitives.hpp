#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "sheafmach/machine.hpp"

namespace sheafmach {

/// Base for event-to-event processes that react to each input event in order.
///
/// Handles the window protocol: an event repeated at the start of a later
/// window is not processed again; the output it produced is repeated instead.
class EventReactor : public Process {
 public:
  Section advance(const Section& window, Recorder* rec) final;

 protected:
  /// Called once per input event with its absolute time; returns the output value, if any.
  virtual std::optional<Value> react(Time t, const Value& v) = 0;
  /// Absolute time of the current window's start.
  Time window_start() const noexcept { return base_; }

 private:
  Time base_;
  bool first_ = true;
  std::optional<Value> boundary_out_;
};

/// Keeps the events whose value satisfies `keep`: the preimage filter A' ⊆ A.
Machine filter(const ValueDomain& d, std::function<bool(const Value&)> keep);

/// Emits (t, c(t)) at every absolute tick t = phase + k·period inside the run.
/// Throws RangeError unless 0 <= phase < period.
Machine periodic_sampler(Duration period, Duration phase, const ValueDomain& d);

/// L-level-crossing sampler on real values with dist(x, y) = |x - y|.
///
/// Emits (t_{i+1}, c(t_{i+1})) at the least t > t_i with |c(t) - c(t_i)| >= L,
/// starting from the anchor a0 at t = 0 (a crossing at t = 0 itself counts).
/// Times are exact to one tick: the input is piecewise affine between its
/// stored points, so each segment is solved directly and then settled by a
/// tick-level bisection. The comparison allows a relative slack of 1e-12 so
/// that a value computed as L minus rounding still counts as a crossing.
///
/// The input type must carry a Lipschitz bound. Throws RangeError if L <= 0.
Machine level_crossing_sampler(double level, double a0);

/// Relative slack used by crossing comparisons (see level_crossing_sampler).
constexpr double kCrossingSlack = 1e-12;
inline bool reaches(double magnitude, double level) { return magnitude >= level * (1.0 - kCrossingSlack); }

/// Zero-order hold: a0 on [0, s1), a(s_i) on [s_i, s_{i+1}), a(s_n) on [s_n, ℓ].
Machine zoh_reconstructor(const ValueDomain& d, Value a0);

/// Discrete dynamical system s_i = update(a_i, s_{i-1}) with output readout(s_i)
/// at each input time.
template <class S>
Machine dds_machine(std::string name, const ValueDomain& in, const ValueDomain& out,
                    std::function<S(const Value&, const S&)> update, std::function<Value(const S&)> readout, S s0);

/// As dds_machine, with the update also receiving the event time in seconds.
template <class S>
Machine timed_dds_machine(std::string name, const ValueDomain& in, const ValueDomain& out,
                          std::function<S(double, const Value&, const S&)> update,
                          std::function<Value(const S&)> readout, S s0);

/// Continuous dynamical system ṡ = dynamics(s, a), b = readout(s).
struct CdsSpec {
  std::function<std::vector<double>(const std::vector<double>&, double)> dynamics;
  std::function<double(const std::vector<double>&)> readout;
  std::vector<double> s0;
  Duration step;  // RK4 step h
  std::optional<double> output_lipschitz;
  bool input_codiscrete = true;  // accept jump inputs (ZOH)
};

/// Fixed-step RK4 on the absolute grid k·h, additionally split at input piece
/// boundaries so no step straddles a jump. The output is sampled at every step
/// point and linearly interpolated. Throws NumericError at the first non-finite state.
Machine cds_machine(std::string name, CdsSpec spec);

/// Pointwise map of a real continuous wire. Constant pieces map to constants,
/// sampled pieces map sample-by-sample, affine pieces are resampled on the
/// absolute grid k·h plus the piece ends. `bound` maps the input certificate
/// to the output certificate.
Machine map_continuous(std::string name, std::function<double(double)> f, BehaviorType in, BehaviorType out,
                       Duration h, std::function<std::optional<double>(std::optional<double>)> bound);

// ---------------------------------------------------------------------------

namespace detail {

template <class S, class Update>
class DdsProcess final : public EventReactor {
 public:
  DdsProcess(std::shared_ptr<const Update> update, std::shared_ptr<const std::function<Value(const S&)>> readout,
             S s)
      : update_(std::move(update)), readout_(std::move(readout)), s_(std::move(s)) {}

  std::unique_ptr<Process> clone() const override { return std::make_unique<DdsProcess>(*this); }

 protected:
  std::optional<Value> react(Time t, const Value& v) override {
    if constexpr (std::is_invocable_v<const Update&, const Value&, const S&>) {
      s_ = (*update_)(v, s_);
    } else {
      s_ = (*update_)(t.to_seconds(), v, s_);
    }
    return (*readout_)(s_);
  }

 private:
  std::shared_ptr<const Update> update_;
  std::shared_ptr<const std::function<Value(const S&)>> readout_;
  S s_;
};

template <class S, class Update>
Machine make_dds(std::string name, const ValueDomain& in, const ValueDomain& out, Update update,
                 std::function<Value(const S&)> readout, S s0) {
  auto u = std::make_shared<const Update>(std::move(update));
  auto r = std::make_shared<const std::function<Value(const S&)>>(std::move(readout));
  return Machine(std::move(name), BehaviorType::event(in), BehaviorType::event(out),
                 InertiaMatrix::uniform(1, 1, Duration::zero()),
                 [u, r, s0] { return std::make_unique<DdsProcess<S, Update>>(u, r, s0); });
}

}  // namespace detail

template <class S>
Machine dds_machine(std::string name, const ValueDomain& in, const ValueDomain& out,
                    std::function<S(const Value&, const S&)> update, std::function<Value(const S&)> readout, S s0) {
  return detail::make_dds<S>(std::move(name), in, out, std::move(update), std::move(readout), std::move(s0));
}

template <class S>
Machine timed_dds_machine(std::string name, const ValueDomain& in, const ValueDomain& out,
                          std::function<S(double, const Value&, const S&)> update,
                          std::function<Value(const S&)> readout, S s0) {
  return detail::make_dds<S>(std::move(name), in, out, std::move(update), std::move(readout), std::move(s0));
}

}  // namespace sheafmach
