#pragma once

#include <vector>

#include "sheafmach/machine.hpp"

namespace sheafmach {

/// m1 ⨟ m2. Throws TypeError unless m2's input type accepts m1's output type.
/// The middle wire is recorded under m1's output label; the result keeps m2's label.
Machine compose_series(const Machine& m1, const Machine& m2);
/// Left fold of compose_series over a non-empty chain.
Machine compose_series(const std::vector<Machine>& chain);

/// Parallel product of n >= 1 machines.
///
/// If every input type is an event type, the input wire is the single event
/// stream of ⊙ records (slot i = component i); otherwise it is the flat product
/// of the components' input ports. Outputs are combined by the same rule.
Machine tensor_parallel(const std::vector<Machine>& ms);
Machine tensor_parallel(const Machine& m1, const Machine& m2);

/// Pass-through machine of type (t, t).
Machine identity(const BehaviorType& t);

/// Diagonal: one input wire copied onto n output wires (product of n copies).
Machine broadcast(const BehaviorType& t, std::size_t n);

/// Feedback over the trailing loop ports of m.
///
/// m must have input ports (A..., C...) and output ports (B..., C...) where the
/// C ports match loop_type. The result has type (A, B). The loop is executed
/// in chunks no longer than the loop inertiality: each chunk's loop output is
/// first computed speculatively (on a clone of the run-state, with the loop
/// input held at its current value), then fed back, and the real loop output
/// is required to equal the speculated one.
///
/// loop_init gives the loop wire's value at time 0 (only its first point is used).
/// Throws TypeError on a type mismatch or zero loop inertiality.
Machine trace_feedback(const Machine& m, const BehaviorType& loop_type, const Section& loop_init);

/// ε-delay of type (t, t): output is `prefix` on [0, ε) and the input shifted by ε afterwards.
/// Throws RangeError unless ε > 0 and prefix has length ε; TypeError if t rejects the prefix.
Machine delay(Duration eps, const BehaviorType& t, const Section& prefix);

/// Sections of each port of a wire of type t.
std::vector<Section> split_ports(const Section& s, const BehaviorType& t);
/// Inverse of split_ports.
Section join_ports(std::vector<Section> parts, const BehaviorType& t, Duration length);

/// Event streams of ⊙ records ↔ per-component event streams.
EventSection zip_records(const std::vector<EventSection>& es);
std::vector<EventSection> unzip_records(const EventSection& e, std::size_t n);

}  // namespace sheafmach
