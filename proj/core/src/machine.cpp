#include "sheafmach/machine.hpp"

#include <algorithm>
#include <cmath>

#include "sheafmach/errors.hpp"

namespace sheafmach {

void Recorder::record(const std::string& label, const Section& s) {
  auto it = taps_.find(label);
  if (it == taps_.end()) {
    taps_.emplace(label, s);
  } else {
    it->second.extend(s);
  }
}

InertiaMatrix::InertiaMatrix(std::size_t outs, std::size_t ins, Entry fill)
    : outs_(outs), ins_(ins), m_(outs * ins, fill) {}

InertiaMatrix InertiaMatrix::diagonal(std::size_t n, Duration eps) {
  InertiaMatrix m(n, n, std::nullopt);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = eps;
  return m;
}

InertiaMatrix::Entry InertiaMatrix::min() const {
  Entry best;
  for (const auto& e : m_) {
    if (e && (!best || *e < *best)) best = e;
  }
  return best;
}

InertiaMatrix InertiaMatrix::series(const InertiaMatrix& a, const InertiaMatrix& b) {
  if (a.outs_ != b.ins_) throw TypeError("inertia: port counts do not match in series");
  InertiaMatrix r(b.outs_, a.ins_, std::nullopt);
  for (std::size_t i = 0; i < b.outs_; ++i) {
    for (std::size_t k = 0; k < a.ins_; ++k) {
      Entry best;
      for (std::size_t j = 0; j < a.outs_; ++j) {
        const auto& x = b.at(i, j);
        const auto& y = a.at(j, k);
        if (x && y && (!best || *x + *y < *best)) best = *x + *y;
      }
      r.at(i, k) = best;
    }
  }
  return r;
}

InertiaMatrix InertiaMatrix::parallel(const std::vector<InertiaMatrix>& parts) {
  std::size_t outs = 0;
  std::size_t ins = 0;
  for (const auto& p : parts) {
    outs += p.outs_;
    ins += p.ins_;
  }
  InertiaMatrix r(outs, ins, std::nullopt);
  std::size_t o = 0;
  std::size_t n = 0;
  for (const auto& p : parts) {
    for (std::size_t i = 0; i < p.outs_; ++i) {
      for (std::size_t j = 0; j < p.ins_; ++j) r.at(o + i, n + j) = p.at(i, j);
    }
    o += p.outs_;
    n += p.ins_;
  }
  return r;
}

Machine::Machine(std::string name, BehaviorType input, BehaviorType output, InertiaMatrix inertia, Factory factory)
    : name_(std::move(name)),
      input_(std::move(input)),
      output_(std::move(output)),
      inertia_(std::move(inertia)),
      factory_(std::move(factory)) {
  if (inertia_.inputs() != input_.ports().size()) {
    throw TypeError("machine " + name_ + ": inertia matrix does not match the input ports");
  }
  if (inertia_.outputs() != output_.ports().size()) {
    throw TypeError("machine " + name_ + ": inertia matrix does not match the output ports");
  }
}

Machine Machine::labeled(std::string label) const {
  Machine m = *this;
  m.label_ = std::move(label);
  return m;
}

RunRecord restrict_to(const RunRecord& r, Time from, Time to) {
  RunRecord out;
  out.input = restrict_to(r.input, from, to);
  out.output = restrict_to(r.output, from, to);
  for (const auto& [k, v] : r.state_trace) out.state_trace.emplace(k, restrict_to(v, from, to));
  out.length = to - from;
  return out;
}

std::optional<Time> first_non_finite(const Section& s) {
  switch (s.kind()) {
    case Section::Kind::Event:
      for (const auto& e : s.events().events()) {
        if (!e.value.is_finite()) return e.t;
      }
      return std::nullopt;
    case Section::Kind::Continuous:
      for (const auto& [t, v] : s.continuous().points()) {
        if (!v.is_finite()) return Duration::from_ticks(std::max<std::int64_t>(t, 0));
      }
      return std::nullopt;
    case Section::Kind::Clock:
      return std::nullopt;
    case Section::Kind::Product: {
      std::optional<Time> best;
      for (const auto& p : s.parts()) {
        const auto t = first_non_finite(p);
        if (t && (!best || *t < *best)) best = t;
      }
      return best;
    }
  }
  return std::nullopt;
}

Section drive(Process& p, const Section& input, Duration step_hint, Recorder* rec) {
  if (step_hint.is_zero()) throw RangeError("step_hint must be positive");
  const Duration len = input.length();
  if (len.is_zero()) return p.advance(input, rec);
  std::optional<Section> out;
  for (Time t = Time::zero(); t < len;) {
    const Time end = std::min(len, t + step_hint);
    Section piece = p.advance(restrict_to(input, t, end), rec);
    if (piece.length() != end - t) throw Error("process returned an output of the wrong length");
    if (out) {
      out->extend(piece);
    } else {
      out = std::move(piece);
    }
    t = end;
  }
  return std::move(*out);
}

RunRecord run(const Machine& m, const Section& input, Duration step_hint) {
  if (!m.input_type().admits(input)) {
    throw TypeError("run: input does not have type " + m.input_type().to_string() + " of machine " + m.name());
  }
  if (const auto t = first_non_finite(input)) {
    throw NumericError("run: non-finite input value", t->to_seconds());
  }
  auto p = m.start();
  Recorder rec;
  RunRecord r;
  r.output = drive(*p, input, step_hint, &rec);
  if (!m.output_type().admits(r.output)) {
    throw TypeError("run: machine " + m.name() + " produced output outside " + m.output_type().to_string());
  }
  r.input = input;
  r.length = input.length();
  r.state_trace = rec.take();
  return r;
}

}  // namespace sheafmach
