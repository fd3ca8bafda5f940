#include "sheafmach/combinators.hpp"

#include <algorithm>

#include "sheafmach/errors.hpp"
#include "sheafmach/tensor.hpp"

namespace sheafmach {

std::vector<Section> split_ports(const Section& s, const BehaviorType& t) {
  if (t.kind() == BehaviorType::Kind::Product) return s.parts();
  return {s};
}

Section join_ports(std::vector<Section> parts, const BehaviorType& t, Duration length) {
  if (t.kind() == BehaviorType::Kind::Product) return Section::product(length, std::move(parts));
  if (parts.size() != 1) throw TypeError("join_ports: expected exactly one port");
  return std::move(parts.front());
}

EventSection zip_records(const std::vector<EventSection>& es) {
  const auto z = zip_slots(es);
  EventSection out(z.length());
  for (const auto& e : z.events()) {
    Value::Record rec;
    rec.reserve(e.value.size());
    for (const auto& s : e.value) rec.push_back(Value::Entry{s.index, s.value});
    out.push_back(e.t, Value(std::move(rec)));
  }
  return out;
}

std::vector<EventSection> unzip_records(const EventSection& e, std::size_t n) {
  std::vector<EventSection> out(n, EventSection(e.length()));
  for (const auto& x : e.events()) {
    for (const auto& s : x.value.as_record()) {
      if (s.slot >= n) throw RangeError("unzip_records: slot out of range");
      out[s.slot].push_back(x.t, s.value);
    }
  }
  return out;
}

namespace {

class SeriesProcess final : public Process {
 public:
  SeriesProcess(std::unique_ptr<Process> a, std::unique_ptr<Process> b, std::string label)
      : a_(std::move(a)), b_(std::move(b)), label_(std::move(label)) {}

  Section advance(const Section& window, Recorder* rec) override {
    Section mid = a_->advance(window, rec);
    if (rec && !label_.empty()) rec->record(label_, mid);
    return b_->advance(mid, rec);
  }

  std::unique_ptr<Process> clone() const override {
    return std::make_unique<SeriesProcess>(a_->clone(), b_->clone(), label_);
  }

 private:
  std::unique_ptr<Process> a_;
  std::unique_ptr<Process> b_;
  std::string label_;
};

bool all_events(const std::vector<BehaviorType>& ts) {
  return std::all_of(ts.begin(), ts.end(), [](const BehaviorType& t) { return t.kind() == BehaviorType::Kind::Event; });
}

struct TensorLayout {
  std::vector<BehaviorType> in_types;
  std::vector<BehaviorType> out_types;
  bool zipped_in = false;
  bool zipped_out = false;
  std::vector<std::size_t> in_ports;
  std::vector<std::size_t> out_ports;
};

class TensorProcess final : public Process {
 public:
  TensorProcess(std::vector<std::unique_ptr<Process>> ps, std::shared_ptr<const TensorLayout> layout)
      : ps_(std::move(ps)), layout_(std::move(layout)) {}

  Section advance(const Section& window, Recorder*) override {
    const auto& L = *layout_;
    const std::size_t n = ps_.size();
    const Duration w = window.length();
    std::vector<Section> inputs;
    inputs.reserve(n);
    if (L.zipped_in) {
      for (auto& e : unzip_records(window.events(), n)) inputs.emplace_back(std::move(e));
    } else {
      const auto& flat = window.parts();
      std::size_t k = 0;
      for (std::size_t i = 0; i < n; ++i) {
        std::vector<Section> mine(flat.begin() + static_cast<std::ptrdiff_t>(k),
                                  flat.begin() + static_cast<std::ptrdiff_t>(k + L.in_ports[i]));
        k += L.in_ports[i];
        inputs.push_back(join_ports(std::move(mine), L.in_types[i], w));
      }
    }
    std::vector<Section> outputs;
    outputs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) outputs.push_back(ps_[i]->advance(inputs[i], nullptr));
    if (L.zipped_out) {
      std::vector<EventSection> es;
      es.reserve(n);
      for (const auto& o : outputs) es.push_back(o.events());
      return zip_records(es);
    }
    std::vector<Section> flat;
    for (std::size_t i = 0; i < n; ++i) {
      for (auto& p : split_ports(outputs[i], L.out_types[i])) flat.push_back(std::move(p));
    }
    return Section::product(w, std::move(flat));
  }

  std::unique_ptr<Process> clone() const override {
    std::vector<std::unique_ptr<Process>> ps;
    ps.reserve(ps_.size());
    for (const auto& p : ps_) ps.push_back(p->clone());
    return std::make_unique<TensorProcess>(std::move(ps), layout_);
  }

 private:
  std::vector<std::unique_ptr<Process>> ps_;
  std::shared_ptr<const TensorLayout> layout_;
};

class IdentityProcess final : public Process {
 public:
  Section advance(const Section& window, Recorder*) override { return window; }
  std::unique_ptr<Process> clone() const override { return std::make_unique<IdentityProcess>(); }
};

class BroadcastProcess final : public Process {
 public:
  BroadcastProcess(BehaviorType t, std::size_t n) : t_(std::move(t)), n_(n) {}

  Section advance(const Section& window, Recorder*) override {
    const auto ports = split_ports(window, t_);
    std::vector<Section> out;
    out.reserve(ports.size() * n_);
    for (std::size_t i = 0; i < n_; ++i) out.insert(out.end(), ports.begin(), ports.end());
    return Section::product(window.length(), std::move(out));
  }
  std::unique_ptr<Process> clone() const override { return std::make_unique<BroadcastProcess>(*this); }

 private:
  BehaviorType t_;
  std::size_t n_;
};

}  // namespace

Machine compose_series(const Machine& m1, const Machine& m2) {
  if (!m2.input_type().accepts(m1.output_type())) {
    throw TypeError("compose_series: " + m1.name() + " produces " + m1.output_type().to_string() + " but " +
                    m2.name() + " expects " + m2.input_type().to_string());
  }
  auto inertia = InertiaMatrix::series(m1.inertia(), m2.inertia());
  Machine m(m1.name() + " ⨟ " + m2.name(), m1.input_type(), m2.output_type(), std::move(inertia),
            [m1, m2] { return std::make_unique<SeriesProcess>(m1.start(), m2.start(), m1.output_label()); });
  // The composite's output wire is m2's output wire.
  return m.labeled(m2.output_label());
}

Machine compose_series(const std::vector<Machine>& chain) {
  if (chain.empty()) throw TypeError("compose_series: empty chain");
  Machine acc = chain.front();
  for (std::size_t i = 1; i < chain.size(); ++i) acc = compose_series(acc, chain[i]);
  return acc;
}

Machine tensor_parallel(const std::vector<Machine>& ms) {
  if (ms.empty()) throw TypeError("tensor_parallel: no machines");
  auto layout = std::make_shared<TensorLayout>();
  std::vector<InertiaMatrix> blocks;
  std::string name = "(";
  for (const auto& m : ms) {
    layout->in_types.push_back(m.input_type());
    layout->out_types.push_back(m.output_type());
    layout->in_ports.push_back(m.input_type().ports().size());
    layout->out_ports.push_back(m.output_type().ports().size());
    blocks.push_back(m.inertia());
    if (name.size() > 1) name += " ⊗ ";
    name += m.name();
  }
  name += ")";
  layout->zipped_in = all_events(layout->in_types);
  layout->zipped_out = all_events(layout->out_types);

  auto domain_tensor = [](const std::vector<BehaviorType>& ts) {
    std::vector<ValueDomain> ds;
    for (const auto& t : ts) ds.push_back(t.domain());
    return BehaviorType::event(ValueDomain::tensor(std::move(ds)));
  };
  BehaviorType in = layout->zipped_in ? domain_tensor(layout->in_types) : BehaviorType::product(layout->in_types);
  BehaviorType out = layout->zipped_out ? domain_tensor(layout->out_types) : BehaviorType::product(layout->out_types);

  InertiaMatrix e = InertiaMatrix::parallel(blocks);
  if (layout->zipped_in) {
    InertiaMatrix c(e.outputs(), 1, std::nullopt);
    for (std::size_t i = 0; i < e.outputs(); ++i) {
      for (std::size_t j = 0; j < e.inputs(); ++j) {
        if (e.at(i, j) && (!c.at(i, 0) || *e.at(i, j) < *c.at(i, 0))) c.at(i, 0) = e.at(i, j);
      }
    }
    e = c;
  }
  if (layout->zipped_out) e = InertiaMatrix::series(e, InertiaMatrix(1, e.outputs(), Duration::zero()));

  std::shared_ptr<const TensorLayout> frozen = layout;
  return Machine(name, in, out, std::move(e), [ms, frozen] {
    std::vector<std::unique_ptr<Process>> ps;
    ps.reserve(ms.size());
    for (const auto& m : ms) ps.push_back(m.start());
    return std::make_unique<TensorProcess>(std::move(ps), frozen);
  });
}

Machine tensor_parallel(const Machine& m1, const Machine& m2) { return tensor_parallel(std::vector<Machine>{m1, m2}); }

Machine identity(const BehaviorType& t) {
  return Machine("id", t, t, InertiaMatrix::diagonal(t.ports().size(), Duration::zero()),
                 [] { return std::make_unique<IdentityProcess>(); });
}

Machine broadcast(const BehaviorType& t, std::size_t n) {
  if (n == 0) throw TypeError("broadcast: need at least one copy");
  const std::size_t k = t.ports().size();
  InertiaMatrix e(k * n, k, std::nullopt);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t p = 0; p < k; ++p) e.at(c * k + p, p) = Duration::zero();
  }
  std::vector<BehaviorType> copies(n, t);
  return Machine("Δ" + std::to_string(n), t, BehaviorType::product(std::move(copies)), std::move(e),
                 [t, n] { return std::make_unique<BroadcastProcess>(t, n); });
}

namespace {

BehaviorType ports_type(const std::vector<BehaviorType>& ports) {
  if (ports.size() == 1) return ports.front();
  return BehaviorType::product(ports);
}

/// The loop wire held at its current point value for `len`.
Section hold(const Section& germ, Duration len) {
  switch (germ.kind()) {
    case Section::Kind::Event: {
      EventSection e(len);
      if (!germ.events().empty()) e.push_back(Time::zero(), germ.events().events().front().value);
      return e;
    }
    case Section::Kind::Continuous: {
      const auto& g = germ.continuous();
      auto c = ContinuousSection::constant(g.eval(Time::zero()), len);
      c.set_lipschitz_bound(g.lipschitz_bound());
      c.set_codiscrete(g.codiscrete());
      return c;
    }
    case Section::Kind::Clock:
      break;
    case Section::Kind::Product: {
      std::vector<Section> parts;
      for (const auto& p : germ.parts()) parts.push_back(hold(p, len));
      return Section::product(len, std::move(parts));
    }
  }
  throw TypeError("trace: clock wires cannot be looped");
}

struct TraceLayout {
  std::size_t na = 0;
  std::size_t nb = 0;
  std::size_t nc = 0;
  BehaviorType a_type = BehaviorType::unit();
  BehaviorType b_type = BehaviorType::unit();
  BehaviorType c_type = BehaviorType::unit();
  BehaviorType inner_in = BehaviorType::unit();
  BehaviorType inner_out = BehaviorType::unit();
  std::optional<Duration> chunk;
};

class TraceProcess final : public Process {
 public:
  TraceProcess(std::unique_ptr<Process> inner, std::shared_ptr<const TraceLayout> layout, Section germ)
      : inner_(std::move(inner)), layout_(std::move(layout)), germ_(std::move(germ)) {}

  Section advance(const Section& window, Recorder* rec) override {
    const auto& L = *layout_;
    const Duration w = window.length();
    const auto a_ports = L.na == 0 ? std::vector<Section>{} : split_ports(window, L.a_type);
    std::optional<Section> out;
    Time t = Time::zero();
    do {
      const Time end = L.chunk ? std::min(w, t + *L.chunk) : w;
      const Duration len = end - t;
      std::vector<Section> a_chunk;
      a_chunk.reserve(a_ports.size());
      for (const auto& p : a_ports) a_chunk.push_back(restrict_to(p, t, end));

      auto speculative = inner_->clone();
      const Section guess = split_loop(speculative->advance(assemble(a_chunk, hold(germ_, len), len), nullptr), len).second;
      auto [b, loop] = split_loop(inner_->advance(assemble(a_chunk, guess, len), rec), len);
      if (loop != guess) {
        throw Error("trace: loop output on a chunk depends on the loop input on the same chunk");
      }
      if (rec) rec->record("loop", loop);
      germ_ = endpoint(loop);
      if (out) {
        out->extend(b);
      } else {
        out = std::move(b);
      }
      t = end;
    } while (t < w);
    return std::move(*out);
  }

  std::unique_ptr<Process> clone() const override {
    return std::make_unique<TraceProcess>(inner_->clone(), layout_, germ_);
  }

 private:
  Section assemble(const std::vector<Section>& a, const Section& loop, Duration len) const {
    const auto& L = *layout_;
    std::vector<Section> ports = a;
    for (auto& p : split_ports(loop, L.c_type)) ports.push_back(std::move(p));
    return join_ports(std::move(ports), L.inner_in, len);
  }

  std::pair<Section, Section> split_loop(const Section& y, Duration len) const {
    const auto& L = *layout_;
    auto ports = split_ports(y, L.inner_out);
    std::vector<Section> b(ports.begin(), ports.begin() + static_cast<std::ptrdiff_t>(L.nb));
    std::vector<Section> c(ports.begin() + static_cast<std::ptrdiff_t>(L.nb), ports.end());
    Section bs = L.nb == 0 ? Section::unit(len) : join_ports(std::move(b), L.b_type, len);
    return {std::move(bs), join_ports(std::move(c), L.c_type, len)};
  }

  std::unique_ptr<Process> inner_;
  std::shared_ptr<const TraceLayout> layout_;
  Section germ_;
};

class DelayProcess final : public Process {
 public:
  DelayProcess(Duration eps, Section pending) : eps_(eps), pending_(std::move(pending)) {}

  Section advance(const Section& window, Recorder*) override {
    const Duration w = window.length();
    Section buffer = pending_;
    if (first_) {
      buffer.splice(window);
      first_ = false;
    } else {
      // The window's first point repeats the previous window's last one, which
      // is already the last point of the pending buffer.
      buffer.extend(window);
    }
    pending_ = restrict_to(buffer, w, w + eps_);
    return restrict_to(buffer, Time::zero(), w);
  }

  std::unique_ptr<Process> clone() const override { return std::make_unique<DelayProcess>(*this); }

 private:
  Duration eps_;
  Section pending_;
  bool first_ = true;
};

}  // namespace

Machine trace_feedback(const Machine& m, const BehaviorType& loop_type, const Section& loop_init) {
  const auto in_ports = m.input_type().ports();
  const auto out_ports = m.output_type().ports();
  const auto loop_ports = loop_type.ports();
  const std::size_t nc = loop_ports.size();
  if (nc == 0) throw TypeError("trace: empty loop type");
  if (in_ports.size() < nc || out_ports.size() < nc) throw TypeError("trace: machine has fewer ports than the loop");
  auto layout = std::make_shared<TraceLayout>();
  layout->nc = nc;
  layout->na = in_ports.size() - nc;
  layout->nb = out_ports.size() - nc;
  for (std::size_t k = 0; k < nc; ++k) {
    const auto& lp = loop_ports[k];
    if (lp.kind() == BehaviorType::Kind::Clock) throw TypeError("trace: clock wires cannot be looped");
    if (!in_ports[layout->na + k].accepts(lp) || !lp.accepts(out_ports[layout->nb + k])) {
      throw TypeError("trace: loop port " + std::to_string(k) + " does not match " + lp.to_string());
    }
  }
  if (!loop_type.admits(loop_init)) throw TypeError("trace: loop_init does not have the loop type");
  auto slice = [](const std::vector<BehaviorType>& v, std::size_t from, std::size_t to) {
    return std::vector<BehaviorType>(v.begin() + static_cast<std::ptrdiff_t>(from),
                                     v.begin() + static_cast<std::ptrdiff_t>(to));
  };
  const auto a_ports = slice(in_ports, 0, layout->na);
  const auto b_ports = slice(out_ports, 0, layout->nb);
  layout->a_type = a_ports.empty() ? BehaviorType::unit() : ports_type(a_ports);
  layout->b_type = b_ports.empty() ? BehaviorType::unit() : ports_type(b_ports);
  layout->c_type = loop_type;
  layout->inner_in = m.input_type();
  layout->inner_out = m.output_type();

  // Loop sub-matrix: lead from loop input k to loop output k'.
  const auto& e = m.inertia();
  using Entry = InertiaMatrix::Entry;
  std::vector<std::vector<Entry>> z(nc, std::vector<Entry>(nc));
  for (std::size_t kp = 0; kp < nc; ++kp) {
    for (std::size_t k = 0; k < nc; ++k) {
      z[kp][k] = e.at(layout->nb + kp, layout->na + k);
      if (z[kp][k] && z[kp][k]->is_zero()) {
        throw TypeError("trace: loop path without inertia (insert a delay)");
      }
      if (z[kp][k] && (!layout->chunk || *z[kp][k] < *layout->chunk)) layout->chunk = z[kp][k];
    }
  }
  // Reflexive-transitive closure of loop-to-loop leads.
  for (std::size_t k = 0; k < nc; ++k) z[k][k] = Duration::zero();
  auto add = [](const Entry& x, const Entry& y) -> Entry {
    if (x && y) return *x + *y;
    return std::nullopt;
  };
  auto better = [](Entry& into, const Entry& cand) {
    if (cand && (!into || *cand < *into)) into = cand;
  };
  for (std::size_t m2 = 0; m2 < nc; ++m2) {
    for (std::size_t i = 0; i < nc; ++i) {
      for (std::size_t j = 0; j < nc; ++j) better(z[i][j], add(z[i][m2], z[m2][j]));
    }
  }
  InertiaMatrix r(layout->nb, layout->na, std::nullopt);
  for (std::size_t b = 0; b < layout->nb; ++b) {
    for (std::size_t a = 0; a < layout->na; ++a) {
      Entry best = e.at(b, a);
      for (std::size_t kp = 0; kp < nc; ++kp) {
        for (std::size_t k = 0; k < nc; ++k) {
          better(best, add(add(e.at(b, layout->na + kp), z[kp][k]), e.at(layout->nb + k, a)));
        }
      }
      r.at(b, a) = best;
    }
  }

  Section germ = restrict_to(loop_init, Time::zero(), Time::zero());
  std::shared_ptr<const TraceLayout> frozen = layout;
  return Machine("Tr(" + m.name() + ")", layout->a_type, layout->b_type, std::move(r),
                 [m, frozen, germ] { return std::make_unique<TraceProcess>(m.start(), frozen, germ); });
}

Machine delay(Duration eps, const BehaviorType& t, const Section& prefix) {
  if (eps.is_zero()) throw RangeError("delay: ε must be positive");
  if (prefix.length() != eps) throw RangeError("delay: prefix length must equal ε");
  if (!t.admits(prefix)) throw TypeError("delay: prefix does not have type " + t.to_string());
  return Machine("Del(" + format_seconds(eps) + ")", t, t, InertiaMatrix::diagonal(t.ports().size(), eps),
                 [eps, prefix] { return std::make_unique<DelayProcess>(eps, prefix); });
}

}  // namespace sheafmach
