#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "sheafmach/errors.hpp"
#include "sheafmach/interpolate.hpp"
#include "sheafmach/time.hpp"

namespace sheafmach {

/// A trajectory on [0, length], stored as contiguous pieces.
///
/// Each piece covers [start, end) (the last one also covers `length`) and is a
/// constant, an affine segment through two anchor samples, or a sampled grid
/// with linear interpolation. Anchors and samples keep their original
/// positions, possibly outside the window, so restriction never re-evaluates
/// a value and restriction/gluing are exact.
///
/// Evaluation is right-continuous. A jump located exactly at `length` is
/// represented by a zero-length terminal piece holding the right-limit value.
/// Sections are kept in a canonical form: adjacent pieces describing the same
/// function are merged, so restrict-then-glue reproduces the original bit for bit.
template <class V>
class ContinuousStream {
 public:
  /// Positions are local nanosecond ticks; they may be negative or exceed the length.
  struct Sample {
    std::int64_t t = 0;
    V v{};

    friend bool operator==(const Sample& a, const Sample& b) { return a.t == b.t && a.v == b.v; }
  };
  struct Constant {
    V value{};
    friend bool operator==(const Constant& a, const Constant& b) { return a.value == b.value; }
  };
  struct Linear {
    Sample a, b;
    friend bool operator==(const Linear& x, const Linear& y) { return x.a == y.a && x.b == y.b; }
  };
  struct Sampled {
    std::vector<Sample> samples;
    friend bool operator==(const Sampled& x, const Sampled& y) { return x.samples == y.samples; }
  };
  using Shape = std::variant<Constant, Linear, Sampled>;

  struct Piece {
    std::int64_t start = 0;
    std::int64_t end = 0;
    Shape shape;

    bool zero_length() const noexcept { return start == end; }

    /// Value of the piece's function at a (possibly fractional) tick position.
    V at(double pos) const {
      using I = Interpolation<V>;
      if (const auto* c = std::get_if<Constant>(&shape)) return c->value;
      if (const auto* l = std::get_if<Linear>(&shape)) {
        if (pos == static_cast<double>(l->a.t)) return l->a.v;
        if (pos == static_cast<double>(l->b.t)) return l->b.v;
        const double w = (pos - static_cast<double>(l->a.t)) / static_cast<double>(l->b.t - l->a.t);
        return I::lerp(l->a.v, l->b.v, w);
      }
      const auto& s = std::get<Sampled>(shape).samples;
      auto it = std::upper_bound(s.begin(), s.end(), pos,
                                 [](double p, const Sample& x) { return p < static_cast<double>(x.t); });
      if (it == s.begin()) return s.front().v;
      const Sample& lo = *(it - 1);
      if (static_cast<double>(lo.t) == pos || it == s.end()) return lo.v;
      const double w = (pos - static_cast<double>(lo.t)) / static_cast<double>(it->t - lo.t);
      return I::lerp(lo.v, it->v, w);
    }

    friend bool operator==(const Piece& a, const Piece& b) {
      return a.start == b.start && a.end == b.end && a.shape == b.shape;
    }
  };

  /// Length-0 stream holding a default-constructed value.
  ContinuousStream() : pieces_{Piece{0, 0, Constant{V{}}}} {}

  /// Validates coverage ([0, length] without gaps) and canonicalizes.
  ContinuousStream(Duration length, std::vector<Piece> pieces) : length_(length), pieces_(std::move(pieces)) {
    validate();
    normalize();
  }

  static ContinuousStream constant(V v, Duration length) {
    return ContinuousStream(length, {Piece{0, length.ticks(), Constant{std::move(v)}}});
  }

  /// Affine from `from` at 0 to `to` at length (constant `from` when length is 0).
  static ContinuousStream linear(V from, V to, Duration length) {
    if (length.is_zero()) return constant(std::move(from), length);
    return ContinuousStream(length, {Piece{0, length.ticks(), Linear{{0, std::move(from)}, {length.ticks(), std::move(to)}}}});
  }

  /// Grid with linear interpolation; the first time must be 0, length is the last time.
  static ContinuousStream sampled(const std::vector<std::pair<Time, V>>& points) {
    if (points.empty() || !points.front().first.is_zero()) {
      throw RangeError("ContinuousStream::sampled: grid must start at t = 0");
    }
    std::vector<Sample> s;
    s.reserve(points.size());
    for (const auto& [t, v] : points) s.push_back(Sample{t.ticks(), v});
    const Duration len = points.back().first;
    return ContinuousStream(len, {Piece{0, len.ticks(), Sampled{std::move(s)}}});
  }

  Duration length() const noexcept { return length_; }
  const std::vector<Piece>& pieces() const noexcept { return pieces_; }
  const std::optional<double>& lipschitz_bound() const noexcept { return lipschitz_; }
  bool codiscrete() const noexcept { return codiscrete_; }

  /// Attach (or clear) a Lipschitz certificate. The bound is not re-verified here;
  /// see satisfies_lipschitz.
  ContinuousStream& set_lipschitz_bound(std::optional<double> k) {
    if (k && !(*k >= 0.0 && std::isfinite(*k))) throw RangeError("Lipschitz bound must be finite and >= 0");
    lipschitz_ = k;
    return *this;
  }
  /// Marks the stream as valued in a codiscrete space (jumps allowed).
  ContinuousStream& set_codiscrete(bool c) {
    codiscrete_ = c;
    return *this;
  }

  /// Index of the piece evaluated at t (right-continuous convention).
  std::size_t piece_index(Time t) const {
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), t.ticks(),
                               [](std::int64_t x, const Piece& p) { return x < p.start; });
    return static_cast<std::size_t>(it - pieces_.begin()) - 1;
  }

  /// Throws RangeError outside [0, length].
  V eval(Time t) const {
    if (t > length_) throw RangeError("eval: time outside the stream");
    return pieces_[piece_index(t)].at(static_cast<double>(t.ticks()));
  }

  /// Left limit at t > 0 (eval(0) for t = 0).
  V eval_left(Time t) const {
    if (t > length_) throw RangeError("eval_left: time outside the stream");
    if (t.is_zero()) return eval(t);
    auto it = std::lower_bound(pieces_.begin(), pieces_.end(), t.ticks(),
                               [](const Piece& p, std::int64_t x) { return p.start < x; });
    return (it - 1)->at(static_cast<double>(t.ticks()));
  }

  /// Stored-representation points inside the window: every piece contributes
  /// its extent ends and the samples in between. Jumps show up as two points
  /// with equal time.
  std::vector<std::pair<std::int64_t, V>> points() const {
    std::vector<std::pair<std::int64_t, V>> out;
    for (const auto& p : pieces_) {
      out.emplace_back(p.start, p.at(static_cast<double>(p.start)));
      if (const auto* s = std::get_if<Sampled>(&p.shape)) {
        for (const auto& x : s->samples) {
          if (x.t > p.start && x.t < p.end) out.emplace_back(x.t, x.v);
        }
      }
      if (p.end > p.start) out.emplace_back(p.end, p.at(static_cast<double>(p.end)));
    }
    return out;
  }

  /// Checks dist(c(t1), c(t2)) <= K |t1 - t2| on consecutive stored points
  /// (sufficient for piecewise-affine functions). `rel_slack` absorbs rounding.
  bool satisfies_lipschitz(double k, double rel_slack = 1e-9) const {
    const auto pts = points();
    for (std::size_t i = 1; i < pts.size(); ++i) {
      const double dt = static_cast<double>(pts[i].first - pts[i - 1].first) / Duration::kTicksPerSecond;
      const double dv = Interpolation<V>::distance(pts[i].second, pts[i - 1].second);
      if (dv > k * dt * (1.0 + rel_slack) + rel_slack * 1e-6) return false;
    }
    return true;
  }

  void check_compatible(const ContinuousStream& next) const {
    if (!(eval(length_) == next.eval(Time::zero()))) {
      throw CompatibilityError("glue: continuous streams disagree at the shared endpoint");
    }
  }

  /// In-place gluing: *this becomes glue(*this, next).
  void extend(const ContinuousStream& next) {
    check_compatible(next);
    std::optional<double> k;
    if (lipschitz_ && next.lipschitz_) k = std::max(*lipschitz_, *next.lipschitz_);
    append_pieces(next);
    lipschitz_ = k;
    codiscrete_ = codiscrete_ || next.codiscrete_;
  }

  /// In-place right-biased concatenation: *this on [0, length) followed by `next`.
  /// A value mismatch at the seam becomes a jump; the result is then codiscrete
  /// and loses its Lipschitz certificate.
  void splice(const ContinuousStream& next) {
    const bool matches = eval(length_) == next.eval(Time::zero());
    std::optional<double> k;
    if (matches && lipschitz_ && next.lipschitz_) k = std::max(*lipschitz_, *next.lipschitz_);
    append_pieces(next);
    lipschitz_ = k;
    codiscrete_ = codiscrete_ || next.codiscrete_ || !matches;
  }

  friend bool operator==(const ContinuousStream& a, const ContinuousStream& b) {
    return a.length_ == b.length_ && a.lipschitz_ == b.lipschitz_ && a.codiscrete_ == b.codiscrete_ &&
           a.pieces_ == b.pieces_;
  }

  template <class W>
  friend ContinuousStream<W> restrict_to(const ContinuousStream<W>& c, Time from, Time to);

 private:
  void validate() const {
    if (pieces_.empty()) throw RangeError("ContinuousStream: no pieces");
    const std::int64_t len = length_.ticks();
    if (pieces_.front().start != 0) throw RangeError("ContinuousStream: pieces must start at 0");
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      const Piece& p = pieces_[i];
      const bool last = i + 1 == pieces_.size();
      if (p.end < p.start) throw RangeError("ContinuousStream: piece with negative extent");
      if (p.zero_length() && !last) throw RangeError("ContinuousStream: zero-length piece before the end");
      if (!last && pieces_[i + 1].start != p.end) throw RangeError("ContinuousStream: gap between pieces");
      if (last && p.end != len) throw RangeError("ContinuousStream: pieces do not cover the length");
      if (const auto* l = std::get_if<Linear>(&p.shape)) {
        if (!(l->a.t < l->b.t)) throw RangeError("ContinuousStream: linear anchors must be increasing");
      }
      if (const auto* s = std::get_if<Sampled>(&p.shape)) {
        if (s->samples.empty()) throw RangeError("ContinuousStream: sampled piece without samples");
        for (std::size_t j = 1; j < s->samples.size(); ++j) {
          if (!(s->samples[j - 1].t < s->samples[j].t)) {
            throw RangeError("ContinuousStream: sample times must be strictly increasing");
          }
        }
        if (s->samples.front().t > p.start || s->samples.back().t < p.end) {
          throw RangeError("ContinuousStream: samples do not cover the piece extent");
        }
      }
    }
  }

  /// Keep only the samples needed to interpolate on [start, end].
  static void trim(Piece& p) {
    // A single point has one canonical form.
    if (p.zero_length()) {
      if (!std::holds_alternative<Constant>(p.shape)) p.shape = Constant{p.at(static_cast<double>(p.start))};
      return;
    }
    auto* s = std::get_if<Sampled>(&p.shape);
    if (s == nullptr) return;
    auto& v = s->samples;
    auto first = std::upper_bound(v.begin(), v.end(), p.start,
                                  [](std::int64_t x, const Sample& y) { return x < y.t; }) - 1;
    auto last = std::lower_bound(v.begin(), v.end(), p.end,
                                 [](const Sample& y, std::int64_t x) { return y.t < x; });
    if (last == v.end()) --last;
    if (first == v.begin() && last + 1 == v.end()) return;
    v = std::vector<Sample>(first, last + 1);
  }

  /// If `a` and the following piece `b` describe the same function, widens `a` to cover both.
  static bool try_merge(Piece& a, const Piece& b) {
    if (a.shape.index() != b.shape.index()) return false;
    if (const auto* ca = std::get_if<Constant>(&a.shape)) {
      if (!(ca->value == std::get<Constant>(b.shape).value)) return false;
    } else if (const auto* la = std::get_if<Linear>(&a.shape)) {
      if (!(*la == std::get<Linear>(b.shape))) return false;
    } else {
      auto& sa = std::get<Sampled>(a.shape).samples;
      const auto& sb = std::get<Sampled>(b.shape).samples;
      const std::int64_t lo = std::max(sa.front().t, sb.front().t);
      const std::int64_t hi = std::min(sa.back().t, sb.back().t);
      if (lo > hi) return false;
      auto ia = std::lower_bound(sa.begin(), sa.end(), lo, [](const Sample& y, std::int64_t x) { return y.t < x; });
      auto ib = std::lower_bound(sb.begin(), sb.end(), lo, [](const Sample& y, std::int64_t x) { return y.t < x; });
      auto ja = ia;
      auto jb = ib;
      while (ja != sa.end() && ja->t <= hi) {
        if (jb == sb.end() || !(*ja == *jb)) return false;
        ++ja;
        ++jb;
      }
      if (jb != sb.end() && jb->t <= hi) return false;
      // Samples of a past the overlap are exactly the overlap's tail, so append b's remainder.
      sa.insert(sa.end(), jb, sb.end());
    }
    a.end = b.end;
    trim(a);
    return true;
  }

  /// Canonical form starting at piece index `from` (earlier pieces are already canonical).
  void normalize(std::size_t from = 0) {
    for (std::size_t i = from; i < pieces_.size(); ++i) trim(pieces_[i]);
    std::size_t w = from;
    for (std::size_t i = from + 1; i < pieces_.size(); ++i) {
      if (!try_merge(pieces_[w], pieces_[i])) {
        ++w;
        if (w != i) pieces_[w] = std::move(pieces_[i]);
      }
    }
    pieces_.resize(w + 1);
    if (pieces_.size() >= 2 && pieces_.back().zero_length()) {
      const Piece& prev = pieces_[pieces_.size() - 2];
      if (prev.at(static_cast<double>(prev.end)) == pieces_.back().at(static_cast<double>(prev.end))) {
        pieces_.pop_back();
      }
    }
  }

  void append_pieces(const ContinuousStream& next) {
    if (length_.is_zero()) {
      pieces_ = next.pieces_;
      length_ = next.length_;
      return;
    }
    if (pieces_.back().zero_length()) pieces_.pop_back();
    if (next.length_.is_zero()) {
      // Gluing a single point: only the value at the end can change (splice).
      Piece tail = next.pieces_.front();
      shift(tail, length_.ticks());
      pieces_.push_back(std::move(tail));
    } else {
      const std::int64_t off = length_.ticks();
      pieces_.reserve(pieces_.size() + next.pieces_.size());
      for (const auto& p : next.pieces_) {
        Piece q = p;
        shift(q, off);
        pieces_.push_back(std::move(q));
      }
      length_ += next.length_;
    }
    normalize(pieces_.size() > next.pieces_.size() ? pieces_.size() - next.pieces_.size() - 1 : 0);
  }

  static void shift(Piece& p, std::int64_t off) {
    p.start += off;
    p.end += off;
    if (auto* l = std::get_if<Linear>(&p.shape)) {
      l->a.t += off;
      l->b.t += off;
    } else if (auto* s = std::get_if<Sampled>(&p.shape)) {
      for (auto& x : s->samples) x.t += off;
    }
  }

  Duration length_;
  std::vector<Piece> pieces_;
  std::optional<double> lipschitz_;
  bool codiscrete_ = false;
};

/// Restriction along [from, to], re-based to start at 0.
/// Throws RangeError unless 0 <= from <= to <= c.length().
template <class V>
ContinuousStream<V> restrict_to(const ContinuousStream<V>& c, Time from, Time to) {
  using Piece = typename ContinuousStream<V>::Piece;
  if (from > to || to > c.length()) throw RangeError("restrict: window out of bounds");
  const std::int64_t a = from.ticks();
  const std::int64_t b = to.ticks();
  const auto& ps = c.pieces();
  std::vector<Piece> out;
  const std::size_t at_end = c.piece_index(to);
  if (a == b) {
    Piece p = ps[at_end];
    p.start = p.end = a;
    out.push_back(std::move(p));
  } else {
    std::size_t last = 0;
    for (std::size_t i = c.piece_index(from); i < ps.size() && ps[i].start < b; ++i) {
      if (ps[i].end <= a) continue;
      Piece p = ps[i];
      p.start = std::max(p.start, a);
      p.end = std::min(p.end, b);
      out.push_back(std::move(p));
      last = i;
    }
    if (at_end != last) {
      Piece p = ps[at_end];
      p.start = p.end = b;
      out.push_back(std::move(p));
    }
  }
  for (auto& p : out) ContinuousStream<V>::shift(p, -a);
  ContinuousStream<V> r(to - from, std::move(out));
  r.lipschitz_ = c.lipschitz_;
  r.codiscrete_ = c.codiscrete_;
  return r;
}

/// The unique stream restricting to a on [0, l1] and to b on [l1, l1 + l2].
/// Throws CompatibilityError unless a(l1) == b(0).
template <class V>
ContinuousStream<V> glue(const ContinuousStream<V>& a, const ContinuousStream<V>& b) {
  ContinuousStream<V> out = a;
  out.extend(b);
  return out;
}

}  // namespace sheafmach
