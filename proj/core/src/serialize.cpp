#include "sheafmach/serialize.hpp"

#include <charconv>
#include <sstream>

#include "sheafmach/errors.hpp"

namespace sheafmach {

namespace {

std::string signed_ticks(std::int64_t t) {
  if (t < 0) return "-" + format_seconds(Duration::from_ticks(-t));
  return format_seconds(Duration::from_ticks(t));
}

std::string real_text(double k) { return encode_value(Value(k)); }

void write_rows(std::ostream& os, std::int64_t t, const Value& v) {
  os << signed_ticks(t) << ',' << encode_value(v) << '\n';
}

}  // namespace

void write_section(std::ostream& os, const Section& s) {
  const std::string len = format_seconds(s.length());
  switch (s.kind()) {
    case Section::Kind::Event:
      os << "event length=" << len << '\n';
      for (const auto& e : s.events().events()) write_rows(os, e.t.ticks(), e.value);
      return;
    case Section::Kind::Continuous: {
      const auto& c = s.continuous();
      os << "continuous length=" << len << " lipschitz="
         << (c.lipschitz_bound() ? real_text(*c.lipschitz_bound()) : "none")
         << " codiscrete=" << (c.codiscrete() ? 1 : 0) << " pieces=" << c.pieces().size() << '\n';
      for (const auto& p : c.pieces()) {
        os << "piece " << signed_ticks(p.start) << ' ' << signed_ticks(p.end) << ' ';
        if (const auto* k = std::get_if<ContinuousSection::Constant>(&p.shape)) {
          os << "constant n=1\n";
          write_rows(os, p.start, k->value);
        } else if (const auto* l = std::get_if<ContinuousSection::Linear>(&p.shape)) {
          os << "linear n=2\n";
          write_rows(os, l->a.t, l->a.v);
          write_rows(os, l->b.t, l->b.v);
        } else {
          const auto& smp = std::get<ContinuousSection::Sampled>(p.shape).samples;
          os << "sampled n=" << smp.size() << '\n';
          for (const auto& x : smp) write_rows(os, x.t, x.v);
        }
      }
      return;
    }
    case Section::Kind::Clock: {
      const auto& k = s.clock();
      os << "clock length=" << len << " period=" << format_seconds(k.period())
         << " first=" << (k.first_tick() ? format_seconds(*k.first_tick()) : "none") << '\n';
      return;
    }
    case Section::Kind::Product:
      os << "product length=" << len << " parts=" << s.parts().size() << '\n';
      for (const auto& p : s.parts()) write_section(os, p);
      return;
  }
}

std::string section_to_string(const Section& s) {
  std::ostringstream os;
  write_section(os, s);
  return os.str();
}

namespace {

class Reader {
 public:
  explicit Reader(std::istream& is) : is_(is) {}

  Section section() {
    const std::string line = next();
    std::istringstream ls(line);
    std::string kind;
    ls >> kind;
    const Duration len = parse_seconds(field(ls, "length"));
    if (kind == "event") {
      std::vector<EventSection::Event> ev;
      while (peek_is_row()) {
        auto [t, v] = row();
        ev.push_back({Duration::from_ticks(t), std::move(v)});
      }
      return wrap([&] { return Section(EventSection(len, std::move(ev))); });
    }
    if (kind == "continuous") {
      const std::string k = field(ls, "lipschitz");
      const std::string cd = field(ls, "codiscrete");
      const std::size_t m = count(field(ls, "pieces"));
      std::vector<ContinuousSection::Piece> pieces;
      for (std::size_t i = 0; i < m; ++i) pieces.push_back(piece());
      return wrap([&] {
        ContinuousSection c(len, std::move(pieces));
        if (k != "none") c.set_lipschitz_bound(decode_value(k).numeric());
        c.set_codiscrete(cd == "1");
        return Section(std::move(c));
      });
    }
    if (kind == "clock") {
      const Duration d = parse_seconds(field(ls, "period"));
      const std::string f = field(ls, "first");
      std::optional<Time> first;
      if (f != "none") first = parse_seconds(f);
      return wrap([&] { return Section(ClockSection(len, d, first)); });
    }
    if (kind == "product") {
      const std::size_t n = count(field(ls, "parts"));
      std::vector<Section> parts;
      for (std::size_t i = 0; i < n; ++i) parts.push_back(section());
      return wrap([&] { return Section::product(len, std::move(parts)); });
    }
    fail("unknown section kind '" + kind + "'");
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error("section text line " + std::to_string(line_no_) + ": " + msg);
  }

  template <class F>
  Section wrap(F&& f) {
    try {
      return f();
    } catch (const Error& e) {
      fail(e.what());
    }
  }

  std::string next() {
    if (has_peek_) {
      has_peek_ = false;
      return peek_;
    }
    std::string line;
    if (!std::getline(is_, line)) fail("unexpected end of input");
    ++line_no_;
    return line;
  }

  bool peek_is_row() {
    if (!has_peek_) {
      if (!std::getline(is_, peek_)) return false;
      ++line_no_;
      has_peek_ = true;
    }
    return !peek_.empty() && (peek_[0] == '-' || (peek_[0] >= '0' && peek_[0] <= '9'));
  }

  std::string field(std::istringstream& ls, const std::string& key) {
    std::string tok;
    if (!(ls >> tok) || tok.rfind(key + "=", 0) != 0) fail("expected field '" + key + "='");
    return tok.substr(key.size() + 1);
  }

  std::size_t count(const std::string& s) {
    std::size_t n = 0;
    auto r = std::from_chars(s.data(), s.data() + s.size(), n);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) fail("bad count '" + s + "'");
    return n;
  }

  std::int64_t signed_time(const std::string& s) {
    try {
      if (!s.empty() && s[0] == '-') return -parse_seconds(s.substr(1)).ticks();
      return parse_seconds(s).ticks();
    } catch (const Error& e) {
      fail(e.what());
    }
  }

  std::pair<std::int64_t, Value> row() {
    const std::string line = next();
    const auto comma = line.find(',');
    if (comma == std::string::npos) fail("expected 't,value'");
    try {
      return {signed_time(line.substr(0, comma)), decode_value(line.substr(comma + 1))};
    } catch (const Error& e) {
      fail(e.what());
    }
  }

  ContinuousSection::Piece piece() {
    std::istringstream ls(next());
    std::string tag, a, b, shape;
    ls >> tag >> a >> b >> shape;
    if (tag != "piece") fail("expected 'piece'");
    ContinuousSection::Piece p;
    p.start = signed_time(a);
    p.end = signed_time(b);
    const std::size_t n = count(field(ls, "n"));
    std::vector<ContinuousSection::Sample> rows;
    for (std::size_t i = 0; i < n; ++i) {
      auto [t, v] = row();
      rows.push_back({t, std::move(v)});
    }
    if (shape == "constant" && n == 1) {
      p.shape = ContinuousSection::Constant{rows[0].v};
    } else if (shape == "linear" && n == 2) {
      p.shape = ContinuousSection::Linear{rows[0], rows[1]};
    } else if (shape == "sampled" && n >= 1) {
      p.shape = ContinuousSection::Sampled{std::move(rows)};
    } else {
      fail("bad piece descriptor");
    }
    return p;
  }

  std::istream& is_;
  std::size_t line_no_ = 0;
  std::string peek_;
  bool has_peek_ = false;
};

}  // namespace

Section read_section(std::istream& is) { return Reader(is).section(); }

Section section_from_string(const std::string& text) {
  std::istringstream is(text);
  return read_section(is);
}

}  // namespace sheafmach
