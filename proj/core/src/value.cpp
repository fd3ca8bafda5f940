#include "sheafmach/value.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>

#include "sheafmach/errors.hpp"

namespace sheafmach {

Value::Value(Record r) : data_(std::move(r)) {
  const auto& rec = std::get<Record>(data_);
  for (std::size_t i = 1; i < rec.size(); ++i) {
    if (!(rec[i - 1].slot < rec[i].slot)) throw TypeError("record slots must be strictly increasing");
  }
}

double Value::as_real() const {
  if (!is_real()) throw TypeError("value is not a real");
  return std::get<double>(data_);
}

std::int64_t Value::as_integer() const {
  if (!is_integer()) throw TypeError("value is not an integer");
  return std::get<std::int64_t>(data_);
}

const std::string& Value::as_text() const {
  if (!is_text()) throw TypeError("value is not a text");
  return std::get<std::string>(data_);
}

const Value::Record& Value::as_record() const {
  if (!is_record()) throw TypeError("value is not a record");
  return std::get<Record>(data_);
}

double Value::numeric() const {
  if (is_real()) return std::get<double>(data_);
  if (is_integer()) return static_cast<double>(std::get<std::int64_t>(data_));
  throw TypeError("value is not numeric");
}

bool Value::is_finite() const {
  if (is_real()) return std::isfinite(std::get<double>(data_));
  if (is_record()) {
    for (const auto& e : std::get<Record>(data_)) {
      if (!e.value.is_finite()) return false;
    }
  }
  return true;
}

bool operator==(const Value& a, const Value& b) {
  if (a.data_.index() != b.data_.index()) return false;
  if (a.is_real()) {
    // Bitwise-style equality: NaN equals NaN so sections holding NaN still compare reflexively.
    const double x = std::get<double>(a.data_);
    const double y = std::get<double>(b.data_);
    return x == y ? std::signbit(x) == std::signbit(y) : (std::isnan(x) && std::isnan(y));
  }
  return a.data_ == b.data_;
}

bool operator<(const Value& a, const Value& b) {
  if (a.data_.index() != b.data_.index()) return a.data_.index() < b.data_.index();
  if (a.is_record()) {
    const auto& x = std::get<Value::Record>(a.data_);
    const auto& y = std::get<Value::Record>(b.data_);
    for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
      if (x[i].slot != y[i].slot) return x[i].slot < y[i].slot;
      if (x[i].value < y[i].value) return true;
      if (y[i].value < x[i].value) return false;
    }
    return x.size() < y.size();
  }
  if (a.is_real()) return std::get<double>(a.data_) < std::get<double>(b.data_);
  if (a.is_integer()) return std::get<std::int64_t>(a.data_) < std::get<std::int64_t>(b.data_);
  return std::get<std::string>(a.data_) < std::get<std::string>(b.data_);
}

namespace {

void encode_into(const Value& v, std::string& out) {
  if (v.is_real()) {
    const double x = v.as_real();
    if (std::isnan(x)) {
      out += "nan";
      return;
    }
    if (std::isinf(x)) {
      out += x < 0 ? "-inf" : "inf";
      return;
    }
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    std::string s(buf, res.ptr);
    if (s.find_first_of(".e") == std::string::npos) s += ".0";
    out += s;
  } else if (v.is_integer()) {
    out += std::to_string(v.as_integer());
  } else if (v.is_text()) {
    out += '"';
    for (char c : v.as_text()) {
      if (c == '"' || c == '\\') out += '\\';
      out += c;
    }
    out += '"';
  } else {
    out += '{';
    bool first = true;
    for (const auto& e : v.as_record()) {
      if (!first) out += ';';
      first = false;
      out += std::to_string(e.slot);
      out += ':';
      encode_into(e.value, out);
    }
    out += '}';
  }
}

class Decoder {
 public:
  explicit Decoder(const std::string& s) : s_(s) {}

  Value parse_all() {
    Value v = parse();
    if (i_ != s_.size()) fail();
    return v;
  }

 private:
  [[noreturn]] void fail() const { throw Error("malformed value: '" + s_ + "'"); }

  Value parse() {
    if (i_ >= s_.size()) fail();
    if (s_[i_] == '"') return parse_text();
    if (s_[i_] == '{') return parse_record();
    return parse_number();
  }

  Value parse_text() {
    std::string out;
    for (++i_; i_ < s_.size(); ++i_) {
      char c = s_[i_];
      if (c == '"') {
        ++i_;
        return Value(std::move(out));
      }
      if (c == '\\') {
        if (++i_ >= s_.size()) fail();
        c = s_[i_];
      }
      out += c;
    }
    fail();
  }

  Value parse_record() {
    Value::Record rec;
    ++i_;
    if (i_ < s_.size() && s_[i_] == '}') {
      ++i_;
      return Value(std::move(rec));
    }
    for (;;) {
      const std::size_t start = i_;
      while (i_ < s_.size() && s_[i_] >= '0' && s_[i_] <= '9') ++i_;
      if (i_ == start || i_ >= s_.size() || s_[i_] != ':') fail();
      std::size_t slot = 0;
      std::from_chars(s_.data() + start, s_.data() + i_, slot);
      ++i_;
      rec.push_back(Value::Entry{slot, parse()});
      if (i_ >= s_.size()) fail();
      if (s_[i_] == '}') {
        ++i_;
        break;
      }
      if (s_[i_] != ';') fail();
      ++i_;
    }
    try {
      return Value(std::move(rec));
    } catch (const TypeError&) {
      fail();
    }
  }

  Value parse_number() {
    const std::size_t start = i_;
    while (i_ < s_.size() && s_[i_] != ';' && s_[i_] != '}') ++i_;
    const std::string tok = s_.substr(start, i_ - start);
    if (tok.empty()) fail();
    if (tok == "nan") return Value(std::nan(""));
    if (tok == "inf") return Value(HUGE_VAL);
    if (tok == "-inf") return Value(-HUGE_VAL);
    const bool real = tok.find_first_of(".eE") != std::string::npos;
    if (real) {
      double x = 0;
      auto res = std::from_chars(tok.data(), tok.data() + tok.size(), x);
      if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) fail();
      return Value(x);
    }
    std::int64_t n = 0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), n);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) fail();
    return Value(n);
  }

  const std::string& s_;
  std::size_t i_ = 0;
};

}  // namespace

std::string encode_value(const Value& v) {
  std::string out;
  encode_into(v, out);
  return out;
}

Value decode_value(const std::string& text) { return Decoder(text).parse_all(); }

}  // namespace sheafmach
