#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace sheafmach {

/// Dynamically typed value carried by runtime sections.
///
/// A value is a real, an integer, a text label, or a record: a list of
/// (slot, value) entries with strictly increasing slots. Records encode the
/// n-ary tensor A_0 ⊙ ... ⊙ A_{n-1}: the slots present are the components that
/// fired at that instant.
class Value {
 public:
  struct Entry;
  using Record = std::vector<Entry>;

  Value();
  Value(double v);  // NOLINT(google-explicit-constructor)
  Value(int v);  // NOLINT
  Value(std::int64_t v);  // NOLINT
  Value(std::string v);  // NOLINT
  Value(const char* v);  // NOLINT
  /// Throws TypeError if the slots are not strictly increasing.
  explicit Value(Record r);

  bool is_real() const noexcept { return data_.index() == 0; }
  bool is_integer() const noexcept { return data_.index() == 1; }
  bool is_text() const noexcept { return data_.index() == 2; }
  bool is_record() const noexcept { return data_.index() == 3; }

  /// Throws TypeError when the value holds another alternative.
  double as_real() const;
  std::int64_t as_integer() const;
  const std::string& as_text() const;
  const Record& as_record() const;

  /// Reals and integers as double; TypeError otherwise.
  double numeric() const;

  /// False for NaN/inf reals anywhere inside the value.
  bool is_finite() const;

  friend bool operator==(const Value& a, const Value& b);
  friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }
  /// Total order: by alternative, then by content.
  friend bool operator<(const Value& a, const Value& b);

 private:
  std::variant<double, std::int64_t, std::string, Record> data_;
};

struct Value::Entry {
  std::size_t slot = 0;
  Value value;

  friend bool operator==(const Entry& a, const Entry& b) {
    return a.slot == b.slot && a.value == b.value;
  }
};

inline Value::Value() : data_(0.0) {}
inline Value::Value(double v) : data_(v) {}
inline Value::Value(int v) : data_(static_cast<std::int64_t>(v)) {}
inline Value::Value(std::int64_t v) : data_(v) {}
inline Value::Value(std::string v) : data_(std::move(v)) {}
inline Value::Value(const char* v) : data_(std::string(v)) {}

/// Textual encoding used in section files and counterexamples:
/// reals always carry '.', 'e', "inf" or "nan"; integers are bare digits;
/// texts are double-quoted with \" and \\ escapes; records are {slot:value;...}.
std::string encode_value(const Value& v);
/// Inverse of encode_value. Throws Error on malformed input.
Value decode_value(const std::string& text);

}  // namespace sheafmach
