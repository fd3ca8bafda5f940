#include "sheafmach/time.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <limits>

namespace sheafmach {

Duration Duration::seconds(double s) {
  if (!std::isfinite(s) || s < 0.0) throw RangeError("Duration: seconds must be finite and >= 0");
  const double ticks = std::nearbyint(s * static_cast<double>(kTicksPerSecond));
  if (ticks >= static_cast<double>(std::numeric_limits<rep>::max())) {
    throw RangeError("Duration: value too large");
  }
  return Duration(static_cast<rep>(ticks));
}

std::string format_seconds(Duration d) {
  const auto whole = d.ticks() / Duration::kTicksPerSecond;
  auto frac = d.ticks() % Duration::kTicksPerSecond;
  std::string out = std::to_string(whole);
  if (frac == 0) return out;
  std::string digits(9, '0');
  for (int i = 8; i >= 0; --i) {
    digits[static_cast<std::size_t>(i)] = static_cast<char>('0' + frac % 10);
    frac /= 10;
  }
  digits.erase(digits.find_last_not_of('0') + 1);
  return out + "." + digits;
}

namespace {

// Exact path for plain decimals with at most nine fractional digits.
bool parse_plain(const std::string& s, Duration::rep& ticks) {
  std::size_t i = 0;
  if (i < s.size() && s[i] == '+') ++i;
  Duration::rep whole = 0;
  std::size_t nd = 0;
  for (; i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])); ++i, ++nd) {
    if (whole > std::numeric_limits<Duration::rep>::max() / 10 / Duration::kTicksPerSecond) return false;
    whole = whole * 10 + (s[i] - '0');
  }
  Duration::rep frac = 0;
  int nf = 0;
  if (i < s.size() && s[i] == '.') {
    for (++i; i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])); ++i, ++nf) {
      if (nf >= 9) return false;
      frac = frac * 10 + (s[i] - '0');
    }
  }
  if (i != s.size() || nd + static_cast<std::size_t>(nf) == 0) return false;
  for (int k = nf; k < 9; ++k) frac *= 10;
  ticks = whole * Duration::kTicksPerSecond + frac;
  return true;
}

}  // namespace

Duration parse_seconds(const std::string& text) {
  Duration::rep ticks = 0;
  if (parse_plain(text, ticks)) return Duration::from_ticks(ticks);
  const char* begin = text.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (text.empty() || end != begin + text.size()) throw RangeError("not a duration: '" + text + "'");
  return Duration::seconds(v);
}

}  // namespace sheafmach
