#include "sheafmach_cli/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "sheafmach/errors.hpp"

namespace sheafmach::cli {

ConfigError::ConfigError(std::string source, int line, std::string field, const std::string& what)
    : std::runtime_error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": field '" + field +
                         "': " + what),
      line_(line),
      field_(std::move(field)),
      detail_(what) {}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_real(const std::string& v) {
  std::size_t used = 0;
  const double x = std::stod(v, &used);
  if (used != v.size() || !std::isfinite(x)) throw std::invalid_argument("not a finite number");
  return x;
}

std::vector<double> to_list(const std::string& v) {
  std::vector<double> out;
  if (trim(v).empty()) return out;
  std::stringstream ss(v);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(to_real(trim(item)));
  return out;
}

std::string real_text(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string list_text(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + real_text(xs[i]);
  return s;
}

struct Field {
  std::function<void(ScenarioConfig&, const std::string&)> set;
  std::function<std::string(const ScenarioConfig&)> get;
};

template <class M>
Field real_field(M ScenarioConfig::*m) {
  return {[m](ScenarioConfig& c, const std::string& v) { c.*m = to_real(v); },
          [m](const ScenarioConfig& c) { return real_text(c.*m); }};
}
Field time_field(Duration ScenarioConfig::*m) {
  return {[m](ScenarioConfig& c, const std::string& v) {
            to_real(v);
            c.*m = parse_seconds(v);
          },
          [m](const ScenarioConfig& c) { return format_seconds(c.*m); }};
}
Field list_field(std::vector<double> ScenarioConfig::*m) {
  return {[m](ScenarioConfig& c, const std::string& v) { c.*m = to_list(v); },
          [m](const ScenarioConfig& c) { return list_text(c.*m); }};
}
Field text_field(std::string ScenarioConfig::*m) {
  return {[m](ScenarioConfig& c, const std::string& v) { c.*m = v; },
          [m](const ScenarioConfig& c) { return c.*m; }};
}

// Keys in serialization order.
const std::vector<std::pair<std::string, Field>>& schema() {
  static const std::vector<std::pair<std::string, Field>> s{
      {"duration", time_field(&ScenarioConfig::duration)},
      {"loop_delay", time_field(&ScenarioConfig::loop_delay)},
      {"step", time_field(&ScenarioConfig::step)},
      {"pixels",
       {[](ScenarioConfig& c, const std::string& v) {
          std::size_t used = 0;
          const long long n = std::stoll(v, &used);
          if (used != v.size() || n < 1) throw std::invalid_argument("must be a positive integer");
          c.pixels = static_cast<std::size_t>(n);
        },
        [](const ScenarioConfig& c) { return std::to_string(c.pixels); }}},
      {"directions",
       {[](ScenarioConfig& c, const std::string& v) { c.directions = v == "uniform" ? std::vector<double>{} : to_list(v); },
        [](const ScenarioConfig& c) { return c.directions.empty() ? std::string("uniform") : list_text(c.directions); }}},
      {"reflectance", text_field(&ScenarioConfig::reflectance)},
      {"reflectance_dc", real_field(&ScenarioConfig::reflectance_dc)},
      {"reflectance_cos", list_field(&ScenarioConfig::reflectance_cos)},
      {"reflectance_sin", list_field(&ScenarioConfig::reflectance_sin)},
      {"reflectance_table", list_field(&ScenarioConfig::reflectance_table)},
      {"floor", real_field(&ScenarioConfig::floor)},
      {"contrast", real_field(&ScenarioConfig::contrast)},
      {"decay", real_field(&ScenarioConfig::decay)},
      {"gain", real_field(&ScenarioConfig::gain)},
      {"estimator", text_field(&ScenarioConfig::estimator)},
      {"estimator_values", list_field(&ScenarioConfig::estimator_values)},
      {"saturation", real_field(&ScenarioConfig::saturation)},
      {"theta0", real_field(&ScenarioConfig::theta0)},
      {"theta_goal", real_field(&ScenarioConfig::theta_goal)},
      {"u0", real_field(&ScenarioConfig::u0)},
      {"delta", real_field(&ScenarioConfig::delta)},
      {"trace_interval", time_field(&ScenarioConfig::trace_interval)},
      {"seed",
       {[](ScenarioConfig& c, const std::string& v) {
          std::size_t used = 0;
          const unsigned long long n = std::stoull(v, &used);
          if (used != v.size() || v.front() == '-') throw std::invalid_argument("must be a non-negative integer");
          c.seed = n;
        },
        [](const ScenarioConfig& c) { return std::to_string(c.seed); }}},
  };
  return s;
}

const Field* find_field(const std::string& key) {
  for (const auto& [k, f] : schema()) {
    if (k == key) return &f;
  }
  return nullptr;
}

}  // namespace

ScenarioConfig parse_config(const std::string& text, const std::string& source) {
  ScenarioConfig c;
  std::map<std::string, int> seen;
  std::istringstream is(text);
  int line_no = 0;
  for (std::string line; std::getline(is, line);) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(source, line_no, line, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const Field* f = find_field(key);
    if (f == nullptr) throw ConfigError(source, line_no, key, "unknown field");
    if (seen.count(key)) {
      throw ConfigError(source, line_no, key, "duplicate (first set on line " + std::to_string(seen[key]) + ")");
    }
    seen[key] = line_no;
    try {
      f->set(c, value);
    } catch (const std::exception& e) {
      throw ConfigError(source, line_no, key, "invalid value '" + value + "' (" + e.what() + ")");
    }
  }
  if (!seen.count("duration")) throw ConfigError(source, 0, "duration", "required");
  try {
    validate(c, source);
  } catch (const ConfigError& e) {
    auto it = seen.find(e.field());
    // Point at the line that set the offending field.
    if (it != seen.end()) throw ConfigError(source, it->second, e.field(), e.detail());
    throw;
  }
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, 0, "<file>", "cannot open");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

std::string serialize_config(const ScenarioConfig& c) {
  std::string out;
  for (const auto& [k, f] : schema()) out += k + " = " + f.get(c) + "\n";
  return out;
}

void validate(const ScenarioConfig& c, const std::string& source) {
  auto fail = [&](const char* field, const std::string& what) { throw ConfigError(source, 0, field, what); };
  auto positive = [&](const char* field, double v) {
    if (!(v > 0.0)) fail(field, "must be > 0");
  };
  if (c.loop_delay.is_zero()) fail("loop_delay", "must be > 0");
  if (c.step.is_zero()) fail("step", "must be > 0");
  if (!(c.duration > c.loop_delay)) fail("duration", "must exceed loop_delay");
  if (c.trace_interval.is_zero()) fail("trace_interval", "must be > 0");
  if (c.pixels < 1) fail("pixels", "must be >= 1");
  if (!c.directions.empty() && c.directions.size() != c.pixels) fail("directions", "needs one entry per pixel");
  if (c.reflectance != "fourier" && c.reflectance != "table") fail("reflectance", "must be 'fourier' or 'table'");
  if (c.reflectance == "table" && c.reflectance_table.size() < 2) fail("reflectance_table", "needs at least two values");
  for (double v : c.reflectance_table) {
    if (!(v >= 0.0)) fail("reflectance_table", "values must be >= 0");
  }
  positive("floor", c.floor);
  positive("contrast", c.contrast);
  positive("decay", c.decay);
  positive("gain", c.gain);
  positive("saturation", c.saturation);
  positive("delta", c.delta);
  if (c.estimator != "goal-relative" && c.estimator != "mirrored" && c.estimator != "table") {
    fail("estimator", "must be 'goal-relative', 'mirrored' or 'table'");
  }
  if (c.estimator == "table" && c.estimator_values.size() != c.pixels) fail("estimator_values", "needs one entry per pixel");
}

neuro::LoopParams loop_params(const ScenarioConfig& c) {
  neuro::LoopParams p;
  p.geometry = c.directions.empty() ? neuro::CameraGeometry::uniform(c.pixels) : neuro::CameraGeometry{c.directions};
  p.reflectance = c.reflectance == "table"
                      ? neuro::ReflectanceMap::table(c.reflectance_table, c.floor)
                      : neuro::ReflectanceMap::fourier(c.reflectance_dc, c.reflectance_cos, c.reflectance_sin, c.floor);
  p.contrast = c.contrast;
  std::vector<double> f;
  if (c.estimator == "table") {
    f = c.estimator_values;
  } else {
    f = neuro::estimator_values(p.geometry,
                                c.estimator == "mirrored" ? neuro::Estimator::Mirrored : neuro::Estimator::GoalRelative,
                                c.theta_goal);
  }
  p.regulator = {c.decay, c.gain, std::move(f)};
  p.body = {c.saturation, c.theta0, c.u0, c.step};
  p.loop_delay = c.loop_delay;
  return p;
}

}  // namespace sheafmach::cli
