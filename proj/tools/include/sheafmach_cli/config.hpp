#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "sheafmach/neuro/neuro.hpp"
#include "sheafmach/time.hpp"

namespace sheafmach::cli {

/// A schema violation, located by line (0 when not tied to a line) and field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string source, int line, std::string field, const std::string& what);
  int line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  int line_;
  std::string field_;
  std::string detail_;
};

/// Closed-loop scenario. Text form: one `key = value` per line, `#` comments.
///
///   duration          T in seconds (required)
///   loop_delay        ε, default 0.01
///   step              integrator step h, default 0.001
///   pixels            pixel count, default 16
///   directions        `uniform` or a comma list of radians (one per pixel)
///   reflectance       `fourier` (default) or `table`
///   reflectance_dc, reflectance_cos, reflectance_sin    fourier coefficients
///   reflectance_table                                   comma list over [0, 2π)
///   floor             ε_I, default 1e-6
///   contrast          C, default 0.3
///   decay, gain       regulator a and κ, default 1
///   estimator         `goal-relative` (default), `mirrored` or `table`
///   estimator_values  comma list, one per pixel (estimator = table)
///   saturation        b, default 1
///   theta0, theta_goal, u0   default 0
///   delta             δ, default 0.05
///   trace_interval    trace CSV row spacing, default 0.01
///   seed              default 1; kept for round-trips, unused by the loop
struct ScenarioConfig {
  Duration duration;
  Duration loop_delay = Duration::from_ticks(10'000'000);
  Duration step = Duration::from_ticks(1'000'000);
  std::size_t pixels = 16;
  std::vector<double> directions;  // empty: uniform
  std::string reflectance = "fourier";
  double reflectance_dc = 1.0;
  std::vector<double> reflectance_cos;
  std::vector<double> reflectance_sin;
  std::vector<double> reflectance_table;
  double floor = 1e-6;
  double contrast = 0.3;
  double decay = 1.0;
  double gain = 1.0;
  std::string estimator = "goal-relative";
  std::vector<double> estimator_values;
  double saturation = 1.0;
  double theta0 = 0.0;
  double theta_goal = 0.0;
  double u0 = 0.0;
  double delta = 0.05;
  Duration trace_interval = Duration::from_ticks(10'000'000);
  std::uint64_t seed = 1;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Throws ConfigError naming the line and field.
ScenarioConfig parse_config(const std::string& text, const std::string& source = "<config>");
ScenarioConfig load_config(const std::string& path);
/// Normalized text form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ScenarioConfig& c);

/// Throws ConfigError for violated constraints.
void validate(const ScenarioConfig& c, const std::string& source = "<config>");

neuro::LoopParams loop_params(const ScenarioConfig& c);

}  // namespace sheafmach::cli
