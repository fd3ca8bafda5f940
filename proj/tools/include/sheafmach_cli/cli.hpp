#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sheafmach/machine.hpp"
#include "sheafmach_cli/config.hpp"

namespace sheafmach::cli {

enum ExitCode : int { kOk = 0, kLawFailure = 1, kUsage = 2, kNumeric = 3 };

/// Fixed 12 significant digits, '.' separator.
std::string format_number(double x);

/// A (t, value) grid read from CSV; an optional non-numeric header row is skipped.
struct Grid {
  std::vector<double> t;
  std::vector<double> v;
};
/// Throws ConfigError (field "t" or "value") on malformed rows or a non-increasing grid.
Grid read_grid_csv(std::istream& in, const std::string& source);

std::string trace_csv(const std::vector<neuro::TraceRow>& rows);
std::string events_csv(const std::vector<neuro::PixelEvent>& events);

struct RunSummary {
  std::size_t events = 0;
  double theta_final = 0.0;
  double distance_final = 0.0;  // |θ(T) − θ_g|
  double distance_half = 0.0;   // |θ(T/2) − θ_g|
  double wall_seconds = 0.0;
};

/// Runs a scenario and writes trace and event files ("csv" or "json") into out_dir.
/// Throws NumericError on divergence.
RunSummary run_scenario(const ScenarioConfig& c, const std::string& out_dir, const std::string& format);

int cmd_run(const std::string& config_path, const std::string& out_dir, const std::string& format, std::ostream& out,
            std::ostream& err);
int cmd_laws(const std::string& suite, long long n, unsigned long long seed, const std::string& format,
             const std::string& report_path, const std::string& mutation, std::ostream& out, std::ostream& err);
/// spec: "level:L[:a0]", "periodic:d[:phase]" (grid input) or "zoh[:a0]" (event input, --length optional).
int cmd_sample(const std::string& input, const std::string& spec, const std::string& output, const std::string& length,
               std::ostream& out, std::ostream& err);

/// Full command line: `sheafmach <run|laws|sample> ...`.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sheafmach::cli
