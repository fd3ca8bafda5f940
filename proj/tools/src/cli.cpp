#include "sheafmach_cli/cli.hpp"

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "sheafmach/errors.hpp"
#include "sheafmach/laws/laws.hpp"
#include "sheafmach/primitives.hpp"

namespace sheafmach::cli {

std::string format_number(double x) {
  if (x == 0.0) return "0";  // no "-0"
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  return s.substr(a, s.find_last_not_of(" \t\r") - a + 1);
}

bool parse_double(const std::string& s, double& x) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  char* end = nullptr;
  x = std::strtod(t.c_str(), &end);
  return end == t.c_str() + t.size() && std::isfinite(x);
}

void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error("cannot write " + p.string());
  f << content;
}

void configure_logging() {
  static bool done = false;
  if (done) return;
  done = true;
  auto logger = spdlog::stderr_logger_mt("sheafmach");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  const char* env = std::getenv("SHEAFMACH_LOG");
  spdlog::set_level(env ? spdlog::level::from_str(env) : spdlog::level::warn);
}

}  // namespace

Grid read_grid_csv(std::istream& in, const std::string& source) {
  Grid g;
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ConfigError(source, line_no, "t", "expected 't,value'");
    double t = 0.0;
    double v = 0.0;
    const bool tok = parse_double(line.substr(0, comma), t);
    const bool vok = parse_double(line.substr(comma + 1), v);
    if (!tok && !vok && g.t.empty() && line_no == 1) continue;  // header
    if (!tok) throw ConfigError(source, line_no, "t", "not a number");
    if (!vok) throw ConfigError(source, line_no, "value", "not a number");
    if (t < 0.0) throw ConfigError(source, line_no, "t", "must be >= 0");
    if (!g.t.empty() && !(t > g.t.back())) throw ConfigError(source, line_no, "t", "grid is not strictly increasing");
    g.t.push_back(t);
    g.v.push_back(v);
  }
  if (g.t.empty()) throw ConfigError(source, 0, "t", "no rows");
  return g;
}

std::string trace_csv(const std::vector<neuro::TraceRow>& rows) {
  std::string s = "t,theta,u,events,statistic\n";
  for (const auto& r : rows) {
    s += format_number(r.t.to_seconds()) + "," + format_number(r.theta) + "," + format_number(r.u_zoh) + "," +
         std::to_string(r.events_in_window) + "," + format_number(r.statistic) + "\n";
  }
  return s;
}

std::string events_csv(const std::vector<neuro::PixelEvent>& events) {
  std::string s = "t,pixel,polarity\n";
  for (const auto& e : events) {
    s += format_number(e.t.to_seconds()) + "," + std::to_string(e.pixel) + "," + std::to_string(e.polarity) + "\n";
  }
  return s;
}

namespace {

std::string trace_json(const std::vector<neuro::TraceRow>& rows) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    j.push_back({{"t", r.t.to_seconds()},
                 {"theta", r.theta},
                 {"u", r.u_zoh},
                 {"events", r.events_in_window},
                 {"statistic", r.statistic}});
  }
  return j.dump(1) + "\n";
}

std::string events_json(const std::vector<neuro::PixelEvent>& events) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& e : events) j.push_back({{"t", e.t.to_seconds()}, {"pixel", e.pixel}, {"polarity", e.polarity}});
  return j.dump(1) + "\n";
}

}  // namespace

RunSummary run_scenario(const ScenarioConfig& c, const std::string& out_dir, const std::string& format) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto params = loop_params(c);
  spdlog::info("running {} pixels for {} s", params.geometry.size(), format_seconds(c.duration));
  const RunRecord r = neuro::run_closed_loop(params, c.duration);
  const auto rows = neuro::sample_trace(r, c.trace_interval, 0.0);
  const auto events = neuro::pixel_events(r);
  const auto& theta = r.state_trace.at("theta").continuous();

  RunSummary s;
  s.events = events.size();
  s.theta_final = theta.eval(c.duration).as_real();
  s.distance_final = std::abs(s.theta_final - c.theta_goal);
  const Time half = Duration::from_ticks(c.duration.ticks() / 2);
  s.distance_half = std::abs(theta.eval(half).as_real() - c.theta_goal);

  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  if (format == "json") {
    write_file(dir / "trace.json", trace_json(rows));
    write_file(dir / "events.json", events_json(events));
  } else {
    write_file(dir / "trace.csv", trace_csv(rows));
    write_file(dir / "events.csv", events_csv(events));
  }
  s.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return s;
}

int cmd_run(const std::string& config_path, const std::string& out_dir, const std::string& format, std::ostream& out,
            std::ostream& err) {
  ScenarioConfig c;
  try {
    c = load_config(config_path);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  try {
    const RunSummary s = run_scenario(c, out_dir, format);
    out << "duration " << format_seconds(c.duration) << " s, " << s.events << " events, wall "
        << format_number(std::round(s.wall_seconds * 1000) / 1000) << " s\n";
    out << "theta(T) = " << format_number(s.theta_final) << "\n";
    out << "|theta(T/2) - theta_goal| = " << format_number(s.distance_half) << "\n";
    out << "|theta(T) - theta_goal| = " << format_number(s.distance_final) << " ("
        << (s.distance_final < c.delta ? "within" : "outside") << " delta " << format_number(c.delta) << ")\n";
    return kOk;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kNumeric;
  } catch (const DomainError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kNumeric;
  }
}

int cmd_laws(const std::string& suite, long long n, unsigned long long seed, const std::string& format,
             const std::string& report_path, const std::string& mutation, std::ostream& out, std::ostream& err) {
  if (!laws::is_suite(suite)) {
    err << "error: unknown suite '" << suite << "' (presheaf | gluing | monoidal | functor | machines | all)\n";
    return kUsage;
  }
  if (n < 1) {
    err << "error: --n must be >= 1\n";
    return kUsage;
  }
  const auto mut = laws::parse_mutation(mutation);
  if (!mut) {
    err << "error: unknown mutation '" << mutation << "'\n";
    return kUsage;
  }
  laws::SuiteOptions o;
  o.n = static_cast<std::size_t>(n);
  o.seed = seed;
  o.mutation = *mut;
  const auto reports = laws::run_suites(suite, o);
  bool ok = true;
  nlohmann::ordered_json all = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    ok = ok && r.passed();
    all.push_back(nlohmann::ordered_json::parse(r.to_json()));
    if (format != "json") out << r.to_text();
  }
  const std::string json = all.dump(2) + "\n";
  if (format == "json") out << json;
  if (!report_path.empty()) {
    const std::filesystem::path p(report_path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    write_file(p, json);
  }
  return ok ? kOk : kLawFailure;
}

namespace {

// Splits "kind:a:b" into its fields.
std::vector<std::string> split_spec(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ':');) out.push_back(trim(item));
  return out;
}

Time to_time(double s) { return Duration::seconds(s); }

}  // namespace

int cmd_sample(const std::string& input, const std::string& spec, const std::string& output, const std::string& length,
               std::ostream& out, std::ostream& err) {
  try {
    std::ifstream in(input);
    if (!in) throw ConfigError(input, 0, "--input", "cannot open");
    const auto fields = split_spec(spec);
    if (fields.empty()) throw ConfigError("--spec", 0, "spec", "empty");
    const std::string kind = fields[0];
    auto param = [&](std::size_t i, double dflt) {
      if (fields.size() <= i) return dflt;
      double x = 0.0;
      if (!parse_double(fields[i], x)) throw ConfigError("--spec", 0, "spec", "parameter '" + fields[i] + "' is not a number");
      return x;
    };
    const Grid g = read_grid_csv(in, input);
    std::string csv = "t,value\n";

    if (kind == "level" || kind == "periodic") {
      // The continuous input interpolates linearly between grid rows.
      const Time base = to_time(g.t.front());
      std::vector<std::pair<Time, Value>> pts;
      double k = 0.0;
      for (std::size_t i = 0; i < g.t.size(); ++i) {
        const Time t = to_time(g.t[i]) - base;
        if (!pts.empty() && !(pts.back().first < t)) throw ConfigError(input, 0, "t", "grid collapses at nanosecond resolution");
        if (!pts.empty()) {
          k = std::max(k, std::abs(g.v[i] - pts.back().second.as_real()) / (t - pts.back().first).to_seconds());
        }
        pts.emplace_back(t, Value(g.v[i]));
      }
      auto stream = ContinuousSection::sampled(pts);
      stream.set_lipschitz_bound(k);
      Machine m = kind == "level" ? level_crossing_sampler(param(1, 0.0), param(2, g.v.front()))
                                  : periodic_sampler(to_time(param(1, 0.0)), to_time(param(2, 0.0)), ValueDomain::real());
      if (kind == "level" && !(param(1, 0.0) > 0.0)) throw ConfigError("--spec", 0, "spec", "level L must be > 0");
      const auto r = run(m, stream, stream.length().is_zero() ? Duration::from_ticks(1) : stream.length());
      for (const auto& e : r.output.events().events()) {
        csv += format_number((e.t + base).to_seconds()) + "," + format_number(e.value.as_real()) + "\n";
      }
    } else if (kind == "zoh") {
      const double a0 = param(1, 0.0);
      Duration len = to_time(g.t.back());
      if (!length.empty()) {
        double l = 0.0;
        if (!parse_double(length, l) || l < g.t.back()) throw ConfigError("--length", 0, "length", "must cover the last event");
        len = to_time(l);
      }
      EventSection e(len);
      for (std::size_t i = 0; i < g.t.size(); ++i) e.push_back(to_time(g.t[i]), Value(g.v[i]));
      const auto r = run(zoh_reconstructor(ValueDomain::real(), Value(a0)), e, len.is_zero() ? Duration::from_ticks(1) : len);
      // One row per step: the value holds until the next row; the last row closes the window.
      const auto& c = r.output.continuous();
      for (const auto& p : c.pieces()) {
        csv += format_number(Duration::from_ticks(p.start).to_seconds()) + "," +
               format_number(p.at(static_cast<double>(p.start)).as_real()) + "\n";
      }
      if (c.pieces().back().end != c.pieces().back().start || c.pieces().size() == 1) {
        csv += format_number(len.to_seconds()) + "," + format_number(c.eval(len).as_real()) + "\n";
      }
    } else {
      throw ConfigError("--spec", 0, "spec", "unknown sampler '" + kind + "' (level | periodic | zoh)");
    }

    if (output.empty() || output == "-") {
      out << csv;
    } else {
      write_file(output, csv);
    }
    return kOk;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const RangeError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  configure_logging();
  CLI::App app{"sheafmach: behavior sheaves and machines"};
  app.require_subcommand(1);

  std::string config, out_dir = ".", format = "csv";
  auto* run_cmd = app.add_subcommand("run", "Run a closed-loop scenario");
  run_cmd->add_option("--config,config", config, "Scenario config (key = value)")->required();
  run_cmd->add_option("--out-dir", out_dir, "Directory for trace and event files");
  run_cmd->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  std::string suite = "all", lformat = "text", report, mutation = "none", lout_dir;
  long long n = 1000;
  unsigned long long seed = 1;
  auto* laws_cmd = app.add_subcommand("laws", "Run law suites");
  laws_cmd->add_option("--suite,suite", suite, "presheaf | gluing | monoidal | functor | machines | all");
  laws_cmd->add_option("--n", n, "Cases per law");
  laws_cmd->add_option("--seed", seed, "Random seed");
  laws_cmd->add_option("--format", lformat, "text or json")->check(CLI::IsMember({"text", "json"}));
  laws_cmd->add_option("--out", report, "JSON report path");
  laws_cmd->add_option("--out-dir", lout_dir, "Directory for laws-report.json");
  laws_cmd->add_option("--mutation", mutation, "none | restrict-exclusive | glue-drop-boundary | acausal");

  std::string input, spec, output, length;
  auto* sample_cmd = app.add_subcommand("sample", "Apply a sampler or ZOH to a CSV grid");
  sample_cmd->add_option("--input", input, "Input CSV (t,value)")->required();
  sample_cmd->add_option("--spec", spec, "level:L[:a0] | periodic:d[:phase] | zoh[:a0]")->required();
  sample_cmd->add_option("--out", output, "Output CSV (default stdout)");
  sample_cmd->add_option("--length", length, "Window length for zoh (default: last event time)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (*run_cmd) return cmd_run(config, out_dir, format, out, err);
    if (*laws_cmd) {
      if (report.empty() && !lout_dir.empty()) report = (std::filesystem::path(lout_dir) / "laws-report.json").string();
      return cmd_laws(suite, n, seed, lformat, report, mutation, out, err);
    }
    return cmd_sample(input, spec, output, length, out, err);
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace sheafmach::cli
