#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "sheafmach_cli/cli.hpp"

using namespace sheafmach;
using namespace sheafmach::cli;

namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("sheafmach_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write(const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

std::string read(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "sheafmach");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

const char* kSmall =
    "duration = 1\n"
    "pixels = 4\n"
    "reflectance_dc = 2\n"
    "reflectance_cos = 1\n"
    "contrast = 0.03\n"
    "gain = 0.03\n"
    "estimator = mirrored\n"
    "theta0 = 0.5\n"
    "u0 = -0.5\n";

}  // namespace

TEST_CASE("number formatting") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(1e-20) == "1e-20");
}

TEST_CASE("config parse and normalized round-trip") {
  const auto c = parse_config(kSmall);
  CHECK(c.duration == Duration::seconds(1.0));
  CHECK(c.pixels == 4);
  CHECK(c.loop_delay == Duration::from_ticks(10'000'000));
  CHECK(c.reflectance_cos == std::vector<double>{1.0});
  CHECK(c.estimator == "mirrored");
  const std::string norm = serialize_config(c);
  CHECK(parse_config(norm) == c);
  CHECK(serialize_config(parse_config(norm)) == norm);

  auto d = c;
  d.directions = {0.1, 0.2, 0.3, 1.0 / 3.0};
  d.reflectance = "table";
  d.reflectance_table = {1.0, 2.5, 1e-3};
  d.estimator = "table";
  d.estimator_values = {0.5, -0.25, 0.125, 2.0 / 3.0};
  d.trace_interval = Duration::from_ticks(123'456'789);
  CHECK(parse_config(serialize_config(d)) == d);
}

TEST_CASE("config diagnostics name line and field") {
  auto fails = [](const std::string& text, int line, const std::string& field) {
    try {
      parse_config(text, "x.cfg");
    } catch (const ConfigError& e) {
      CHECK(e.line() == line);
      CHECK(e.field() == field);
      return;
    }
    FAIL("expected a ConfigError");
  };
  fails("duration = 1\ncontrast = 0\n", 2, "contrast");
  fails("duration = 1\ncontrast = -1\n", 2, "contrast");
  fails("duration = 1\nbogus = 3\n", 2, "bogus");
  fails("duration = 1\n\ndecay = abc\n", 3, "decay");
  fails("duration = 1\nduration = 2\n", 2, "duration");
  fails("contrast = 1\n", 0, "duration");
  fails("duration = 0.005\n", 1, "duration");  // T must exceed ε
  fails("duration = 1\npixels = 3\ndirections = 0,1\n", 3, "directions");
  fails("duration = 1\nestimator = psychic\n", 2, "estimator");
  fails("duration = 1\nstep = -0.001\n", 2, "step");
  fails("duration = 1\nno equals sign\n", 2, "no equals sign");
}

TEST_CASE("grid CSV reader") {
  std::istringstream ok("t,value\n0,1\n0.5,2\n");
  const auto g = read_grid_csv(ok, "g");
  CHECK(g.t == std::vector<double>{0.0, 0.5});
  std::istringstream bad("0,1\n0.5,2\n0.5,3\n");
  CHECK_THROWS_AS(read_grid_csv(bad, "g"), ConfigError);
  std::istringstream junk("0,1\nx,2\n");
  CHECK_THROWS_AS(read_grid_csv(junk, "g"), ConfigError);
}

TEST_CASE("run writes byte-identical traces") {
  const auto dir = scratch("run");
  write(dir / "small.cfg", kSmall);
  const auto a = invoke({"run", "--config", (dir / "small.cfg").string(), "--out-dir", (dir / "a").string()});
  const auto b = invoke({"run", "--config", (dir / "small.cfg").string(), "--out-dir", (dir / "b").string()});
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  CHECK(read(dir / "a" / "trace.csv") == read(dir / "b" / "trace.csv"));
  CHECK(read(dir / "a" / "events.csv") == read(dir / "b" / "events.csv"));
  CHECK(read(dir / "a" / "trace.csv").rfind("t,theta,u,events,statistic\n0,0.5,-0.5,0,0\n", 0) == 0);
  CHECK(a.out.find("|theta(T) - theta_goal|") != std::string::npos);
  CHECK(read(dir / "a" / "trace.csv").find('\r') == std::string::npos);

  const auto j = invoke({"run", "--config", (dir / "small.cfg").string(), "--out-dir", (dir / "j").string(), "--format", "json"});
  CHECK(j.code == 0);
  CHECK(fs::exists(dir / "j" / "trace.json"));
  CHECK(fs::exists(dir / "j" / "events.json"));
}

TEST_CASE("run exit codes") {
  const auto dir = scratch("codes");
  write(dir / "neg.cfg", "duration = 1\ncontrast = 0\n");
  const auto r = invoke({"run", "--config", (dir / "neg.cfg").string(), "--out-dir", dir.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("contrast") != std::string::npos);
  CHECK(r.err.find(":2:") != std::string::npos);
  CHECK(invoke({"run", "--config", (dir / "missing.cfg").string()}).code == 2);
  CHECK(invoke({"frobnicate"}).code == 2);
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("constant scene over the full run") {
  const auto dir = scratch("constant");
  write(dir / "c.cfg", "duration = 2\nreflectance_dc = 1.5\ntheta0 = 0.25\n");
  const auto r = invoke({"run", "--config", (dir / "c.cfg").string(), "--out-dir", dir.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find(", 0 events,") != std::string::npos);
  CHECK(r.out.find("theta(T) = 0.25\n") != std::string::npos);
  CHECK(read(dir / "events.csv") == "t,pixel,polarity\n");
}

TEST_CASE("laws command") {
  const auto dir = scratch("laws");
  CHECK(invoke({"laws", "gluing", "--n", "0"}).code == 2);
  CHECK(invoke({"laws", "sheaves"}).code == 2);
  CHECK(invoke({"laws", "gluing", "--mutation", "bogus"}).code == 2);
  const auto ok = invoke({"laws", "monoidal", "--n", "100", "--seed", "42", "--out", (dir / "r.json").string()});
  CHECK(ok.code == 0);
  CHECK(read(dir / "r.json").find("\"status\": \"pass\"") != std::string::npos);
  const auto bad = invoke({"laws", "--suite", "gluing", "--n", "1000", "--mutation", "glue-drop-boundary", "--format",
                        "json"});
  CHECK(bad.code == 1);
  CHECK(bad.out.find("\"counterexample\"") != std::string::npos);
}

TEST_CASE("sample command") {
  const auto dir = scratch("sample");
  std::string ramp = "t,value\n";
  for (int i = 0; i <= 400; ++i) ramp += format_number(i * 0.01) + "," + format_number(i * 0.01) + "\n";
  write(dir / "ramp.csv", ramp);

  const auto lv = invoke({"sample", "--input", (dir / "ramp.csv").string(), "--spec", "level:1"});
  REQUIRE(lv.code == 0);
  CHECK(lv.out == "t,value\n1,1\n2,2\n3,3\n4,4\n");

  const auto per = invoke({"sample", "--input", (dir / "ramp.csv").string(), "--spec", "periodic:10"});
  REQUIRE(per.code == 0);
  CHECK(per.out == "t,value\n0,0\n");

  write(dir / "ev.csv", "t,value\n0.5,1\n1.5,3\n");
  const auto z = invoke({"sample", "--input", (dir / "ev.csv").string(), "--spec", "zoh:-1", "--length", "2",
                      "--out", (dir / "z.csv").string()});
  REQUIRE(z.code == 0);
  CHECK(read(dir / "z.csv") == "t,value\n0,-1\n0.5,1\n1.5,3\n2,3\n");

  write(dir / "back.csv", "t,value\n0,1\n1,2\n0.5,3\n");
  const auto nm = invoke({"sample", "--input", (dir / "back.csv").string(), "--spec", "level:1"});
  CHECK(nm.code == 2);
  CHECK(nm.err.find(":4:") != std::string::npos);
  CHECK(invoke({"sample", "--input", (dir / "ramp.csv").string(), "--spec", "level:0"}).code == 2);
  CHECK(invoke({"sample", "--input", (dir / "ramp.csv").string(), "--spec", "fourier"}).code == 2);
}
