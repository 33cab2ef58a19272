#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "nlsvc_app/scenario.hpp"

using namespace nlsvc;
using namespace nlsvc::app;

namespace {

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("nlsvc-test-" + name);
  std::filesystem::remove_all(p);
  return p;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Config minimal(const std::filesystem::path& out) {
  return Config::parse_flat("grid.L = 20\ngrid.N = 256\nbeta = 7\nstepper.dt = 0.001\nstepper.record_stride = 100\n"
                            "run.T = 1\nexperiments = conserve\nout = " +
                            out.string() + "\n");
}

}  // namespace

TEST_CASE("flat and JSON configs flatten to the same keys") {
  const Config flat = Config::parse_flat("# comment\ngrid.L = 20\ngrid.N=256\nrun.experiments = conserve, decay\n");
  const Config js = Config::parse_json(R"({"grid": {"L": 20, "N": 256}, "run": {"experiments": ["conserve", "decay"]}})");
  CHECK(flat.get_double("grid.L", 0) == 20.0);
  CHECK(js.get_double("grid.L", 0) == 20.0);
  CHECK(flat.get_int("grid.N", 0) == js.get_int("grid.N", 0));
  CHECK(flat.get_strings("run.experiments", {}) == js.get_strings("run.experiments", {}));
  CHECK(js.get_strings("run.experiments", {}) == std::vector<std::string>{"conserve", "decay"});
  CHECK_THROWS_AS(Config::parse_flat("no equals sign here\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse_json("{not json"), ConfigError);
  CHECK_THROWS_AS(Config::parse_flat("x = abc\n").get_double("x", 0), ConfigError);
}

TEST_CASE("scenario parsing and validation") {
  const Scenario s = parse_scenario(minimal(scratch("parse")));
  CHECK(s.L == 20.0);
  CHECK(s.N == 256);
  CHECK(s.experiments == std::vector<std::string>{"conserve"});
  CHECK(s.stepper.record_stride == 100);
  CHECK(s.coefficients().a0 == 0.5);

  auto with = [](const std::string& extra) {
    return parse_scenario(Config::parse_flat("grid.L = 20\ngrid.N = 256\nstepper.dt = 0.01\nrun.T = 1\n"
                                             "experiments = conserve\n" +
                                             extra));
  };
  CHECK_THROWS_WITH_AS(with("beta = 5\n"), doctest::Contains("beta > 5"), ConfigError);
  CHECK_THROWS_AS(with("beta = 4.5\n"), ConfigError);
  CHECK_THROWS_AS(with("grid.N = 300\n"), ConfigError);
  CHECK_THROWS_AS(with("delta = 0\n"), ConfigError);
  CHECK_THROWS_AS(with("c0 = -1\n"), ConfigError);
  CHECK_THROWS_AS(with("run.T = 1.005\n"), ConfigError);
  CHECK_THROWS_AS(with("grid.typo = 3\n"), ConfigError);
  CHECK_THROWS_AS(with("experiments = conserve, teleport\n"), ConfigError);
  CHECK_THROWS_AS(with("stepper.scheme = euler\n"), ConfigError);
  CHECK_THROWS_AS(with("coefficients.a.kind = parabola\n"), ConfigError);
  CHECK_THROWS_AS(with("datum.kind = square\n"), ConfigError);
  CHECK_NOTHROW(with("stepper.scheme = strang_gauge\ncoefficients.a.kind = gaussian\ncoefficients.a.base = 1\n"
                     "coefficients.a.amp = 0.5\n"));
}

TEST_CASE("datum catalog") {
  const Grid g(20.0, 256);
  DatumSpec d;
  d.amp = 2.0;
  d.velocity = 1.5;
  const GridFunction u = make_datum(d, g);
  CHECK(u[g.origin_index()] == cplx(2.0));
  CHECK(std::abs(u[g.origin_index() + 10]) == doctest::Approx(2.0 * std::exp(-0.5 * std::pow(g.x(g.origin_index() + 10), 2))));
  d.kind = "bump";
  d.width = 2.0;
  const GridFunction b = make_datum(d, g);
  for (std::size_t j = 0; j < g.size(); ++j)
    if (std::abs(g.x(j)) >= 2.0) CHECK(b[j] == cplx(0.0));
  d.kind = "two_bump";
  d.velocity = 0.0;
  d.width = 1.0;
  d.separation = 8.0;
  const GridFunction tb = make_datum(d, g);
  double err = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double x = g.x(j);
    err = std::max(err, std::abs(tb[j] - 2.0 * (std::exp(-0.5 * (x - 4) * (x - 4)) + std::exp(-0.5 * (x + 4) * (x + 4)))));
  }
  CHECK(err <= 1e-15);
}

TEST_CASE("scenario runs write a summary and are deterministic") {
  const auto out1 = scratch("run1"), out2 = scratch("run2");
  const RunResult r1 = run_scenario(parse_scenario(minimal(out1)));
  const RunResult r2 = run_scenario(parse_scenario(minimal(out2)));
  CHECK(r1.exit_code == 0);
  CHECK(r1.summary["status"] == "ok");
  CHECK(r1.summary["experiments"]["conserve"]["verdict"] == "pass");
  CHECK(std::filesystem::exists(out1 / "summary.json"));
  CHECK(std::filesystem::exists(out1 / "ledger.csv"));
  CHECK_FALSE(std::filesystem::exists(out1 / "FAILED"));
  CHECK(slurp(out1 / "ledger.csv") == slurp(out2 / "ledger.csv"));
  CHECK(slurp(out1 / "ledger.csv").rfind("t,mass,quadratic,potential,energy,full_energy", 0) == 0);

  // Preconditions of a requested experiment are rejected before anything runs.
  const auto fail_dir = scratch("fail");
  const Config bad = Config::parse_flat("grid.L = 20\ngrid.N = 256\nstepper.dt = 0.01\nrun.T = 1\n"
                                        "experiments = virial\nvirial.R = 0.5\nout = " +
                                        fail_dir.string() + "\n");
  CHECK_THROWS_WITH_AS(parse_scenario(bad), doctest::Contains("virial.R"), ConfigError);
  CHECK_FALSE(std::filesystem::exists(fail_dir / "summary.json"));

  // A runtime failure leaves a FAILED marker, keeps earlier results and
  // reports the failing experiment: the decay window starts after run.T.
  Scenario doomed = parse_scenario(minimal(scratch("doomed")));
  doomed.out = scratch("doomed");
  doomed.experiments = {"conserve", "decay"};
  const RunResult rf = run_scenario(doomed);
  CHECK(rf.exit_code != 0);
  CHECK(rf.summary["status"] == "failed");
  CHECK(rf.summary["failed_experiment"] == "decay");
  CHECK(rf.summary["experiments"]["conserve"]["verdict"] == "pass");
  CHECK(std::filesystem::exists(doomed.out / "FAILED"));
  CHECK(std::filesystem::exists(doomed.out / "summary.json"));
}
