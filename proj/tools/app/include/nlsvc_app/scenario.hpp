#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nlsvc/coefficients.hpp"
#include "nlsvc/propagators.hpp"
#include "nlsvc_app/config.hpp"

namespace nlsvc::app {

/// Initial datum catalog: gaussian amp e^{-((x-center)/width)^2/2} e^{i velocity x},
/// bump (smooth compact C^inf bump of radius width), two_bump (two Gaussians at
/// center -+ separation/2).
struct DatumSpec {
  std::string kind = "gaussian";
  double amp = 1.0;
  double width = 1.0;
  double center = 0.0;
  double velocity = 0.0;
  double separation = 8.0;
};

GridFunction make_datum(const DatumSpec& d, const Grid& grid);

struct ProfilesParams {
  int n_min = 1;
  int n_max = 12;
  double separation_rate = 2.0;  // profiles at -+ rate * n
  double t_rate = 0.0;           // time shift law of the second profile
  double second_amp = 0.7;
  double noise = 0.0;
  std::size_t J_max = 4;
  double stop_threshold = 0.05;
  double window = 8.0;
  double T_window = 4.0;
  double R_freq = 4.0;
  std::size_t t_samples = 16;
};

struct Scenario {
  std::uint64_t seed = 0;
  std::filesystem::path out = "nlsvc-out";
  double L = 40.0;
  std::size_t N = 1024;
  double beta = 7.0;
  double delta = 0.3;
  double c0 = 1.0;
  std::optional<double> a0;
  Profile a = Profile::constant(1.0);
  Profile b = Profile::constant(0.0);
  Profile c = Profile::constant(0.0);
  DatumSpec datum;
  StepperConfig stepper;
  double T = 5.0;
  std::vector<std::string> experiments;
  bool write_trajectory = false;

  double mass_tol = 1e-10;
  double energy_tol = 1e-6;
  double decay_p = 8.0;
  double decay_t_min = 5.0;
  std::optional<double> decay_t_max;
  double decay_tolerance = 0.1;
  double strichartz_horizon = 20.0;
  std::vector<double> scatter_ladder;
  double scatter_distance_fraction = 1e-3;
  std::vector<double> smalldata_epsilons{0.01, 0.02, 0.05, 0.1};
  double virial_R = 10.0;
  ProfilesParams profiles;
  double holder_k = 1.0;
  std::optional<double> holder_half_exponent;
  std::size_t holder_samples = 200;
  double far_field_tol = 1e-6;
  double bootstrap_eta = 0.21;
  double bootstrap_K = 1.0;
  double bootstrap_gamma = 2.0;
  double bootstrap_tol = 1e-12;

  Grid grid() const { return Grid(L, N); }
  CoefficientSet coefficients() const;
};

const std::vector<std::string>& known_experiments();

/// Reads and validates every experiment's preconditions; throws ConfigError
/// on the first schema violation.
Scenario parse_scenario(const Config& cfg);

struct RunResult {
  int exit_code = 0;
  nlohmann::json summary;
};

/// Executes the experiments in order and writes summary.json plus one CSV
/// per series into scenario.out. A failing experiment stops the run, leaves
/// the artifacts written so far and drops a FAILED marker.
RunResult run_scenario(const Scenario& scenario);

}  // namespace nlsvc::app
