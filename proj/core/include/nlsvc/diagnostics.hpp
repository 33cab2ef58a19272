#pragma once

#include <limits>
#include <string>
#include <vector>

#include "nlsvc/exponents.hpp"
#include "nlsvc/grid.hpp"
#include "nlsvc/operator.hpp"
#include "nlsvc/propagators.hpp"

namespace nlsvc {

struct ConservationReport {
  double mass_drift = 0.0;  // max_t |M(t) - M(0)| / M(0)
  double energy_drift = 0.0;
  double full_energy_drift = 0.0;
  double mass_tolerance = 1e-10;
  double energy_tolerance = 1e-6;
  bool mass_flagged = false;
  bool energy_flagged = false;
  std::size_t worst_mass_index = 0;
  std::size_t worst_energy_index = 0;
  bool passed() const { return !mass_flagged && !energy_flagged; }
};

/// Drifts are relative to the initial value; a zero initial value yields
/// absolute drifts.
ConservationReport conservation_report(const Trajectory& traj, double mass_tol = 1e-10, double energy_tol = 1e-6);

struct TimeWindow {
  double t_min = 0.0;
  double t_max = 0.0;
};

struct DecayFit {
  double p_exponent = 0.0;
  TimeWindow window;
  double fitted_slope = 0.0;
  double target_slope = 0.0;  // 1/p - 1/2
  double residual = 0.0;      // |fitted - target|
  double fit_rms = 0.0;
  std::size_t samples = 0;
  double wrap_time = 0.0;
};

/// Least-squares slope of log |e^{-itA} u0|_{L^p} against log t on the
/// window. Requires p > 2, t_max >= 10 t_min and t_max below the wrap time.
DecayFit decay_fit(const OperatorMatrix& op, const GridFunction& u0, double p, TimeWindow window,
                   const StepperConfig& cfg);
/// Fit on an existing trajectory.
DecayFit decay_fit(const Trajectory& traj, double p, TimeWindow window);

/// max_f |e^{-itA} f|_{L^p([0,T]; L^r)} / |f|_{L^2} with (p, r) from the table.
double strichartz_quotient(const OperatorMatrix& op, const std::vector<GridFunction>& data, const ExponentTable& tab,
                           double horizon, const StepperConfig& cfg);

/// phi_+(T) = e^{iTA} u(T) with the linear stepper from cfg.
GridFunction wave_operator_state(const Trajectory& traj, const OperatorMatrix& op, double T, const StepperConfig& cfg);

/// |phi_+(T1) - phi_+(T2)|_{H^1}.
double cauchy_defect(const Trajectory& traj, const OperatorMatrix& op, double T1, double T2,
                     const StepperConfig& cfg);

struct Series {
  std::vector<double> t;
  std::vector<double> value;
};

/// d(t_k) = |u(t_k) - e^{-i t_k A} phi_+|_{H^1} at every recorded time.
Series scattering_distance_series(const Trajectory& traj, const OperatorMatrix& op, const GridFunction& phi_plus,
                                  const StepperConfig& cfg);

enum class Verdict { scattering_consistent, inconclusive };
std::string to_string(Verdict v);

struct LadderEntry {
  double t1 = 0.0;
  double t2 = 0.0;
  double defect = 0.0;
};

struct ScatteringReport {
  explicit ScatteringReport(GridFunction phi) : phi_plus(std::move(phi)) {}

  GridFunction phi_plus;  // from the last ladder time
  Series distances;       // against phi_plus
  std::vector<LadderEntry> cauchy_defects;  // consecutive ladder pairs
  /// |u(T_last) - e^{-iT_last A} phi_+(T_prev)|_{H^1}: the final distance
  /// measured against the asymptotic state of the previous ladder time.
  double final_distance = 0.0;
  double initial_h1 = 0.0;
  double spacetime_norm_lpLr = 0.0;
  bool ladder_decreasing = false;
  bool ladder_halving = false;  // each defect at most half the previous one
  double wrap_time = 0.0;
  Verdict verdict = Verdict::inconclusive;
};

/// Ladder times must be recorded in the trajectory and increasing.
ScatteringReport scattering_report(const Trajectory& traj, const OperatorMatrix& op, const std::vector<double>& ladder,
                                   const ExponentTable& tab, const StepperConfig& cfg,
                                   double distance_fraction = 1e-3);

struct ThresholdRow {
  double epsilon = 0.0;
  double spacetime_norm = 0.0;
  double norm_over_epsilon = 0.0;
  double final_distance = 0.0;
  bool aborted = false;
};

struct ThresholdScan {
  std::vector<ThresholdRow> rows;
  double linear_norm = 0.0;  // spacetime norm of the linear flow of u_shape
  bool small_limit_consistent = false;
  bool monotone = false;
  std::vector<std::string> flags;
};

ThresholdScan smalldata_threshold_scan(const CoefficientSet& cs, const GridFunction& u_shape,
                                       const std::vector<double>& epsilons, const ExponentTable& tab, double T,
                                       const StepperConfig& cfg);

struct LocalizationSeries {
  std::vector<double> t;
  std::vector<double> sigma_mass;
  std::vector<double> sigma_energy;
};

/// Exterior/interior ratios of |u|_{L^2} and of |u_x|_{L^2} + 2/(beta+1) |u|_{L^{beta+1}}
/// about |x| = R. An empty interior gives infinity.
LocalizationSeries localization_ratio(const Trajectory& traj, double R, double beta);
double localization_mass_ratio(const GridFunction& u, double R);
double localization_energy_ratio(const GridFunction& u, double R, double beta);

}  // namespace nlsvc
