#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nlsvc/coefficients.hpp"
#include "nlsvc/grid.hpp"
#include "nlsvc/operator.hpp"
#include "nlsvc/transforms.hpp"

namespace nlsvc {

enum class Scheme {
  /// Crank-Nicolson on A (any coefficients), Strang-split with the nonlinearity.
  crank_nicolson,
  /// Gauge + Liouville reduction, exact free step with c~ and the nonlinear
  /// phase split around it.
  strang_gauge,
};

std::string to_string(Scheme s);
std::optional<Scheme> scheme_from_name(std::string_view name);

/// Multiplicative damping exp(-strength * dt * sigma(x)) with sigma a smooth
/// ramp supported on the outer width_fraction of the box.
struct SpongeConfig {
  double width_fraction = 0.1;
  double strength = 1.0;
};

struct StepperConfig {
  Scheme scheme = Scheme::crank_nicolson;
  double dt = 1e-3;
  std::size_t record_stride = 1;
  std::optional<SpongeConfig> sponge;
  /// Discretization of A used by Crank-Nicolson (and for its ledgers).
  Discretization discretization = Discretization::spectral;
  double solver_tol = 1e-14;
  std::size_t max_iterations = 400;
  double c0 = 1.0;
  /// Relative mass threshold for the outer 10% band.
  double edge_mass_threshold = 1e-6;
};

struct TrajectoryMeta {
  Scheme scheme = Scheme::crank_nicolson;
  double dt = 0.0;
  std::size_t record_stride = 1;
  std::string coefficient_id;
  bool nonlinear = false;
  bool aborted = false;
  std::string abort_reason;
  double absorbed_mass = 0.0;
  double wrap_time = 0.0;
  double max_edge_fraction = 0.0;
  std::size_t solver_iterations = 0;
  std::vector<std::string> warnings;
};

/// Time-ordered recorded states with one energy ledger per state.
struct Trajectory {
  std::vector<double> times;
  std::vector<GridFunction> states;
  std::vector<EnergyLedger> ledgers;
  TrajectoryMeta meta;

  std::size_t size() const { return states.size(); }
  bool empty() const { return states.empty(); }
  double record_interval() const { return meta.dt * static_cast<double>(meta.record_stride); }
  /// Index of the record at time t (within half a record interval).
  std::optional<std::size_t> index_of(double t) const;
};

double spacetime_norm(const Trajectory& traj, double p, double r);

/// e^{it d_xx} u0: DFT coefficients times e^{-it xi^2}.
GridFunction free_flow(const GridFunction& u0, double t);

/// L / max group velocity, with the group velocity 2 xi_eff taken at the
/// frequency beyond which at most `tail` of the spectral mass lies.
double wrap_time(const GridFunction& u0, double tail = 1e-6);

/// One Crank-Nicolson step (I + i dt/2 A) u' = (I - i dt/2 A) u. dt may be
/// negative. Finite differences use a cyclic tridiagonal direct solve; the
/// spectral operator uses preconditioned CG on the normal equations.
class CrankNicolson {
 public:
  CrankNicolson(OperatorMatrix op, double dt, double tol = 1e-14, std::size_t max_iterations = 400);
  /// Returns the number of inner iterations (0 for the direct solve).
  std::size_t step(GridFunction& u) const;
  const OperatorMatrix& op() const { return op_; }

 private:
  std::size_t solve_spectral(const GridFunction& rhs, GridFunction& x) const;
  void solve_tridiagonal(std::vector<cplx>& r) const;

  OperatorMatrix op_;
  double dt_;
  double tol_;
  std::size_t max_iterations_;
  std::vector<double> preconditioner_;
  // Cyclic tridiagonal factorization of I + i dt/2 A.
  std::vector<cplx> sub_, sup_, gam_, bet_, z_;
  cplx corner_lower_{}, corner_upper_{}, gamma_{}, fact_den_{};
};

/// Exact-in-time propagation in the gauged Liouville frame. States are kept
/// on the alpha grid between calls.
class ReducedSplitStepper {
 public:
  ReducedSplitStepper(const CoefficientSet& cs, double dt, bool nonlinear);
  GridFunction to_reduced(const GridFunction& u) const;
  GridFunction from_reduced(const GridFunction& v) const;
  void step(GridFunction& v) const;
  const LiouvilleMap& map() const { return map_; }

 private:
  GaugeData gauge_;
  LiouvilleMap map_;
  double dt_;
  bool nonlinear_;
  double beta_;
  std::vector<cplx> kinetic_;
  RealField nonlinear_factor_;
};

/// Linear flow e^{-itA} sampled every record_stride steps over [0, t_final].
Trajectory linear_flow(const OperatorMatrix& op, const GridFunction& u0, double t_final, const StepperConfig& cfg);

/// Linear stepper from cfg, built once and reused for both time directions.
class LinearEvolver {
 public:
  LinearEvolver(const OperatorMatrix& op, const StepperConfig& cfg);
  /// e^{-itA} u with t a multiple of cfg.dt (either sign).
  GridFunction advance(const GridFunction& u, double t) const;
  const StepperConfig& config() const { return cfg_; }

 private:
  StepperConfig cfg_;
  std::optional<CrankNicolson> forward_cn_, backward_cn_;
  std::optional<ReducedSplitStepper> forward_split_, backward_split_;
};

/// Final state of the linear flow with the stepper from cfg; t may be negative.
GridFunction propagate_linear(const OperatorMatrix& op, const GridFunction& u0, double t, const StepperConfig& cfg);

/// i u_t - A u = |u|^{beta-1} u by Strang splitting.
Trajectory nlse_evolve(const CoefficientSet& cs, const GridFunction& u0, double t_final, const StepperConfig& cfg);

/// Dense eigendecomposition reference e^{-itA} (N <= 2048).
class DenseLinearFlow {
 public:
  explicit DenseLinearFlow(const OperatorMatrix& op);
  GridFunction operator()(const GridFunction& u0, double t) const;
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }

 private:
  Grid grid_;
  Eigen::MatrixXcd vectors_;
  Eigen::VectorXd eigenvalues_;
};

GridFunction linear_flow_exact_small(const OperatorMatrix& op, const GridFunction& u0, double t);

/// Linear propagator for repeated use: exact spectral flow for the free
/// operator, Crank-Nicolson at step dt otherwise.
class LinearPropagator {
 public:
  LinearPropagator(OperatorMatrix op, double dt = 1e-2);
  GridFunction operator()(const GridFunction& u, double t) const;
  const OperatorMatrix& op() const { return op_; }
  bool exact() const { return exact_; }

 private:
  OperatorMatrix op_;
  double dt_;
  bool exact_;
};

}  // namespace nlsvc
