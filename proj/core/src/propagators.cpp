#include "nlsvc/propagators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "nlsvc/error.hpp"
#include "nlsvc/spectral.hpp"

namespace nlsvc {

namespace {

constexpr cplx I{0.0, 1.0};

double l2_sq(const GridFunction& u) {
  double s = 0.0;
  for (const auto& z : u.values()) s += std::norm(z);
  return s * u.grid().spacing();
}

RealField sponge_mask(const Grid& g, const SpongeConfig& sc) {
  require(sc.width_fraction > 0.0 && sc.width_fraction <= 1.0, "sponge width fraction must lie in (0, 1]");
  require(sc.strength >= 0.0, "sponge strength must be nonnegative");
  const double L = g.half_length();
  const double inner = L * (1.0 - sc.width_fraction);
  RealField sigma(g.size(), 0.0);
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double ax = std::abs(g.x(j));
    if (ax <= inner) continue;
    const double s = std::sin(0.5 * std::numbers::pi * (ax - inner) / (L - inner));
    sigma[j] = s * s;
  }
  return sigma;
}

/// Returns the absorbed mass.
double apply_sponge(GridFunction& u, const RealField& damping) {
  const double before = l2_sq(u);
  u.multiply(damping);
  return before - l2_sq(u);
}

RealField damping_factors(const Grid& g, const SpongeConfig& sc, double dt) {
  RealField f = sponge_mask(g, sc);
  for (auto& s : f) s = std::exp(-sc.strength * std::abs(dt) * s);
  return f;
}

void nonlinear_phase(GridFunction& u, double tau, double beta) {
  const double e = 0.5 * (beta - 1.0);
  for (auto& z : u.values()) z *= std::polar(1.0, -tau * std::pow(std::norm(z), e));
}

EnergyLedger linear_ledger(const OperatorMatrix& op, const GridFunction& u, double c0) {
  EnergyLedger l;
  l.c0 = c0;
  const double m2 = l2_sq(u);
  l.mass = std::sqrt(m2);
  l.quadratic = op.quadratic_form(u);
  l.potential = 0.0;
  l.energy = l.quadratic;
  l.full_energy = l.energy + c0 * m2;
  return l;
}

std::size_t step_count(double t_final, double dt) {
  require(dt > 0.0 && std::isfinite(dt), "dt must be positive");
  require(t_final >= 0.0 && std::isfinite(t_final), "t_final must be nonnegative");
  const double n = std::round(t_final / dt);
  require(std::abs(n * dt - t_final) <= 1e-9 * std::max(1.0, t_final), "t_final must be a multiple of dt");
  return static_cast<std::size_t>(n);
}

void validate(const StepperConfig& cfg) {
  require(cfg.dt > 0.0 && std::isfinite(cfg.dt), "dt must be positive");
  require(cfg.record_stride >= 1, "record_stride must be a positive integer");
  require(cfg.solver_tol > 0.0, "solver tolerance must be positive");
  require(cfg.c0 > 0.0, "c0 must be positive");
}

class Recorder {
 public:
  Recorder(Trajectory& traj, const StepperConfig& cfg) : traj_(traj), cfg_(cfg) {}

  template <class LedgerFn>
  void record(double t, const GridFunction& u, LedgerFn&& ledger) {
    traj_.times.push_back(t);
    traj_.ledgers.push_back(ledger(u));
    const double edge = edge_mass_fraction(u, 0.1);
    traj_.meta.max_edge_fraction = std::max(traj_.meta.max_edge_fraction, edge);
    if (edge > cfg_.edge_mass_threshold && !edge_warned_) {
      std::ostringstream os;
      os << "edge mass fraction " << edge << " exceeds " << cfg_.edge_mass_threshold << " at t = " << t;
      traj_.meta.warnings.push_back(os.str());
      edge_warned_ = true;
    }
    traj_.states.push_back(u);
  }

 private:
  Trajectory& traj_;
  const StepperConfig& cfg_;
  bool edge_warned_ = false;
};

void init_meta(Trajectory& traj, const CoefficientSet& cs, const GridFunction& u0, const StepperConfig& cfg,
               bool nonlinear) {
  traj.meta.scheme = cfg.scheme;
  traj.meta.dt = cfg.dt;
  traj.meta.record_stride = cfg.record_stride;
  traj.meta.coefficient_id = cs.id;
  traj.meta.nonlinear = nonlinear;
  traj.meta.wrap_time = wrap_time(u0);
}

void accuracy_warning(Trajectory& traj, const OperatorMatrix& op, double dt) {
  const double r = dt * op.norm_estimate();
  if (r > 1.0) {
    std::ostringstream os;
    os << "dt * |A| estimate = " << r << " > 1; high modes are phase-inaccurate";
    traj.meta.warnings.push_back(os.str());
  }
}

/// Shared driver: `advance` performs one step on the evolving state and
/// returns the solver iterations; `observe` produces the x-frame state.
template <class State, class Advance, class Observe, class LedgerFn>
void drive(Trajectory& traj, const StepperConfig& cfg, State& state, std::size_t steps, const RealField* damping,
           Advance&& advance, Observe&& observe, LedgerFn&& ledger) {
  Recorder rec(traj, cfg);
  rec.record(0.0, observe(state), ledger);
  State last_good = state;
  for (std::size_t n = 1; n <= steps; ++n) {
    traj.meta.solver_iterations += advance(state);
    if (damping) traj.meta.absorbed_mass += apply_sponge(state, *damping);
    if (!state.all_finite()) {
      std::ostringstream os;
      os << "non-finite state at step " << n << " (t = " << static_cast<double>(n) * cfg.dt << ")";
      traj.meta.aborted = true;
      traj.meta.abort_reason = os.str();
      const double t_last = static_cast<double>(n - 1) * cfg.dt;
      if (traj.times.back() < t_last) rec.record(t_last, observe(last_good), ledger);
      return;
    }
    last_good = state;
    if (n % cfg.record_stride == 0) rec.record(static_cast<double>(n) * cfg.dt, observe(state), ledger);
  }
}

Trajectory run(const CoefficientSet& cs, const OperatorMatrix* linear_op, const GridFunction& u0, double t_final,
               const StepperConfig& cfg, bool nonlinear) {
  validate(cfg);
  require(u0.grid() == cs.grid, "initial datum and coefficients must share a grid");
  require(u0.all_finite(), "initial datum must be finite");
  const std::size_t steps = step_count(t_final, cfg.dt);
  const double beta = cs.beta;
  if (nonlinear) require(beta > 5.0, "nonlinear evolution requires beta > 5");

  Trajectory traj;
  init_meta(traj, cs, u0, cfg, nonlinear);

  if (cfg.scheme == Scheme::crank_nicolson) {
    OperatorMatrix op = linear_op && linear_op->discretization() == cfg.discretization
                            ? *linear_op
                            : OperatorMatrix(cs, cfg.discretization);
    accuracy_warning(traj, op, cfg.dt);
    CrankNicolson cn(op, cfg.dt, cfg.solver_tol, cfg.max_iterations);
    std::optional<RealField> damping;
    if (cfg.sponge) damping = damping_factors(cs.grid, *cfg.sponge, cfg.dt);
    GridFunction u = u0;
    auto ledger = [&](const GridFunction& v) {
      return nonlinear ? energies(op, v, beta, cfg.c0) : linear_ledger(op, v, cfg.c0);
    };
    auto advance = [&](GridFunction& v) -> std::size_t {
      if (nonlinear) nonlinear_phase(v, 0.5 * cfg.dt, beta);
      const std::size_t it = cn.step(v);
      if (nonlinear) nonlinear_phase(v, 0.5 * cfg.dt, beta);
      return it;
    };
    drive(traj, cfg, u, steps, damping ? &*damping : nullptr, advance,
          [](const GridFunction& v) -> const GridFunction& { return v; }, ledger);
    return traj;
  }

  ReducedSplitStepper stepper(cs, cfg.dt, nonlinear);
  OperatorMatrix op(cs, Discretization::spectral);
  std::optional<RealField> damping;
  if (cfg.sponge) damping = damping_factors(stepper.map().alpha_grid(), *cfg.sponge, cfg.dt);
  GridFunction v = stepper.to_reduced(u0);
  auto ledger = [&](const GridFunction& w) {
    return nonlinear ? energies(op, w, beta, cfg.c0) : linear_ledger(op, w, cfg.c0);
  };
  auto advance = [&](GridFunction& w) -> std::size_t {
    stepper.step(w);
    return 0;
  };
  drive(traj, cfg, v, steps, damping ? &*damping : nullptr, advance,
        [&](const GridFunction& w) { return stepper.from_reduced(w); }, ledger);
  return traj;
}

}  // namespace

std::string to_string(Scheme s) { return s == Scheme::crank_nicolson ? "crank_nicolson" : "strang_gauge"; }

std::optional<Scheme> scheme_from_name(std::string_view name) {
  if (name == "crank_nicolson") return Scheme::crank_nicolson;
  if (name == "strang_gauge") return Scheme::strang_gauge;
  return std::nullopt;
}

std::optional<std::size_t> Trajectory::index_of(double t) const {
  if (times.empty()) return std::nullopt;
  const auto it = std::lower_bound(times.begin(), times.end(), t);
  std::size_t best = times.size();
  double dist = std::numeric_limits<double>::infinity();
  for (auto c : {it, it == times.begin() ? it : std::prev(it)}) {
    if (c == times.end()) continue;
    const double d = std::abs(*c - t);
    if (d < dist) {
      dist = d;
      best = static_cast<std::size_t>(c - times.begin());
    }
  }
  // Times are k * dt * stride up to rounding; anything else was not recorded.
  const double tol = 1e-9 * std::max({record_interval(), std::abs(t), 1.0});
  if (best == times.size() || dist > tol) return std::nullopt;
  return best;
}

double spacetime_norm(const Trajectory& traj, double p, double r) {
  return spacetime_norm(traj.times, traj.states, p, r);
}

GridFunction free_flow(const GridFunction& u0, double t) {
  const auto& xi = u0.grid().frequencies();
  std::vector<cplx> symbol(xi.size());
  for (std::size_t k = 0; k < xi.size(); ++k) symbol[k] = std::polar(1.0, -t * xi[k] * xi[k]);
  return apply_symbol(u0, symbol);
}

double wrap_time(const GridFunction& u0, double tail) {
  const auto hat = dft(u0.values());
  const auto& xi = u0.grid().frequencies();
  std::vector<std::pair<double, double>> spec(hat.size());
  double total = 0.0;
  for (std::size_t k = 0; k < hat.size(); ++k) {
    spec[k] = {std::abs(xi[k]), std::norm(hat[k])};
    total += spec[k].second;
  }
  const double dxi = std::numbers::pi / u0.grid().half_length();
  if (total == 0.0) return std::numeric_limits<double>::infinity();
  std::sort(spec.begin(), spec.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  // Walk down from the highest frequency until the tail mass exceeds the budget.
  double accumulated = 0.0;
  double xi_eff = spec.back().first;
  for (const auto& [f, m] : spec) {
    accumulated += m;
    if (accumulated > tail * total) {
      xi_eff = f;
      break;
    }
  }
  xi_eff = std::max(xi_eff, dxi);
  return u0.grid().half_length() / (2.0 * xi_eff);
}

CrankNicolson::CrankNicolson(OperatorMatrix op, double dt, double tol, std::size_t max_iterations)
    : op_(std::move(op)), dt_(dt), tol_(tol), max_iterations_(max_iterations) {
  require(std::isfinite(dt) && dt != 0.0, "Crank-Nicolson step must be finite and nonzero");
  const Grid& g = op_.grid();
  const std::size_t n = g.size();
  const double tau = 0.5 * dt_;
  if (op_.discretization() == Discretization::spectral) {
    const auto& a = op_.coefficients().a.values();
    const auto& c = op_.coefficients().c.values();
    const auto [amin, amax] = std::minmax_element(a.begin(), a.end());
    const double a_ref = std::sqrt(*amin * *amax);
    double c_ref = 0.0;
    for (double v : c) c_ref += v;
    c_ref /= static_cast<double>(n);
    preconditioner_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double xi = g.frequency(k);
      const double s = a_ref * xi * xi + c_ref;
      preconditioner_[k] = 1.0 / (1.0 + tau * tau * s * s);
    }
    return;
  }
  const auto& st = op_.stencil();
  const cplx it{0.0, tau};
  std::vector<cplx> diag(n);
  for (std::size_t j = 0; j < n; ++j) diag[j] = 1.0 + it * st.diag[j];
  sub_.assign(n, 0.0);
  sup_.assign(n, 0.0);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    sup_[j] = it * st.upper[j];
    sub_[j + 1] = it * std::conj(st.upper[j]);
  }
  corner_lower_ = it * st.upper[n - 1];             // M_{N-1,0}
  corner_upper_ = it * std::conj(st.upper[n - 1]);  // M_{0,N-1}
  gamma_ = -diag[0];
  diag[0] -= gamma_;
  diag[n - 1] -= corner_lower_ * corner_upper_ / gamma_;
  bet_.assign(n, 0.0);
  gam_.assign(n, 0.0);
  bet_[0] = diag[0];
  for (std::size_t j = 1; j < n; ++j) {
    gam_[j] = sup_[j - 1] / bet_[j - 1];
    bet_[j] = diag[j] - sub_[j] * gam_[j];
    if (std::abs(bet_[j]) < 1e-300) throw NumericalError("tridiagonal factorization broke down");
  }
  z_.assign(n, 0.0);
  z_[0] = gamma_;
  z_[n - 1] = corner_lower_;
  // Plain tridiagonal solve for the correction vector.
  z_[0] /= bet_[0];
  for (std::size_t j = 1; j < n; ++j) z_[j] = (z_[j] - sub_[j] * z_[j - 1]) / bet_[j];
  for (std::size_t j = n - 1; j-- > 0;) z_[j] -= gam_[j + 1] * z_[j + 1];
  fact_den_ = 1.0 + z_[0] + corner_upper_ * z_[n - 1] / gamma_;
}

void CrankNicolson::solve_tridiagonal(std::vector<cplx>& r) const {
  const std::size_t n = r.size();
  r[0] /= bet_[0];
  for (std::size_t j = 1; j < n; ++j) r[j] = (r[j] - sub_[j] * r[j - 1]) / bet_[j];
  for (std::size_t j = n - 1; j-- > 0;) r[j] -= gam_[j + 1] * r[j + 1];
  const cplx fact = (r[0] + corner_upper_ * r[n - 1] / gamma_) / fact_den_;
  for (std::size_t j = 0; j < n; ++j) r[j] -= fact * z_[j];
}

std::size_t CrankNicolson::solve_spectral(const GridFunction& u, GridFunction& x) const {
  // Normal equations (I + tau^2 A^2) x = (I - i tau A)^2 u, preconditioned
  // by the Fourier-diagonal approximation of I + tau^2 A^2.
  const double tau = 0.5 * dt_;
  const std::size_t n = u.size();
  auto normal = [&](const GridFunction& v) {
    GridFunction out = op_.apply(op_.apply(v));
    out *= cplx(tau * tau);
    out += v;
    return out;
  };
  auto precondition = [&](const GridFunction& r) {
    auto hat = dft(r.values());
    for (std::size_t k = 0; k < n; ++k) hat[k] *= preconditioner_[k];
    return GridFunction(r.grid(), idft(hat));
  };
  auto dot = [](const GridFunction& p, const GridFunction& q) {
    cplx s = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) s += p[j] * std::conj(q[j]);
    return s;
  };

  const GridFunction au = op_.apply(u);
  GridFunction rhs = u;
  {
    GridFunction aau = op_.apply(au);
    for (std::size_t j = 0; j < n; ++j) rhs[j] += -2.0 * I * tau * au[j] - tau * tau * aau[j];
  }
  const double rhs_norm = std::sqrt(std::real(dot(rhs, rhs)));
  if (rhs_norm == 0.0) {
    x = GridFunction(u.grid());
    return 0;
  }

  // Initial guess: Cayley transform of the Fourier-diagonal model operator.
  {
    auto hat = dft(u.values());
    for (std::size_t k = 0; k < n; ++k) {
      const double q = std::sqrt(1.0 / preconditioner_[k] - 1.0);  // tau * s
      hat[k] *= (1.0 - I * q) / (1.0 + I * q);
    }
    x = GridFunction(u.grid(), idft(hat));
  }
  GridFunction r = rhs - normal(x);
  GridFunction z = precondition(r);
  GridFunction p = z;
  cplx rz = dot(r, z);
  double best = std::sqrt(std::real(dot(r, r))) / rhs_norm;
  std::size_t it = 0;
  while (best > tol_ && it < max_iterations_) {
    ++it;
    const GridFunction np = normal(p);
    const cplx alpha = rz / dot(np, p);
    for (std::size_t j = 0; j < n; ++j) {
      x[j] += alpha * p[j];
      r[j] -= alpha * np[j];
    }
    best = std::sqrt(std::real(dot(r, r))) / rhs_norm;
    if (best <= tol_) break;
    z = precondition(r);
    const cplx rz_new = dot(r, z);
    const cplx beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t j = 0; j < n; ++j) p[j] = z[j] + beta * p[j];
  }
  // Rounding in A^2 limits the attainable residual; accept a stalled solve
  // that is still far below any physically relevant error.
  if (best > tol_ && best > 1e-10) {
    std::ostringstream os;
    os << "Crank-Nicolson solve did not converge: relative residual " << best << " after " << it << " iterations";
    throw NumericalError(os.str());
  }
  return it;
}

std::size_t CrankNicolson::step(GridFunction& u) const {
  require(u.grid() == op_.grid(), "state and operator must share a grid");
  if (op_.discretization() == Discretization::spectral) {
    GridFunction x(u.grid());
    const std::size_t it = solve_spectral(u, x);
    u = std::move(x);
    return it;
  }
  const double tau = 0.5 * dt_;
  const GridFunction au = op_.apply(u);
  std::vector<cplx> r(u.size());
  for (std::size_t j = 0; j < r.size(); ++j) r[j] = u[j] - I * tau * au[j];
  solve_tridiagonal(r);
  u = GridFunction(u.grid(), std::move(r));
  return 0;
}

ReducedSplitStepper::ReducedSplitStepper(const CoefficientSet& cs, double dt, bool nonlinear)
    : gauge_(build_gauge(cs)),
      map_(build_liouville(cs, cs.grid)),
      dt_(dt),
      nonlinear_(nonlinear),
      beta_(cs.beta) {
  require(std::isfinite(dt) && dt != 0.0, "split step must be finite and nonzero");
  const Grid& ag = map_.alpha_grid();
  kinetic_.resize(ag.size());
  for (std::size_t k = 0; k < ag.size(); ++k) {
    const double xi = ag.frequency(k);
    kinetic_[k] = std::polar(1.0, -dt_ * xi * xi);
  }
  nonlinear_factor_.resize(ag.size());
  for (std::size_t k = 0; k < ag.size(); ++k)
    nonlinear_factor_[k] = std::pow(map_.a_on_alpha()[k], -0.25 * (beta_ - 1.0));
}

GridFunction ReducedSplitStepper::to_reduced(const GridFunction& u) const {
  return apply_liouville(gauge_forward(u, gauge_), map_, LiouvilleDirection::forward);
}

GridFunction ReducedSplitStepper::from_reduced(const GridFunction& v) const {
  return gauge_inverse(apply_liouville(v, map_, LiouvilleDirection::backward), gauge_);
}

void ReducedSplitStepper::step(GridFunction& v) const {
  const auto& pot = map_.potential();
  const double half = 0.5 * dt_;
  const double e = 0.5 * (beta_ - 1.0);
  auto phase = [&] {
    auto vals = v.values();
    for (std::size_t k = 0; k < vals.size(); ++k) {
      double w = pot[k];
      if (nonlinear_) w += nonlinear_factor_[k] * std::pow(std::norm(vals[k]), e);
      vals[k] *= std::polar(1.0, -half * w);
    }
  };
  phase();
  auto hat = dft(v.values());
  for (std::size_t k = 0; k < hat.size(); ++k) hat[k] *= kinetic_[k];
  idft(hat, v.values());
  phase();
}

Trajectory linear_flow(const OperatorMatrix& op, const GridFunction& u0, double t_final, const StepperConfig& cfg) {
  return run(op.coefficients(), &op, u0, t_final, cfg, false);
}

LinearEvolver::LinearEvolver(const OperatorMatrix& op, const StepperConfig& cfg) : cfg_(cfg) {
  validate(cfg);
  if (cfg.scheme == Scheme::crank_nicolson) {
    OperatorMatrix cn_op =
        op.discretization() == cfg.discretization ? op : OperatorMatrix(op.coefficients(), cfg.discretization);
    forward_cn_.emplace(cn_op, cfg.dt, cfg.solver_tol, cfg.max_iterations);
    backward_cn_.emplace(cn_op, -cfg.dt, cfg.solver_tol, cfg.max_iterations);
  } else {
    forward_split_.emplace(op.coefficients(), cfg.dt, false);
    backward_split_.emplace(op.coefficients(), -cfg.dt, false);
  }
}

GridFunction LinearEvolver::advance(const GridFunction& u, double t) const {
  if (t == 0.0) return u;
  const std::size_t steps = step_count(std::abs(t), cfg_.dt);
  if (forward_cn_) {
    require(u.grid() == forward_cn_->op().grid(), "state and operator must share a grid");
    const CrankNicolson& cn = t > 0.0 ? *forward_cn_ : *backward_cn_;
    GridFunction v = u;
    for (std::size_t n = 0; n < steps; ++n) cn.step(v);
    return v;
  }
  const ReducedSplitStepper& st = t > 0.0 ? *forward_split_ : *backward_split_;
  GridFunction v = st.to_reduced(u);
  for (std::size_t n = 0; n < steps; ++n) st.step(v);
  return st.from_reduced(v);
}

GridFunction propagate_linear(const OperatorMatrix& op, const GridFunction& u0, double t, const StepperConfig& cfg) {
  require(u0.grid() == op.grid(), "state and operator must share a grid");
  return LinearEvolver(op, cfg).advance(u0, t);
}

Trajectory nlse_evolve(const CoefficientSet& cs, const GridFunction& u0, double t_final, const StepperConfig& cfg) {
  return run(cs, nullptr, u0, t_final, cfg, true);
}

DenseLinearFlow::DenseLinearFlow(const OperatorMatrix& op) : grid_(op.grid()) {
  if (op.grid().size() > 2048) throw ContractError("dense reference flow requires N <= 2048");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(op.dense());
  if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
  vectors_ = es.eigenvectors();
  eigenvalues_ = es.eigenvalues();
}

GridFunction DenseLinearFlow::operator()(const GridFunction& u0, double t) const {
  require(u0.grid() == grid_, "state and operator must share a grid");
  const auto n = static_cast<Eigen::Index>(u0.size());
  Eigen::Map<const Eigen::VectorXcd> u(u0.values().data(), n);
  Eigen::VectorXcd coeff = vectors_.adjoint() * u;
  for (Eigen::Index k = 0; k < n; ++k) coeff[k] *= std::polar(1.0, -t * eigenvalues_[k]);
  Eigen::VectorXcd out = vectors_ * coeff;
  return GridFunction(grid_, std::vector<cplx>(out.data(), out.data() + n));
}

GridFunction linear_flow_exact_small(const OperatorMatrix& op, const GridFunction& u0, double t) {
  return DenseLinearFlow(op)(u0, t);
}

LinearPropagator::LinearPropagator(OperatorMatrix op, double dt)
    : op_(std::move(op)), dt_(dt), exact_(op_.discretization() == Discretization::spectral && op_.is_free()) {
  require(dt > 0.0, "dt must be positive");
}

GridFunction LinearPropagator::operator()(const GridFunction& u, double t) const {
  if (exact_) return free_flow(u, t);
  if (t == 0.0) return u;
  const double n = std::max(1.0, std::round(std::abs(t) / dt_));
  CrankNicolson cn(op_, t / n);
  GridFunction v = u;
  for (std::size_t k = 0; k < static_cast<std::size_t>(n); ++k) cn.step(v);
  return v;
}

}  // namespace nlsvc
