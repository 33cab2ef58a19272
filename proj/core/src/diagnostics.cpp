#include "nlsvc/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>

#include "nlsvc/error.hpp"

namespace nlsvc {

namespace {

constexpr double kLadderNoise = 1e-10;

double relative_drift(double value, double reference) {
  const double d = std::abs(value - reference);
  return reference != 0.0 ? d / std::abs(reference) : d;
}

std::size_t require_index(const Trajectory& traj, double T) {
  const auto idx = traj.index_of(T);
  if (!idx) {
    std::ostringstream os;
    os << "time " << T << " is not recorded in the trajectory";
    throw ContractError(os.str());
  }
  return *idx;
}

double band_l2(const GridFunction& u, double R, bool exterior) {
  double s = 0.0;
  const Grid& g = u.grid();
  for (std::size_t j = 0; j < u.size(); ++j)
    if ((std::abs(g.x(j)) >= R) == exterior) s += std::norm(u[j]);
  return std::sqrt(s * g.spacing());
}

double band_lq(const GridFunction& u, double R, double q, bool exterior) {
  double s = 0.0;
  const Grid& g = u.grid();
  for (std::size_t j = 0; j < u.size(); ++j)
    if ((std::abs(g.x(j)) >= R) == exterior) s += std::pow(std::abs(u[j]), q);
  return std::pow(s * g.spacing(), 1.0 / q);
}

double ratio(double num, double den) {
  if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return num / den;
}

}  // namespace

ConservationReport conservation_report(const Trajectory& traj, double mass_tol, double energy_tol) {
  require(!traj.ledgers.empty(), "conservation report needs ledgers");
  ConservationReport rep;
  rep.mass_tolerance = mass_tol;
  rep.energy_tolerance = energy_tol;
  const EnergyLedger& l0 = traj.ledgers.front();
  for (std::size_t k = 0; k < traj.ledgers.size(); ++k) {
    const EnergyLedger& l = traj.ledgers[k];
    const double dm = relative_drift(l.mass, l0.mass);
    const double de = relative_drift(l.energy, l0.energy);
    if (dm > rep.mass_drift) {
      rep.mass_drift = dm;
      rep.worst_mass_index = k;
    }
    if (de > rep.energy_drift) {
      rep.energy_drift = de;
      rep.worst_energy_index = k;
    }
    rep.full_energy_drift = std::max(rep.full_energy_drift, relative_drift(l.full_energy, l0.full_energy));
  }
  rep.mass_flagged = rep.mass_drift > mass_tol;
  rep.energy_flagged = rep.energy_drift > energy_tol;
  return rep;
}

DecayFit decay_fit(const Trajectory& traj, double p, TimeWindow window) {
  require(p > 2.0 && std::isfinite(p), "decay fit requires 2 < p < infinity");
  require(window.t_min > 0.0 && window.t_max > window.t_min, "decay window must satisfy 0 < t_min < t_max");
  require(window.t_max >= 10.0 * window.t_min, "decay window must span at least one decade");
  require(window.t_max <= traj.meta.wrap_time, "decay window must end before the wrap-around time");
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double t = traj.times[k];
    if (t < window.t_min - 1e-12 || t > window.t_max + 1e-12) continue;
    lx.push_back(std::log(t));
    ly.push_back(std::log(lq_norm(traj.states[k], p)));
  }
  require(lx.size() >= 3, "decay window contains fewer than three records");
  const double n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  DecayFit fit;
  fit.p_exponent = p;
  fit.window = window;
  fit.fitted_slope = sxy / sxx;
  fit.target_slope = 1.0 / p - 0.5;
  fit.residual = std::abs(fit.fitted_slope - fit.target_slope);
  double rss = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double e = ly[i] - (my + fit.fitted_slope * (lx[i] - mx));
    rss += e * e;
  }
  fit.fit_rms = std::sqrt(rss / n);
  fit.samples = lx.size();
  fit.wrap_time = traj.meta.wrap_time;
  return fit;
}

DecayFit decay_fit(const OperatorMatrix& op, const GridFunction& u0, double p, TimeWindow window,
                   const StepperConfig& cfg) {
  require(p > 2.0 && std::isfinite(p), "decay fit requires 2 < p < infinity");
  require(window.t_max >= 10.0 * window.t_min && window.t_min > 0.0, "decay window must span at least one decade");
  const double tw = wrap_time(u0);
  require(window.t_max <= tw, "decay window must end before the wrap-around time");
  const double step = cfg.dt * static_cast<double>(cfg.record_stride);
  const double t_final = std::ceil(window.t_max / step - 1e-9) * step;
  return decay_fit(linear_flow(op, u0, t_final, cfg), p, window);
}

double strichartz_quotient(const OperatorMatrix& op, const std::vector<GridFunction>& data, const ExponentTable& tab,
                           double horizon, const StepperConfig& cfg) {
  require(!data.empty(), "Strichartz quotient needs at least one datum");
  double best = 0.0;
  for (const auto& f : data) {
    const double m = l2_norm(f);
    require(m > 0.0, "Strichartz data must be nonzero");
    const Trajectory traj = linear_flow(op, f, horizon, cfg);
    best = std::max(best, spacetime_norm(traj, tab.p, tab.r) / m);
  }
  return best;
}

GridFunction wave_operator_state(const Trajectory& traj, const OperatorMatrix& op, double T, const StepperConfig& cfg) {
  const std::size_t k = require_index(traj, T);
  return LinearEvolver(op, cfg).advance(traj.states[k], -traj.times[k]);
}

double cauchy_defect(const Trajectory& traj, const OperatorMatrix& op, double T1, double T2,
                     const StepperConfig& cfg) {
  const LinearEvolver ev(op, cfg);
  const std::size_t k1 = require_index(traj, T1);
  const std::size_t k2 = require_index(traj, T2);
  return h1_norm(ev.advance(traj.states[k1], -traj.times[k1]) - ev.advance(traj.states[k2], -traj.times[k2]));
}

Series scattering_distance_series(const Trajectory& traj, const OperatorMatrix& op, const GridFunction& phi_plus,
                                  const StepperConfig& cfg) {
  const LinearEvolver ev(op, cfg);
  Series s;
  GridFunction lin = phi_plus;
  double t_prev = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    lin = ev.advance(lin, traj.times[k] - t_prev);
    t_prev = traj.times[k];
    s.t.push_back(traj.times[k]);
    s.value.push_back(h1_norm(traj.states[k] - lin));
  }
  return s;
}

std::string to_string(Verdict v) {
  return v == Verdict::scattering_consistent ? "scattering-consistent" : "inconclusive";
}

ScatteringReport scattering_report(const Trajectory& traj, const OperatorMatrix& op, const std::vector<double>& ladder,
                                   const ExponentTable& tab, const StepperConfig& cfg, double distance_fraction) {
  require(ladder.size() >= 2, "scattering ladder needs at least two times");
  for (std::size_t i = 1; i < ladder.size(); ++i) require(ladder[i] > ladder[i - 1], "ladder must be increasing");
  require(!traj.empty(), "empty trajectory");
  const LinearEvolver ev(op, cfg);
  std::vector<GridFunction> phis;
  std::vector<std::size_t> idx;
  for (double T : ladder) {
    idx.push_back(require_index(traj, T));
    phis.push_back(ev.advance(traj.states[idx.back()], -traj.times[idx.back()]));
  }
  ScatteringReport rep(phis.back());
  for (std::size_t i = 1; i < ladder.size(); ++i)
    rep.cauchy_defects.push_back({ladder[i - 1], ladder[i], h1_norm(phis[i] - phis[i - 1])});
  rep.ladder_decreasing = true;
  rep.ladder_halving = true;
  // Defects at solver-noise level count as converged.
  const double floor = kLadderNoise * h1_norm(traj.states[idx.front()]);
  for (std::size_t i = 1; i < rep.cauchy_defects.size(); ++i) {
    const double d = rep.cauchy_defects[i].defect;
    if (d <= floor) continue;
    if (d >= rep.cauchy_defects[i - 1].defect) rep.ladder_decreasing = false;
    if (d > 0.5 * rep.cauchy_defects[i - 1].defect) rep.ladder_halving = false;
  }
  rep.distances = scattering_distance_series(traj, op, rep.phi_plus, cfg);
  const std::size_t last = idx.back();
  rep.final_distance = h1_norm(traj.states[last] - ev.advance(phis[phis.size() - 2], traj.times[last]));
  rep.initial_h1 = h1_norm(traj.states.front());
  rep.spacetime_norm_lpLr = spacetime_norm(traj, tab.p, tab.r);
  rep.wrap_time = traj.meta.wrap_time;
  const bool before_wrap = traj.times.back() <= 0.5 * traj.meta.wrap_time;
  rep.verdict = rep.ladder_decreasing && before_wrap && !traj.meta.aborted &&
                        rep.final_distance <= distance_fraction * rep.initial_h1
                    ? Verdict::scattering_consistent
                    : Verdict::inconclusive;
  return rep;
}

ThresholdScan smalldata_threshold_scan(const CoefficientSet& cs, const GridFunction& u_shape,
                                       const std::vector<double>& epsilons, const ExponentTable& tab, double T,
                                       const StepperConfig& cfg) {
  require(!epsilons.empty(), "threshold scan needs at least one epsilon");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    require(epsilons[i] >= 0.0, "epsilons must be nonnegative");
    if (i > 0) require(epsilons[i] > epsilons[i - 1], "epsilons must be increasing");
  }
  const OperatorMatrix op(cs, cfg.discretization);
  ThresholdScan scan;
  scan.linear_norm = spacetime_norm(linear_flow(op, u_shape, T, cfg), tab.p, tab.r);
  const double half = 0.5 * T;

  std::vector<std::future<ThresholdRow>> jobs;
  for (double eps : epsilons) {
    jobs.push_back(std::async(std::launch::async, [&, eps] {
      ThresholdRow row;
      row.epsilon = eps;
      const Trajectory traj = nlse_evolve(cs, eps * u_shape, T, cfg);
      row.aborted = traj.meta.aborted;
      row.spacetime_norm = spacetime_norm(traj, tab.p, tab.r);
      row.norm_over_epsilon = eps > 0.0 ? row.spacetime_norm / eps : 0.0;
      if (!row.aborted && traj.index_of(half) && traj.index_of(T)) row.final_distance = cauchy_defect(traj, op, half, T, cfg);
      return row;
    }));
  }
  for (auto& j : jobs) scan.rows.push_back(j.get());

  std::vector<const ThresholdRow*> positive;
  for (const auto& r : scan.rows)
    if (r.epsilon > 0.0) positive.push_back(&r);
  scan.small_limit_consistent = positive.size() >= 2 && scan.linear_norm > 0.0;
  for (std::size_t i = 0; i < std::min<std::size_t>(2, positive.size()); ++i)
    if (std::abs(positive[i]->norm_over_epsilon - scan.linear_norm) > 0.05 * scan.linear_norm)
      scan.small_limit_consistent = false;
  scan.monotone = true;
  for (std::size_t i = 1; i < scan.rows.size(); ++i)
    if (scan.rows[i].spacetime_norm < scan.rows[i - 1].spacetime_norm) {
      scan.monotone = false;
      std::ostringstream os;
      os << "spacetime norm decreases between eps = " << scan.rows[i - 1].epsilon << " and " << scan.rows[i].epsilon;
      scan.flags.push_back(os.str());
    }
  return scan;
}

double localization_mass_ratio(const GridFunction& u, double R) {
  require(R > 0.0 && R < u.grid().half_length(), "localization radius must lie in (0, L)");
  return ratio(band_l2(u, R, true), band_l2(u, R, false));
}

double localization_energy_ratio(const GridFunction& u, double R, double beta) {
  require(R > 0.0 && R < u.grid().half_length(), "localization radius must lie in (0, L)");
  const GridFunction ux = derivative(u);
  const double q = beta + 1.0;
  const double w = 2.0 / (beta + 1.0);
  const double ext = band_l2(ux, R, true) + w * band_lq(u, R, q, true);
  const double in = band_l2(ux, R, false) + w * band_lq(u, R, q, false);
  return ratio(ext, in);
}

LocalizationSeries localization_ratio(const Trajectory& traj, double R, double beta) {
  LocalizationSeries s;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    s.t.push_back(traj.times[k]);
    s.sigma_mass.push_back(localization_mass_ratio(traj.states[k], R));
    s.sigma_energy.push_back(localization_energy_ratio(traj.states[k], R, beta));
  }
  return s;
}

}  // namespace nlsvc
