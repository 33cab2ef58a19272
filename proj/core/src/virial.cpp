#include "nlsvc/virial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nlsvc/error.hpp"
#include "nlsvc/spectral.hpp"

namespace nlsvc {

namespace {

/// Truncated Taylor series c_k = f^(k)(x0) / k!, k <= 3.
struct Jet {
  std::array<double, 4> c{};

  static Jet constant(double v) { return Jet{{v, 0.0, 0.0, 0.0}}; }
  static Jet variable(double v) { return Jet{{v, 1.0, 0.0, 0.0}}; }
  std::array<double, 4> derivatives() const { return {c[0], c[1], 2.0 * c[2], 6.0 * c[3]}; }
};

Jet operator+(Jet a, const Jet& b) {
  for (int k = 0; k < 4; ++k) a.c[k] += b.c[k];
  return a;
}
Jet operator-(Jet a, const Jet& b) {
  for (int k = 0; k < 4; ++k) a.c[k] -= b.c[k];
  return a;
}
Jet operator*(double s, Jet a) {
  for (auto& v : a.c) v *= s;
  return a;
}
Jet operator*(const Jet& a, const Jet& b) {
  Jet r;
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i <= k; ++i) r.c[k] += a.c[i] * b.c[k - i];
  return r;
}
Jet operator/(const Jet& a, const Jet& b) {
  Jet q;
  for (int k = 0; k < 4; ++k) {
    double s = a.c[k];
    for (int i = 1; i <= k; ++i) s -= b.c[i] * q.c[k - i];
    q.c[k] = s / b.c[0];
  }
  return q;
}
Jet exp(const Jet& f) {
  Jet g;
  g.c[0] = std::exp(f.c[0]);
  for (int k = 1; k < 4; ++k) {
    double s = 0.0;
    for (int j = 1; j <= k; ++j) s += j * f.c[j] * g.c[k - j];
    g.c[k] = s / k;
  }
  return g;
}

// e^{-1/t}; below t = 1e-3 the value and derivatives are far under 1e-400.
Jet bump_factor(const Jet& t) {
  if (t.c[0] < 1e-3) return Jet{};
  return exp(-1.0 * (Jet::constant(1.0) / t));
}

Jet step(const Jet& t) {
  if (t.c[0] <= 0.0) return Jet{};
  if (t.c[0] >= 1.0) return Jet::constant(1.0);
  const Jet f = bump_factor(t);
  return f / (f + bump_factor(Jet::constant(1.0) - t));
}

Jet cutoff(const Jet& s) {
  const Jet abs_s = s.c[0] < 0.0 ? -1.0 * s : s;
  return step(Jet::constant(2.0) - abs_s);
}

double integrate(const Grid& g, const std::vector<double>& f) {
  double s = 0.0;
  for (double v : f) s += v;
  return s * g.spacing();
}

}  // namespace

std::array<double, 4> cutoff_jet(double s) { return cutoff(Jet::variable(s)).derivatives(); }

std::array<double, 4> weight_jet(double x, double R) {
  const Jet xj = Jet::variable(x);
  const Jet p = xj - (1.0 / (6.0 * R * R)) * (xj * xj * xj);
  return (p * cutoff((1.0 / R) * xj)).derivatives();
}

VirialWeight make_weight(double R, const CoefficientSet& cs, const Grid& grid) {
  require(R > 1.0, "virial radius must exceed 1");
  require(2.0 * R < grid.half_length(), "virial weight support must fit in the box (2R < L)");
  require(cs.grid == grid, "coefficients must live on the weight grid");
  require(!cs.has_magnetic_potential(), "virial quantities require b = 0 (apply the gauge transform first)");
  const std::size_t n = grid.size();
  VirialWeight w{grid, R, cs.beta, {}, {}, {}, {}, {}, {}, {}, {}, {}};
  for (auto* f : {&w.chi, &w.gamma, &w.gamma1, &w.gamma2, &w.gamma3, &w.I, &w.II, &w.III}) f->assign(n, 0.0);
  const auto& a = cs.a.values();
  const auto& a1 = cs.a.d1();
  const auto& c1 = cs.c.d1();
  RealField ratio(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double x = grid.x(j);
    const auto g = weight_jet(x, R);
    w.chi[j] = cutoff_jet(x / R)[0];
    w.gamma[j] = g[0];
    w.gamma1[j] = g[1];
    w.gamma2[j] = g[2];
    w.gamma3[j] = g[3];
    w.I[j] = 2.0 * (2.0 * a[j] * g[1] - a1[j] * g[0]);
    w.II[j] = -(a1[j] * g[2] + a[j] * g[3]) - 2.0 * g[0] * c1[j];
    w.III[j] = (cs.beta - 1.0) * g[1];
    ratio[j] = g[0] / a[j];
  }
  w.m = antiderivative(grid, ratio, 0.0);
  return w;
}

CoefficientBoundReport verify_coefficient_bounds(const VirialWeight& w, const CoefficientSet& cs) {
  require(cs.grid == w.grid, "coefficients must live on the weight grid");
  CoefficientBoundReport rep;
  rep.R = w.R;
  const double R2 = w.R * w.R;
  rep.min_I = rep.min_II_scaled = rep.min_III = std::numeric_limits<double>::infinity();
  rep.C = std::numeric_limits<double>::infinity();
  rep.C_prime = 0.0;
  for (std::size_t j = 0; j < w.grid.size(); ++j) {
    const double ax = std::abs(w.grid.x(j));
    const double vals[3] = {w.I[j], R2 * w.II[j], w.III[j]};
    if (ax <= w.R) {
      rep.min_I = std::min(rep.min_I, vals[0]);
      rep.min_II_scaled = std::min(rep.min_II_scaled, vals[1]);
      rep.min_III = std::min(rep.min_III, vals[2]);
      static const char* names[3] = {"I", "II", "III"};
      for (int i = 0; i < 3; ++i)
        if (vals[i] < rep.C) {
          rep.C = vals[i];
          rep.worst_x = w.grid.x(j);
          rep.worst_field = names[i];
        }
    }
    if (ax >= w.R && ax <= 2.0 * w.R)
      for (double v : vals) rep.C_prime = std::max(rep.C_prime, std::abs(v));
  }
  rep.passed = rep.C > 0.0;
  return rep;
}

VirialSeries virial_series(const Trajectory& traj, const VirialWeight& w, const CoefficientSet& cs) {
  require(!cs.has_magnetic_potential(), "virial series require b = 0 (apply the gauge transform first)");
  require(cs.grid == w.grid, "coefficients must live on the weight grid");
  const Grid& g = w.grid;
  const std::size_t n = g.size();
  const double q = w.beta + 1.0;
  const double pw = 2.0 / (w.beta + 1.0);
  const double R2 = w.R * w.R;
  VirialSeries s;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const GridFunction& u = traj.states[k];
    require(u.grid() == g, "trajectory and weight grids differ");
    const GridFunction ux = derivative(u);
    std::vector<double> th(n), tp(n), ts(n), z(n), zl(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double m2 = std::norm(u[j]);
      const double d2 = std::norm(ux[j]);
      const double pot = std::pow(m2, 0.5 * q);
      th[j] = w.m[j] * m2;
      tp[j] = 2.0 * w.gamma[j] * std::imag(ux[j] * std::conj(u[j]));
      ts[j] = w.II[j] * m2 + w.I[j] * d2 + pw * w.III[j] * pot;
      z[j] = m2 / R2 + d2 + pw * pot;
      zl[j] = std::abs(g.x(j)) <= w.R ? z[j] : 0.0;
    }
    s.t.push_back(traj.times[k]);
    s.theta.push_back(integrate(g, th));
    s.theta_prime.push_back(integrate(g, tp));
    s.theta_second.push_back(integrate(g, ts));
    s.Z.push_back(integrate(g, z));
    s.Z_loc.push_back(integrate(g, zl));
  }
  const std::size_t K = s.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  s.theta_prime_fd.assign(K, nan);
  s.theta_second_fd.assign(K, nan);
  // Fourth-order central stencils on uniformly spaced records.
  for (std::size_t k = 2; k + 2 < K; ++k) {
    const double dt = 0.25 * (s.t[k + 2] - s.t[k - 2]);
    const double* th = s.theta.data();
    s.theta_prime_fd[k] = (th[k - 2] - 8.0 * th[k - 1] + 8.0 * th[k + 1] - th[k + 2]) / (12.0 * dt);
    s.theta_second_fd[k] =
        (-th[k - 2] + 16.0 * th[k - 1] - 30.0 * th[k] + 16.0 * th[k + 1] - th[k + 2]) / (12.0 * dt * dt);
    s.max_prime_error = std::max(s.max_prime_error, std::abs(s.theta_prime[k] - s.theta_prime_fd[k]));
    s.max_second_error = std::max(s.max_second_error, std::abs(s.theta_second[k] - s.theta_second_fd[k]));
  }
  return s;
}

VirialInequalityReport virial_inequality_check(const VirialSeries& series, const VirialWeight& w,
                                               const Trajectory& traj, const CoefficientSet& cs) {
  require(series.size() == traj.size() && series.size() > 0, "series and trajectory lengths differ");
  VirialInequalityReport rep;
  const std::size_t K = series.size();
  rep.min_rate = *std::min_element(series.theta_second.begin(), series.theta_second.end());
  rep.rate_positive = rep.min_rate > 0.0;
  rep.min_kappa = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < K; ++k) {
    const double kap = series.Z_loc[k] > 0.0 ? series.theta_second[k] / series.Z_loc[k]
                                             : std::numeric_limits<double>::infinity();
    rep.kappa.push_back(kap);
    rep.min_kappa = std::min(rep.min_kappa, kap);
  }
  rep.localization = localization_ratio(traj, w.R, w.beta);
  for (std::size_t k = 1; k < K; ++k) {
    const double dt = series.t[k] - series.t[k - 1];
    rep.rate_integral += 0.5 * dt * (series.theta_second[k] + series.theta_second[k - 1]);
    rep.z_loc_integral += 0.5 * dt * (series.Z_loc[k] + series.Z_loc[k - 1]);
  }
  double max_gamma = 0.0;
  for (double v : w.gamma) max_gamma = std::max(max_gamma, std::abs(v));
  double sup_prod = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    sup_prod = std::max(sup_prod, l2_norm(derivative(traj.states[k])) * l2_norm(traj.states[k]));
    rep.sup_theta_prime = std::max(rep.sup_theta_prime, std::abs(series.theta_prime[k]));
  }
  rep.theta_prime_bound = 2.0 * max_gamma * sup_prod;
  rep.theta_prime_bounded = rep.sup_theta_prime <= rep.theta_prime_bound * (1.0 + 1e-12);

  // Mass M and energy E are conserved; with b = 0 and c >= 0,
  // a0 |u_x|^2 <= (Au, u) <= max a |u_x|^2 + max c M.
  const auto& a = cs.a.values();
  const auto& c = cs.c.values();
  const double a_min = *std::min_element(a.begin(), a.end());
  const double a_max = *std::max_element(a.begin(), a.end());
  const double c_max = std::max(0.0, *std::max_element(c.begin(), c.end()));
  const EnergyLedger& l0 = traj.ledgers.front();
  const double M = l0.mass * l0.mass;
  const double E = l0.energy;
  const double R2 = w.R * w.R;
  const double upper = M / R2 + std::max(1.0, 1.0 / a_min) * E;
  const double lower = M / R2 + std::max(0.0, E - c_max * M) / std::max(1.0, a_max);
  const double z0 = series.Z.front();
  rep.kappa2 = z0 > 0.0 ? std::max(upper / z0, z0 / lower) : 1.0;
  rep.z_ratio_min = std::numeric_limits<double>::infinity();
  rep.z_ratio_max = 0.0;
  for (double zv : series.Z) {
    const double r = z0 > 0.0 ? zv / z0 : 1.0;
    rep.z_ratio_min = std::min(rep.z_ratio_min, r);
    rep.z_ratio_max = std::max(rep.z_ratio_max, r);
  }
  rep.z_comparable = rep.z_ratio_min >= 1.0 / rep.kappa2 * (1.0 - 1e-12) &&
                     rep.z_ratio_max <= rep.kappa2 * (1.0 + 1e-12);
  return rep;
}

}  // namespace nlsvc
