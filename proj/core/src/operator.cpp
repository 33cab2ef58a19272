#include "nlsvc/operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "nlsvc/error.hpp"
#include "nlsvc/spectral.hpp"

namespace nlsvc {

OperatorMatrix::OperatorMatrix(CoefficientSet cs, Discretization discretization)
    : cs_(std::make_shared<const CoefficientSet>(std::move(cs))), discretization_(discretization) {
  const RealField& a = cs_->a.values();
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (!(a[j] > 0.0)) {
      throw ContractError("assemble: a must be positive everywhere (a = " + std::to_string(a[j]) +
                          " at x = " + std::to_string(cs_->grid.x(j)) + ")");
    }
  }
  if (discretization_ == Discretization::finite_difference) {
    const std::size_t n = a.size();
    const double h = cs_->grid.spacing();
    const double inv_h2 = 1.0 / (h * h);
    const RealField& b = cs_->b.values();
    const RealField& c = cs_->c.values();
    std::vector<double> a_half(n);
    stencil_.upper.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t jp = (j + 1) % n;
      a_half[j] = 0.5 * (a[j] + a[jp]);
      const double theta = 0.5 * h * (b[j] + b[jp]);
      stencil_.upper[j] = -a_half[j] * inv_h2 * std::polar(1.0, -theta);
    }
    stencil_.diag.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t jm = (j + n - 1) % n;
      stencil_.diag[j] = (a_half[jm] + a_half[j]) * inv_h2 + c[j];
    }
  }
}

GridFunction OperatorMatrix::covariant_derivative(const GridFunction& v) const {
  require(v.grid() == grid(), "operator applied to a function on a different grid");
  const RealField& b = cs_->b.values();
  if (discretization_ == Discretization::spectral) {
    GridFunction d = derivative(v);
    for (std::size_t j = 0; j < d.size(); ++j) d[j] -= cplx(0.0, b[j]) * v[j];
    return d;
  }
  const std::size_t n = v.size();
  const double h = grid().spacing();
  GridFunction d(grid());
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t jp = (j + 1) % n;
    const double theta = 0.5 * h * (b[j] + b[jp]);
    d[j] = (std::polar(1.0, -theta) * v[jp] - v[j]) / h;
  }
  return d;
}

GridFunction OperatorMatrix::apply(const GridFunction& v) const {
  require(v.grid() == grid(), "operator applied to a function on a different grid");
  const RealField& b = cs_->b.values();
  const RealField& c = cs_->c.values();
  if (discretization_ == Discretization::spectral) {
    GridFunction w = covariant_derivative(v);
    w.multiply(cs_->a.values());
    GridFunction out = derivative(w);
    for (std::size_t j = 0; j < out.size(); ++j) {
      out[j] = -(out[j] - cplx(0.0, b[j]) * w[j]) + c[j] * v[j];
    }
    return out;
  }
  const std::size_t n = v.size();
  GridFunction out(grid());
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t jp = (j + 1) % n;
    const std::size_t jm = (j + n - 1) % n;
    out[j] = stencil_.diag[j] * v[j] + stencil_.upper[j] * v[jp] + std::conj(stencil_.upper[jm]) * v[jm];
  }
  return out;
}

double OperatorMatrix::quadratic_form(const GridFunction& v) const {
  const GridFunction d = covariant_derivative(v);
  const RealField& c = cs_->c.values();
  const RealField& a = cs_->a.values();
  const std::size_t n = v.size();
  double s = 0.0;
  if (discretization_ == Discretization::spectral) {
    for (std::size_t j = 0; j < n; ++j) s += a[j] * std::norm(d[j]) + c[j] * std::norm(v[j]);
  } else {
    for (std::size_t j = 0; j < n; ++j) {
      const double a_half = 0.5 * (a[j] + a[(j + 1) % n]);
      s += a_half * std::norm(d[j]) + c[j] * std::norm(v[j]);
    }
  }
  return s * grid().spacing();
}

Eigen::MatrixXcd OperatorMatrix::dense() const {
  const std::size_t n = grid().size();
  require(n <= 2048, "dense operator limited to N <= 2048");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  if (discretization_ == Discretization::finite_difference) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      const auto jp = static_cast<Eigen::Index>((j + 1) % n);
      m(jj, jj) += stencil_.diag[j];
      m(jj, jp) += stencil_.upper[j];
      m(jp, jj) += std::conj(stencil_.upper[j]);
    }
    return m;
  }
  GridFunction e(grid());
  for (std::size_t k = 0; k < n; ++k) {
    e[k] = 1.0;
    const GridFunction col = apply(e);
    for (std::size_t j = 0; j < n; ++j) m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = col[j];
    e[k] = 0.0;
  }
  Eigen::MatrixXcd herm = 0.5 * (m + m.adjoint());
  return herm;
}

double OperatorMatrix::norm_estimate() const {
  if (discretization_ == Discretization::finite_difference) {
    double worst = 0.0;
    const std::size_t n = stencil_.diag.size();
    for (std::size_t j = 0; j < n; ++j) {
      worst = std::max(worst, stencil_.diag[j] + std::abs(stencil_.upper[j]) + std::abs(stencil_.upper[(j + n - 1) % n]));
    }
    return worst;
  }
  const auto& a = cs_->a.values();
  const auto& b = cs_->b.values();
  const auto& c = cs_->c.values();
  const double a_max = *std::max_element(a.begin(), a.end());
  double b_max = 0.0;
  for (double v : b) b_max = std::max(b_max, std::abs(v));
  const double c_max = *std::max_element(c.begin(), c.end());
  const double k = grid().max_frequency() + b_max;
  return a_max * k * k + std::max(0.0, c_max);
}

bool OperatorMatrix::is_free(double tol) const {
  return cs_->a.is_constant(1.0, tol) && cs_->b.is_constant(0.0, tol) && cs_->c.is_constant(0.0, tol);
}

OperatorMatrix assemble(const CoefficientSet& cs, const Grid& grid, Discretization discretization) {
  require(cs.grid == grid, "assemble: coefficient grid mismatch");
  return OperatorMatrix(cs, discretization);
}

double quadratic_form(const OperatorMatrix& op, const GridFunction& u) { return op.quadratic_form(u); }

TranslatedCoefficients translate_coefficients(const CoefficientSet& cs, double z) {
  const Grid& g = cs.grid;
  const long m = g.shift_in_samples(z);
  const double applied = static_cast<double>(m) * g.spacing();
  const bool rounded = std::abs(applied - z) > 1e-9 * g.spacing();
  CoefficientSet shifted(g, cs.a.rotated(m), cs.b.rotated(m), cs.c.rotated(m), cs.a0, cs.delta, cs.beta,
                         cs.id.empty() ? std::string{} : cs.id + "@shift");
  return {std::move(shifted), applied, rounded};
}

EnergyLedger energies(const OperatorMatrix& op, const GridFunction& u, double beta, double c0) {
  require(beta > 5.0, "energies: beta must satisfy beta > 5");
  require(c0 > 0.0, "energies: c0 must be positive");
  EnergyLedger e;
  e.c0 = c0;
  const double l2 = l2_norm(u);
  e.mass = l2;
  e.quadratic = op.quadratic_form(u);
  const double lp = lq_norm(u, beta + 1.0);
  e.potential = 2.0 / (beta + 1.0) * std::pow(lp, beta + 1.0);
  e.energy = e.quadratic + e.potential;
  e.full_energy = e.energy + c0 * l2 * l2;
  return e;
}

GridFunction random_band_limited(const Grid& grid, std::size_t max_mode, std::uint64_t seed) {
  const std::size_t n = grid.size();
  require(max_mode < n / 2, "random_band_limited: max_mode must be below Nyquist");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<cplx> hat(n, cplx(0.0));
  for (long k = -static_cast<long>(max_mode); k <= static_cast<long>(max_mode); ++k) {
    const std::size_t idx = static_cast<std::size_t>((k + static_cast<long>(n)) % static_cast<long>(n));
    const double decay = 1.0 / (1.0 + std::abs(static_cast<double>(k)) / 4.0);
    hat[idx] = decay * cplx(gauss(rng), gauss(rng));
  }
  GridFunction u(grid, idft(hat));
  const double nrm = l2_norm(u);
  if (nrm > 0.0) u *= cplx(1.0 / nrm);
  return u;
}

EquivalenceConstants equivalence_constants(const OperatorMatrix& op, double c0, std::size_t trials,
                                           std::uint64_t seed) {
  require(trials >= 100, "equivalence_constants requires at least 100 trials");
  require(c0 >= 0.0, "equivalence_constants requires c0 >= 0");
  const Grid& g = op.grid();
  EquivalenceConstants out;
  out.lower = std::numeric_limits<double>::infinity();
  out.upper = 0.0;
  auto probe = [&](const GridFunction& v) {
    const double h1 = h1_norm(v);
    const double l2 = l2_norm(v);
    const double ratio = (op.quadratic_form(v) + c0 * l2 * l2) / (h1 * h1);
    out.lower = std::min(out.lower, ratio);
    out.upper = std::max(out.upper, ratio);
  };
  probe(GridFunction::sample(g, [](double) { return cplx(1.0); }));
  const std::size_t max_mode = std::max<std::size_t>(1, g.size() / 8);
  for (std::size_t t = 1; t < trials; ++t) probe(random_band_limited(g, max_mode, seed + t));
  out.degenerate = !(out.lower > 1e-10);
  return out;
}

}  // namespace nlsvc
