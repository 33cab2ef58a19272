#include "nlsvc/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "nlsvc/error.hpp"
#include "nlsvc/spectral.hpp"

namespace nlsvc {

namespace {
bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void require_same_grid(const GridFunction& a, const GridFunction& b) {
  require(a.grid() == b.grid(), "grid functions live on different grids");
}
}  // namespace

Grid::Grid(double half_length, std::size_t point_count) {
  require(std::isfinite(half_length) && half_length > 0.0, "grid half length must be positive");
  require(point_count >= 8 && is_power_of_two(point_count),
          "grid point count must be a power of two >= 8 (got " + std::to_string(point_count) + ")");
  Impl impl;
  impl.half_length = half_length;
  impl.point_count = point_count;
  impl.spacing = 2.0 * half_length / static_cast<double>(point_count);
  impl.points.resize(point_count);
  impl.frequencies.resize(point_count);
  const double dxi = M_PI / half_length;
  const long n = static_cast<long>(point_count);
  for (long j = 0; j < n; ++j) {
    impl.points[static_cast<std::size_t>(j)] = -half_length + static_cast<double>(j) * impl.spacing;
    const long k = j < n / 2 ? j : j - n;
    impl.frequencies[static_cast<std::size_t>(j)] = dxi * static_cast<double>(k);
  }
  impl_ = std::make_shared<const Impl>(std::move(impl));
}

double Grid::max_frequency() const { return M_PI / spacing(); }

long Grid::shift_in_samples(double z) const { return std::lround(z / spacing()); }

bool Grid::operator==(const Grid& other) const {
  return impl_ == other.impl_ ||
         (impl_->point_count == other.impl_->point_count && impl_->half_length == other.impl_->half_length);
}

Grid make_grid(double half_length, std::size_t point_count) { return Grid(half_length, point_count); }

GridFunction::GridFunction(Grid grid) : grid_(std::move(grid)), values_(grid_.size(), cplx(0.0)) {}

GridFunction::GridFunction(Grid grid, std::vector<cplx> values) : grid_(std::move(grid)), values_(std::move(values)) {
  require(values_.size() == grid_.size(), "GridFunction: value count does not match grid");
}

bool GridFunction::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
  require_same_grid(*this, o);
  for (std::size_t j = 0; j < values_.size(); ++j) values_[j] += o.values_[j];
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& o) {
  require_same_grid(*this, o);
  for (std::size_t j = 0; j < values_.size(); ++j) values_[j] -= o.values_[j];
  return *this;
}

GridFunction& GridFunction::operator*=(cplx s) {
  for (auto& z : values_) z *= s;
  return *this;
}

GridFunction& GridFunction::multiply(std::span<const double> field) {
  require(field.size() == values_.size(), "multiply: field length mismatch");
  for (std::size_t j = 0; j < values_.size(); ++j) values_[j] *= field[j];
  return *this;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(cplx s, GridFunction a) { return a *= s; }
GridFunction operator*(double s, GridFunction a) { return a *= cplx(s); }

cplx inner(const GridFunction& u, const GridFunction& v) {
  require_same_grid(u, v);
  cplx s = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) s += u[j] * std::conj(v[j]);
  return s * u.grid().spacing();
}

double lq_norm(const GridFunction& u, double q) {
  require(q >= 1.0 && std::isfinite(q), "Lq norm requires q in [1, inf)");
  double s = 0.0;
  if (q == 2.0) {
    for (auto z : u.values()) s += std::norm(z);
    return std::sqrt(s * u.grid().spacing());
  }
  for (auto z : u.values()) s += std::pow(std::abs(z), q);
  return std::pow(s * u.grid().spacing(), 1.0 / q);
}

double l2_norm(const GridFunction& u) { return lq_norm(u, 2.0); }

double h1_norm(const GridFunction& u) {
  const double a = l2_norm(u);
  const double b = l2_norm(derivative(u));
  return std::sqrt(a * a + b * b);
}

double linf_norm(const GridFunction& u) {
  double m = 0.0;
  for (auto z : u.values()) m = std::max(m, std::abs(z));
  return m;
}

double norm(const GridFunction& u, NormKind kind, double q) {
  switch (kind) {
    case NormKind::L2: return l2_norm(u);
    case NormKind::H1: return h1_norm(u);
    case NormKind::Lq: return lq_norm(u, q);
    case NormKind::H1q:
      require(q >= 1.0, "H1q norm requires q >= 1");
      return lq_norm(u, q) + lq_norm(derivative(u), q);
    case NormKind::Linf: return linf_norm(u);
  }
  throw ContractError("unknown norm kind");
}

GridFunction derivative(const GridFunction& u) {
  const Grid& g = u.grid();
  std::vector<cplx> symbol(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) symbol[k] = cplx(0.0, g.frequency(k));
  symbol[g.nyquist_index()] = 0.0;
  return apply_symbol(u, symbol);
}

GridFunction second_derivative(const GridFunction& u) {
  const Grid& g = u.grid();
  std::vector<cplx> symbol(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) symbol[k] = -g.frequency(k) * g.frequency(k);
  return apply_symbol(u, symbol);
}

GridFunction project_low(const GridFunction& u, double cutoff) {
  require(cutoff > 0.0, "project_low requires R > 0");
  const Grid& g = u.grid();
  std::vector<cplx> symbol(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) symbol[k] = std::abs(g.frequency(k)) <= cutoff ? 1.0 : 0.0;
  return apply_symbol(u, symbol);
}

GridFunction project_high(const GridFunction& u, double cutoff) { return u - project_low(u, cutoff); }

GridFunction translate(const GridFunction& u, long samples) {
  const long n = static_cast<long>(u.size());
  const long m = ((samples % n) + n) % n;
  std::vector<cplx> out(u.size());
  for (long j = 0; j < n; ++j) out[static_cast<std::size_t>((j + m) % n)] = u[static_cast<std::size_t>(j)];
  return GridFunction(u.grid(), std::move(out));
}

RealField rotate(std::span<const double> f, long samples) {
  const long n = static_cast<long>(f.size());
  const long m = ((samples % n) + n) % n;
  RealField out(f.size());
  for (long j = 0; j < n; ++j) out[static_cast<std::size_t>((j + m) % n)] = f[static_cast<std::size_t>(j)];
  return out;
}

double spacetime_norm(std::span<const double> times, std::span<const GridFunction> states, double p, double r) {
  require(!states.empty() && states.size() == times.size(), "spacetime_norm: empty or inconsistent trajectory");
  require(p >= 1.0 && r >= 1.0, "spacetime_norm requires p, r >= 1");
  if (states.size() < 2) throw ContractError("spacetime_norm needs at least two samples");
  const double dt = times[1] - times[0];
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < states.size(); ++k) {
    const double step = times[k + 1] - times[k];
    require(std::abs(step - dt) <= 1e-9 * std::max(1.0, std::abs(dt)), "spacetime_norm requires uniform sampling");
    s += step * std::pow(lq_norm(states[k], r), p);
  }
  return std::pow(s, 1.0 / p);
}

double edge_mass_fraction(const GridFunction& u, double band_fraction) {
  const Grid& g = u.grid();
  const double inner_edge = g.half_length() * (1.0 - band_fraction);
  double total = 0.0, outer = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double m = std::norm(u[j]);
    total += m;
    if (std::abs(g.x(j)) >= inner_edge) outer += m;
  }
  return total > 0.0 ? outer / total : 0.0;
}

}  // namespace nlsvc
