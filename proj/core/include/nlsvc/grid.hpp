#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace nlsvc {

using cplx = std::complex<double>;
using RealField = std::vector<double>;

/// Uniform periodic grid on [-L, L) with N points (N a power of two, N >= 8).
///
/// Copies are cheap: point and frequency tables are shared between copies.
class Grid {
 public:
  Grid(double half_length, std::size_t point_count);

  double half_length() const { return impl_->half_length; }
  std::size_t size() const { return impl_->point_count; }
  double spacing() const { return impl_->spacing; }
  double length() const { return 2.0 * impl_->half_length; }

  double x(std::size_t j) const { return impl_->points[j]; }
  double frequency(std::size_t k) const { return impl_->frequencies[k]; }
  const RealField& points() const { return impl_->points; }
  /// Standard DFT ordering: 0, dxi, ..., (N/2-1) dxi, -N/2 dxi, ..., -dxi.
  const RealField& frequencies() const { return impl_->frequencies; }
  /// pi / h; the Nyquist mode k = N/2 carries -pi/h.
  double max_frequency() const;
  std::size_t nyquist_index() const { return impl_->point_count / 2; }
  /// Index of the grid point x = 0.
  std::size_t origin_index() const { return impl_->point_count / 2; }

  /// Nearest sample count for a shift of z (not reduced modulo N).
  long shift_in_samples(double z) const;

  bool operator==(const Grid& other) const;
  bool operator!=(const Grid& other) const { return !(*this == other); }

 private:
  struct Impl {
    double half_length;
    std::size_t point_count;
    double spacing;
    RealField points;
    RealField frequencies;
  };
  std::shared_ptr<const Impl> impl_;
};

Grid make_grid(double half_length, std::size_t point_count);

/// Complex samples u(x_j) on a Grid. Value semantic.
class GridFunction {
 public:
  explicit GridFunction(Grid grid);
  GridFunction(Grid grid, std::vector<cplx> values);

  template <class F>
  static GridFunction sample(const Grid& grid, F&& f) {
    std::vector<cplx> v(grid.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = f(grid.x(j));
    return GridFunction(grid, std::move(v));
  }

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<const cplx> values() const { return values_; }
  std::span<cplx> values() { return values_; }
  cplx operator[](std::size_t j) const { return values_[j]; }
  cplx& operator[](std::size_t j) { return values_[j]; }

  bool all_finite() const;

  GridFunction& operator+=(const GridFunction& o);
  GridFunction& operator-=(const GridFunction& o);
  GridFunction& operator*=(cplx s);
  /// Pointwise multiplication by a real field.
  GridFunction& multiply(std::span<const double> field);

 private:
  Grid grid_;
  std::vector<cplx> values_;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(cplx s, GridFunction a);
GridFunction operator*(double s, GridFunction a);

/// (u, v) = h * sum u_j conj(v_j).
cplx inner(const GridFunction& u, const GridFunction& v);

enum class NormKind { L2, H1, Lq, H1q, Linf };

/// Rectangle-rule norms. H1 = (|u|_2^2 + |u_x|_2^2)^(1/2); H1q = |u|_q + |u_x|_q.
double norm(const GridFunction& u, NormKind kind, double q = 2.0);
double l2_norm(const GridFunction& u);
double h1_norm(const GridFunction& u);
double lq_norm(const GridFunction& u, double q);
double linf_norm(const GridFunction& u);

/// Spectral derivative; the Nyquist mode is zeroed.
GridFunction derivative(const GridFunction& u);
/// Spectral multiplier -xi^2 (Nyquist kept).
GridFunction second_derivative(const GridFunction& u);
/// P_{<=R}: zero every DFT coefficient with |xi| > R.
GridFunction project_low(const GridFunction& u, double cutoff);
GridFunction project_high(const GridFunction& u, double cutoff);

/// tau_z u(x) = u(x - z) for grid-aligned z = m h (periodic rotation).
GridFunction translate(const GridFunction& u, long samples);
RealField rotate(std::span<const double> f, long samples);

/// L^p_t L^r_x over uniformly spaced samples, left rectangle rule in time:
/// (sum_{k < K-1} dt |u(t_k)|_r^p)^(1/p).
double spacetime_norm(std::span<const double> times,
                      std::span<const GridFunction> states, double p, double r);

/// Fraction of L^2 mass located in the outer `band_fraction` of the box.
double edge_mass_fraction(const GridFunction& u, double band_fraction);

}  // namespace nlsvc
