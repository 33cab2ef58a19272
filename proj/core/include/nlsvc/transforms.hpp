#pragma once

#include <memory>

#include "nlsvc/coefficients.hpp"
#include "nlsvc/grid.hpp"

namespace nlsvc {

/// Phase B(x) = int_0^x b with B(0) = 0 and the factors e^{-+iB}.
struct GaugeData {
  Grid grid;
  RealField phase;  // B(x_j)
};

GaugeData build_gauge(const CoefficientSet& cs);
GaugeData build_gauge(const Grid& grid, std::span<const double> b);

/// w = e^{-iB} u.
GridFunction gauge_forward(const GridFunction& u, const GaugeData& gd);
/// u = e^{iB} w.
GridFunction gauge_inverse(const GridFunction& w, const GaugeData& gd);

enum class DerivativeSource { closed_form, spectral };

/// Change of variables w(x) = a(x)^{-1/4} v(alpha(x)), alpha = int_0^x a^{-1/2},
/// reducing -(a w_x)_x + c w to -v_yy + c~ v on a uniform alpha grid.
///
/// The alpha grid is a Grid of the same size whose coordinate y relates to
/// alpha by alpha = y + offset(); it spans [alpha(-L), alpha(L)).
class LiouvilleMap {
 public:
  const Grid& x_grid() const { return x_grid_; }
  const Grid& alpha_grid() const { return alpha_grid_; }
  double offset() const { return offset_; }

  /// alpha(x_j) on the x grid (strictly increasing, alpha(0) = 0).
  const RealField& alpha() const { return alpha_; }
  /// x(alpha_k) for the alpha grid nodes alpha_k = y_k + offset.
  const RealField& preimage() const { return preimage_; }
  /// c~ sampled on the alpha grid.
  const RealField& potential() const { return potential_; }
  /// a(x(alpha_k)) on the alpha grid.
  const RealField& a_on_alpha() const { return a_on_alpha_; }
  /// a(x_j)^{-1/4} on the x grid.
  const RealField& weight() const { return weight_; }

  /// Evaluate alpha at an arbitrary x (band-limited representation).
  double alpha_at(double x) const;

  friend LiouvilleMap build_liouville(const CoefficientSet& cs, const Grid& grid, DerivativeSource source);

 private:
  LiouvilleMap(Grid x_grid, Grid alpha_grid) : x_grid_(std::move(x_grid)), alpha_grid_(std::move(alpha_grid)) {}
  Grid x_grid_;
  Grid alpha_grid_;
  double offset_ = 0.0;
  double slope_ = 1.0;
  RealField alpha_, preimage_, potential_, a_on_alpha_, weight_;
  std::shared_ptr<const TrigInterpolant> periodic_part_;
  double periodic_at_zero_ = 0.0;
};

LiouvilleMap build_liouville(const CoefficientSet& cs, const Grid& grid,
                             DerivativeSource source = DerivativeSource::closed_form);

enum class LiouvilleDirection { forward, backward };

/// forward: x grid w -> alpha grid v with v(alpha(x)) = a^{1/4} w(x).
/// backward: alpha grid v -> x grid w.
GridFunction apply_liouville(const GridFunction& f, const LiouvilleMap& map, LiouvilleDirection direction);

/// -v_yy + c~ v on the alpha grid.
GridFunction apply_reduced_operator(const GridFunction& v, const LiouvilleMap& map);

/// Mass fraction inside the 5% guard band at the box edges; mapped data with a
/// non-negligible value here is unreliable.
double guard_band_leak(const GridFunction& f);

}  // namespace nlsvc
