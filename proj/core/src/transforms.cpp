#include "nlsvc/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nlsvc/error.hpp"
#include "nlsvc/spectral.hpp"

namespace nlsvc {

GaugeData build_gauge(const Grid& grid, std::span<const double> b) {
  require(b.size() == grid.size(), "build_gauge: field length mismatch");
  return {grid, antiderivative(grid, b, 0.0)};
}

GaugeData build_gauge(const CoefficientSet& cs) { return build_gauge(cs.grid, cs.b.values()); }

GridFunction gauge_forward(const GridFunction& u, const GaugeData& gd) {
  require(u.grid() == gd.grid, "gauge_forward: grid mismatch");
  GridFunction w = u;
  for (std::size_t j = 0; j < w.size(); ++j) w[j] *= std::polar(1.0, -gd.phase[j]);
  return w;
}

GridFunction gauge_inverse(const GridFunction& w, const GaugeData& gd) {
  require(w.grid() == gd.grid, "gauge_inverse: grid mismatch");
  GridFunction u = w;
  for (std::size_t j = 0; j < u.size(); ++j) u[j] *= std::polar(1.0, gd.phase[j]);
  return u;
}

double LiouvilleMap::alpha_at(double x) const {
  return slope_ * x + (*periodic_part_)(x).real() - periodic_at_zero_;
}

LiouvilleMap build_liouville(const CoefficientSet& cs, const Grid& grid, DerivativeSource source) {
  require(cs.grid == grid, "build_liouville: coefficient grid mismatch");
  const std::size_t n = grid.size();
  const RealField& a = cs.a.values();
  for (std::size_t j = 0; j < n; ++j) {
    if (!(a[j] > 0.0)) throw ContractError("build_liouville: a must be positive");
  }

  // alpha' = a^{-1/2} = mean + periodic fluctuation; integrate the fluctuation
  // spectrally so alpha and alpha' stay consistent to roundoff.
  std::vector<cplx> s_hat(n);
  for (std::size_t j = 0; j < n; ++j) s_hat[j] = 1.0 / std::sqrt(a[j]);
  dft(s_hat, s_hat);
  const double slope = s_hat[0].real() / static_cast<double>(n);
  s_hat[0] = 0.0;
  s_hat[grid.nyquist_index()] = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    if (k != grid.nyquist_index()) s_hat[k] /= cplx(0.0, grid.frequency(k));
  }
  const std::vector<cplx> periodic = idft(s_hat);
  auto periodic_interp = std::make_shared<const TrigInterpolant>(grid, std::span<const cplx>(periodic));
  const double p0 = periodic[grid.origin_index()].real();

  const double span = slope * grid.length();
  Grid alpha_grid(0.5 * span, n);
  LiouvilleMap map(grid, alpha_grid);
  map.slope_ = slope;
  map.periodic_part_ = periodic_interp;
  map.periodic_at_zero_ = p0;

  map.alpha_.resize(n);
  for (std::size_t j = 0; j < n; ++j) map.alpha_[j] = slope * grid.x(j) + periodic[j].real() - p0;
  for (std::size_t j = 0; j + 1 < n; ++j) {
    if (!(map.alpha_[j + 1] > map.alpha_[j])) throw NumericalError("build_liouville: alpha is not monotone");
  }
  const double alpha_left = map.alpha_at(-grid.half_length());
  map.offset_ = alpha_left + alpha_grid.half_length();

  // Invert alpha at the alpha-grid nodes: bracket on the x table, then Newton
  // with alpha' = a^{-1/2} from the same band-limited representation.
  TrigInterpolant inv_sqrt_a(grid, [&] {
    RealField s(n);
    for (std::size_t j = 0; j < n; ++j) s[j] = 1.0 / std::sqrt(a[j]);
    return s;
  }());
  map.preimage_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double target = alpha_grid.x(k) + map.offset_;
    auto it = std::upper_bound(map.alpha_.begin(), map.alpha_.end(), target);
    double x;
    if (it == map.alpha_.begin()) {
      x = grid.x(0) + (target - map.alpha_.front()) / slope;
    } else if (it == map.alpha_.end()) {
      x = grid.x(n - 1) + (target - map.alpha_.back()) / slope;
    } else {
      const std::size_t j = static_cast<std::size_t>(it - map.alpha_.begin()) - 1;
      const double t = (target - map.alpha_[j]) / (map.alpha_[j + 1] - map.alpha_[j]);
      x = grid.x(j) + t * grid.spacing();
    }
    for (int iter = 0; iter < 30; ++iter) {
      const double f = map.alpha_at(x) - target;
      const double df = slope + periodic_interp->derivative(x).real();
      const double dx = f / df;
      x -= dx;
      if (std::abs(dx) < 1e-15 * std::max(1.0, std::abs(x))) break;
    }
    map.preimage_[k] = x;
  }

  map.potential_.resize(n);
  map.a_on_alpha_.resize(n);
  TrigInterpolant a_interp(grid, std::span<const double>(a));
  std::unique_ptr<TrigInterpolant> ax_interp, axx_interp, c_interp;
  const bool closed = source == DerivativeSource::closed_form && cs.a.profile() && cs.c.profile();
  if (!closed) {
    const RealField ax = cs.a.spectral_d1();
    const RealField axx = cs.a.spectral_d2();
    ax_interp = std::make_unique<TrigInterpolant>(grid, std::span<const double>(ax));
    axx_interp = std::make_unique<TrigInterpolant>(grid, std::span<const double>(axx));
    c_interp = std::make_unique<TrigInterpolant>(grid, std::span<const double>(cs.c.values()));
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double x = map.preimage_[k];
    double av, ax, axx, cv;
    if (closed) {
      av = cs.a.at(x, 0);
      ax = cs.a.at(x, 1);
      axx = cs.a.at(x, 2);
      cv = cs.c.at(x, 0);
    } else {
      av = a_interp(x).real();
      ax = (*ax_interp)(x).real();
      axx = (*axx_interp)(x).real();
      cv = (*c_interp)(x).real();
    }
    map.a_on_alpha_[k] = av;
    map.potential_[k] = cv + axx / 4.0 - ax * ax / (16.0 * av);
  }

  map.weight_.resize(n);
  for (std::size_t j = 0; j < n; ++j) map.weight_[j] = std::pow(a[j], -0.25);
  return map;
}

GridFunction apply_liouville(const GridFunction& f, const LiouvilleMap& map, LiouvilleDirection direction) {
  const std::size_t n = map.x_grid().size();
  if (direction == LiouvilleDirection::forward) {
    require(f.grid() == map.x_grid(), "apply_liouville(forward): input must live on the x grid");
    const std::vector<cplx> vals = TrigInterpolant(f.grid(), f.values()).evaluate(map.preimage());
    GridFunction v(map.alpha_grid());
    for (std::size_t k = 0; k < n; ++k) v[k] = std::pow(map.a_on_alpha()[k], 0.25) * vals[k];
    return v;
  }
  require(f.grid() == map.alpha_grid(), "apply_liouville(backward): input must live on the alpha grid");
  std::vector<double> at(n);
  for (std::size_t j = 0; j < n; ++j) at[j] = map.alpha()[j] - map.offset();
  const std::vector<cplx> vals = TrigInterpolant(f.grid(), f.values()).evaluate(at);
  GridFunction w(map.x_grid());
  for (std::size_t j = 0; j < n; ++j) w[j] = map.weight()[j] * vals[j];
  return w;
}

GridFunction apply_reduced_operator(const GridFunction& v, const LiouvilleMap& map) {
  require(v.grid() == map.alpha_grid(), "apply_reduced_operator: input must live on the alpha grid");
  GridFunction out = second_derivative(v);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = -out[k] + map.potential()[k] * v[k];
  return out;
}

double guard_band_leak(const GridFunction& f) { return edge_mass_fraction(f, 0.05); }

}  // namespace nlsvc
