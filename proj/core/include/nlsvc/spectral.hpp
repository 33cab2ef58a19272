#pragma once

#include <span>
#include <vector>

#include "nlsvc/grid.hpp"

namespace nlsvc {

/// Unnormalized forward DFT, out_k = sum_j in_j e^{-2 pi i jk/N}.
void dft(std::span<const cplx> in, std::span<cplx> out);
/// Normalized inverse DFT (1/N), so idft(dft(u)) = u.
void idft(std::span<const cplx> in, std::span<cplx> out);

std::vector<cplx> dft(std::span<const cplx> in);
std::vector<cplx> idft(std::span<const cplx> in);

/// Applies a Fourier multiplier given per DFT index.
GridFunction apply_symbol(const GridFunction& u, std::span<const cplx> symbol);

/// Spectral antiderivative of a real periodic field, split as
/// F(x) = mean * (x - x_ref) + P(x) - P(x_ref) with P periodic.
RealField antiderivative(const Grid& grid, std::span<const double> f, double x_ref = 0.0);

/// Band-limited (trigonometric) interpolant of grid samples, evaluable
/// anywhere. The Nyquist mode is split symmetrically so real data stays real.
class TrigInterpolant {
 public:
  TrigInterpolant(const Grid& grid, std::span<const cplx> values);
  TrigInterpolant(const Grid& grid, std::span<const double> values);

  cplx operator()(double x) const;
  cplx derivative(double x) const;
  /// Evaluate at many points. Large batches go through a 16x zero-padded
  /// transform and 16-point local Lagrange interpolation on the fine grid
  /// (error near machine precision for the band-limited interpolant).
  std::vector<cplx> evaluate(std::span<const double> xs) const;

 private:
  cplx eval(double x, bool deriv) const;
  Grid grid_;
  std::vector<cplx> coefficients_;  // index m = k + N/2, k in [-N/2, N/2]
};

}  // namespace nlsvc
