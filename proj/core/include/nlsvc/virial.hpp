#pragma once

#include <array>
#include <string>
#include <vector>

#include "nlsvc/coefficients.hpp"
#include "nlsvc/diagnostics.hpp"
#include "nlsvc/grid.hpp"
#include "nlsvc/propagators.hpp"

namespace nlsvc {

/// Smooth cutoff chi(s) = psi(2 - |s|), psi(t) = f(t) / (f(t) + f(1 - t)),
/// f(t) = e^{-1/t} for t > 0; chi = 1 on |s| <= 1 and 0 on |s| >= 2.
/// Returns chi and its first three derivatives.
std::array<double, 4> cutoff_jet(double s);

/// gamma(x) = (x - x^3/(6R^2)) chi(x/R) and derivatives up to order 3.
std::array<double, 4> weight_jet(double x, double R);

/// Virial weight and the coefficient fields of the second-derivative
/// identity, all sampled on the grid.
struct VirialWeight {
  Grid grid;
  double R = 0.0;
  double beta = 0.0;
  RealField chi, gamma, gamma1, gamma2, gamma3;
  RealField m;  // int_0^x gamma / a
  RealField I, II, III;
};

/// Requires R > 1, 2R < L and b = 0.
VirialWeight make_weight(double R, const CoefficientSet& cs, const Grid& grid);

struct CoefficientBoundReport {
  double R = 0.0;
  double C = 0.0;        // min over |x| <= R of I, R^2 II, III
  double C_prime = 0.0;  // max over R <= |x| <= 2R of |I|, R^2 |II|, |III|
  double min_I = 0.0, min_II_scaled = 0.0, min_III = 0.0;
  double worst_x = 0.0;
  std::string worst_field;
  bool passed = false;  // C > 0
};

CoefficientBoundReport verify_coefficient_bounds(const VirialWeight& w, const CoefficientSet& cs);

struct VirialSeries {
  std::vector<double> t;
  std::vector<double> theta;
  std::vector<double> theta_prime;   // 2 Im int gamma u_x conj(u)
  std::vector<double> theta_second;  // int II |u|^2 + I |u_x|^2 + 2/(beta+1) III |u|^{beta+1}
  std::vector<double> Z;
  std::vector<double> Z_loc;
  /// Fourth-order central differences of the recorded theta; NaN on the two
  /// records at each end.
  std::vector<double> theta_prime_fd;
  std::vector<double> theta_second_fd;
  double max_prime_error = 0.0;   // max |theta_prime - theta_prime_fd|
  double max_second_error = 0.0;  // max |theta_second - theta_second_fd|

  std::size_t size() const { return t.size(); }
};

VirialSeries virial_series(const Trajectory& traj, const VirialWeight& w, const CoefficientSet& cs);

struct VirialInequalityReport {
  double min_rate = 0.0;  // min_t theta_second
  bool rate_positive = false;
  std::vector<double> kappa;  // theta_second / Z_loc
  double min_kappa = 0.0;
  LocalizationSeries localization;
  double rate_integral = 0.0;  // int_0^T theta_second dt
  double z_loc_integral = 0.0;
  double sup_theta_prime = 0.0;
  double theta_prime_bound = 0.0;  // 2 max|gamma| sup_t |u_x| |u|
  bool theta_prime_bounded = false;
  /// Two-sided comparability Z(t) in [Z(0)/kappa2, kappa2 Z(0)] from mass,
  /// energy, a0, max a and max c.
  double kappa2 = 0.0;
  double z_ratio_min = 0.0;
  double z_ratio_max = 0.0;
  bool z_comparable = false;
};

VirialInequalityReport virial_inequality_check(const VirialSeries& series, const VirialWeight& w,
                                               const Trajectory& traj, const CoefficientSet& cs);

}  // namespace nlsvc
