#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nlsvc/grid.hpp"

namespace nlsvc {

class TrigInterpolant;

/// Closed-form coefficient profile from the built-in catalog. With
/// s = (x - center) / width:
///   constant         base
///   gaussian_bump    base + amp * exp(-s^2)
///   rational_bump    base + amp / (1 + s^2)
///   tanh_step        base + amp * tanh(s)
///   moment_gaussian  base + amp * s^2 * exp(-s^2)
struct Profile {
  enum class Kind { constant, gaussian_bump, rational_bump, tanh_step, moment_gaussian };

  Kind kind = Kind::constant;
  double base = 0.0;
  double amp = 0.0;
  double width = 1.0;
  double center = 0.0;

  static Profile constant(double value) { return {Kind::constant, value, 0.0, 1.0, 0.0}; }
  static Profile gaussian(double base, double amp, double width = 1.0, double center = 0.0) {
    return {Kind::gaussian_bump, base, amp, width, center};
  }

  /// order in {0, 1, 2, 3}.
  double evaluate(double x, int order = 0) const;
  std::string kind_name() const;
};

std::optional<Profile::Kind> profile_kind_from_name(std::string_view name);

/// One real coefficient field sampled on a grid together with its first two
/// derivatives. Closed forms are preferred for derivatives; raw samples fall
/// back to spectral differentiation.
class CoefficientField {
 public:
  static CoefficientField from_profile(const Grid& grid, const Profile& profile);
  static CoefficientField from_samples(const Grid& grid, RealField samples);

  const Grid& grid() const { return grid_; }
  const RealField& values() const { return values_; }
  const RealField& d1() const { return d1_; }
  const RealField& d2() const { return d2_; }
  const std::optional<Profile>& profile() const { return profile_; }

  /// Spectral derivatives of the samples, independent of any closed form.
  RealField spectral_d1() const;
  RealField spectral_d2() const;

  /// Value or derivative (order <= 2) at an arbitrary point.
  double at(double x, int order = 0) const;

  bool is_constant(double value, double tol = 1e-14) const;
  CoefficientField rotated(long samples) const;

 private:
  CoefficientField(Grid grid, RealField v, RealField d1, RealField d2, std::optional<Profile> p);
  Grid grid_;
  RealField values_, d1_, d2_;
  std::optional<Profile> profile_;
  std::shared_ptr<const std::vector<TrigInterpolant>> interpolants_;
};

/// The triple (a, b, c) of A = -d_b (a d_b) + c together with the floor a0,
/// the virial margin delta and the nonlinearity power beta.
struct CoefficientSet {
  CoefficientSet(Grid grid, CoefficientField a, CoefficientField b, CoefficientField c, double a0,
                 double delta, double beta, std::string id = {});

  static CoefficientSet free(const Grid& grid, double beta = 7.0);
  static CoefficientSet from_profiles(const Grid& grid, const Profile& a, const Profile& b, const Profile& c,
                                      double a0, double delta, double beta, std::string id = {});

  Grid grid;
  CoefficientField a, b, c;
  double a0;
  double delta;
  double beta;
  std::string id;

  bool has_magnetic_potential(double tol = 1e-14) const { return !b.is_constant(0.0, tol); }
  /// Largest |closed-form derivative - spectral derivative| over the fields
  /// that carry closed forms (0 when none do).
  double derivative_consistency() const;
};

struct Violation {
  std::string condition;
  double x = 0.0;
  double margin = 0.0;
};

struct AdmissibilityReport {
  bool passed = true;
  std::vector<Violation> violations;
  /// Worst margin of every checked condition, violated or not.
  std::vector<Violation> margins;
  double weighted_moment = 0.0;
  double max_ratio = 1.0;
  double worst_interval_left = 0.0;
  double worst_interval_right = 0.0;
  std::size_t intervals_checked = 0;
  std::vector<std::string> notes;

  const Violation* margin(const std::string& condition) const;
  bool violates(const std::string& condition) const;
};

/// a >= a0, c >= 0, |a - 1| <= far_field_tol on the outer 5% of the box, and
/// h * sum <x>^2 (c + a_x^2 + |a_xx|) finite with a decaying integrand.
AdmissibilityReport check_base_admissibility(const CoefficientSet& cs, const Grid& grid, double far_field_tol = 1e-6);

/// -(1 - delta) a <= x a_x <= (6/5 - delta) a and x c_x <= 0, pointwise.
AdmissibilityReport check_virial_admissibility(const CoefficientSet& cs, const Grid& grid);

/// Largest (mean_I (k+V)^q)^(1/q) / mean_I (k+V) over all dyadic
/// subintervals down to 4h plus `interval_samples` random ones (trapezoid
/// averages). Violation when the ratio exceeds ratio_bound.
AdmissibilityReport check_reverse_holder(std::span<const double> potential, double half_exponent, double k,
                                         const Grid& grid, std::size_t interval_samples,
                                         std::uint64_t seed = 0, double ratio_bound = 2.0);

}  // namespace nlsvc
