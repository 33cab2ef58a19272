#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nlsvc/exponents.hpp"
#include "nlsvc/grid.hpp"
#include "nlsvc/operator.hpp"
#include "nlsvc/propagators.hpp"

namespace nlsvc {

/// One profile with linear shift laws t(n) = t_rate n, x(n) = x_rate n.
struct ProfileComponent {
  GridFunction psi;
  double t_rate = 0.0;
  double x_rate = 0.0;
};

struct ProfileSpec {
  std::vector<ProfileComponent> components;
  /// H^1 norm of the seeded band-limited noise added to each element.
  double noise_amplitude = 0.0;
  std::size_t noise_modes = 64;
};

struct SyntheticSequence {
  std::vector<double> n_values;
  std::vector<GridFunction> elements;
  /// Applied shifts per element and component (x rounded to the grid).
  std::vector<std::vector<double>> t_shifts, x_shifts;
};

/// u_n = sum_j e^{i t_j(n) A} tau_{x_j(n)} psi_j + noise_n.
SyntheticSequence synthesize_sequence(const ProfileSpec& spec, const std::vector<double>& n_values,
                                      const OperatorMatrix& op, std::uint64_t seed, double flow_dt = 1e-2);

struct ConcentrationParams {
  double T_window = 4.0;
  double R_freq = 4.0;
  std::size_t t_samples = 16;  // per half window; the scan step is T_window / t_samples
  double noise_floor = 1e-8;
  double flow_dt = 1e-2;
};

struct Concentration {
  bool found = false;
  double t_star = 0.0;
  double x_star = 0.0;
  long x_samples = 0;
  double witness = 0.0;  // max |P_{<=R} e^{-itA} v|
  double dt_scan = 0.0;
};

Concentration find_concentration(const GridFunction& v, const OperatorMatrix& op, const ConcentrationParams& params);

struct ExtractionParams {
  ConcentrationParams scan;
  /// Plateau half-width of the smooth profile window around the
  /// concentration point (the window vanishes beyond twice this).
  double window = 8.0;
  double tail_fraction = 0.25;
};

struct ExtractedProfile {
  explicit ExtractedProfile(GridFunction psi) : psi_hat(std::move(psi)) {}

  GridFunction psi_hat;  // centered at the origin
  double t_hat = 0.0;    // on the last element
  double x_hat = 0.0;
  double witness = 0.0;
  double dt_scan = 0.0;
  std::vector<double> t_n, x_n;  // per-element matches
};

struct Decomposition {
  std::vector<double> n_values;
  std::vector<GridFunction> inputs;
  std::vector<ExtractedProfile> profiles;
  /// pieces[j][i] = e^{i t_n A} tau_{x_n} psi_hat_j for element i.
  std::vector<std::vector<GridFunction>> pieces;
  std::vector<GridFunction> remainders;
  std::vector<double> witnesses;  // one per attempted extraction, including the stopping one
  std::string stop_reason;
  bool aborted = false;
  std::string abort_reason;

  std::size_t J() const { return profiles.size(); }
};

Decomposition greedy_decompose(const std::vector<GridFunction>& seq, const std::vector<double>& n_values,
                               const OperatorMatrix& op, std::size_t J_max, double stop_threshold,
                               const ExtractionParams& params);

struct OrthogonalityReport {
  std::size_t index = 0;  // element used (largest n)
  double n = 0.0;
  double rho_mass = 0.0;
  double rho_form = 0.0;
  double rho_Lr = 0.0;
  double r = 0.0;
  std::vector<std::vector<double>> separation;  // |t_j - t_k| + |x_j - x_k| at the largest n
  std::vector<double> min_separation;           // per element
  bool separation_diverging = false;
  bool mass_superadditive = false;
  double reconstruction_error = 0.0;  // max_n |u_n - sum pieces - R_n| / |u_n|
  bool flagged = false;               // some residual above the tolerance
  double tolerance = 0.05;
};

OrthogonalityReport orthogonality_report(const Decomposition& dec, const OperatorMatrix& op, const ExponentTable& tab,
                                         double tolerance = 0.05);

/// |v|_inf <= sqrt(2/R) |v|_{H^1} + |P_{<=R} v|_inf, with the low-frequency
/// term also evaluated as the Dirichlet-kernel pairing at its maximizer.
struct LinfBound {
  double linf = 0.0;
  double high_term = 0.0;
  double low_term = 0.0;
  double kernel_term = 0.0;
  bool holds = false;
};

LinfBound linf_two_term_bound(const GridFunction& v, double R);

}  // namespace nlsvc
