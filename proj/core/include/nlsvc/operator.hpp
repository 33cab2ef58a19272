#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <vector>

#include "nlsvc/coefficients.hpp"
#include "nlsvc/grid.hpp"

namespace nlsvc {

enum class Discretization {
  /// Matrix-free: D_b = spectral d/dx - i b, A v = -D_b(a D_b v) + c v.
  spectral,
  /// Periodic second-order stencil with Peierls phases, cyclic tridiagonal.
  finite_difference,
};

/// Discrete A = -d_b (a d_b) + c. Immutable after assembly; both
/// discretizations are Hermitian and nonnegative by construction
/// (A = D^* a D + c).
class OperatorMatrix {
 public:
  /// Cyclic tridiagonal entries: A_{j,j} = diag[j], A_{j,j+1} = upper[j],
  /// A_{j+1,j} = conj(upper[j]) with indices mod N.
  struct Stencil {
    std::vector<double> diag;
    std::vector<cplx> upper;
  };

  OperatorMatrix(CoefficientSet cs, Discretization discretization);

  const Grid& grid() const { return cs_->grid; }
  const CoefficientSet& coefficients() const { return *cs_; }
  Discretization discretization() const { return discretization_; }

  GridFunction apply(const GridFunction& v) const;
  /// (A v, v) computed as h * sum (a |D_b v|^2 + c |v|^2).
  double quadratic_form(const GridFunction& v) const;
  /// Spectral D_b v, or the forward difference for the stencil variant.
  GridFunction covariant_derivative(const GridFunction& v) const;

  const Stencil& stencil() const { return stencil_; }
  /// Dense Hermitian matrix w.r.t. the plain Euclidean product (N <= 2048).
  Eigen::MatrixXcd dense() const;
  /// Upper bound on the spectral radius.
  double norm_estimate() const;
  /// a == 1, b == 0, c == 0 on the grid.
  bool is_free(double tol = 1e-14) const;

 private:
  std::shared_ptr<const CoefficientSet> cs_;
  Discretization discretization_;
  Stencil stencil_;
};

OperatorMatrix assemble(const CoefficientSet& cs, const Grid& grid,
                        Discretization discretization = Discretization::spectral);

double quadratic_form(const OperatorMatrix& op, const GridFunction& u);

struct TranslatedCoefficients {
  CoefficientSet coefficients;
  double applied_shift = 0.0;
  bool rounded = false;
};

/// Coefficients a(. - z), b(. - z), c(. - z) by periodic rotation of samples.
/// Non-grid-aligned z is rounded to the nearest sample and flagged.
TranslatedCoefficients translate_coefficients(const CoefficientSet& cs, double z);

struct EnergyLedger {
  double mass = 0.0;       // |u|_{L^2}
  double quadratic = 0.0;  // (A u, u)
  double potential = 0.0;  // 2/(beta+1) |u|_{L^{beta+1}}^{beta+1}
  double energy = 0.0;     // quadratic + potential
  double full_energy = 0.0;  // energy + c0 |u|_{L^2}^2
  double c0 = 1.0;
};

EnergyLedger energies(const OperatorMatrix& op, const GridFunction& u, double beta, double c0 = 1.0);

struct EquivalenceConstants {
  double lower = 0.0;
  double upper = 0.0;
  bool degenerate = false;
};

/// Empirical bounds of ((A v, v) + c0 |v|^2) / |v|_{H^1}^2 over seeded random
/// band-limited v (the constant mode is always among the trials).
EquivalenceConstants equivalence_constants(const OperatorMatrix& op, double c0, std::size_t trials,
                                           std::uint64_t seed = 0);

/// Seeded random band-limited function with modes |k| <= max_mode and
/// unit L^2 norm.
GridFunction random_band_limited(const Grid& grid, std::size_t max_mode, std::uint64_t seed);

}  // namespace nlsvc
