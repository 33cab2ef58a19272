#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>
#include <optional>
#include <string>
#include <vector>

namespace nlsvc {

using Rational = boost::rational<boost::multiprecision::cpp_int>;

/// Exact value of a double (every finite double is a dyadic rational).
Rational to_rational(double x);
double to_double(const Rational& q);
std::string to_string(const Rational& q);

/// Exponents of the Strichartz/Hölder bookkeeping for the power beta:
/// (p, r) with r = beta + 1 and the auxiliary pair (a, b).
template <class T>
struct BasicExponentTable {
  T beta, p, r, a_exp, b_exp, p_conj, r_conj, delta_exp;
};

using ExponentTable = BasicExponentTable<double>;
using ExactExponentTable = BasicExponentTable<Rational>;

/// Floating-point table; throws ContractError for beta <= 5 and
/// NumericalError if an identity fails beyond 1e-12.
ExponentTable admissible_pairs(double beta);
/// Exact table; throws ContractError for beta <= 5.
ExactExponentTable exact_pairs(const Rational& beta);

struct IdentityCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  bool exact = false;  // holds with zero residual in rational arithmetic
  bool passed = false;
};

struct HolderReport {
  double beta = 0.0;
  std::vector<IdentityCheck> checks;
  /// Residual of the variant with 1/(beta p') on the left; nonzero in
  /// general and reported for reference.
  double uncorrected_residual = 0.0;
  bool passed = false;
  std::vector<std::string> notes;

  const IdentityCheck* find(const std::string& name) const;
};

HolderReport verify_holder_identities(const ExponentTable& tab, double tol = 1e-12);
HolderReport verify_holder_identities(const ExactExponentTable& tab);

/// Roots of x = eta + K x^gamma.
struct BootstrapResult {
  double eta = 0.0, K = 1.0, gamma = 2.0;
  double eta_bar = 0.0;
  double x0 = 0.0;  // tangency point (K gamma)^{1/(1-gamma)}
  std::optional<double> x_gamma;
  std::optional<double> x_gamma_prime;
  bool double_root = false;

  int root_count() const { return double_root ? 1 : (x_gamma ? 1 : 0) + (x_gamma_prime ? 1 : 0); }
  /// x_gamma <= gamma/(gamma-1) eta (vacuous without roots).
  bool bound_holds() const;
};

double bootstrap_threshold(double K, double gamma);
BootstrapResult bootstrap_roots(double eta, double K, double gamma, double tol = 1e-12);

struct AsymptoticsRow {
  double eta = 0.0;
  double x_gamma = 0.0;
  double ratio = 0.0;
  /// K (gamma/(gamma-1))^gamma eta^{gamma-1}, an upper bound for ratio - 1.
  double ratio_bound = 0.0;
};

struct AsymptoticsReport {
  std::vector<AsymptoticsRow> rows;
  bool monotone = false;
  bool within_bounds = false;
  bool bound_holds = false;  // x_gamma <= gamma/(gamma-1) eta on every row
  bool passed() const { return monotone && within_bounds && bound_holds; }
};

AsymptoticsReport bootstrap_asymptotics(double K, double gamma, const std::vector<double>& etas,
                                        double tol = 1e-14);

}  // namespace nlsvc
