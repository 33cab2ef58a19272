#include "nlsvc/exponents.hpp"

#include <cmath>
#include <sstream>

#include "nlsvc/error.hpp"

namespace nlsvc {

namespace {

using boost::multiprecision::cpp_int;

template <class T>
BasicExponentTable<T> build(const T& beta) {
  const T one(1), two(2), four(4);
  BasicExponentTable<T> t;
  t.beta = beta;
  t.p = four * (beta + one) / (beta - one);
  t.r = beta + one;
  t.a_exp = two * (beta * beta - one) / (beta + T(3));
  t.b_exp = two * (beta * beta - one) / (beta * beta - two * beta - T(7));
  t.p_conj = t.p / (t.p - one);
  t.r_conj = t.r / (t.r - one);
  t.delta_exp = beta * t.p_conj - t.p;
  return t;
}

struct Identity {
  const char* name;
  int kind;  // 0: equality lhs == rhs, 1: lhs > rhs
};

template <class T>
std::vector<std::pair<T, T>> identity_sides(const BasicExponentTable<T>& t) {
  const T one(1), two(2), half = T(1) / T(2);
  return {
      {two / t.p + one / t.r, half},
      {two / t.a_exp + one / t.b_exp, half},
      {t.beta * t.r_conj, t.r},
      {t.p / t.p_conj, t.p - one},
      {one / t.p_conj, (t.beta - one) / t.a_exp + one / t.p},
      {t.delta_exp, t.beta * t.p_conj - t.p},
      {t.delta_exp, T(0)},
      {t.a_exp, t.p},
      {t.r, t.b_exp},
  };
}

constexpr Identity kIdentities[] = {
    {"2/p+1/r=1/2", 0},      {"2/a+1/b=1/2", 0},      {"beta*r'=r", 0},
    {"p/p'=p-1", 0},         {"1/p'=(beta-1)/a+1/p", 0}, {"delta=beta*p'-p", 0},
    {"delta>0", 1},          {"p<a", 1},              {"b<r", 1},
};

}  // namespace

Rational to_rational(double x) {
  require(std::isfinite(x), "cannot convert a non-finite value to a rational");
  if (x == 0.0) return Rational(0);
  int e = 0;
  const double m = std::frexp(x, &e);  // x = m 2^e, 0.5 <= |m| < 1
  const auto mant = static_cast<long long>(std::ldexp(m, 53));
  e -= 53;
  cpp_int num(mant);
  cpp_int den(1);
  if (e >= 0)
    num <<= e;
  else
    den <<= -e;
  return Rational(num, den);
}

double to_double(const Rational& q) {
  // Correctly rounded, unlike dividing the two converted integers.
  return boost::multiprecision::cpp_rational(q.numerator(), q.denominator()).convert_to<double>();
}

std::string to_string(const Rational& q) {
  std::ostringstream os;
  os << q.numerator();
  if (q.denominator() != 1) os << '/' << q.denominator();
  return os.str();
}

ExponentTable admissible_pairs(double beta) {
  require(std::isfinite(beta) && beta > 5.0, "beta must exceed 5");
  const ExponentTable t = build<double>(beta);
  const HolderReport rep = verify_holder_identities(t);
  if (!rep.passed) throw NumericalError("exponent identities fail beyond tolerance");
  return t;
}

ExactExponentTable exact_pairs(const Rational& beta) {
  require(beta > Rational(5), "beta must exceed 5");
  return build<Rational>(beta);
}

const IdentityCheck* HolderReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

HolderReport verify_holder_identities(const ExponentTable& tab, double tol) {
  HolderReport rep;
  rep.beta = tab.beta;
  rep.passed = true;
  const auto sides = identity_sides(tab);
  for (std::size_t i = 0; i < sides.size(); ++i) {
    IdentityCheck c;
    c.name = kIdentities[i].name;
    c.lhs = sides[i].first;
    c.rhs = sides[i].second;
    if (kIdentities[i].kind == 0) {
      c.residual = std::abs(c.lhs - c.rhs);
      c.passed = c.residual <= tol * std::max(1.0, std::abs(c.rhs));
    } else {
      c.residual = c.lhs - c.rhs;
      c.passed = c.residual > 0.0;
    }
    rep.passed = rep.passed && c.passed;
    rep.checks.push_back(c);
  }
  rep.uncorrected_residual =
      std::abs(1.0 / (tab.beta * tab.p_conj) - ((tab.beta - 1.0) / tab.a_exp + 1.0 / tab.p));
  rep.notes.push_back("1/(beta p') = (beta-1)/a + 1/p does not hold; the identity holds with 1/p' on the left");
  return rep;
}

HolderReport verify_holder_identities(const ExactExponentTable& tab) {
  HolderReport rep;
  rep.beta = to_double(tab.beta);
  rep.passed = true;
  const auto sides = identity_sides(tab);
  for (std::size_t i = 0; i < sides.size(); ++i) {
    IdentityCheck c;
    c.name = kIdentities[i].name;
    c.lhs = to_double(sides[i].first);
    c.rhs = to_double(sides[i].second);
    const Rational diff = sides[i].first - sides[i].second;
    if (kIdentities[i].kind == 0) {
      c.exact = diff == Rational(0);
      c.residual = std::abs(to_double(diff));
      c.passed = c.exact;
    } else {
      c.exact = diff > Rational(0);
      c.residual = to_double(diff);
      c.passed = c.exact;
    }
    rep.passed = rep.passed && c.passed;
    rep.checks.push_back(c);
  }
  const Rational one(1);
  const Rational uncorrected = one / (tab.beta * tab.p_conj) - ((tab.beta - one) / tab.a_exp + one / tab.p);
  rep.uncorrected_residual = std::abs(to_double(uncorrected));
  rep.notes.push_back("1/(beta p') = (beta-1)/a + 1/p does not hold; the identity holds with 1/p' on the left");
  return rep;
}

bool BootstrapResult::bound_holds() const {
  if (!x_gamma) return true;
  return *x_gamma <= gamma / (gamma - 1.0) * eta * (1.0 + 1e-12) + 1e-300;
}

double bootstrap_threshold(double K, double gamma) {
  require(K > 0.0 && gamma > 1.0, "bootstrap requires K > 0 and gamma > 1");
  return (gamma - 1.0) / gamma * std::pow(K * gamma, 1.0 / (1.0 - gamma));
}

BootstrapResult bootstrap_roots(double eta, double K, double gamma, double tol) {
  require(eta >= 0.0 && std::isfinite(eta), "eta must be nonnegative");
  require(K >= 1.0, "K must be at least 1");
  require(gamma > 1.0, "gamma must exceed 1");
  require(tol > 0.0, "tolerance must be positive");
  BootstrapResult res;
  res.eta = eta;
  res.K = K;
  res.gamma = gamma;
  res.eta_bar = bootstrap_threshold(K, gamma);
  res.x0 = std::pow(K * gamma, 1.0 / (1.0 - gamma));
  if (std::abs(eta - res.eta_bar) <= tol) {
    res.double_root = true;
    res.x_gamma = res.x0;
    res.x_gamma_prime = res.x0;
    return res;
  }
  if (eta > res.eta_bar) return res;
  if (eta == 0.0) {
    res.x_gamma = 0.0;
  }
  // g(x) = eta + K x^gamma - x: g(0) = eta >= 0, g(x0) = eta - eta_bar < 0.
  auto g = [&](double x) { return eta + K * std::pow(x, gamma) - x; };
  auto bisect = [&](double lo, double hi) {
    // g(lo) and g(hi) have opposite signs.
    const bool increasing = g(lo) < 0.0;
    while (hi - lo > tol * std::max(1.0, std::abs(hi))) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if ((g(mid) < 0.0) == increasing)
        lo = mid;
      else
        hi = mid;
    }
    return 0.5 * (lo + hi);
  };
  if (!res.x_gamma) res.x_gamma = bisect(0.0, res.x0);
  double hi = 2.0 * res.x0;
  while (g(hi) < 0.0) hi *= 2.0;
  res.x_gamma_prime = bisect(res.x0, hi);
  return res;
}

AsymptoticsReport bootstrap_asymptotics(double K, double gamma, const std::vector<double>& etas, double tol) {
  const double eta_bar = bootstrap_threshold(K, gamma);
  AsymptoticsReport rep;
  rep.monotone = true;
  rep.within_bounds = true;
  rep.bound_holds = true;
  for (std::size_t i = 0; i < etas.size(); ++i) {
    require(etas[i] > 0.0 && etas[i] < eta_bar, "asymptotic ladder requires 0 < eta < eta_bar");
    if (i > 0) require(etas[i] < etas[i - 1], "asymptotic ladder must be decreasing");
    const BootstrapResult br = bootstrap_roots(etas[i], K, gamma, tol);
    AsymptoticsRow row;
    row.eta = etas[i];
    row.x_gamma = *br.x_gamma;
    row.ratio = row.x_gamma / row.eta;
    row.ratio_bound = K * std::pow(gamma / (gamma - 1.0), gamma) * std::pow(row.eta, gamma - 1.0);
    // Bisection error tol * max(1, x) translates into tol / eta on the ratio.
    const double slack = 4.0 * tol / row.eta;
    if (row.ratio < 1.0 - slack || row.ratio - 1.0 > row.ratio_bound + slack) rep.within_bounds = false;
    if (!br.bound_holds()) rep.bound_holds = false;
    if (!rep.rows.empty() && row.ratio > rep.rows.back().ratio + slack) rep.monotone = false;
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace nlsvc
