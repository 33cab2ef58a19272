#include "doctest.h"
#include "nlsvc/error.hpp"
#include "nlsvc/exponents.hpp"
#include "oracles.hpp"

using namespace nlsvc;

namespace {

Rational q(long n, long d = 1) { return Rational(n, d); }

}  // namespace

TEST_CASE("exponent table values") {
  const ExponentTable t7 = admissible_pairs(7.0);
  CHECK(t7.p == doctest::Approx(16.0 / 3.0).epsilon(1e-14));
  CHECK(t7.r == doctest::Approx(8.0).epsilon(1e-14));
  CHECK(t7.a_exp == doctest::Approx(9.6).epsilon(1e-14));
  CHECK(t7.b_exp == doctest::Approx(24.0 / 7.0).epsilon(1e-14));
  CHECK(std::abs(2.0 / t7.p + 1.0 / t7.r - 0.5) <= 1e-12);
  CHECK(std::abs(2.0 / t7.a_exp + 1.0 / t7.b_exp - 0.5) <= 1e-12);

  const ExponentTable t9 = admissible_pairs(9.0);
  CHECK(t9.p == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(t9.r == doctest::Approx(10.0).epsilon(1e-14));
  CHECK(t9.a_exp == doctest::Approx(40.0 / 3.0).epsilon(1e-14));
  CHECK(t9.b_exp == doctest::Approx(20.0 / 7.0).epsilon(1e-14));

  CHECK_THROWS_AS(admissible_pairs(5.0), ContractError);
  CHECK_THROWS_AS(admissible_pairs(4.0), ContractError);
  CHECK_THROWS_AS(exact_pairs(q(5)), ContractError);
}

TEST_CASE("exact tables against an independent fraction oracle") {
  for (auto [n, d] : {std::pair{11L, 2L}, {6L, 1L}, {7L, 1L}, {9L, 1L}, {13L, 1L}, {31L, 4L}}) {
    const ExactExponentTable t = exact_pairs(q(n, d));
    const auto o = oracle::exponents(oracle::Fraction(n, d));
    CHECK(t.p == q(o.p.num, o.p.den));
    CHECK(t.r == q(o.r.num, o.r.den));
    CHECK(t.a_exp == q(o.a.num, o.a.den));
    CHECK(t.b_exp == q(o.b.num, o.b.den));
    CHECK(t.p_conj == q(o.p_conj.num, o.p_conj.den));
    CHECK(t.r_conj == q(o.r_conj.num, o.r_conj.den));
    CHECK(t.delta_exp == q(o.delta.num, o.delta.den));
    CHECK(2 / t.p + 1 / t.r == q(1, 2));
    CHECK(2 / t.a_exp + 1 / t.b_exp == q(1, 2));
    CHECK(t.p < t.a_exp);
    CHECK(t.b_exp < t.r);
    CHECK(t.delta_exp > 0);
  }
}

TEST_CASE("Holder identities") {
  const ExactExponentTable t = exact_pairs(q(7));
  CHECK(t.r_conj == q(8, 7));
  CHECK(t.beta * t.r_conj == t.r);
  CHECK(t.p_conj == q(16, 13));
  CHECK(t.p / t.p_conj == q(13, 3));
  CHECK(1 / t.p_conj == q(13, 16));
  CHECK((t.beta - 1) / t.a_exp + 1 / t.p == q(13, 16));

  const HolderReport exact = verify_holder_identities(t);
  CHECK(exact.passed);
  for (const auto& c : exact.checks) {
    CHECK(c.exact);
    if (c.name.find('=') != std::string::npos) CHECK(c.residual == 0.0);
  }
  // The variant with 1/(beta p') misses by (13/16)(1 - 1/7).
  CHECK(exact.uncorrected_residual == doctest::Approx(13.0 / 16.0 * 6.0 / 7.0).epsilon(1e-12));
  CHECK_FALSE(exact.notes.empty());

  for (double beta : {5.5, 6.0, 7.0, 9.0, 13.0}) {
    const HolderReport r = verify_holder_identities(admissible_pairs(beta));
    CHECK(r.passed);
    for (const auto& c : r.checks)
      if (c.name.find('=') != std::string::npos) CHECK(c.residual <= 1e-12);
    CHECK(r.uncorrected_residual > 1e-3);
    REQUIRE(r.find("delta>0") != nullptr);
    CHECK(r.find("delta>0")->residual > 0.0);
  }
}

TEST_CASE("bootstrap roots") {
  const BootstrapResult r = bootstrap_roots(0.21, 1.0, 2.0, 1e-10);
  CHECK(r.eta_bar == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(r.x0 == doctest::Approx(0.5).epsilon(1e-14));
  REQUIRE(r.x_gamma.has_value());
  REQUIRE(r.x_gamma_prime.has_value());
  const auto [small, large] = oracle::quadratic_roots(0.21);
  CHECK(std::abs(*r.x_gamma - small) <= 1e-10);
  CHECK(std::abs(*r.x_gamma_prime - large) <= 1e-10);
  CHECK(small == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(large == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(r.root_count() == 2);
  CHECK(r.bound_holds());
  CHECK(*r.x_gamma <= 2.0 * 0.21);
  CHECK(0.21 < *r.x_gamma);
  CHECK(*r.x_gamma < *r.x_gamma_prime);

  const BootstrapResult z = bootstrap_roots(0.0, 1.0, 2.0);
  REQUIRE(z.x_gamma.has_value());
  CHECK(*z.x_gamma == 0.0);

  const double eb = bootstrap_threshold(3.0, 1.5);
  CHECK(eb == doctest::Approx((0.5 / 1.5) * std::pow(4.5, 1.0 / (1.0 - 1.5))).epsilon(1e-14));
  const auto g = bootstrap_roots(0.5 * eb, 3.0, 1.5);
  REQUIRE(g.x_gamma.has_value());
  CHECK(std::abs(*g.x_gamma - 0.5 * eb - 3.0 * std::pow(*g.x_gamma, 1.5)) <= 1e-12);
  CHECK(std::abs(*g.x_gamma_prime - 0.5 * eb - 3.0 * std::pow(*g.x_gamma_prime, 1.5)) <= 1e-10 * *g.x_gamma_prime);
}

TEST_CASE("root-count transition at the threshold") {
  for (auto [K, gamma] : {std::pair{1.0, 2.0}, {2.0, 3.0}, {1.5, 1.5}}) {
    const double eb = bootstrap_threshold(K, gamma);
    CHECK(bootstrap_roots(eb * (1.0 - 1e-3), K, gamma).root_count() == 2);
    const auto at = bootstrap_roots(eb, K, gamma);
    CHECK(at.double_root);
    CHECK(at.root_count() == 1);
    CHECK(bootstrap_roots(eb * (1.0 + 1e-3), K, gamma).root_count() == 0);
  }
}

TEST_CASE("bootstrap asymptotics") {
  const auto rep = bootstrap_asymptotics(1.0, 2.0, {0.1, 0.01, 1e-6});
  REQUIRE(rep.rows.size() == 3);
  CHECK(rep.rows[0].x_gamma == doctest::Approx(oracle::quadratic_roots(0.1).first).epsilon(1e-12));
  CHECK(rep.rows[0].x_gamma == doctest::Approx(0.11270).epsilon(1e-4));
  CHECK(rep.rows[0].ratio == doctest::Approx(1.127).epsilon(1e-3));
  CHECK(rep.rows[1].ratio == doctest::Approx(1.0102).epsilon(1e-4));
  CHECK(rep.rows[2].ratio - 1.0 <= 2e-6);
  CHECK(rep.passed());
  for (const auto& row : rep.rows) CHECK(row.ratio - 1.0 <= row.ratio_bound);
}
