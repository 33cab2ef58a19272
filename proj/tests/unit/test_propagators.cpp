#include "doctest.h"
#include "nlsvc/error.hpp"
#include "nlsvc/operator.hpp"
#include "nlsvc/propagators.hpp"
#include "nlsvc/transforms.hpp"
#include "oracles.hpp"

using namespace nlsvc;

namespace {

GridFunction gaussian(const Grid& g, double amp = 1.0, double center = 0.0, double width = 1.0) {
  return GridFunction::sample(g, [&](double x) {
    const double s = (x - center) / width;
    return cplx(amp * std::exp(-0.5 * s * s));
  });
}

CoefficientSet admissible(const Grid& g, Profile b = Profile::constant(0.0)) {
  return CoefficientSet::from_profiles(g, Profile::gaussian(1.0, 0.5), b, Profile::gaussian(0.0, 1.0), 0.5, 0.3, 7.0,
                                       "admissible");
}

StepperConfig config(Scheme s, double dt, std::size_t stride = 1) {
  StepperConfig c;
  c.scheme = s;
  c.dt = dt;
  c.record_stride = stride;
  return c;
}

double max_mass_drift(const Trajectory& traj) {
  double d = 0.0;
  for (const auto& l : traj.ledgers) d = std::max(d, std::abs(l.mass - traj.ledgers.front().mass) / traj.ledgers.front().mass);
  return d;
}

}  // namespace

TEST_CASE("free flow against the closed-form Gaussian") {
  const Grid g(100.0, 4096);
  const GridFunction u0 = gaussian(g);
  CHECK(l2_norm(free_flow(u0, 0.0) - u0) <= 1e-15);
  for (double t : {1.0, 2.0, 5.0}) {
    const GridFunction u = free_flow(u0, t);
    CHECK(linf_norm(u) == doctest::Approx(std::pow(1.0 + 4.0 * t * t, -0.25)).epsilon(1e-8));
    double err = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) err = std::max(err, std::abs(u[j] - oracle::free_gaussian(g.x(j), t)));
    CHECK(err <= 1e-10);
    CHECK(l2_norm(u) == doctest::Approx(l2_norm(u0)).epsilon(1e-12));
  }
}

TEST_CASE("Crank-Nicolson linear flow converges at second order") {
  const Grid g(40.0, 512);
  const GridFunction u0 = gaussian(g);
  const OperatorMatrix A = assemble(CoefficientSet::free(g), g);
  const GridFunction exact = free_flow(u0, 1.0);
  const double e1 = l2_norm(propagate_linear(A, u0, 1.0, config(Scheme::crank_nicolson, 1e-3)) - exact);
  const double e2 = l2_norm(propagate_linear(A, u0, 1.0, config(Scheme::crank_nicolson, 5e-4)) - exact);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));

  const double k = 3.0;
  const auto shifted = CoefficientSet::from_profiles(g, Profile::constant(1.0), Profile::constant(0.0),
                                                     Profile::constant(k), 0.5, 0.3, 7.0);
  const GridFunction uc = propagate_linear(assemble(shifted, g), u0, 1.0, config(Scheme::crank_nicolson, 1e-3));
  const GridFunction ref = std::polar(1.0, -k * 1.0) * free_flow(u0, 1.0);
  CHECK(l2_norm(uc - ref) <= 1e-5);
}

TEST_CASE("linear flow with admissible coefficients") {
  const Grid g(40.0, 512);
  const CoefficientSet cs = admissible(g);
  const OperatorMatrix A = assemble(cs, g);
  const GridFunction u0 = gaussian(g, 1.0, 0.0, 2.0);

  const Trajectory traj = linear_flow(A, u0, 10.0, config(Scheme::crank_nicolson, 1e-2, 10));
  CHECK(traj.size() == 101);
  CHECK(traj.ledgers.size() == traj.size());
  for (std::size_t k = 1; k < traj.size(); ++k) {
    CHECK(traj.times[k] > traj.times[k - 1]);
    CHECK(traj.times[k] == doctest::Approx(0.1 * static_cast<double>(k)).epsilon(1e-12));
  }
  CHECK(max_mass_drift(traj) <= 1e-10);

  const GridFunction exact = linear_flow_exact_small(A, u0, 1.0);
  CHECK(l2_norm(exact) == doctest::Approx(l2_norm(u0)).epsilon(1e-12));
  CHECK(l2_norm(propagate_linear(A, u0, 1.0, config(Scheme::crank_nicolson, 1e-3)) - exact) <= 1e-5);
  CHECK(l2_norm(propagate_linear(A, u0, 1.0, config(Scheme::strang_gauge, 1e-3)) - exact) <= 1e-5);

  const LinearEvolver ev(A, config(Scheme::crank_nicolson, 1e-3));
  CHECK(l2_norm(ev.advance(ev.advance(u0, 1.0), -1.0) - u0) <= 1e-9);

  const OperatorMatrix F = assemble(CoefficientSet::free(g), g);
  CHECK(l2_norm(linear_flow_exact_small(F, u0, 2.0) - free_flow(u0, 2.0)) <= 1e-8);
  const OperatorMatrix Ffd = assemble(CoefficientSet::free(g), g, Discretization::finite_difference);
  CHECK(l2_norm(linear_flow_exact_small(Ffd, u0, 1.0)) == doctest::Approx(l2_norm(u0)).epsilon(1e-12));
  CHECK_THROWS_AS(DenseLinearFlow(assemble(CoefficientSet::free(Grid(40.0, 4096)), Grid(40.0, 4096))), ContractError);
}

TEST_CASE("finite-difference Crank-Nicolson") {
  const Grid g(40.0, 1024);
  const CoefficientSet cs = admissible(g);
  const OperatorMatrix A = assemble(cs, g, Discretization::finite_difference);
  const GridFunction u0 = gaussian(g, 1.0, 0.0, 2.0);
  StepperConfig c = config(Scheme::crank_nicolson, 1e-3);
  c.discretization = Discretization::finite_difference;
  const GridFunction cn = propagate_linear(A, u0, 1.0, c);
  CHECK(l2_norm(cn - linear_flow_exact_small(A, u0, 1.0)) <= 1e-5);
  CHECK(l2_norm(cn) == doctest::Approx(l2_norm(u0)).epsilon(1e-12));
}

TEST_CASE("nonlinear evolution") {
  const Grid g(40.0, 1024);
  const CoefficientSet cs = admissible(g);

  const Trajectory zero = nlse_evolve(cs, GridFunction(g), 0.5, config(Scheme::crank_nicolson, 1e-2));
  for (const auto& s : zero.states) CHECK(linf_norm(s) == 0.0);

  for (Scheme s : {Scheme::crank_nicolson, Scheme::strang_gauge}) {
    const Trajectory traj = nlse_evolve(cs, gaussian(g), 2.0, config(s, 1e-3, 100));
    CHECK_FALSE(traj.meta.aborted);
    CHECK(traj.meta.nonlinear);
    CHECK(max_mass_drift(traj) <= 1e-10);
    CHECK(traj.size() == 21);
  }

  CHECK_THROWS_AS(nlse_evolve(cs, gaussian(g), 1.0005, config(Scheme::crank_nicolson, 1e-3)), ContractError);
  CoefficientSet low = cs;
  low.beta = 5.0;
  CHECK_THROWS_AS(nlse_evolve(low, gaussian(g), 0.1, config(Scheme::crank_nicolson, 1e-2)), ContractError);
  std::vector<cplx> bad(g.size(), 0.0);
  bad[5] = cplx(std::nan(""), 0.0);
  CHECK_THROWS_AS(nlse_evolve(cs, GridFunction(g, bad), 0.1, config(Scheme::crank_nicolson, 1e-2)), ContractError);
}

TEST_CASE("CN and reduced splitting agree on the nonlinear flow") {
  const Grid g(40.0, 1024);
  const CoefficientSet cs = admissible(g);
  const GridFunction u0 = gaussian(g, 1.0, 0.0, 2.0);
  const auto a = nlse_evolve(cs, u0, 1.0, config(Scheme::crank_nicolson, 5e-4, 2000));
  const auto b = nlse_evolve(cs, u0, 1.0, config(Scheme::strang_gauge, 5e-4, 2000));
  CHECK(l2_norm(a.states.back() - b.states.back()) <= 1e-5);
}

TEST_CASE("gauge equivariance of the nonlinear flow") {
  const Grid g(40.0, 1024);
  const CoefficientSet mag = admissible(g, Profile::gaussian(0.0, 0.8));
  const CoefficientSet nomag = admissible(g);
  const GaugeData gd = build_gauge(mag);
  const GridFunction u0 = gaussian(g, 1.0, 0.5);
  const auto cfg = config(Scheme::crank_nicolson, 1e-3, 1000);
  const auto with_b = nlse_evolve(mag, u0, 1.0, cfg);
  const auto gauged = nlse_evolve(nomag, gauge_forward(u0, gd), 1.0, cfg);
  CHECK(l2_norm(with_b.states.back() - gauge_inverse(gauged.states.back(), gd)) <= 1e-8);
}

TEST_CASE("sponge layer and wrap time") {
  const Grid g(20.0, 512);
  const GridFunction moving = GridFunction::sample(g, [](double x) { return std::exp(-0.5 * x * x) * std::polar(1.0, 4.0 * x); });
  StepperConfig c = config(Scheme::crank_nicolson, 1e-2, 10);
  const auto plain = linear_flow(assemble(CoefficientSet::free(g), g), moving, 4.0, c);
  CHECK(plain.meta.absorbed_mass == 0.0);
  CHECK_FALSE(plain.meta.warnings.empty());
  c.sponge = SpongeConfig{};
  const auto damped = linear_flow(assemble(CoefficientSet::free(g), g), moving, 4.0, c);
  CHECK(damped.meta.absorbed_mass > 0.0);
  CHECK(l2_norm(damped.states.back()) < l2_norm(moving));

  // |u0^(xi)|^2 ~ e^{-xi^2}, so the 1e-6 spectral tail starts where erfc(xi) = 1e-6.
  double lo = 0.0, hi = 10.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (std::erfc(mid) > 1e-6 ? lo : hi) = mid;
  }
  CHECK(wrap_time(gaussian(g)) == doctest::Approx(20.0 / (2.0 * lo)).epsilon(0.05));
  CHECK(std::isinf(wrap_time(GridFunction(g))));
}
