#include "doctest.h"
#include "nlsvc/error.hpp"
#include "nlsvc/profiles.hpp"

using namespace nlsvc;

namespace {

GridFunction bump(const Grid& g, double amp = 1.0, double center = 0.0) {
  return GridFunction::sample(g, [&](double x) { return cplx(amp * std::exp(-(x - center) * (x - center))); });
}

std::vector<double> range(int lo, int hi) {
  std::vector<double> n;
  for (int k = lo; k <= hi; ++k) n.push_back(k);
  return n;
}

ProfileSpec two_profiles(const Grid& g, double rate, double second_amp = 0.8) {
  ProfileSpec spec;
  spec.components.push_back({bump(g), 0.0, rate});
  spec.components.push_back({bump(g, second_amp), 0.0, -rate});
  return spec;
}

double mass2(const GridFunction& u) { return std::pow(l2_norm(u), 2); }

}  // namespace

TEST_CASE("synthetic sequences") {
  const Grid g(160.0, 1024);
  const OperatorMatrix F = assemble(CoefficientSet::free(g), g);

  ProfileSpec single;
  single.components.push_back({bump(g), 0.0, 0.0});
  const auto s = synthesize_sequence(single, range(1, 4), F, 1);
  for (const auto& u : s.elements) CHECK(l2_norm(u - bump(g)) == 0.0);

  const auto two = synthesize_sequence(two_profiles(g, 2.0), range(1, 10), F, 1);
  REQUIRE(two.elements.size() == 10);
  // Separation 4n at n = 10: the Gaussian overlap is ~e^{-(40)^2/2}.
  const double cross = mass2(two.elements.back()) - mass2(bump(g)) - mass2(bump(g, 0.8));
  CHECK(std::abs(cross) <= 1e-6);
  CHECK(two.x_shifts.back()[0] == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(two.x_shifts.back()[1] == doctest::Approx(-20.0).epsilon(1e-12));

  ProfileSpec noisy = two_profiles(g, 2.0);
  noisy.noise_amplitude = 0.1;
  const auto nz = synthesize_sequence(noisy, range(1, 10), F, 7);
  const double expected = std::pow(h1_norm(bump(g)), 2) + std::pow(h1_norm(bump(g, 0.8)), 2) + 0.01;
  CHECK(std::abs(std::pow(h1_norm(nz.elements.back()), 2) / expected - 1.0) <= 0.05);
  const auto nz2 = synthesize_sequence(noisy, range(1, 10), F, 7);
  CHECK(l2_norm(nz.elements.back() - nz2.elements.back()) == 0.0);

  CHECK_THROWS_AS(synthesize_sequence(two_profiles(g, 20.0), range(1, 10), F, 1), ContractError);
}

TEST_CASE("concentration search") {
  const Grid g(80.0, 1024);
  const OperatorMatrix F = assemble(CoefficientSet::free(g), g);
  ConcentrationParams p;

  const double x0 = 7.0;
  const Concentration c = find_concentration(translate(bump(g), g.shift_in_samples(x0)), F, p);
  CHECK(c.found);
  CHECK(std::abs(c.t_star) <= c.dt_scan);
  CHECK(std::abs(c.x_star - x0) <= g.spacing() + 1e-12);

  const double t0 = 1.5;
  const GridFunction spread = free_flow(bump(g), t0);  // e^{-i t0 A} psi
  const Concentration back = find_concentration(spread, F, p);
  CHECK(back.found);
  CHECK(std::abs(back.t_star + t0) <= back.dt_scan);

  const GridFunction noise = 1e-10 * random_band_limited(g, 40, 3);
  CHECK_FALSE(find_concentration(noise, F, p).found);

  ConcentrationParams coarse = p;
  coarse.t_samples = 8;
  CHECK_THROWS_AS(find_concentration(spread, F, coarse), ContractError);
}

TEST_CASE("greedy decomposition of a single profile") {
  const Grid g(80.0, 1024);
  const OperatorMatrix F = assemble(CoefficientSet::free(g), g);
  ProfileSpec single;
  single.components.push_back({bump(g), 0.5, 1.0});
  const auto n = range(1, 8);
  const auto seq = synthesize_sequence(single, n, F, 1);
  ExtractionParams ep;
  const auto dec = greedy_decompose(seq.elements, n, F, 4, 1e-3, ep);
  REQUIRE(dec.J() == 1);
  CHECK(h1_norm(dec.profiles[0].psi_hat - bump(g)) <= 0.02 * h1_norm(bump(g)));
  CHECK(std::abs(dec.profiles[0].x_hat - 8.0) <= g.spacing() + 1e-12);
  CHECK(std::abs(dec.profiles[0].t_hat - 4.0) <= dec.profiles[0].dt_scan);
  for (const auto& r : dec.remainders) CHECK(linf_norm(r) <= 1e-3);
  CHECK(dec.witnesses.back() < 1e-3);

  const auto rep = orthogonality_report(dec, F, admissible_pairs(7.0));
  CHECK(rep.rho_mass <= 1e-6);
  CHECK(rep.rho_form <= 1e-6);
  CHECK(rep.rho_Lr <= 1e-6);
  CHECK(rep.reconstruction_error <= 1e-12);
  CHECK_FALSE(rep.flagged);
}

TEST_CASE("greedy decomposition of two separated profiles") {
  const Grid g(160.0, 1024);
  const OperatorMatrix F = assemble(CoefficientSet::free(g), g);
  const auto n = range(1, 12);
  const auto seq = synthesize_sequence(two_profiles(g, 2.0), n, F, 1);
  const auto dec = greedy_decompose(seq.elements, n, F, 4, 1e-3, ExtractionParams{});
  REQUIRE(dec.J() == 2);
  std::vector<double> xs{dec.profiles[0].x_hat, dec.profiles[1].x_hat};
  std::sort(xs.begin(), xs.end());
  CHECK(std::abs(xs[0] + 24.0) <= g.spacing() + 1e-12);
  CHECK(std::abs(xs[1] - 24.0) <= g.spacing() + 1e-12);
  for (const auto& pr : dec.profiles) CHECK(std::abs(pr.t_hat) <= pr.dt_scan);

  const auto rep = orthogonality_report(dec, F, admissible_pairs(7.0));
  CHECK(rep.rho_mass <= 0.05);
  CHECK(rep.rho_form <= 0.05);
  CHECK(rep.rho_Lr <= 0.05);
  CHECK(rep.separation_diverging);
  CHECK(rep.mass_superadditive);
  CHECK(rep.reconstruction_error <= 1e-12);
  CHECK_FALSE(rep.flagged);
}

TEST_CASE("pure noise and overlapping profiles") {
  const Grid g(80.0, 1024);
  const OperatorMatrix F = assemble(CoefficientSet::free(g), g);
  const auto n = range(1, 8);
  std::vector<GridFunction> noise;
  for (std::uint64_t s = 0; s < n.size(); ++s) noise.push_back(1e-5 * random_band_limited(g, 40, s));
  const auto dec = greedy_decompose(noise, n, F, 4, 1e-3, ExtractionParams{});
  CHECK(dec.J() == 0);
  CHECK(dec.witnesses.size() == 1);
  CHECK_FALSE(dec.stop_reason.empty());

  // Two grid widths apart: the pieces never separate. A wide window takes
  // both bumps as one exact profile; a window narrower than the pair cannot,
  // and the leftover overlap breaks the Pythagorean expansions.
  ProfileSpec close;
  close.components.push_back({bump(g), 0.0, 0.0});
  close.components.push_back({translate(bump(g, 0.8), 2), 0.0, 0.0});
  const auto seq = synthesize_sequence(close, n, F, 1);
  const auto wide = orthogonality_report(greedy_decompose(seq.elements, n, F, 4, 1e-3, ExtractionParams{}), F,
                                         admissible_pairs(7.0));
  CHECK_FALSE(wide.flagged);
  ExtractionParams narrow;
  narrow.window = 0.6;
  const auto odec = greedy_decompose(seq.elements, n, F, 4, 1e-3, narrow);
  const auto rep = orthogonality_report(odec, F, admissible_pairs(7.0));
  CHECK_FALSE(rep.separation_diverging);
  CHECK(rep.flagged);
  CHECK(rep.rho_form > 0.5);
  CHECK(rep.reconstruction_error <= 1e-12);

  CHECK_THROWS_AS(greedy_decompose({}, {}, F, 4, 1e-3, ExtractionParams{}), ContractError);
}

TEST_CASE("two-term L-infinity bound") {
  const Grid g(40.0, 512);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const GridFunction v = random_band_limited(g, 60, s);
    for (double R : {1.0, 4.0, 16.0}) {
      const LinfBound b = linf_two_term_bound(v, R);
      CHECK(b.holds);
      CHECK(b.linf <= b.high_term + b.low_term + 1e-12);
      CHECK(b.high_term == doctest::Approx(std::sqrt(2.0 / R) * h1_norm(v)).epsilon(1e-12));
    }
  }
}
