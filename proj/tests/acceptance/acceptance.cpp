// Acceptance run: one PASS/FAIL line per criterion, sub-check details above it.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "nlsvc/coefficients.hpp"
#include "nlsvc/diagnostics.hpp"
#include "nlsvc/exponents.hpp"
#include "nlsvc/profiles.hpp"
#include "nlsvc/spectral.hpp"
#include "nlsvc/transforms.hpp"
#include "nlsvc/virial.hpp"
#include "oracles.hpp"

using namespace nlsvc;

namespace {

struct Check {
  std::string what;
  double value;
  std::string bound;
  bool ok;
};

using Checks = std::vector<Check>;

void add(Checks& out, std::string what, double value, std::string bound, bool ok) {
  out.push_back({std::move(what), value, std::move(bound), ok});
}

struct Criterion {
  int id;
  std::string title;
  double budget_s;
  std::function<Checks()> body;
};

CoefficientSet admissible(const Grid& g) {
  return CoefficientSet::from_profiles(g, Profile::gaussian(1.0, 0.5), Profile::constant(0.0), Profile::gaussian(0.0, 1.0),
                                       0.5, 0.3, 7.0, "admissible");
}

GridFunction gaussian(const Grid& g, double amp = 1.0, double width = 1.0, double center = 0.0) {
  return GridFunction::sample(g, [&](double x) {
    const double s = (x - center) / width;
    return cplx(amp * std::exp(-0.5 * s * s));
  });
}

StepperConfig stepper(double dt, std::size_t stride, Scheme scheme = Scheme::crank_nicolson) {
  StepperConfig c;
  c.dt = dt;
  c.record_stride = stride;
  c.scheme = scheme;
  return c;
}

Rational q(long n, long d = 1) { return Rational(n, d); }

Checks exponent_algebra() {
  Checks out;
  for (auto [n, d] : {std::pair{11L, 2L}, {6L, 1L}, {7L, 1L}, {9L, 1L}, {13L, 1L}}) {
    const std::string tag = "beta=" + to_string(q(n, d)) + " ";
    const ExactExponentTable t = exact_pairs(q(n, d));
    const auto o = oracle::exponents(oracle::Fraction(n, d));
    const bool table = t.p == q(o.p.num, o.p.den) && t.r == q(o.r.num, o.r.den) && t.a_exp == q(o.a.num, o.a.den) &&
                       t.b_exp == q(o.b.num, o.b.den) && t.p_conj == q(o.p_conj.num, o.p_conj.den) &&
                       t.r_conj == q(o.r_conj.num, o.r_conj.den) && t.delta_exp == q(o.delta.num, o.delta.den);
    add(out, tag + "table matches fraction oracle", table ? 1 : 0, "== 1", table);
    const HolderReport rep = verify_holder_identities(t);
    for (const auto& c : rep.checks) {
      const bool equality = c.name.find('=') != std::string::npos;
      add(out, tag + c.name, c.residual, equality ? "== 0 exact" : "> 0 exact", c.exact && c.passed);
    }
    // Independent restatement of the identities in oracle arithmetic.
    using F = oracle::Fraction;
    const bool direct = F(2) / o.p + F(1) / o.r == F(1, 2) && F(2) / o.a + F(1) / o.b == F(1, 2) &&
                        o.beta * o.r_conj == o.r && o.p / o.p_conj == o.p - F(1) &&
                        F(1) / o.p_conj == (o.beta - F(1)) / o.a + F(1) / o.p && F(0) < o.delta;
    add(out, tag + "identities in oracle arithmetic", direct ? 1 : 0, "== 1", direct);
  }
  return out;
}

Checks bootstrap_lemma() {
  Checks out;
  const double eb = bootstrap_threshold(1.0, 2.0);
  add(out, "eta_bar(K=1,gamma=2)", eb, "== 0.25", eb == 0.25);
  const BootstrapResult r = bootstrap_roots(0.21, 1.0, 2.0, 1e-10);
  const auto [small, large] = oracle::quadratic_roots(0.21);
  const double e_small = r.x_gamma ? std::abs(*r.x_gamma - 0.3) : INFINITY;
  const double e_large = r.x_gamma_prime ? std::abs(*r.x_gamma_prime - 0.7) : INFINITY;
  add(out, "|x_gamma - 0.3| at eta=0.21", e_small, "<= 1e-10", e_small <= 1e-10);
  add(out, "|x_gamma' - 0.7| at eta=0.21", e_large, "<= 1e-10", e_large <= 1e-10);
  add(out, "quadratic-formula oracle roots", std::max(std::abs(small - 0.3), std::abs(large - 0.7)), "<= 1e-14",
      std::abs(small - 0.3) <= 1e-14 && std::abs(large - 0.7) <= 1e-14);
  add(out, "x_gamma <= gamma/(gamma-1) eta", r.x_gamma ? *r.x_gamma - 2.0 * 0.21 : INFINITY, "<= 0", r.bound_holds());
  const AsymptoticsReport a = bootstrap_asymptotics(1.0, 2.0, {0.2, 0.1, 0.01, 1e-3, 1e-4, 1e-6});
  add(out, "ratio x_gamma/eta at eta=1e-6 minus 1", a.rows.back().ratio - 1.0, "-> 0, within bound",
      a.rows.back().ratio - 1.0 <= a.rows.back().ratio_bound);
  add(out, "ratio decreasing on eta ladder", a.monotone ? 1 : 0, "== 1", a.monotone);
  add(out, "bound on every ladder row", a.bound_holds ? 1 : 0, "== 1", a.bound_holds && a.within_bounds);
  const bool split = bootstrap_roots(eb * 0.999, 1.0, 2.0).root_count() == 2 &&
                     bootstrap_roots(eb * 1.001, 1.0, 2.0).root_count() == 0;
  add(out, "two roots below eta_bar, none above", split ? 1 : 0, "== 1", split);
  return out;
}

Checks conservation() {
  Checks out;
  const Grid g(40.0, 1024);
  const CoefficientSet cs = admissible(g);
  const GridFunction u0 = gaussian(g);
  const auto coarse = conservation_report(nlse_evolve(cs, u0, 5.0, stepper(1e-3, 100)));
  const auto fine = conservation_report(nlse_evolve(cs, u0, 5.0, stepper(5e-4, 200)));
  add(out, "mass drift dt=1e-3", coarse.mass_drift, "<= 1e-10", coarse.mass_drift <= 1e-10);
  add(out, "energy drift dt=1e-3", coarse.energy_drift, "<= 1e-6", coarse.energy_drift <= 1e-6);
  const double ratio = coarse.energy_drift / fine.energy_drift;
  add(out, "energy drift ratio dt=1e-3 / dt=5e-4", ratio, ">= 3.5", ratio >= 3.5);
  return out;
}

Checks transform_pipeline() {
  Checks out;
  const Grid g(20.0, 1024);
  const GridFunction u = GridFunction::sample(g, [](double x) { return std::exp(-x * x) * std::polar(1.0, 0.7 * x); });

  const auto gauged = CoefficientSet::from_profiles(g, Profile::gaussian(1.0, 0.5), Profile::gaussian(0.0, 0.6),
                                                    Profile::gaussian(0.0, 1.0), 0.5, 0.3, 7.0);
  const GaugeData gd = build_gauge(gauged);
  const double gauge_rt = linf_norm(gauge_inverse(gauge_forward(u, gd), gd) - u);
  add(out, "gauge round trip (sup)", gauge_rt, "<= 1e-15", gauge_rt <= 1e-15);

  const CoefficientSet cs = admissible(g);
  const LiouvilleMap map = build_liouville(cs, g);
  const GridFunction v = apply_liouville(u, map, LiouvilleDirection::forward);
  const double rt = l2_norm(apply_liouville(v, map, LiouvilleDirection::backward) - u);
  add(out, "Liouville round trip (L2)", rt, "<= 1e-8", rt <= 1e-8);
  const GridFunction full = apply_liouville(gauge_forward(u, gd), build_liouville(gauged, g), LiouvilleDirection::forward);
  const double iso = std::max(std::abs(l2_norm(v) - l2_norm(u)), std::abs(l2_norm(full) - l2_norm(u)));
  add(out, "L2 isometry (Liouville and gauge+Liouville)", iso, "<= 1e-8", iso <= 1e-8);
  const double conj =
      l2_norm(apply_liouville(assemble(cs, g).apply(u), map, LiouvilleDirection::forward) - apply_reduced_operator(v, map));
  add(out, "conjugation A vs -d^2 + c~ (L2)", conj, "<= 1e-6", conj <= 1e-6);

  const auto bare = CoefficientSet::from_profiles(g, Profile::gaussian(1.0, 0.5), Profile::constant(0.0),
                                                  Profile::constant(0.0), 0.5, 0.3, 7.0);
  const LiouvilleMap bm = build_liouville(bare, g);
  const TrigInterpolant pot(bm.alpha_grid(), std::span<const double>(bm.potential()));
  const double c0 = pot(-bm.offset()).real();
  add(out, "c~(alpha(0)) for a=1+e^{-x^2}/2, c=0", c0, "== 0.25 (1e-8)", std::abs(c0 - 0.25) <= 1e-8);
  return out;
}

Checks dispersive_decay() {
  Checks out;
  const Grid g(1024.0, 4096);
  const GridFunction u0 = gaussian(g);
  const double tw = wrap_time(u0);
  const DecayFit fit = decay_fit(assemble(admissible(g), g), u0, 8.0, {5.0, tw / 2.0},
                                 stepper(1e-2, 10, Scheme::strang_gauge));
  add(out, "fitted L8 slope on [5, t_wrap/2=" + std::to_string(tw / 2.0) + "]", fit.fitted_slope, "-0.375 +- 0.1",
      std::abs(fit.fitted_slope + 0.375) <= 0.1);
  add(out, "fit samples", static_cast<double>(fit.samples), ">= 10", fit.samples >= 10);
  return out;
}

Checks virial() {
  Checks out;
  const Grid g(40.0, 1024);
  const CoefficientSet cs = admissible(g);
  const double R = 9.5;
  const VirialWeight w = make_weight(R, cs, g);
  const Trajectory traj = nlse_evolve(cs, gaussian(g), 2.8, stepper(1e-3, 10));
  const double horizon = 0.5 * traj.meta.wrap_time;
  add(out, "run end T=2.8 within t_wrap/2", horizon, ">= 2.8", 2.8 <= horizon);
  const VirialSeries s = virial_series(traj, w, cs);
  add(out, "|theta''_formula - theta''_fd|", s.max_second_error, "<= 1e-3", s.max_second_error <= 1e-3);
  const auto rep = virial_inequality_check(s, w, traj, cs);
  add(out, "min_t theta''(t) (virial functional rate)", rep.min_rate, "> 0", rep.min_rate > 0.0);

  const auto adm = verify_coefficient_bounds(w, cs);
  add(out, "C for admissible pair", adm.C, "> 0", adm.C > 0.0);
  const auto bad_cs = CoefficientSet::from_profiles(g, Profile::constant(1.0), Profile::constant(0.0),
                                                    {Profile::Kind::moment_gaussian, 0.0, 1.0, 1.0, 0.0}, 0.5, 0.3, 7.0);
  const auto bad = verify_coefficient_bounds(make_weight(R, bad_cs, g), bad_cs);
  add(out, "C for c = x^2 e^{-x^2}", bad.C, "<= 0", bad.C <= 0.0);
  return out;
}

Checks scattering() {
  Checks out;
  const Grid g(320.0, 2048);
  const CoefficientSet cs = admissible(g);
  const OperatorMatrix A = assemble(cs, g);
  const ExponentTable tab = admissible_pairs(7.0);
  const GridFunction u0 = gaussian(g, 1.0, 2.0);
  const StepperConfig cfg = stepper(1e-2, 100, Scheme::strang_gauge);
  // The Duhamel tail decays like T^{-2}; T = 80 still ends before wrap-around.
  const Trajectory traj = nlse_evolve(cs, u0, 80.0, cfg);
  const ScatteringReport rep = scattering_report(traj, A, {20.0, 40.0, 80.0}, tab, cfg);
  const double d0 = rep.cauchy_defects.front().defect, d1 = rep.cauchy_defects.back().defect;
  add(out, "Cauchy defect 20->40", d0, "", true);
  add(out, "Cauchy defect 40->80", d1, "< previous", rep.ladder_decreasing);
  const double frac = rep.final_distance / h1_norm(u0);
  add(out, "final H1 distance / |u0|_H1", frac, "<= 1e-3", frac <= 1e-3);
  add(out, "run within wrap time", rep.wrap_time, ">= 80", rep.wrap_time >= 80.0);

  const Grid gl(40.0, 512);
  const OperatorMatrix Al = assemble(admissible(gl), gl);
  const StepperConfig lc = stepper(1e-2, 50);
  const GridFunction v0 = gaussian(gl);
  const Trajectory lin = linear_flow(Al, v0, 2.0, lc);
  double worst = 0.0;
  for (double T : {0.5, 1.0, 2.0}) worst = std::max(worst, h1_norm(wave_operator_state(lin, Al, T, lc) - v0));
  add(out, "linear control |phi_+ - u0|_H1", worst, "<= 1e-9", worst <= 1e-9);
  return out;
}

std::vector<double> range(int lo, int hi) {
  std::vector<double> n;
  for (int k = lo; k <= hi; ++k) n.push_back(k);
  return n;
}

Checks profiles() {
  Checks out;
  const auto bump = [](const Grid& g, double amp) {
    return GridFunction::sample(g, [&](double x) { return cplx(amp * std::exp(-x * x)); });
  };
  {
    const Grid g(160.0, 1024);
    const OperatorMatrix F = assemble(CoefficientSet::free(g), g);
    ProfileSpec spec;
    spec.components.push_back({bump(g, 1.0), 0.0, 2.0});
    spec.components.push_back({bump(g, 0.8), 0.0, -2.0});
    const auto n = range(1, 12);
    const auto seq = synthesize_sequence(spec, n, F, 1);
    const auto dec = greedy_decompose(seq.elements, n, F, 4, 1e-3, ExtractionParams{});
    add(out, "two-profile J", static_cast<double>(dec.J()), "== 2", dec.J() == 2);
    double shift_err = INFINITY;
    if (dec.J() == 2) {
      const double lo = std::min(dec.profiles[0].x_hat, dec.profiles[1].x_hat);
      const double hi = std::max(dec.profiles[0].x_hat, dec.profiles[1].x_hat);
      shift_err = std::max(std::abs(lo + 24.0), std::abs(hi - 24.0));
    }
    add(out, "shift error at n=12 (h=" + std::to_string(g.spacing()) + ")", shift_err, "<= h",
        shift_err <= g.spacing() + 1e-12);
    const auto rep = orthogonality_report(dec, F, admissible_pairs(7.0));
    add(out, "mass Pythagorean residual", rep.rho_mass, "<= 0.05", rep.rho_mass <= 0.05);
  }
  const Grid g(80.0, 1024);
  const OperatorMatrix F = assemble(CoefficientSet::free(g), g);
  const auto n = range(1, 8);
  {
    ProfileSpec single;
    single.components.push_back({bump(g, 1.0), 0.5, 1.0});
    const auto seq = synthesize_sequence(single, n, F, 1);
    const auto dec = greedy_decompose(seq.elements, n, F, 4, 1e-3, ExtractionParams{});
    const auto rep = orthogonality_report(dec, F, admissible_pairs(7.0));
    const double worst = std::max({rep.rho_mass, rep.rho_form, rep.rho_Lr});
    add(out, "single-profile J", static_cast<double>(dec.J()), "== 1", dec.J() == 1);
    add(out, "single-profile residuals (mass, form, L^r)", worst, "<= 1e-6", worst <= 1e-6);
  }
  {
    std::vector<GridFunction> noise;
    for (std::uint64_t s = 0; s < n.size(); ++s) noise.push_back(1e-5 * random_band_limited(g, 40, s));
    const auto dec = greedy_decompose(noise, n, F, 4, 1e-3, ExtractionParams{});
    add(out, "pure-noise J", static_cast<double>(dec.J()), "== 0", dec.J() == 0);
  }
  return out;
}

struct MatrixRow {
  bool base, virial;
  double moment;
};

std::vector<MatrixRow> checker_matrix(Checks& out, std::uint64_t seed) {
  const Grid g(20.0, 1024);
  const auto make = [&](Profile a, Profile c, double delta) {
    return CoefficientSet::from_profiles(g, a, Profile::constant(0.0), c, 0.5, delta, 7.0);
  };
  std::vector<MatrixRow> rows;
  const auto row = [&](const std::string& name, const CoefficientSet& cs, bool want_base, bool want_virial) {
    const auto b = check_base_admissibility(cs, g);
    const auto v = check_virial_admissibility(cs, g);
    add(out, name + " base", b.passed, want_base ? "pass" : "fail", b.passed == want_base);
    add(out, name + " virial", v.passed, want_virial ? "pass" : "fail", v.passed == want_virial);
    rows.push_back({b.passed, v.passed, b.weighted_moment});
    return b;
  };
  const auto free = row("(1,0,0) delta=0.5", make(Profile::constant(1.0), Profile::constant(0.0), 0.5), true, true);
  add(out, "(1,0,0) weighted moment", free.weighted_moment, "== 0", free.weighted_moment == 0.0);
  row("a=1+e^{-x^2}/2, c=e^{-x^2}, delta=0.3", make(Profile::gaussian(1.0, 0.5), Profile::gaussian(0.0, 1.0), 0.3), true,
      true);
  const auto low = check_base_admissibility(make(Profile::gaussian(0.0, 1.0), Profile::constant(0.0), 0.3), g);
  const bool both = !low.passed && low.violates("a_floor") && low.violates("far_field");
  add(out, "a=e^{-x^2} fails with a_floor and far_field", both, "fail", both);
  rows.push_back({low.passed, false, low.weighted_moment});
  row("c=x^2 e^{-x^2}", make(Profile::constant(1.0), {Profile::Kind::moment_gaussian, 0.0, 1.0, 1.0, 0.0}, 0.3), true,
      false);

  const Grid fine(20.0, 65536);
  // The |a_xx| kink limits the rectangle rule to algebraic convergence.
  const auto adm = check_base_admissibility(CoefficientSet::from_profiles(fine, Profile::gaussian(1.0, 0.5),
                                                                          Profile::constant(0.0),
                                                                          Profile::gaussian(0.0, 1.0), 0.5, 0.3, 7.0),
                                            fine);
  const double oracle_moment = oracle::simpson(
      [](double x) {
        const double e = std::exp(-x * x);
        return (1.0 + x * x) * (e + x * x * e * e + std::abs((2.0 * x * x - 1.0) * e));
      },
      -20.0, 20.0, 400000);
  const double rel = std::abs(adm.weighted_moment / oracle_moment - 1.0);
  add(out, "weighted moment vs Simpson oracle (relative)", rel, "<= 1e-6", rel <= 1e-6);

  const std::vector<double> zero(g.size(), 0.0);
  const auto flat = check_reverse_holder(zero, 4.0, 3.0, g, 50, seed);
  add(out, "reverse Holder V=0 ratio - 1", flat.max_ratio - 1.0, "== 0 (1e-14)", std::abs(flat.max_ratio - 1.0) <= 1e-14);
  std::vector<double> v(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) v[j] = std::exp(-g.x(j) * g.x(j));
  const auto rh = check_reverse_holder(v, 4.0, 1.0, g, 200, seed);
  add(out, "reverse Holder V=e^{-x^2}, k=1, b/2=4 ratio", rh.max_ratio, "< 2", rh.max_ratio < 2.0);
  const auto ratio = [](double a, double b) {
    const double mq = oracle::simpson([](double x) { return std::pow(1.0 + std::exp(-x * x), 4); }, a, b, 200000) / (b - a);
    const double m1 = oracle::simpson([](double x) { return 1.0 + std::exp(-x * x); }, a, b, 200000) / (b - a);
    return std::pow(mq, 0.25) / m1;
  };
  const double rh_err = std::abs(rh.max_ratio / ratio(rh.worst_interval_left, rh.worst_interval_right) - 1.0);
  add(out, "reverse Holder ratio vs refined oracle (relative)", rh_err, "<= 1e-4", rh_err <= 1e-4);
  const auto big = check_reverse_holder(v, 4.0, 1e6, g, 200, seed);
  add(out, "reverse Holder k=1e6 ratio - 1", big.max_ratio - 1.0, "<= 1e-3", std::abs(big.max_ratio - 1.0) <= 1e-3);
  rows.push_back({rh.passed, big.passed, rh.max_ratio});
  return rows;
}

Checks admissibility_checkers() {
  Checks out, again;
  const auto first = checker_matrix(out, 17);
  const auto second = checker_matrix(again, 17);
  bool same = first.size() == second.size();
  for (std::size_t i = 0; same && i < first.size(); ++i)
    same = first[i].base == second[i].base && first[i].virial == second[i].virial && first[i].moment == second[i].moment;
  add(out, "matrix identical on rerun with the same seed", same, "== 1", same);
  return out;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "exponent algebra", 1.0, exponent_algebra},
      {2, "bootstrap lemma", 1.0, bootstrap_lemma},
      {3, "conservation", 60.0, conservation},
      {4, "transform pipeline", 10.0, transform_pipeline},
      {5, "dispersive decay", 60.0, dispersive_decay},
      {6, "virial", 120.0, virial},
      {7, "scattering consistency", 300.0, scattering},
      {8, "profile decomposition", 300.0, profiles},
      {9, "admissibility checkers", 5.0, admissibility_checkers},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Checks checks;
    std::string error;
    try {
      checks = c.body();
    } catch (const std::exception& e) {
      error = e.what();
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool ok = error.empty();
    for (const auto& k : checks) {
      std::printf("    [%s] %s = %.6g (%s)\n", k.ok ? "ok" : "FAIL", k.what.c_str(), k.value, k.bound.c_str());
      ok = ok && k.ok;
    }
    if (!error.empty()) std::printf("    [FAIL] exception: %s\n", error.c_str());
    const bool in_budget = elapsed < c.budget_s;
    std::printf("    [%s] runtime = %.2f s (< %g s)\n", in_budget ? "ok" : "FAIL", elapsed, c.budget_s);
    ok = ok && in_budget;
    std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", c.id, c.title.c_str());
    std::fflush(stdout);
    failed += ok ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
