#include "nlsvc_app/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "nlsvc/diagnostics.hpp"
#include "nlsvc/error.hpp"
#include "nlsvc/exponents.hpp"
#include "nlsvc/io.hpp"
#include "nlsvc/operator.hpp"
#include "nlsvc/profiles.hpp"
#include "nlsvc/virial.hpp"
#include "nlsvc_app/reports.hpp"

namespace nlsvc::app {

using nlohmann::json;

const std::vector<std::string>& known_experiments() {
  static const std::vector<std::string> names{"conserve", "decay",   "strichartz", "scatter", "smalldata",
                                              "virial",   "profiles", "checks",     "bootstrap", "exponents"};
  return names;
}

CoefficientSet Scenario::coefficients() const {
  const Grid g = grid();
  return CoefficientSet::from_profiles(g, a, b, c, a0.value_or(0.5), delta, beta, "scenario");
}

GridFunction make_datum(const DatumSpec& d, const Grid& grid) {
  auto gaussian = [&](double x, double center) {
    const double s = (x - center) / d.width;
    return d.amp * std::exp(-0.5 * s * s);
  };
  return GridFunction::sample(grid, [&](double x) {
    double mag = 0.0;
    if (d.kind == "gaussian") {
      mag = gaussian(x, d.center);
    } else if (d.kind == "bump") {
      const double s = (x - d.center) / d.width;
      mag = std::abs(s) < 1.0 ? d.amp * std::exp(1.0 - 1.0 / (1.0 - s * s)) : 0.0;
    } else {
      mag = gaussian(x, d.center - 0.5 * d.separation) + gaussian(x, d.center + 0.5 * d.separation);
    }
    return mag * std::polar(1.0, d.velocity * x);
  });
}

namespace {

bool is_multiple(double t, double step) {
  const double q = t / step;
  return std::abs(q - std::round(q)) <= 1e-9 * std::max(1.0, std::abs(q));
}

Profile read_profile(const Config& cfg, const std::string& prefix, const Profile& fallback) {
  Profile p = fallback;
  const std::string kind = cfg.get_string(prefix + ".kind", p.kind_name());
  const auto k = profile_kind_from_name(kind);
  if (!k) throw ConfigError("key '" + prefix + ".kind': unknown coefficient profile '" + kind + "'");
  p.kind = *k;
  p.base = cfg.get_double(prefix + ".base", p.base);
  p.amp = cfg.get_double(prefix + ".amp", p.amp);
  p.width = cfg.get_double(prefix + ".width", p.width);
  p.center = cfg.get_double(prefix + ".center", p.center);
  if (!(p.width > 0.0)) throw ConfigError("key '" + prefix + ".width' must be positive");
  return p;
}

std::size_t to_count(const std::string& key, long long v, long long min_value) {
  if (v < min_value) throw ConfigError("key '" + key + "' must be at least " + std::to_string(min_value));
  return static_cast<std::size_t>(v);
}

void check(bool condition, const std::string& message) {
  if (!condition) throw ConfigError(message);
}

bool wants(const Scenario& s, const std::string& name) {
  return std::find(s.experiments.begin(), s.experiments.end(), name) != s.experiments.end();
}

}  // namespace

Scenario parse_scenario(const Config& cfg) {
  Scenario s;
  s.seed = static_cast<std::uint64_t>(to_count("seed", cfg.get_int("seed", 0), 0));
  s.out = cfg.get_string("out", s.out.string());
  s.L = cfg.get_double("grid.L", s.L);
  s.N = to_count("grid.N", cfg.get_int("grid.N", static_cast<long long>(s.N)), 8);
  check(s.L > 0.0, "key 'grid.L' must be positive");
  check((s.N & (s.N - 1)) == 0, "key 'grid.N' must be a power of two");

  s.beta = cfg.get_double("beta", s.beta);
  check(s.beta > 5.0 && std::isfinite(s.beta), "key 'beta': the nonlinearity power must satisfy beta > 5");
  s.delta = cfg.get_double("delta", s.delta);
  check(s.delta > 0.0 && s.delta <= 1.0, "key 'delta' must lie in (0, 1]");
  s.c0 = cfg.get_double("c0", s.c0);
  check(s.c0 > 0.0, "key 'c0' must be positive");
  s.a0 = cfg.get_optional_double("a0");
  if (s.a0) check(*s.a0 > 0.0, "key 'a0' must be positive");

  s.a = read_profile(cfg, "coefficients.a", s.a);
  s.b = read_profile(cfg, "coefficients.b", s.b);
  s.c = read_profile(cfg, "coefficients.c", s.c);

  s.datum.kind = cfg.get_string("datum.kind", s.datum.kind);
  check(s.datum.kind == "gaussian" || s.datum.kind == "bump" || s.datum.kind == "two_bump",
        "key 'datum.kind': unknown datum '" + s.datum.kind + "' (gaussian, bump, two_bump)");
  s.datum.amp = cfg.get_double("datum.amp", s.datum.amp);
  s.datum.width = cfg.get_double("datum.width", s.datum.width);
  s.datum.center = cfg.get_double("datum.center", s.datum.center);
  s.datum.velocity = cfg.get_double("datum.velocity", s.datum.velocity);
  s.datum.separation = cfg.get_double("datum.separation", s.datum.separation);
  check(s.datum.width > 0.0, "key 'datum.width' must be positive");

  const std::string scheme = cfg.get_string("stepper.scheme", to_string(s.stepper.scheme));
  const auto sch = scheme_from_name(scheme);
  check(sch.has_value(), "key 'stepper.scheme': unknown scheme '" + scheme + "'");
  s.stepper.scheme = *sch;
  s.stepper.dt = cfg.get_double("stepper.dt", s.stepper.dt);
  check(s.stepper.dt > 0.0, "key 'stepper.dt' must be positive");
  s.stepper.record_stride =
      to_count("stepper.record_stride", cfg.get_int("stepper.record_stride", static_cast<long long>(s.stepper.record_stride)), 1);
  const std::string disc = cfg.get_string("stepper.discretization", "spectral");
  if (disc == "spectral") {
    s.stepper.discretization = Discretization::spectral;
  } else if (disc == "finite_difference") {
    s.stepper.discretization = Discretization::finite_difference;
  } else {
    throw ConfigError("key 'stepper.discretization': expected spectral or finite_difference");
  }
  s.stepper.solver_tol = cfg.get_double("stepper.solver_tol", s.stepper.solver_tol);
  s.stepper.max_iterations =
      to_count("stepper.max_iterations", cfg.get_int("stepper.max_iterations", static_cast<long long>(s.stepper.max_iterations)), 1);
  s.stepper.edge_mass_threshold = cfg.get_double("stepper.edge_mass_threshold", s.stepper.edge_mass_threshold);
  if (cfg.get_bool("stepper.sponge.enabled", false)) {
    SpongeConfig sp;
    sp.width_fraction = cfg.get_double("stepper.sponge.width", sp.width_fraction);
    sp.strength = cfg.get_double("stepper.sponge.strength", sp.strength);
    check(sp.width_fraction > 0.0 && sp.width_fraction < 0.5, "key 'stepper.sponge.width' must lie in (0, 0.5)");
    check(sp.strength >= 0.0, "key 'stepper.sponge.strength' must be nonnegative");
    s.stepper.sponge = sp;
  }
  s.stepper.c0 = s.c0;

  s.T = cfg.get_double("run.T", s.T);
  s.write_trajectory = cfg.get_bool("run.write_trajectory", false);
  const double record = s.stepper.dt * static_cast<double>(s.stepper.record_stride);
  check(s.T > 0.0 && is_multiple(s.T, record), "key 'run.T' must be a positive multiple of stepper.dt * record_stride");

  s.experiments = cfg.get_strings("experiments", {"conserve"});
  check(!s.experiments.empty(), "key 'experiments' must list at least one experiment");
  for (const auto& e : s.experiments)
    check(std::find(known_experiments().begin(), known_experiments().end(), e) != known_experiments().end(),
          "key 'experiments': unknown experiment '" + e + "'");

  s.mass_tol = cfg.get_double("conserve.mass_tol", s.mass_tol);
  s.energy_tol = cfg.get_double("conserve.energy_tol", s.energy_tol);
  s.decay_p = cfg.get_double("decay.p", s.decay_p);
  s.decay_t_min = cfg.get_double("decay.t_min", s.decay_t_min);
  s.decay_t_max = cfg.get_optional_double("decay.t_max");
  s.decay_tolerance = cfg.get_double("decay.tolerance", s.decay_tolerance);
  s.strichartz_horizon = cfg.get_double("strichartz.horizon", s.strichartz_horizon);
  s.scatter_ladder = cfg.get_doubles("scatter.ladder", {s.T / 4.0, s.T / 2.0, s.T});
  s.scatter_distance_fraction = cfg.get_double("scatter.distance_fraction", s.scatter_distance_fraction);
  s.smalldata_epsilons = cfg.get_doubles("smalldata.epsilons", s.smalldata_epsilons);
  s.virial_R = cfg.get_double("virial.R", s.virial_R);

  auto& pp = s.profiles;
  pp.n_min = static_cast<int>(to_count("profiles.n_min", cfg.get_int("profiles.n_min", pp.n_min), 1));
  pp.n_max = static_cast<int>(to_count("profiles.n_max", cfg.get_int("profiles.n_max", pp.n_max), 1));
  pp.separation_rate = cfg.get_double("profiles.separation_rate", pp.separation_rate);
  pp.t_rate = cfg.get_double("profiles.t_rate", pp.t_rate);
  pp.second_amp = cfg.get_double("profiles.second_amp", pp.second_amp);
  pp.noise = cfg.get_double("profiles.noise", pp.noise);
  pp.J_max = to_count("profiles.J_max", cfg.get_int("profiles.J_max", static_cast<long long>(pp.J_max)), 1);
  pp.stop_threshold = cfg.get_double("profiles.stop_threshold", pp.stop_threshold);
  pp.window = cfg.get_double("profiles.window", pp.window);
  pp.T_window = cfg.get_double("profiles.T_window", pp.T_window);
  pp.R_freq = cfg.get_double("profiles.R_freq", pp.R_freq);
  pp.t_samples = to_count("profiles.t_samples", cfg.get_int("profiles.t_samples", static_cast<long long>(pp.t_samples)), 16);

  s.holder_k = cfg.get_double("checks.reverse_holder.k", s.holder_k);
  s.holder_half_exponent = cfg.get_optional_double("checks.reverse_holder.half_exponent");
  s.holder_samples = to_count("checks.reverse_holder.samples",
                              cfg.get_int("checks.reverse_holder.samples", static_cast<long long>(s.holder_samples)), 0);
  s.far_field_tol = cfg.get_double("checks.far_field_tol", s.far_field_tol);
  s.bootstrap_eta = cfg.get_double("bootstrap.eta", s.bootstrap_eta);
  s.bootstrap_K = cfg.get_double("bootstrap.K", s.bootstrap_K);
  s.bootstrap_gamma = cfg.get_double("bootstrap.gamma", s.bootstrap_gamma);
  s.bootstrap_tol = cfg.get_double("bootstrap.tol", s.bootstrap_tol);

  const auto unused = cfg.unused_keys();
  if (!unused.empty()) {
    std::string list;
    for (const auto& k : unused) list += (list.empty() ? "" : ", ") + k;
    throw ConfigError("unknown configuration keys: " + list);
  }

  // Fail-fast preconditions of every requested experiment.
  if (wants(s, "decay")) {
    check(s.decay_p > 2.0 && std::isfinite(s.decay_p), "key 'decay.p' must satisfy 2 < p < infinity");
    check(s.decay_t_min > 0.0, "key 'decay.t_min' must be positive");
    if (s.decay_t_max) check(*s.decay_t_max >= 10.0 * s.decay_t_min, "decay window must span at least one decade");
    check(s.decay_tolerance > 0.0, "key 'decay.tolerance' must be positive");
  }
  if (wants(s, "strichartz"))
    check(s.strichartz_horizon > 0.0 && is_multiple(s.strichartz_horizon, record),
          "key 'strichartz.horizon' must be a positive multiple of the record interval");
  if (wants(s, "scatter")) {
    check(!s.scatter_ladder.empty(), "key 'scatter.ladder' must not be empty");
    for (std::size_t i = 0; i < s.scatter_ladder.size(); ++i) {
      const double t = s.scatter_ladder[i];
      check(t > 0.0 && t <= s.T + 1e-12 && is_multiple(t, record),
            "scatter ladder times must be record times in (0, run.T]");
      if (i > 0) check(t > s.scatter_ladder[i - 1], "scatter ladder must be increasing");
    }
    check(s.scatter_distance_fraction > 0.0, "key 'scatter.distance_fraction' must be positive");
  }
  if (wants(s, "smalldata")) {
    check(!s.smalldata_epsilons.empty(), "key 'smalldata.epsilons' must not be empty");
    for (double e : s.smalldata_epsilons) check(e > 0.0, "small-data amplitudes must be positive");
  }
  if (wants(s, "virial")) {
    check(s.virial_R > 1.0 && 2.0 * s.virial_R < s.L, "key 'virial.R' must satisfy 1 < R < L/2");
    check(s.b.kind == Profile::Kind::constant && s.b.base == 0.0, "virial experiment requires b = 0");
  }
  if (wants(s, "profiles")) {
    check(pp.n_max >= pp.n_min, "profiles.n_max must be at least profiles.n_min");
    check(pp.noise >= 0.0, "key 'profiles.noise' must be nonnegative");
    check(std::abs(pp.separation_rate) * pp.n_max + 4.0 * s.datum.width < 0.9 * s.L,
          "profiles leave the box interior at n_max");
  }
  if (wants(s, "checks")) {
    check(s.holder_k > 0.0, "key 'checks.reverse_holder.k' must be positive");
    if (s.holder_half_exponent) check(*s.holder_half_exponent > 1.0, "reverse Holder half exponent must exceed 1");
  }
  if (wants(s, "bootstrap"))
    check(s.bootstrap_eta >= 0.0 && s.bootstrap_K >= 1.0 && s.bootstrap_gamma > 1.0,
          "bootstrap requires eta >= 0, K >= 1 and gamma > 1");
  return s;
}

namespace {

void write_rows(const std::filesystem::path& path, const std::string& header,
                const std::vector<std::vector<double>>& rows) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  os << header << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_number(row[i]);
    os << '\n';
  }
}

class Runner {
 public:
  explicit Runner(const Scenario& s)
      : s_(s),
        grid_(s.grid()),
        cs_(s.coefficients()),
        op_(assemble(cs_, grid_, s.stepper.discretization)),
        u0_(make_datum(s.datum, grid_)),
        tab_(admissible_pairs(s.beta)) {}

  json run(const std::string& name, std::vector<std::string>& artifacts) {
    artifacts_ = &artifacts;
    if (name == "conserve") return conserve();
    if (name == "decay") return decay();
    if (name == "strichartz") return strichartz();
    if (name == "scatter") return scatter();
    if (name == "smalldata") return smalldata();
    if (name == "virial") return virial();
    if (name == "profiles") return profiles();
    if (name == "checks") return checks();
    if (name == "bootstrap") return bootstrap();
    return exponents();
  }

 private:
  std::filesystem::path artifact(const std::string& file) {
    artifacts_->push_back(file);
    return s_.out / file;
  }

  const Trajectory& trajectory() {
    if (!traj_) {
      traj_ = nlse_evolve(cs_, u0_, s_.T, s_.stepper);
      if (s_.write_trajectory) write_trajectory_csv(artifact("trajectory.csv"), *traj_);
      write_ledger_csv(artifact("ledger.csv"), *traj_);
    }
    return *traj_;
  }

  json conserve() {
    const Trajectory& traj = trajectory();
    const ConservationReport r = conservation_report(traj, s_.mass_tol, s_.energy_tol);
    return {{"verdict", r.passed() && !traj.meta.aborted ? "pass" : "fail"}, {"report", r}, {"meta", traj.meta}};
  }

  json decay() {
    const double tw = wrap_time(u0_);
    const double t_max = s_.decay_t_max.value_or(0.5 * tw);
    if (t_max < 10.0 * s_.decay_t_min)
      throw ContractError("decay window [t_min, t_wrap/2] spans less than a decade; enlarge the box");
    const double step = s_.stepper.dt * static_cast<double>(s_.stepper.record_stride);
    const double t_final = std::ceil(t_max / step - 1e-9) * step;
    const Trajectory traj = linear_flow(op_, u0_, t_final, s_.stepper);
    const DecayFit fit = decay_fit(traj, s_.decay_p, {s_.decay_t_min, t_max});
    Series norms;
    for (std::size_t k = 0; k < traj.size(); ++k) {
      norms.t.push_back(traj.times[k]);
      norms.value.push_back(lq_norm(traj.states[k], s_.decay_p));
    }
    write_series_csv(artifact("decay.csv"), norms);
    return {{"verdict", fit.residual <= s_.decay_tolerance ? "pass" : "fail"},
            {"fit", fit},
            {"tolerance", s_.decay_tolerance},
            {"meta", traj.meta}};
  }

  json strichartz() {
    std::vector<GridFunction> data{u0_};
    for (std::uint64_t i = 0; i < 4; ++i) data.push_back(random_band_limited(grid_, 16, s_.seed + i));
    const double q = strichartz_quotient(op_, data, tab_, s_.strichartz_horizon, s_.stepper);
    return {{"verdict", std::isfinite(q) ? "bounded" : "unbounded"},
            {"quotient", q},
            {"p", tab_.p},
            {"r", tab_.r},
            {"horizon", s_.strichartz_horizon},
            {"data", data.size()}};
  }

  json scatter() {
    const Trajectory& traj = trajectory();
    const ScatteringReport r = scattering_report(traj, op_, s_.scatter_ladder, tab_, s_.stepper,
                                                 s_.scatter_distance_fraction);
    write_series_csv(artifact("scatter_distance.csv"), r.distances);
    write_grid_function_csv(artifact("phi_plus.csv"), r.phi_plus);
    return {{"verdict", to_string(r.verdict)}, {"report", r}, {"meta", traj.meta}};
  }

  json smalldata() {
    const ThresholdScan scan = smalldata_threshold_scan(cs_, u0_, s_.smalldata_epsilons, tab_, s_.T, s_.stepper);
    std::vector<std::vector<double>> rows;
    for (const auto& r : scan.rows)
      rows.push_back({r.epsilon, r.spacetime_norm, r.norm_over_epsilon, r.final_distance, r.aborted ? 1.0 : 0.0});
    write_rows(artifact("smalldata.csv"), "epsilon,spacetime_norm,norm_over_epsilon,final_distance,aborted", rows);
    return {{"verdict", scan.small_limit_consistent ? "consistent" : "inconclusive"}, {"scan", scan}};
  }

  json virial() {
    const VirialWeight w = make_weight(s_.virial_R, cs_, grid_);
    const CoefficientBoundReport bounds = verify_coefficient_bounds(w, cs_);
    const Trajectory& traj = trajectory();
    const VirialSeries series = virial_series(traj, w, cs_);
    const VirialInequalityReport ineq = virial_inequality_check(series, w, traj, cs_);
    write_virial_csv(artifact("virial.csv"), series);
    const bool ok = bounds.passed && ineq.rate_positive && ineq.theta_prime_bounded;
    return {{"verdict", ok ? "pass" : "fail"},
            {"coefficient_bounds", bounds},
            {"inequality", ineq},
            {"max_prime_error", series.max_prime_error},
            {"max_second_error", series.max_second_error},
            {"meta", traj.meta}};
  }

  json profiles() {
    const auto& pp = s_.profiles;
    DatumSpec centered = s_.datum;
    centered.center = 0.0;
    centered.velocity = 0.0;
    centered.kind = "gaussian";
    const GridFunction psi = make_datum(centered, grid_);
    ProfileSpec spec;
    spec.components.push_back({psi, 0.0, -pp.separation_rate});
    if (pp.second_amp > 0.0) spec.components.push_back({pp.second_amp * psi, pp.t_rate, pp.separation_rate});
    spec.noise_amplitude = pp.noise;
    std::vector<double> ns;
    for (int n = pp.n_min; n <= pp.n_max; ++n) ns.push_back(n);
    ExtractionParams params;
    params.scan.T_window = pp.T_window;
    params.scan.R_freq = pp.R_freq;
    params.scan.t_samples = pp.t_samples;
    params.window = pp.window;
    const SyntheticSequence seq = synthesize_sequence(spec, ns, op_, s_.seed, params.scan.flow_dt);
    const Decomposition dec = greedy_decompose(seq.elements, ns, op_, pp.J_max, pp.stop_threshold, params);
    std::vector<std::vector<double>> rows;
    for (std::size_t j = 0; j < dec.profiles.size(); ++j) {
      const auto& p = dec.profiles[j];
      for (std::size_t i = 0; i < p.t_n.size(); ++i)
        rows.push_back({static_cast<double>(j), ns[i], p.t_n[i], p.x_n[i]});
    }
    write_rows(artifact("profiles.csv"), "profile,n,t,x", rows);
    json out{{"J", dec.J()}, {"decomposition", dec}};
    if (dec.J() > 0) {
      const OrthogonalityReport orth = orthogonality_report(dec, op_, tab_);
      out["orthogonality"] = orth;
      out["verdict"] = orth.flagged || dec.aborted ? "flagged" : "pass";
    } else {
      out["verdict"] = dec.aborted ? "flagged" : "pass";
    }
    return out;
  }

  json checks() {
    const AdmissibilityReport base = check_base_admissibility(cs_, grid_, s_.far_field_tol);
    const AdmissibilityReport vir = check_virial_admissibility(cs_, grid_);
    const double half = s_.holder_half_exponent.value_or(0.5 * tab_.b_exp);
    const AdmissibilityReport holder =
        check_reverse_holder(cs_.c.values(), half, s_.holder_k, grid_, s_.holder_samples, s_.seed);
    const EquivalenceConstants eq = equivalence_constants(op_, s_.c0, 100, s_.seed);
    const bool ok = base.passed && vir.passed && holder.passed;
    return {{"verdict", ok ? "pass" : "fail"},
            {"base", base},
            {"virial", vir},
            {"reverse_holder", holder},
            {"reverse_holder_half_exponent", half},
            {"equivalence", eq},
            {"derivative_consistency", cs_.derivative_consistency()}};
  }

  json bootstrap() {
    const BootstrapResult r = bootstrap_roots(s_.bootstrap_eta, s_.bootstrap_K, s_.bootstrap_gamma, s_.bootstrap_tol);
    std::vector<double> etas;
    for (int k = 1; k <= 10; ++k) etas.push_back(r.eta_bar * std::pow(0.5, k));
    const AsymptoticsReport asym = bootstrap_asymptotics(s_.bootstrap_K, s_.bootstrap_gamma, etas);
    std::vector<std::vector<double>> rows;
    for (const auto& row : asym.rows) rows.push_back({row.eta, row.x_gamma, row.ratio, row.ratio_bound});
    write_rows(artifact("bootstrap_asymptotics.csv"), "eta,x_gamma,ratio,ratio_bound", rows);
    const bool ok = r.bound_holds() && asym.passed();
    return {{"verdict", ok ? "pass" : "fail"}, {"roots", r}, {"asymptotics", asym}};
  }

  json exponents() {
    const HolderReport approx = verify_holder_identities(tab_);
    const HolderReport exact = verify_holder_identities(exact_pairs(to_rational(s_.beta)));
    return {{"verdict", approx.passed && exact.passed ? "pass" : "fail"},
            {"table", tab_},
            {"floating", approx},
            {"rational", exact}};
  }

  const Scenario& s_;
  Grid grid_;
  CoefficientSet cs_;
  OperatorMatrix op_;
  GridFunction u0_;
  ExponentTable tab_;
  std::optional<Trajectory> traj_;
  std::vector<std::string>* artifacts_ = nullptr;
};

void write_summary(const std::filesystem::path& out, const json& summary) {
  std::ofstream os(out / "summary.json");
  if (!os) throw std::runtime_error("cannot write " + (out / "summary.json").string());
  os << summary.dump(2) << '\n';
}

}  // namespace

RunResult run_scenario(const Scenario& scenario) {
  std::filesystem::create_directories(scenario.out);
  std::filesystem::remove(scenario.out / "FAILED");
  RunResult result;
  json& summary = result.summary;
  summary["seed"] = scenario.seed;
  summary["grid"] = {{"L", scenario.L}, {"N", scenario.N}};
  summary["beta"] = scenario.beta;
  summary["scheme"] = to_string(scenario.stepper.scheme);
  summary["dt"] = scenario.stepper.dt;
  summary["T"] = scenario.T;
  summary["experiments"] = json::object();
  std::vector<std::string> artifacts;
  std::optional<Runner> runner;
  std::string current = "setup";
  try {
    runner.emplace(scenario);
    for (const auto& name : scenario.experiments) {
      current = name;
      summary["experiments"][name] = runner->run(name, artifacts);
    }
    summary["status"] = "ok";
  } catch (const std::exception& e) {
    summary["status"] = "failed";
    summary["failed_experiment"] = current;
    summary["error"] = e.what();
    std::ofstream(scenario.out / "FAILED") << current << ": " << e.what() << '\n';
    result.exit_code = 1;
  }
  summary["artifacts"] = artifacts;
  write_summary(scenario.out, summary);
  return result;
}

}  // namespace nlsvc::app
