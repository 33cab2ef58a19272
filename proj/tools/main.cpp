#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "nlsvc_app/config.hpp"
#include "nlsvc_app/scenario.hpp"

namespace {

using nlsvc::app::Config;

struct Common {
  std::string config_path;
  std::optional<long long> seed;
  std::string out;
};

void add_common(CLI::App* sub, Common& c, bool config_required) {
  auto* opt = sub->add_option("config", c.config_path, "Scenario file (flat dotted keys or JSON)");
  if (config_required) opt->required();
  sub->add_option("--seed", c.seed, "Random seed");
  sub->add_option("--out", c.out, "Output directory");
}

Config load_config(const Common& c) {
  Config cfg = c.config_path.empty() ? Config() : Config::load(c.config_path);
  if (c.seed) cfg.set("seed", std::to_string(*c.seed));
  if (!c.out.empty()) cfg.set("out", c.out);
  return cfg;
}

int execute(Config cfg, const std::optional<std::string>& experiments) {
  try {
    if (experiments) cfg.set("experiments", *experiments);
    const nlsvc::app::Scenario scenario = nlsvc::app::parse_scenario(cfg);
    const nlsvc::app::RunResult result = nlsvc::app::run_scenario(scenario);
    for (const auto& [name, value] : result.summary["experiments"].items())
      std::cout << name << ": " << value.value("verdict", std::string("?")) << '\n';
    if (result.exit_code != 0)
      std::cerr << "experiment '" << result.summary.value("failed_experiment", std::string())
                << "' failed: " << result.summary.value("error", std::string()) << '\n';
    std::cout << "summary: " << (scenario.out / "summary.json").string() << '\n';
    return result.exit_code;
  } catch (const nlsvc::app::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scenario runner for variable-coefficient defocusing NLS experiments", "nlsvc"};
  app.set_version_flag("--version", std::string(NLSVC_VERSION));
  app.require_subcommand(1);

  Common run_c, coeff_c, exp_c, boot_c, sim_c, vir_c, scat_c, prof_c;
  double beta = 7.0, eta = 0.21, K = 1.0, gamma = 2.0;

  auto* run = app.add_subcommand("run", "Run every experiment listed in a scenario");
  add_common(run, run_c, true);
  auto* coeffs = app.add_subcommand("check-coeffs", "Admissibility checks of the scenario coefficients");
  add_common(coeffs, coeff_c, false);
  auto* expo = app.add_subcommand("exponents", "Exponent table and Holder identities");
  add_common(expo, exp_c, false);
  expo->add_option("--beta", beta, "Nonlinearity power (> 5)")->required();
  auto* boot = app.add_subcommand("bootstrap", "Roots of x = eta + K x^gamma");
  add_common(boot, boot_c, false);
  boot->add_option("--eta", eta, "Constant term")->required();
  boot->add_option("--K", K, "Coefficient (>= 1)");
  boot->add_option("--gamma", gamma, "Power (> 1)");
  auto* sim = app.add_subcommand("simulate", "Nonlinear run with conservation ledger");
  add_common(sim, sim_c, false);
  auto* vir = app.add_subcommand("virial", "Virial series and coefficient bounds");
  add_common(vir, vir_c, false);
  auto* scat = app.add_subcommand("scatter", "Wave-operator Cauchy ladder");
  add_common(scat, scat_c, false);
  auto* prof = app.add_subcommand("profiles", "Synthetic profile decomposition");
  add_common(prof, prof_c, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*run) return execute(load_config(run_c), std::nullopt);
    if (*coeffs) return execute(load_config(coeff_c), "checks");
    if (*expo) {
      Config cfg = load_config(exp_c);
      cfg.set("beta", std::to_string(beta));
      return execute(cfg, "exponents");
    }
    if (*boot) {
      Config cfg = load_config(boot_c);
      cfg.set("bootstrap.eta", std::to_string(eta));
      cfg.set("bootstrap.K", std::to_string(K));
      cfg.set("bootstrap.gamma", std::to_string(gamma));
      return execute(cfg, "bootstrap");
    }
    if (*sim) return execute(load_config(sim_c), "conserve");
    if (*vir) return execute(load_config(vir_c), "virial");
    if (*scat) return execute(load_config(scat_c), "scatter");
    return execute(load_config(prof_c), "profiles");
  } catch (const nlsvc::app::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  }
}
