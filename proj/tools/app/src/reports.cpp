#include "nlsvc_app/reports.hpp"

namespace nlsvc {

using nlohmann::json;

void to_json(json& j, const Violation& v) { j = {{"condition", v.condition}, {"x", v.x}, {"margin", v.margin}}; }

void to_json(json& j, const AdmissibilityReport& r) {
  j = {{"passed", r.passed},
       {"violations", r.violations},
       {"margins", r.margins},
       {"weighted_moment", r.weighted_moment},
       {"max_ratio", r.max_ratio},
       {"worst_interval", {r.worst_interval_left, r.worst_interval_right}},
       {"intervals_checked", r.intervals_checked},
       {"notes", r.notes}};
}

void to_json(json& j, const EquivalenceConstants& e) {
  j = {{"lower", e.lower}, {"upper", e.upper}, {"degenerate", e.degenerate}};
}

void to_json(json& j, const ExponentTable& t) {
  j = {{"beta", t.beta},     {"p", t.p},           {"r", t.r},
       {"a", t.a_exp},       {"b", t.b_exp},       {"p_conj", t.p_conj},
       {"r_conj", t.r_conj}, {"delta", t.delta_exp}};
}

void to_json(json& j, const IdentityCheck& c) {
  j = {{"name", c.name}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"residual", c.residual}, {"exact", c.exact}, {"passed", c.passed}};
}

void to_json(json& j, const HolderReport& r) {
  j = {{"beta", r.beta},
       {"checks", r.checks},
       {"uncorrected_residual", r.uncorrected_residual},
       {"passed", r.passed},
       {"notes", r.notes}};
}

void to_json(json& j, const BootstrapResult& r) {
  j = {{"eta", r.eta},
       {"K", r.K},
       {"gamma", r.gamma},
       {"eta_bar", r.eta_bar},
       {"x0", r.x0},
       {"root_count", r.root_count()},
       {"double_root", r.double_root},
       {"bound_holds", r.bound_holds()}};
  j["x_gamma"] = r.x_gamma ? json(*r.x_gamma) : json(nullptr);
  j["x_gamma_prime"] = r.x_gamma_prime ? json(*r.x_gamma_prime) : json(nullptr);
}

void to_json(json& j, const AsymptoticsReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"eta", row.eta}, {"x_gamma", row.x_gamma}, {"ratio", row.ratio}, {"ratio_bound", row.ratio_bound}});
  j = {{"rows", rows},
       {"monotone", r.monotone},
       {"within_bounds", r.within_bounds},
       {"bound_holds", r.bound_holds},
       {"passed", r.passed()}};
}

void to_json(json& j, const TrajectoryMeta& m) {
  j = {{"scheme", to_string(m.scheme)},
       {"dt", m.dt},
       {"record_stride", m.record_stride},
       {"coefficient_id", m.coefficient_id},
       {"nonlinear", m.nonlinear},
       {"aborted", m.aborted},
       {"abort_reason", m.abort_reason},
       {"absorbed_mass", m.absorbed_mass},
       {"wrap_time", m.wrap_time},
       {"max_edge_fraction", m.max_edge_fraction},
       {"solver_iterations", m.solver_iterations},
       {"warnings", m.warnings}};
}

void to_json(json& j, const ConservationReport& r) {
  j = {{"mass_drift", r.mass_drift},
       {"energy_drift", r.energy_drift},
       {"full_energy_drift", r.full_energy_drift},
       {"mass_tolerance", r.mass_tolerance},
       {"energy_tolerance", r.energy_tolerance},
       {"mass_flagged", r.mass_flagged},
       {"energy_flagged", r.energy_flagged},
       {"passed", r.passed()}};
}

void to_json(json& j, const DecayFit& f) {
  j = {{"p", f.p_exponent},
       {"window", {f.window.t_min, f.window.t_max}},
       {"fitted_slope", f.fitted_slope},
       {"target_slope", f.target_slope},
       {"residual", f.residual},
       {"fit_rms", f.fit_rms},
       {"samples", f.samples},
       {"wrap_time", f.wrap_time}};
}

void to_json(json& j, const ScatteringReport& r) {
  json ladder = json::array();
  for (const auto& e : r.cauchy_defects) ladder.push_back({{"t1", e.t1}, {"t2", e.t2}, {"defect", e.defect}});
  j = {{"cauchy_defects", ladder},
       {"final_distance", r.final_distance},
       {"initial_h1", r.initial_h1},
       {"spacetime_norm", r.spacetime_norm_lpLr},
       {"ladder_decreasing", r.ladder_decreasing},
       {"ladder_halving", r.ladder_halving},
       {"wrap_time", r.wrap_time},
       {"verdict", to_string(r.verdict)}};
}

void to_json(json& j, const ThresholdScan& s) {
  json rows = json::array();
  for (const auto& r : s.rows)
    rows.push_back({{"epsilon", r.epsilon},
                    {"spacetime_norm", r.spacetime_norm},
                    {"norm_over_epsilon", r.norm_over_epsilon},
                    {"final_distance", r.final_distance},
                    {"aborted", r.aborted}});
  j = {{"rows", rows},
       {"linear_norm", s.linear_norm},
       {"small_limit_consistent", s.small_limit_consistent},
       {"monotone", s.monotone},
       {"flags", s.flags}};
}

void to_json(json& j, const CoefficientBoundReport& r) {
  j = {{"C", r.C},
       {"C_prime", r.C_prime},
       {"R", r.R},
       {"passed", r.passed},
       {"min_I", r.min_I},
       {"min_II_scaled", r.min_II_scaled},
       {"min_III", r.min_III},
       {"worst_x", r.worst_x},
       {"worst_field", r.worst_field}};
}

void to_json(json& j, const VirialInequalityReport& r) {
  j = {{"min_rate", r.min_rate},
       {"rate_positive", r.rate_positive},
       {"min_kappa", r.min_kappa},
       {"rate_integral", r.rate_integral},
       {"z_loc_integral", r.z_loc_integral},
       {"sup_theta_prime", r.sup_theta_prime},
       {"theta_prime_bound", r.theta_prime_bound},
       {"theta_prime_bounded", r.theta_prime_bounded},
       {"kappa2", r.kappa2},
       {"z_ratio", {r.z_ratio_min, r.z_ratio_max}},
       {"z_comparable", r.z_comparable}};
}

void to_json(json& j, const Decomposition& d) {
  json profiles = json::array();
  for (const auto& p : d.profiles)
    profiles.push_back({{"t_hat", p.t_hat},
                        {"x_hat", p.x_hat},
                        {"t_error_bar", p.dt_scan},
                        {"witness", p.witness},
                        {"mass", l2_norm(p.psi_hat)},
                        {"t_n", p.t_n},
                        {"x_n", p.x_n}});
  j = {{"J", d.J()},
       {"n_values", d.n_values},
       {"profiles", profiles},
       {"witnesses", d.witnesses},
       {"stop_reason", d.stop_reason},
       {"aborted", d.aborted},
       {"abort_reason", d.abort_reason}};
}

void to_json(json& j, const OrthogonalityReport& r) {
  j = {{"n", r.n},
       {"rho_mass", r.rho_mass},
       {"rho_form", r.rho_form},
       {"rho_Lr", r.rho_Lr},
       {"r", r.r},
       {"separation", r.separation},
       {"min_separation", r.min_separation},
       {"separation_diverging", r.separation_diverging},
       {"mass_superadditive", r.mass_superadditive},
       {"reconstruction_error", r.reconstruction_error},
       {"flagged", r.flagged},
       {"tolerance", r.tolerance}};
}

}  // namespace nlsvc
