#include "nlsvc/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "nlsvc/error.hpp"
#include "nlsvc/spectral.hpp"

namespace nlsvc {

double Profile::evaluate(double x, int order) const {
  require(order >= 0 && order <= 3, "profile derivative order must be 0..3");
  require(width > 0.0, "profile width must be positive");
  const double s = (x - center) / width;
  const double w1 = 1.0 / width;
  const double scale = order == 0 ? 1.0 : std::pow(w1, order);
  double shape = 0.0;
  switch (kind) {
    case Kind::constant:
      return order == 0 ? base : 0.0;
    case Kind::gaussian_bump: {
      const double g = std::exp(-s * s);
      const double poly[] = {1.0, -2.0 * s, 4.0 * s * s - 2.0, -8.0 * s * s * s + 12.0 * s};
      shape = poly[order] * g;
      break;
    }
    case Kind::rational_bump: {
      const double q = 1.0 + s * s;
      const double vals[] = {1.0 / q, -2.0 * s / (q * q), (6.0 * s * s - 2.0) / (q * q * q),
                             24.0 * s * (1.0 - s * s) / (q * q * q * q)};
      shape = vals[order];
      break;
    }
    case Kind::tanh_step: {
      const double t = std::tanh(s);
      const double sech2 = 1.0 - t * t;
      const double vals[] = {t, sech2, -2.0 * t * sech2, sech2 * (4.0 * t * t - 2.0 * sech2)};
      shape = vals[order];
      break;
    }
    case Kind::moment_gaussian: {
      const double g = std::exp(-s * s);
      const double s2 = s * s;
      const double vals[] = {s2, 2.0 * s - 2.0 * s * s2, 2.0 - 10.0 * s2 + 4.0 * s2 * s2,
                             -24.0 * s + 36.0 * s * s2 - 8.0 * s * s2 * s2};
      shape = vals[order] * g;
      break;
    }
  }
  return (order == 0 ? base : 0.0) + amp * scale * shape;
}

std::string Profile::kind_name() const {
  switch (kind) {
    case Kind::constant: return "constant";
    case Kind::gaussian_bump: return "gaussian_bump";
    case Kind::rational_bump: return "rational_bump";
    case Kind::tanh_step: return "tanh_step";
    case Kind::moment_gaussian: return "moment_gaussian";
  }
  return "unknown";
}

std::optional<Profile::Kind> profile_kind_from_name(std::string_view name) {
  if (name == "constant") return Profile::Kind::constant;
  if (name == "gaussian_bump" || name == "gaussian") return Profile::Kind::gaussian_bump;
  if (name == "rational_bump") return Profile::Kind::rational_bump;
  if (name == "tanh_step") return Profile::Kind::tanh_step;
  if (name == "moment_gaussian") return Profile::Kind::moment_gaussian;
  return std::nullopt;
}

namespace {

RealField spectral_derivative(const Grid& grid, const RealField& f, int order) {
  std::vector<cplx> v(f.begin(), f.end());
  GridFunction u(grid, std::move(v));
  GridFunction d = order == 1 ? derivative(u) : second_derivative(u);
  RealField out(f.size());
  for (std::size_t j = 0; j < f.size(); ++j) out[j] = d[j].real();
  return out;
}

void require_finite(const RealField& f, const char* what) {
  for (double v : f) {
    if (!std::isfinite(v)) throw ContractError(std::string(what) + " contains non-finite samples");
  }
}

}  // namespace

CoefficientField::CoefficientField(Grid grid, RealField v, RealField d1, RealField d2, std::optional<Profile> p)
    : grid_(std::move(grid)), values_(std::move(v)), d1_(std::move(d1)), d2_(std::move(d2)), profile_(p) {
  require_finite(values_, "coefficient field");
  if (!profile_) {
    auto interps = std::make_shared<std::vector<TrigInterpolant>>();
    interps->reserve(3);
    interps->emplace_back(grid_, std::span<const double>(values_));
    interps->emplace_back(grid_, std::span<const double>(d1_));
    interps->emplace_back(grid_, std::span<const double>(d2_));
    interpolants_ = std::move(interps);
  }
}

CoefficientField CoefficientField::from_profile(const Grid& grid, const Profile& profile) {
  RealField v(grid.size()), d1(grid.size()), d2(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    v[j] = profile.evaluate(grid.x(j), 0);
    d1[j] = profile.evaluate(grid.x(j), 1);
    d2[j] = profile.evaluate(grid.x(j), 2);
  }
  return CoefficientField(grid, std::move(v), std::move(d1), std::move(d2), profile);
}

CoefficientField CoefficientField::from_samples(const Grid& grid, RealField samples) {
  require(samples.size() == grid.size(), "coefficient samples do not match grid");
  require_finite(samples, "coefficient field");
  RealField d1 = spectral_derivative(grid, samples, 1);
  RealField d2 = spectral_derivative(grid, samples, 2);
  return CoefficientField(grid, std::move(samples), std::move(d1), std::move(d2), std::nullopt);
}

RealField CoefficientField::spectral_d1() const { return spectral_derivative(grid_, values_, 1); }
RealField CoefficientField::spectral_d2() const { return spectral_derivative(grid_, values_, 2); }

double CoefficientField::at(double x, int order) const {
  require(order >= 0 && order <= 2, "coefficient derivative order must be 0..2");
  if (profile_) return profile_->evaluate(x, order);
  return (*interpolants_)[static_cast<std::size_t>(order)](x).real();
}

bool CoefficientField::is_constant(double value, double tol) const {
  return std::all_of(values_.begin(), values_.end(), [&](double v) { return std::abs(v - value) <= tol; });
}

CoefficientField CoefficientField::rotated(long samples) const {
  std::optional<Profile> p = profile_;
  if (p) {
    // Closed forms are not periodic; keep the center inside the box.
    const double shift = static_cast<double>(samples) * grid_.spacing();
    double c = p->center + shift;
    const double period = grid_.length();
    c = std::remainder(c, period);
    p->center = c;
  }
  return CoefficientField(grid_, rotate(values_, samples), rotate(d1_, samples), rotate(d2_, samples), p);
}

CoefficientSet::CoefficientSet(Grid grid_, CoefficientField a_, CoefficientField b_, CoefficientField c_,
                               double a0_, double delta_, double beta_, std::string id_)
    : grid(std::move(grid_)),
      a(std::move(a_)),
      b(std::move(b_)),
      c(std::move(c_)),
      a0(a0_),
      delta(delta_),
      beta(beta_),
      id(std::move(id_)) {
  require(a.grid() == grid && b.grid() == grid && c.grid() == grid, "coefficient fields must share the grid");
  require(a0 > 0.0, "a0 must be positive");
  require(delta > 0.0 && delta <= 1.0, "delta must lie in (0, 1]");
  require(std::isfinite(beta) && beta > 1.0, "beta must be finite and > 1");
}

CoefficientSet CoefficientSet::free(const Grid& grid, double beta) {
  return from_profiles(grid, Profile::constant(1.0), Profile::constant(0.0), Profile::constant(0.0), 1.0, 1.0, beta,
                       "free");
}

CoefficientSet CoefficientSet::from_profiles(const Grid& grid, const Profile& a, const Profile& b, const Profile& c,
                                             double a0, double delta, double beta, std::string id) {
  return CoefficientSet(grid, CoefficientField::from_profile(grid, a), CoefficientField::from_profile(grid, b),
                        CoefficientField::from_profile(grid, c), a0, delta, beta, std::move(id));
}

double CoefficientSet::derivative_consistency() const {
  double worst = 0.0;
  for (const CoefficientField* f : {&a, &b, &c}) {
    if (!f->profile()) continue;
    const RealField s1 = f->spectral_d1();
    const RealField s2 = f->spectral_d2();
    for (std::size_t j = 0; j < s1.size(); ++j) {
      worst = std::max(worst, std::abs(s1[j] - f->d1()[j]));
      worst = std::max(worst, std::abs(s2[j] - f->d2()[j]));
    }
  }
  return worst;
}

const Violation* AdmissibilityReport::margin(const std::string& condition) const {
  for (const auto& m : margins) {
    if (m.condition == condition) return &m;
  }
  return nullptr;
}

bool AdmissibilityReport::violates(const std::string& condition) const {
  return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.condition == condition; });
}

namespace {

// Tracks the minimum of a margin field; negative minimum = violation.
struct MarginTracker {
  std::string condition;
  double worst = std::numeric_limits<double>::infinity();
  double where = 0.0;
  void update(double margin, double x) {
    if (margin < worst) {
      worst = margin;
      where = x;
    }
  }
  void commit(AdmissibilityReport& r, double tol = 0.0) const {
    r.margins.push_back({condition, where, worst});
    if (worst < -tol) r.violations.push_back({condition, where, worst});
  }
};

void finalize(AdmissibilityReport& r) { r.passed = r.violations.empty(); }

}  // namespace

AdmissibilityReport check_base_admissibility(const CoefficientSet& cs, const Grid& grid, double far_field_tol) {
  require(cs.grid == grid, "check_base_admissibility: coefficient grid mismatch");
  require(far_field_tol >= 0.0, "far-field tolerance must be nonnegative");
  AdmissibilityReport report;
  const RealField& a = cs.a.values();
  const RealField& ax = cs.a.d1();
  const RealField& axx = cs.a.d2();
  const RealField& c = cs.c.values();
  const double h = grid.spacing();
  const double band_edge = 0.95 * grid.half_length();

  MarginTracker floor{"a_floor"}, cpos{"c_nonnegative"}, far{"far_field"}, decay{"moment_decay"};
  double moment = 0.0;
  double peak = 0.0, edge_peak = 0.0, edge_x = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double x = grid.x(j);
    floor.update(a[j] - cs.a0, x);
    cpos.update(c[j], x);
    const double integrand = (1.0 + x * x) * (c[j] + ax[j] * ax[j] + std::abs(axx[j]));
    moment += h * integrand;
    peak = std::max(peak, std::abs(integrand));
    if (std::abs(x) >= band_edge) {
      far.update(far_field_tol - std::abs(a[j] - 1.0), x);
      if (std::abs(integrand) > edge_peak) {
        edge_peak = std::abs(integrand);
        edge_x = x;
      }
    }
  }
  decay.update(far_field_tol * std::max(1.0, peak) - edge_peak, edge_x);
  floor.commit(report);
  cpos.commit(report);
  far.commit(report);
  decay.commit(report);
  report.weighted_moment = moment;
  if (!std::isfinite(moment)) report.violations.push_back({"moment_finite", 0.0, moment});
  report.notes.push_back("finite-box certificate: conditions verified on the sampled box only");
  finalize(report);
  return report;
}

AdmissibilityReport check_virial_admissibility(const CoefficientSet& cs, const Grid& grid) {
  require(cs.grid == grid, "check_virial_admissibility: coefficient grid mismatch");
  AdmissibilityReport report;
  const RealField& a = cs.a.values();
  const RealField& ax = cs.a.d1();
  const RealField& cx = cs.c.d1();
  MarginTracker lower{"virial_lower"}, upper{"virial_upper"}, cmono{"virial_c"};
  double scale = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double x = grid.x(j);
    lower.update(x * ax[j] + (1.0 - cs.delta) * a[j], x);
    upper.update((1.2 - cs.delta) * a[j] - x * ax[j], x);
    cmono.update(-x * cx[j], x);
    scale = std::max(scale, std::abs(a[j]));
  }
  const double tol = 1e-12 * std::max(1.0, scale);
  lower.commit(report, tol);
  upper.commit(report, tol);
  cmono.commit(report, tol);
  report.notes.push_back("finite-box certificate: conditions verified on the sampled box only");
  finalize(report);
  return report;
}

AdmissibilityReport check_reverse_holder(std::span<const double> potential, double half_exponent, double k,
                                         const Grid& grid, std::size_t interval_samples, std::uint64_t seed,
                                         double ratio_bound) {
  const std::size_t n = grid.size();
  require(potential.size() == n, "check_reverse_holder: potential length mismatch");
  require(half_exponent > 1.0, "reverse Holder exponent b/2 must exceed 1");
  require(k > 0.0, "reverse Holder shift k must be positive");
  RealField f(n), fq(n);
  for (std::size_t j = 0; j < n; ++j) {
    f[j] = k + potential[j];
    if (!(f[j] > 0.0)) throw ContractError("reverse Holder check requires k + V > 0 on the grid");
    fq[j] = std::pow(f[j], half_exponent);
  }
  // Prefix sums over one period and a wrap so closed intervals [i, i+len] with
  // i + len <= n can be summed in O(1).
  std::vector<double> pf(n + 2, 0.0), pq(n + 2, 0.0);
  for (std::size_t j = 0; j <= n; ++j) {
    pf[j + 1] = pf[j] + f[j % n];
    pq[j + 1] = pq[j] + fq[j % n];
  }
  auto trapezoid_mean = [&](const std::vector<double>& prefix, const RealField& vals, std::size_t i, std::size_t len) {
    const double sum = prefix[i + len + 1] - prefix[i];
    const double ends = 0.5 * (vals[i % n] + vals[(i + len) % n]);
    return (sum - ends) / static_cast<double>(len);
  };

  AdmissibilityReport report;
  report.max_ratio = 0.0;
  auto visit = [&](std::size_t i, std::size_t len) {
    const double mean_f = trapezoid_mean(pf, f, i, len);
    const double mean_q = trapezoid_mean(pq, fq, i, len);
    const double ratio = std::pow(mean_q, 1.0 / half_exponent) / mean_f;
    ++report.intervals_checked;
    if (ratio > report.max_ratio) {
      report.max_ratio = ratio;
      report.worst_interval_left = grid.x(0) + static_cast<double>(i) * grid.spacing();
      report.worst_interval_right = report.worst_interval_left + static_cast<double>(len) * grid.spacing();
    }
  };
  for (std::size_t len = n; len >= 4; len /= 2) {
    for (std::size_t i = 0; i + len <= n; i += len) visit(i, len);
  }
  std::mt19937_64 rng(seed);
  for (std::size_t s = 0; s < interval_samples; ++s) {
    std::uniform_int_distribution<std::size_t> start(0, n - 4);
    const std::size_t i = start(rng);
    std::uniform_int_distribution<std::size_t> length(4, n - i);
    visit(i, length(rng));
  }
  MarginTracker bound{"reverse_holder"};
  bound.update(ratio_bound - report.max_ratio, report.worst_interval_left);
  bound.commit(report);
  finalize(report);
  return report;
}

}  // namespace nlsvc
