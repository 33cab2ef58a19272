#include "nlsvc/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>

#include "nlsvc/error.hpp"

namespace nlsvc {
namespace {

// Plan creation in FFTW is not thread safe; execution with the new-array
// interface is. Plans live for the process lifetime.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(std::size_t n, int sign) {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(n, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<cplx> a(n), b(n);
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(a.data()),
                                      reinterpret_cast<fftw_complex*>(b.data()), sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan == nullptr) throw NumericalError("FFTW plan creation failed");
    plans_.emplace(key, plan);
    return plan;
  }

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

void execute(std::span<const cplx> in, std::span<cplx> out, int sign) {
  require(in.size() == out.size(), "dft: size mismatch");
  fftw_plan plan = PlanCache::instance().get(in.size(), sign);
  if (in.data() == out.data()) {
    std::vector<cplx> tmp(in.begin(), in.end());
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(tmp.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
  } else {
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in.data())),
                     reinterpret_cast<fftw_complex*>(out.data()));
  }
}

constexpr std::size_t kBatchThreshold = 64;
constexpr std::size_t kOversample = 16;
constexpr std::size_t kStencil = 16;

}  // namespace

void dft(std::span<const cplx> in, std::span<cplx> out) { execute(in, out, FFTW_FORWARD); }

void idft(std::span<const cplx> in, std::span<cplx> out) {
  execute(in, out, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(out.size());
  for (auto& z : out) z *= scale;
}

std::vector<cplx> dft(std::span<const cplx> in) {
  std::vector<cplx> out(in.size());
  dft(in, out);
  return out;
}

std::vector<cplx> idft(std::span<const cplx> in) {
  std::vector<cplx> out(in.size());
  idft(in, out);
  return out;
}

GridFunction apply_symbol(const GridFunction& u, std::span<const cplx> symbol) {
  require(symbol.size() == u.size(), "apply_symbol: symbol length mismatch");
  std::vector<cplx> hat = dft(u.values());
  for (std::size_t k = 0; k < hat.size(); ++k) hat[k] *= symbol[k];
  idft(hat, hat);
  return GridFunction(u.grid(), std::move(hat));
}

RealField antiderivative(const Grid& grid, std::span<const double> f, double x_ref) {
  const std::size_t n = grid.size();
  require(f.size() == n, "antiderivative: field length mismatch");
  std::vector<cplx> hat(n);
  for (std::size_t j = 0; j < n; ++j) hat[j] = f[j];
  dft(hat, hat);
  const double mean = hat[0].real() / static_cast<double>(n);
  hat[0] = 0.0;
  hat[grid.nyquist_index()] = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    if (k == grid.nyquist_index()) continue;
    hat[k] /= cplx(0.0, grid.frequency(k));
  }
  std::vector<cplx> periodic = idft(hat);
  // A grid-node reference uses the sample itself so F(x_ref) = 0 exactly.
  const long node = std::lround((x_ref - grid.x(0)) / grid.spacing());
  const bool on_grid = node >= 0 && node < static_cast<long>(n) && grid.x(static_cast<std::size_t>(node)) == x_ref;
  const double p_ref = on_grid ? periodic[static_cast<std::size_t>(node)].real()
                               : TrigInterpolant(grid, std::span<const cplx>(periodic))(x_ref).real();
  RealField out(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = mean * (grid.x(j) - x_ref) + periodic[j].real() - p_ref;
  if (on_grid) out[static_cast<std::size_t>(node)] = 0.0;
  return out;
}

TrigInterpolant::TrigInterpolant(const Grid& grid, std::span<const cplx> values) : grid_(grid) {
  const std::size_t n = grid.size();
  require(values.size() == n, "TrigInterpolant: length mismatch");
  std::vector<cplx> hat = dft(values);
  coefficients_.assign(n + 1, cplx(0.0));
  const long half = static_cast<long>(n / 2);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (long k = -half + 1; k < half; ++k) {
    const std::size_t idx = static_cast<std::size_t>((k + static_cast<long>(n)) % static_cast<long>(n));
    coefficients_[static_cast<std::size_t>(k + half)] = hat[idx] * inv_n;
  }
  const cplx nyq = hat[n / 2] * (0.5 * inv_n);
  coefficients_.front() = nyq;
  coefficients_.back() = nyq;
}

TrigInterpolant::TrigInterpolant(const Grid& grid, std::span<const double> values)
    : TrigInterpolant(grid, [&] {
        std::vector<cplx> c(values.begin(), values.end());
        return c;
      }()) {}

cplx TrigInterpolant::eval(double x, bool deriv) const {
  const std::size_t n = grid_.size();
  const long half = static_cast<long>(n / 2);
  const double dxi = 2.0 * M_PI / grid_.length();
  const double s = x + grid_.half_length();
  const cplx step = std::polar(1.0, dxi * s);
  cplx sum = 0.0;
  cplx w;
  constexpr long kReseed = 32;
  for (long m = 0; m <= 2 * half; ++m) {
    const long k = m - half;
    if (m % kReseed == 0) w = std::polar(1.0, dxi * static_cast<double>(k) * s);
    cplx term = coefficients_[static_cast<std::size_t>(m)] * w;
    if (deriv) term *= cplx(0.0, dxi * static_cast<double>(k));
    sum += term;
    w *= step;
  }
  return sum;
}

cplx TrigInterpolant::operator()(double x) const { return eval(x, false); }
cplx TrigInterpolant::derivative(double x) const { return eval(x, true); }

std::vector<cplx> TrigInterpolant::evaluate(std::span<const double> xs) const {
  std::vector<cplx> out(xs.size());
  const std::size_t n = grid_.size();
  if (xs.size() < kBatchThreshold || n < kBatchThreshold) {
    std::transform(xs.begin(), xs.end(), out.begin(), [this](double x) { return eval(x, false); });
    return out;
  }
  // Fine samples s_m = m L / (M n) of the interpolant, s = x + L/2.
  const std::size_t fine = kOversample * n;
  const long half = static_cast<long>(n / 2);
  std::vector<cplx> spec(fine, cplx(0.0));
  for (long m = 0; m <= 2 * half; ++m) {
    const long k = m - half;
    spec[static_cast<std::size_t>((k + static_cast<long>(fine)) % static_cast<long>(fine))] +=
        coefficients_[static_cast<std::size_t>(m)];
  }
  execute(spec, spec, FFTW_BACKWARD);

  // Barycentric weights (-1)^j C(q-1, j) for q equispaced nodes.
  std::array<double, kStencil> w{};
  w[0] = 1.0;
  for (std::size_t j = 1; j < kStencil; ++j)
    w[j] = -w[j - 1] * static_cast<double>(kStencil - j) / static_cast<double>(j);

  const double inv_h = static_cast<double>(fine) / grid_.length();
  const long nf = static_cast<long>(fine);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = (xs[i] + grid_.half_length()) * inv_h;
    const long base = static_cast<long>(std::floor(r)) - static_cast<long>(kStencil / 2 - 1);
    const double t = r - static_cast<double>(base);
    cplx num = 0.0;
    double den = 0.0;
    bool exact = false;
    for (std::size_t j = 0; j < kStencil; ++j) {
      const cplx f = spec[static_cast<std::size_t>(((base + static_cast<long>(j)) % nf + nf) % nf)];
      const double d = t - static_cast<double>(j);
      if (d == 0.0) {
        out[i] = f;
        exact = true;
        break;
      }
      num += (w[j] / d) * f;
      den += w[j] / d;
    }
    if (!exact) out[i] = num / den;
  }
  return out;
}

}  // namespace nlsvc
