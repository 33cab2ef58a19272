#include "nlsvc/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nlsvc/error.hpp"
#include "nlsvc/spectral.hpp"
#include "nlsvc/virial.hpp"

namespace nlsvc {

namespace {

double l2_sq(const GridFunction& u) {
  const double n = l2_norm(u);
  return n * n;
}

double lr_power(const GridFunction& u, double r) {
  double s = 0.0;
  for (const auto& z : u.values()) s += std::pow(std::abs(z), r);
  return s * u.grid().spacing();
}

RealField smooth_window(const Grid& g, double W) {
  RealField w(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) w[j] = cutoff_jet(g.x(j) / W)[0];
  return w;
}

/// Signed sample shift in [-N/2, N/2).
long wrap_shift(long m, long n) {
  m %= n;
  if (m < 0) m += n;
  if (m >= n / 2) m -= n;
  return m;
}

/// States e^{-i t_k A} v for t_k = k dt_scan, k = -K..K (index k + K).
std::vector<GridFunction> time_scan(const GridFunction& v, const LinearPropagator& flow, double dt_scan,
                                    std::size_t K) {
  std::vector<GridFunction> out(2 * K + 1, v);
  for (std::size_t k = 1; k <= K; ++k) {
    out[K + k] = flow(out[K + k - 1], dt_scan);
    out[K - k] = flow(out[K - k + 1], -dt_scan);
  }
  return out;
}

struct Match {
  double t = 0.0;
  long shift = 0;
  double value = -1.0;
};

/// Maximizes |(e^{-itA} v, tau_x psi)| over the time scan and all grid shifts.
Match best_match(const GridFunction& v, const GridFunction& psi, const LinearPropagator& flow, double dt_scan,
                 std::size_t K) {
  const auto psi_hat = dft(psi.values());
  const auto states = time_scan(v, flow, dt_scan, K);
  const auto n = static_cast<long>(v.size());
  Match best;
  std::vector<cplx> prod(v.size());
  // Visit t = 0 first so ties resolve toward the unshifted time.
  std::vector<std::size_t> order{K};
  for (std::size_t k = 1; k <= K; ++k) {
    order.push_back(K - k);
    order.push_back(K + k);
  }
  for (std::size_t idx : order) {
    const auto w = dft(states[idx].values());
    for (std::size_t k = 0; k < w.size(); ++k) prod[k] = w[k] * std::conj(psi_hat[k]);
    const auto corr = idft(prod);
    for (long m = 0; m < n; ++m) {
      const double c = std::abs(corr[static_cast<std::size_t>(m)]);
      if (c > best.value * (1.0 + 1e-12)) {
        best.value = c;
        best.shift = wrap_shift(m, n);
        best.t = (static_cast<double>(idx) - static_cast<double>(K)) * dt_scan;
      }
    }
  }
  return best;
}

}  // namespace

SyntheticSequence synthesize_sequence(const ProfileSpec& spec, const std::vector<double>& n_values,
                                      const OperatorMatrix& op, std::uint64_t seed, double flow_dt) {
  require(!n_values.empty(), "sequence needs at least one index");
  require(spec.noise_amplitude >= 0.0, "noise amplitude must be nonnegative");
  const Grid& g = op.grid();
  for (const auto& c : spec.components) require(c.psi.grid() == g, "profiles must live on the operator grid");
  const LinearPropagator flow(op, flow_dt);
  SyntheticSequence seq;
  seq.n_values = n_values;
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    const double n = n_values[i];
    GridFunction u(g);
    std::vector<double> ts, xs;
    for (const auto& c : spec.components) {
      const long m = g.shift_in_samples(c.x_rate * n);
      GridFunction piece = translate(c.psi, m);
      // Translation is periodic, so a shift past the half box wraps silently.
      if (std::abs(c.x_rate * n) >= g.half_length() || edge_mass_fraction(piece, 0.1) > 1e-6) {
        std::ostringstream os;
        os << "profile shifted by " << c.x_rate * n << " leaves the box interior";
        throw ContractError(os.str());
      }
      const double t = c.t_rate * n;
      if (t != 0.0) piece = flow(piece, -t);
      u += piece;
      ts.push_back(t);
      xs.push_back(static_cast<double>(m) * g.spacing());
    }
    if (spec.noise_amplitude > 0.0) {
      GridFunction noise = random_band_limited(g, spec.noise_modes, seed + i);
      noise *= cplx(spec.noise_amplitude / h1_norm(noise));
      u += noise;
    }
    seq.elements.push_back(std::move(u));
    seq.t_shifts.push_back(std::move(ts));
    seq.x_shifts.push_back(std::move(xs));
  }
  return seq;
}

Concentration find_concentration(const GridFunction& v, const OperatorMatrix& op, const ConcentrationParams& params) {
  require(params.t_samples >= 16, "concentration scan needs at least 16 time samples");
  require(params.T_window > 0.0 && params.R_freq > 0.0, "window and frequency cutoff must be positive");
  require(v.grid() == op.grid(), "state and operator must share a grid");
  Concentration c;
  c.dt_scan = params.T_window / static_cast<double>(params.t_samples);
  // A field at the noise floor carries no concentration (and no meaningful wrap time).
  if (linf_norm(v) <= params.noise_floor) {
    c.witness = linf_norm(v);
    return c;
  }
  require(params.T_window < wrap_time(v), "concentration window must end before the wrap-around time");
  const LinearPropagator flow(op, params.flow_dt);
  const auto states = time_scan(v, flow, c.dt_scan, params.t_samples);
  const std::size_t K = params.t_samples;
  std::vector<std::size_t> order{K};
  for (std::size_t k = 1; k <= K; ++k) {
    order.push_back(K - k);
    order.push_back(K + k);
  }
  const Grid& g = v.grid();
  double best = -1.0;
  for (std::size_t idx : order) {
    const GridFunction low = project_low(states[idx], params.R_freq);
    for (std::size_t j = 0; j < low.size(); ++j) {
      const double a = std::abs(low[j]);
      if (a > best * (1.0 + 1e-12)) {
        best = a;
        c.t_star = (static_cast<double>(idx) - static_cast<double>(K)) * c.dt_scan;
        c.x_samples = static_cast<long>(j) - static_cast<long>(g.origin_index());
        c.x_star = g.x(j);
      }
    }
  }
  c.witness = std::max(best, 0.0);
  c.found = c.witness > params.noise_floor;
  return c;
}

Decomposition greedy_decompose(const std::vector<GridFunction>& seq, const std::vector<double>& n_values,
                               const OperatorMatrix& op, std::size_t J_max, double stop_threshold,
                               const ExtractionParams& params) {
  require(!seq.empty(), "sequence must be nonempty");
  require(seq.size() == n_values.size(), "one index per sequence element");
  require(stop_threshold > 0.0, "stop threshold must be positive");
  require(params.window > 0.0, "profile window must be positive");
  require(params.tail_fraction > 0.0 && params.tail_fraction <= 1.0, "tail fraction must lie in (0, 1]");
  for (const auto& u : seq) require(u.grid() == op.grid(), "sequence and operator must share a grid");

  const Grid& g = op.grid();
  const LinearPropagator flow(op, params.scan.flow_dt);
  const RealField window = smooth_window(g, params.window);
  const double dt_scan = params.scan.T_window / static_cast<double>(params.scan.t_samples);
  const std::size_t K = params.scan.t_samples;
  const std::size_t count = seq.size();
  const auto tail = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(params.tail_fraction * static_cast<double>(count))));

  Decomposition dec;
  dec.n_values = n_values;
  dec.inputs = seq;
  dec.remainders = seq;

  for (std::size_t j = 0;; ++j) {
    const GridFunction& last = dec.remainders.back();
    if (linf_norm(last) > params.scan.noise_floor && wrap_time(last) <= params.scan.T_window) {
      dec.witnesses.push_back(linf_norm(last));
      dec.stop_reason = "remainder spectrum too broad to scan before wrap-around";
      break;
    }
    const Concentration conc = find_concentration(last, op, params.scan);
    dec.witnesses.push_back(conc.witness);
    if (!conc.found || conc.witness < stop_threshold) {
      dec.stop_reason = "witness below stop threshold";
      break;
    }
    if (j >= J_max) {
      dec.stop_reason = "J_max reached";
      break;
    }
    GridFunction psi0 = translate(flow(dec.remainders.back(), conc.t_star), -conc.x_samples);
    psi0.multiply(window);

    std::vector<Match> matches(count);
    for (std::size_t i = 0; i < count; ++i) matches[i] = best_match(dec.remainders[i], psi0, flow, dt_scan, K);

    GridFunction psi_hat(g);
    for (std::size_t i = count - tail; i < count; ++i) {
      GridFunction w = translate(flow(dec.remainders[i], matches[i].t), -matches[i].shift);
      w.multiply(window);
      psi_hat += w;
    }
    psi_hat *= cplx(1.0 / static_cast<double>(tail));

    std::vector<GridFunction> pieces;
    std::vector<GridFunction> next;
    bool diverged = false;
    for (std::size_t i = 0; i < count && !diverged; ++i) {
      GridFunction piece = flow(translate(psi_hat, matches[i].shift), -matches[i].t);
      GridFunction r = dec.remainders[i] - piece;
      const double before = l2_norm(dec.remainders[i]);
      if (l2_norm(r) > before * (1.0 + 1e-9) + 1e-14) {
        std::ostringstream os;
        os << "subtracting profile " << j + 1 << " increases the remainder of element " << i << " (n = " << n_values[i]
           << ") from " << before << " to " << l2_norm(r);
        dec.aborted = true;
        dec.abort_reason = os.str();
        diverged = true;
      }
      pieces.push_back(std::move(piece));
      next.push_back(std::move(r));
    }
    if (diverged) {
      dec.stop_reason = "divergent subtraction";
      break;
    }

    ExtractedProfile prof(psi_hat);
    prof.t_hat = conc.t_star;
    prof.x_hat = static_cast<double>(conc.x_samples) * g.spacing();
    prof.witness = conc.witness;
    prof.dt_scan = dt_scan;
    for (const auto& m : matches) {
      prof.t_n.push_back(m.t);
      prof.x_n.push_back(static_cast<double>(m.shift) * g.spacing());
    }
    dec.profiles.push_back(std::move(prof));
    dec.pieces.push_back(std::move(pieces));
    dec.remainders = std::move(next);
  }
  return dec;
}

OrthogonalityReport orthogonality_report(const Decomposition& dec, const OperatorMatrix& op, const ExponentTable& tab,
                                         double tolerance) {
  require(!dec.inputs.empty(), "decomposition must be nonempty");
  OrthogonalityReport rep;
  rep.tolerance = tolerance;
  rep.r = tab.r;
  rep.index = static_cast<std::size_t>(
      std::max_element(dec.n_values.begin(), dec.n_values.end()) - dec.n_values.begin());
  rep.n = dec.n_values[rep.index];
  const std::size_t i = rep.index;
  const GridFunction& u = dec.inputs[i];
  const GridFunction& rem = dec.remainders[i];

  double mass = l2_sq(rem), form = op.quadratic_form(rem), lr = lr_power(rem, tab.r);
  for (const auto& pj : dec.pieces) {
    mass += l2_sq(pj[i]);
    form += op.quadratic_form(pj[i]);
    lr += lr_power(pj[i], tab.r);
  }
  auto rel = [](double total, double parts) { return total != 0.0 ? std::abs(total - parts) / std::abs(total) : 0.0; };
  const double um = l2_sq(u);
  rep.rho_mass = rel(um, mass);
  rep.rho_form = rel(op.quadratic_form(u), form);
  rep.rho_Lr = rel(lr_power(u, tab.r), lr);

  double profile_mass = 0.0;
  for (const auto& pj : dec.pieces) profile_mass += l2_sq(pj[i]);
  rep.mass_superadditive = um >= profile_mass - 1e-6 * std::max(um, 1.0);

  for (std::size_t k = 0; k < dec.inputs.size(); ++k) {
    GridFunction sum = dec.remainders[k];
    for (const auto& pj : dec.pieces) sum += pj[k];
    const double nu = l2_norm(dec.inputs[k]);
    const double e = l2_norm(dec.inputs[k] - sum);
    rep.reconstruction_error = std::max(rep.reconstruction_error, nu > 0.0 ? e / nu : e);
  }

  const std::size_t J = dec.J();
  rep.separation.assign(J, std::vector<double>(J, 0.0));
  for (std::size_t a = 0; a < J; ++a)
    for (std::size_t b = 0; b < J; ++b)
      rep.separation[a][b] = std::abs(dec.profiles[a].t_n[i] - dec.profiles[b].t_n[i]) +
                             std::abs(dec.profiles[a].x_n[i] - dec.profiles[b].x_n[i]);
  if (J >= 2) {
    std::vector<std::size_t> order(dec.inputs.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::sort(order.begin(), order.end(), [&](auto x, auto y) { return dec.n_values[x] < dec.n_values[y]; });
    for (std::size_t k : order) {
      double m = std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < J; ++a)
        for (std::size_t b = a + 1; b < J; ++b)
          m = std::min(m, std::abs(dec.profiles[a].t_n[k] - dec.profiles[b].t_n[k]) +
                              std::abs(dec.profiles[a].x_n[k] - dec.profiles[b].x_n[k]));
      rep.min_separation.push_back(m);
    }
    rep.separation_diverging =
        rep.min_separation.size() >= 2 && rep.min_separation.back() >= 2.0 * rep.min_separation.front() &&
        rep.min_separation.back() > rep.min_separation.front();
  }
  rep.flagged = rep.rho_mass > tolerance || rep.rho_form > tolerance || rep.rho_Lr > tolerance;
  return rep;
}

LinfBound linf_two_term_bound(const GridFunction& v, double R) {
  require(R > 0.0, "frequency cutoff must be positive");
  LinfBound b;
  b.linf = linf_norm(v);
  b.high_term = std::sqrt(2.0 / R) * h1_norm(v);
  const GridFunction low = project_low(v, R);
  std::size_t jm = 0;
  for (std::size_t j = 0; j < low.size(); ++j)
    if (std::abs(low[j]) > std::abs(low[jm])) jm = j;
  b.low_term = std::abs(low[jm]);
  // Discrete Dirichlet kernel K(y) = (1/N) sum_{|xi_k| <= R} e^{i xi_k y} paired with v.
  const Grid& g = v.grid();
  const auto n = static_cast<double>(g.size());
  cplx acc = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double y = g.x(jm) - g.x(j);
    cplx k = 0.0;
    for (std::size_t q = 0; q < g.size(); ++q)
      if (std::abs(g.frequency(q)) <= R) k += std::polar(1.0, g.frequency(q) * y);
    acc += k / n * v[j];
  }
  b.kernel_term = std::abs(acc);
  b.holds = b.linf <= (b.high_term + b.low_term) * (1.0 + 1e-12);
  return b;
}

}  // namespace nlsvc
