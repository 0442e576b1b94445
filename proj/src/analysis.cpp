#include "fcc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <string>
#include <thread>

#include "fcc/exp_kernels.hpp"

namespace fcc {

namespace {

// Conjugation by D = diag(1, -1): flips the sign of the off-diagonal entries.
Mat2 reflect(const Mat2& m) { return {m.m11(), -m.m12(), -m.m21(), m.m22()}; }

Vec2 centered_forcing(const CircuitParams& p) { return {0.5 * p.Vdc / p.L, 0.0}; }

Vec2 uncenter(const Vec2& y, const CircuitParams& p) { return {y.first, y.second + 0.5 * p.Vdc}; }

constexpr double kSpectralTieBand = 1e-12;

// ---------------------------------------------------------------------------
// Adaptive Simpson for a small vector of integrands sharing one evaluation.

template <std::size_t N>
using Values = std::array<double, N>;

template <std::size_t N>
Values<N> axpy(double s, const Values<N>& x, const Values<N>& y) {
  Values<N> r;
  for (std::size_t c = 0; c < N; ++c) r[c] = s * x[c] + y[c];
  return r;
}

template <std::size_t N>
Values<N> simpson(double width, const Values<N>& fa, const Values<N>& fm, const Values<N>& fb) {
  Values<N> r;
  for (std::size_t c = 0; c < N; ++c) r[c] = width / 6.0 * (fa[c] + 4.0 * fm[c] + fb[c]);
  return r;
}

template <std::size_t N>
struct SimpsonRefiner {
  std::function<Values<N>(double)> f;
  Values<N> scale;
  double tol_per_width;

  Values<N> refine(double a, double b, const Values<N>& fa, const Values<N>& fm, const Values<N>& fb,
                   const Values<N>& whole, int depth) const {
    const double m = 0.5 * (a + b);
    const Values<N> flm = f(0.5 * (a + m));
    const Values<N> frm = f(0.5 * (m + b));
    const Values<N> left = simpson<N>(m - a, fa, flm, fm);
    const Values<N> right = simpson<N>(b - m, fm, frm, fb);
    Values<N> sum;
    bool converged = true;
    for (std::size_t c = 0; c < N; ++c) {
      sum[c] = left[c] + right[c];
      const double diff = sum[c] - whole[c];
      if (std::abs(diff) > 15.0 * tol_per_width * (b - a) * scale[c]) converged = false;
    }
    if (converged || depth >= 40) {
      Values<N> out;
      for (std::size_t c = 0; c < N; ++c) out[c] = sum[c] + (sum[c] - whole[c]) / 15.0;
      return out;
    }
    const Values<N> l = refine(a, m, fa, flm, fm, left, depth + 1);
    const Values<N> r = refine(m, b, fm, frm, fb, right, depth + 1);
    return axpy<N>(1.0, l, r);
  }
};

// Composite Simpson on `panels` uniform panels of [a, b].
template <std::size_t N>
Values<N> composite_simpson(const std::function<Values<N>(double)>& f, double a, double b, int panels) {
  const double w = (b - a) / panels;
  Values<N> total{};
  Values<N> fa = f(a);
  for (int k = 0; k < panels; ++k) {
    const double x0 = a + k * w;
    const double x1 = k + 1 == panels ? b : a + (k + 1) * w;
    const Values<N> fm = f(0.5 * (x0 + x1));
    const Values<N> fb = f(x1);
    total = axpy<N>(1.0, simpson<N>(x1 - x0, fa, fm, fb), total);
    fa = fb;
  }
  return total;
}

// Each of `panels` uniform panels is bisected until its Richardson estimate
// is below rel_tol * scale (apportioned by width).
template <std::size_t N>
Values<N> adaptive_simpson(const std::function<Values<N>(double)>& f, double a, double b, int panels,
                           const Values<N>& scale, double rel_tol) {
  const SimpsonRefiner<N> refiner{f, scale, rel_tol / (b - a)};
  const double w = (b - a) / panels;
  Values<N> total{};
  Values<N> fa = f(a);
  for (int k = 0; k < panels; ++k) {
    const double x0 = a + k * w;
    const double x1 = k + 1 == panels ? b : a + (k + 1) * w;
    const Values<N> fm = f(0.5 * (x0 + x1));
    const Values<N> fb = f(x1);
    const Values<N> whole = simpson<N>(x1 - x0, fa, fm, fb);
    total = axpy<N>(1.0, refiner.refine(x0, x1, fa, fm, fb, whole, 0), total);
    fa = fb;
  }
  return total;
}

double relative_gap(double x, double y, double scale) {
  const double diff = std::abs(x - y);
  if (diff == 0.0) return 0.0;
  return diff / scale;
}

}  // namespace

// ---------------------------------------------------------------------------

HalfFlow first_half_flow(const CircuitParams& p, double t) {
  const double a = t * p.R / p.L;
  const double b = t / p.L;
  const double c = t / p.C;
  const double q = b * c;
  const ExpKernels k = exp_kernels(a, q);
  return {
      Mat2{1.0 - a * k.d1 - q * k.d2, -b * k.d1, c * k.d1, 1.0 - q * k.d2},
      t * Mat2{k.d1, -b * k.d2, c * k.d2, k.d1 + a * k.d2},
      (t * t) * Mat2{k.d2, -b * k.d3, c * k.d3, k.d2 + a * k.d3},
  };
}

HalfFlow second_half_flow(const CircuitParams& p, double t) {
  const HalfFlow first = first_half_flow(p, t);
  return {reflect(first.transition), reflect(first.forcing), reflect(first.forcing2)};
}

Mat2 monodromy(const SwitchedSystem& sys) {
  const double h = sys.half_period;
  return expm_closed(h * sys.A2) * expm_closed(h * sys.A1);
}

Mat2 forcing_matrix(const SwitchedSystem& sys) {
  const double h = sys.half_period;
  const Mat2 e1 = expm_closed(h * sys.A1);
  return expm_closed(h * sys.A2) * inverse(sys.A1) * (e1 - Mat2::identity());
}

CharPoly2 alpha_beta_closed(const ReducedParams& rp) {
  // e^{-a/2} S = exp[l1, l2] for the roots of l^2 + a l + bc, so
  // e^{-a} a^2 S^2 = (a * exp[l1, l2])^2 and the overflow of cosh(d) for
  // large d never materializes.
  const double a = rp.a;
  const double scaled = a * exp_first_divided_difference(a, rp.b * rp.c);
  return {-2.0 * std::exp(-a) - scaled * scaled, std::exp(-2.0 * a)};
}

StabilityReport stability(const SwitchedSystem& sys) {
  const ReducedParams rp = reduced_params(sys.params);
  StabilityReport r;

  const CharPoly2 closed = alpha_beta_closed(rp);
  r.alpha = closed.alpha;
  r.beta = closed.beta;

  // 1 - |beta| and 1 + beta - |alpha| (alpha < 0). The latter is p(1), which
  // factors as (1 - e^{-a} - a S')(1 - e^{-a} + a S') with S' = exp[l1, l2];
  // the first factor is a * gap and is formed without cancellation.
  const double a = rp.a;
  const ExpKernels k = exp_kernels(a, rp.b * rp.c);
  r.jury_margin_beta = -std::expm1(-2.0 * a);
  r.jury_margin_alpha = (a * k.gap) * (-std::expm1(-a) + a * k.d1);

  const Mat2 m = monodromy(sys);
  const CharPoly2 numeric = charpoly(m);
  r.numeric_alpha = numeric.alpha;
  r.numeric_beta = numeric.beta;
  // Eigenvalues from the entries: tau/2 +- sqrt(delta) with
  // delta = ((m11 - m22)/2)^2 + m12 m21, which does not cancel when M is
  // close to the identity the way (tau/2)^2 - det does.
  const double half = 0.5 * (m.m11() + m.m22());
  const double half_gap = 0.5 * (m.m11() - m.m22());
  const double delta = half_gap * half_gap + m.m12() * m.m21();
  if (delta >= 0.0) {
    const double root = std::sqrt(delta);
    const double big = half + std::copysign(root, half);
    const double other = big != 0.0 ? numeric.beta / big : half - root;
    r.eig_real = {big, other};
    r.eig_imag = {0.0, 0.0};
    r.spectral_radius = std::max(std::abs(big), std::abs(other));
  } else {
    r.eig_real = {half, half};
    r.eig_imag = {std::sqrt(-delta), -std::sqrt(-delta)};
    r.spectral_radius = std::sqrt(std::max(numeric.beta, 0.0));
  }

  const bool jury_stable = r.jury_margin_beta > 0.0 && r.jury_margin_alpha > 0.0;
  r.spectral_conclusive = std::abs(r.spectral_radius - 1.0) > kSpectralTieBand;
  if (r.spectral_conclusive && jury_stable != (r.spectral_radius < 1.0)) {
    throw InternalInconsistency("Jury test (" + std::string(jury_stable ? "stable" : "unstable") +
                                ") disagrees with spectral radius " + std::to_string(r.spectral_radius));
  }
  r.stable = jury_stable;
  if (!r.stable) {
    throw InternalInconsistency("periodic orbit reported unstable for valid parameters (numerical fault)");
  }
  return r;
}

SteadyState steady_state(const SwitchedSystem& sys) {
  const CircuitParams& p = sys.params;
  const ReducedParams rp = reduced_params(p);
  const double a = rp.a;
  const double b = rp.b;
  const double c = rp.c;
  const double q = b * c;
  const ExpKernels k = exp_kernels(a, q);

  // The period map is the square of the half-period map y -> D (E1 y + G1 f)
  // in coordinates centered on (0, Vdc/2), so x0 solves (I - D E1) y0 = D G1 f.
  // det(I - D E1) = 1 - e^{-a} + a exp[l1, l2] > 0; Cramer's rule then leaves
  // only same-signed terms.
  const double det = -std::expm1(-a) + a * k.d1;
  if (!(det > 0.0) || !std::isfinite(det)) {
    throw SingularMatrix("I - M is singular for " + std::to_string(p.T) + " s period");
  }
  const double i0 = p.Vdc * b * k.d1 / det;
  const double w0 = -0.5 * p.Vdc * b * c * (k.d1 * k.d1 + a * k.d1 * k.d2 + q * k.d2 * k.d2) / det;

  SteadyState ss;
  ss.x0_centered = Vec2{i0, w0};
  ss.x0 = uncenter(ss.x0_centered, p);

  // x(T/2) from the first-half propagator applied to x0.
  const HalfFlow first = first_half_flow(p, sys.half_period);
  const Vec2 f = centered_forcing(p);
  ss.x_half_centered = first.transition * ss.x0_centered + first.forcing * f;
  ss.x_half = uncenter(ss.x_half_centered, p);

  const Mat2 second = reflect(first.transition);
  const Vec2 x_end = second * ss.x_half;
  ss.fixed_point_residual = max_abs(x_end - ss.x0);
  ss.half_period_current_residual = std::abs(ss.x0.first - ss.x_half.first);
  return ss;
}

Vec2 trajectory_at(const SwitchedSystem& sys, const SteadyState& ss, double t) {
  const CircuitParams& p = sys.params;
  if (!(t >= 0.0 && t <= p.T)) {
    throw DomainError("trajectory_at: t = " + std::to_string(t) + " outside [0, T]");
  }
  const Vec2 f = centered_forcing(p);
  if (t <= sys.half_period) {
    const HalfFlow flow = first_half_flow(p, t);
    return uncenter(flow.transition * ss.x0_centered + flow.forcing * f, p);
  }
  const HalfFlow flow = second_half_flow(p, t - sys.half_period);
  return uncenter(flow.transition * ss.x_half_centered + flow.forcing * f, p);
}

TimeSeries sample_orbit(const SwitchedSystem& sys, const SteadyState& ss, int n) {
  if (n < 16) throw DomainError("sample_orbit needs n >= 16");
  TimeSeries ts;
  ts.source = SeriesSource::closed_form;
  ts.times.reserve(static_cast<std::size_t>(n) + 1);
  ts.currents.reserve(static_cast<std::size_t>(n) + 1);
  ts.voltages.reserve(static_cast<std::size_t>(n) + 1);
  const double period = sys.params.T;
  for (int k = 0; k <= n; ++k) {
    const double t = k == n ? period : period * k / n;
    const Vec2 x = trajectory_at(sys, ss, t);
    ts.times.push_back(t);
    ts.currents.push_back(x.first);
    ts.voltages.push_back(x.second);
  }
  return ts;
}

double max_abs_current_first_half(const SwitchedSystem& sys, const SteadyState& ss) {
  constexpr int kScan = 2048;
  constexpr int kRefine = 32;
  const double h = sys.half_period;
  auto current = [&](double t) { return std::abs(trajectory_at(sys, ss, std::clamp(t, 0.0, h)).first); };

  int best = 0;
  double best_value = -1.0;
  for (int k = 0; k <= kScan; ++k) {
    const double value = current(k == kScan ? h : h * k / kScan);
    if (value > best_value) {
      best_value = value;
      best = k;
    }
  }
  double lo = h * std::max(best - 1, 0) / kScan;
  double hi = h * std::min(best + 1, kScan) / kScan;
  for (int it = 0; it < kRefine; ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (current(m1) < current(m2)) {
      lo = m1;
    } else {
      hi = m2;
    }
  }
  return std::max(best_value, current(0.5 * (lo + hi)));
}

Averages averages_closed(const SwitchedSystem& sys, const SteadyState& ss) {
  const CircuitParams& p = sys.params;
  Averages avg;
  avg.v_avg = 0.5 * p.Vdc;
  const double v_anchor_mean = 0.5 * (ss.x0.second + ss.x_half.second);
  if (std::abs(v_anchor_mean - avg.v_avg) > 1e-9 * avg.v_avg) {
    throw InternalInconsistency("(v(0) + v(T/2))/2 = " + std::to_string(v_anchor_mean) + " differs from Vdc/2");
  }
  // Vdc - 2 v(0) is exactly -2 times the centered voltage anchor.
  const double vdc_minus_2v0 = -2.0 * ss.x0_centered.second;
  avg.i_avg = 2.0 * p.C / p.T * vdc_minus_2v0;
  avg.i_nominal = p.Vdc / (2.0 * p.R);
  avg.i_max_half = max_abs_current_first_half(sys, ss);
  avg.i_deviation_bound = p.T / (2.0 * p.R * p.C) * avg.i_max_half;
  return avg;
}

Vec2 average_exact_integral(const SwitchedSystem& sys, const SteadyState& ss) {
  const CircuitParams& p = sys.params;
  const HalfFlow first = first_half_flow(p, sys.half_period);
  const Mat2 g2 = reflect(first.forcing);
  const Mat2 h2 = reflect(first.forcing2);
  const Vec2 f = centered_forcing(p);
  // int_0^{T/2} y = G y(0) + H f on each half.
  const Vec2 first_integral = first.forcing * ss.x0_centered + first.forcing2 * f;
  const Vec2 second_integral = g2 * ss.x_half_centered + h2 * f;
  const Vec2 total = first_integral + second_integral;
  return {total.first / p.T, 0.5 * p.Vdc + total.second / p.T};
}

EnergyResiduals energy_residuals(const SwitchedSystem& sys, const SteadyState& ss) {
  const CircuitParams& p = sys.params;
  if (p.Vdc == 0.0) return {};
  const double h = sys.half_period;
  const double nominal = p.Vdc / (2.0 * p.R);

  // First half: v i, |v i|, i^2, i, |i|.  Second half: v i, |v i|.
  const std::function<Values<5>(double)> first = [&](double t) {
    const Vec2 x = trajectory_at(sys, ss, std::min(t, h));
    const double vi = x.first * x.second;
    return Values<5>{vi, std::abs(vi), x.first * x.first, x.first, std::abs(x.first)};
  };
  const std::function<Values<2>(double)> second = [&](double t) {
    const Vec2 x = trajectory_at(sys, ss, std::clamp(t, h, p.T));
    const double vi = x.first * x.second;
    return Values<2>{vi, std::abs(vi)};
  };

  constexpr int kPanels = 4096;
  constexpr double kTol = 1e-10;
  const Values<5> coarse1 = composite_simpson<5>(first, 0.0, h, kPanels);
  const Values<2> coarse2 = composite_simpson<2>(second, h, p.T, kPanels);
  const double tiny = 1e-300;
  const Values<5> scale1{std::max(coarse1[1], tiny), std::max(coarse1[1], tiny), std::max(coarse1[2], tiny),
                         std::max(coarse1[4], tiny), std::max(coarse1[4], tiny)};
  const Values<2> scale2{std::max(coarse2[1], tiny), std::max(coarse2[1], tiny)};

  const Values<5> a1 = adaptive_simpson<5>(first, 0.0, h, kPanels, scale1, kTol);
  const Values<2> a2 = adaptive_simpson<2>(second, h, p.T, kPanels, scale2, kTol);
  const Values<5> b1 = adaptive_simpson<5>(first, 0.0, h, 2 * kPanels, scale1, kTol);
  const Values<2> b2 = adaptive_simpson<2>(second, h, p.T, 2 * kPanels, scale2, kTol);

  EnergyResiduals r;
  for (std::size_t c = 0; c < 5; ++c) {
    r.refinement_change = std::max(r.refinement_change, relative_gap(a1[c], b1[c], scale1[c]));
  }
  for (std::size_t c = 0; c < 2; ++c) {
    r.refinement_change = std::max(r.refinement_change, relative_gap(a2[c], b2[c], scale2[c]));
  }

  const double power_scale = std::max(b1[1], b2[1]);
  r.power_balance_residual = power_scale > 0.0 ? std::abs(b1[0] - b2[0]) / power_scale : 0.0;
  const double ohmic_scale = std::max(b1[2], nominal * b1[4]);
  r.ohmic_residual = ohmic_scale > 0.0 ? std::abs(b1[2] - nominal * b1[3]) / ohmic_scale : 0.0;
  return r;
}

std::vector<SweepPoint> sweep_average_current(const CircuitParams& base, std::span<const double> periods) {
  for (const double period : periods) {
    CircuitParams p = base;
    p.T = period;
    validate(p);
  }
  std::vector<SweepPoint> out(periods.size());
  auto evaluate = [&](std::size_t index) {
    CircuitParams p = base;
    p.T = periods[index];
    const SwitchedSystem sys = build_system(p);
    const SteadyState ss = steady_state(sys);
    const Averages avg = averages_closed(sys, ss);
    out[index] = {p.T, avg.i_avg, avg.i_nominal, avg.i_deviation_bound,
                  avg.i_avg <= avg.i_nominal + 1e-9 * avg.i_nominal};
  };

  const std::size_t workers =
      std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), (periods.size() + 15) / 16);
  if (workers <= 1) {
    for (std::size_t i = 0; i < periods.size(); ++i) evaluate(i);
    return out;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < periods.size(); i += workers) evaluate(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace fcc
