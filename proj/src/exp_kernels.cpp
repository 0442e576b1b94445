#include "fcc/exp_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "fcc/errors.hpp"

namespace fcc {

namespace {

using cplx = std::complex<double>;

// Nodes with modulus at most this are handled by the power series in the
// nodes; the series then loses at most ~e^{2r} ulps to alternation.
constexpr double kSmallNodeRadius = 2.0;
constexpr int kNodeSeriesTerms = 60;

// e^z - 1 without cancellation for small |z|.
cplx expm1_complex(cplx z) {
  const double x = z.real();
  const double y = z.imag();
  const double half_sin = std::sin(0.5 * y);
  return {std::expm1(x) * std::cos(y) - 2.0 * half_sin * half_sin, std::exp(x) * std::sin(y)};
}

// phi1(z) = (e^z - 1) / z
cplx phi1(cplx z) {
  if (std::abs(z) < 0.5) {
    cplx sum = 0.0;
    cplx term = 1.0;  // z^k / (k+1)!
    for (int k = 0; k < 24; ++k) {
      sum += term;
      term *= z / static_cast<double>(k + 2);
    }
    return sum;
  }
  return expm1_complex(z) / z;
}

// phi2(z) = (phi1(z) - 1) / z
cplx phi2(cplx z) {
  if (std::abs(z) < 1.0) {
    cplx sum = 0.0;
    cplx term = 0.5;  // z^k / (k+2)!
    for (int k = 0; k < 30; ++k) {
      sum += term;
      term *= z / static_cast<double>(k + 3);
    }
    return sum;
  }
  return (phi1(z) - 1.0) / z;
}

// sum_{k<6} delta^k / (2k+1)!
double sinhc_series(double delta) {
  double sum = 0.0;
  double power = 1.0;
  double fact = 1.0;
  for (int k = 0; k < 6; ++k) {
    sum += power / fact;
    power *= delta;
    fact *= (2.0 * k + 2.0) * (2.0 * k + 3.0);
  }
  return sum;
}

ExpKernels node_series(double damping, double stiffness) {
  // h_m(l1, l2) obeys t_{m+1} = s t_m - q t_{m-1} with s = l1 + l2 = -damping.
  // exp[l1, l2, 0^n] = sum_m h_m / (m + n + 1)!.
  const double s = -damping;
  const double q = stiffness;
  double t_prev = 0.0;
  double t = 1.0;
  // g_m = (-damping)^m - h_m, the node sums for exp[-damping, 0] minus exp[l1, l2].
  double g = 0.0;
  double inv_fact1 = 1.0;        // 1/(m+1)!
  double inv_fact2 = 0.5;        // 1/(m+2)!
  double inv_fact3 = 1.0 / 6.0;  // 1/(m+3)!
  ExpKernels k{0.0, 0.0, 0.0, 0.0};
  for (int m = 0; m < kNodeSeriesTerms; ++m) {
    k.d1 += t * inv_fact1;
    k.d2 += t * inv_fact2;
    k.d3 += t * inv_fact3;
    k.gap += g * inv_fact1;
    const double t_next = s * t - q * t_prev;
    g = s * g + q * t_prev;
    t_prev = t;
    t = t_next;
    inv_fact1 = inv_fact2;
    inv_fact2 = inv_fact3;
    inv_fact3 /= (m + 4.0);
  }
  return k;
}

}  // namespace

double exp_first_divided_difference(double damping, double stiffness) {
  const double delta = 0.25 * damping * damping - stiffness;
  if (std::abs(delta) < 1e-6 * std::max(1.0, damping * damping)) {
    return std::exp(-0.5 * damping) * sinhc_series(delta);
  }
  if (delta > 0.0) {
    const double root = std::sqrt(delta);
    const double lower = -0.5 * damping - root;
    const double upper = stiffness / lower;  // product of the roots is the stiffness
    return std::exp(upper) * (-std::expm1(-2.0 * root)) / (2.0 * root);
  }
  const double omega = std::sqrt(-delta);
  return std::exp(-0.5 * damping) * std::sin(omega) / omega;
}

ExpKernels exp_kernels(double damping, double stiffness) {
  if (!(damping >= 0.0) || !(stiffness >= 0.0) || !std::isfinite(damping) || !std::isfinite(stiffness)) {
    throw DomainError("exp_kernels needs finite damping >= 0 and stiffness >= 0");
  }
  const double delta = 0.25 * damping * damping - stiffness;
  const double radius = delta >= 0.0 ? 0.5 * damping + std::sqrt(delta) : std::sqrt(stiffness);
  if (radius <= kSmallNodeRadius) return node_series(damping, stiffness);

  // Large nodes: recurse on divided differences, always dividing by the
  // node of larger modulus so the differences below do not cancel.
  ExpKernels k;
  k.d1 = exp_first_divided_difference(damping, stiffness);
  cplx big;
  cplx small;
  if (delta >= 0.0) {
    const double lower = -0.5 * damping - std::sqrt(delta);
    big = lower;
    small = stiffness / lower;
  } else {
    big = cplx(-0.5 * damping, std::sqrt(-delta));
    small = std::conj(big);
  }
  const cplx d2 = (k.d1 - phi1(small)) / big;
  const cplx d3 = (d2 - phi2(small)) / big;
  k.d2 = d2.real();
  k.d3 = d3.real();
  k.gap = -std::expm1(-damping) / damping - k.d1;
  return k;
}

}  // namespace fcc
