#pragma once

namespace fcc {

/// Divided differences of exp on the roots l1, l2 of
///
///   lambda^2 + damping * lambda + stiffness = 0,   damping, stiffness >= 0.
///
/// For a matrix X = [[-damping, -p], [r, 0]] with p * r = stiffness they give
/// every entry of e^X, phi1(X) = (e^X - I) X^{-1} and phi2(X) as sums of
/// same-signed terms (for real roots), so no entry is formed by cancellation:
///
///   e^X     = [[1 - damping*d1 - stiffness*d2, -p*d1], [r*d1, 1 - stiffness*d2]]
///   phi1(X) = [[d1, -p*d2], [r*d2, d1 + damping*d2]]
///   phi2(X) = [[d2, -p*d3], [r*d3, d2 + damping*d3]]
struct ExpKernels {
  double d1 = 1.0;        // exp[l1, l2]
  double d2 = 0.5;        // exp[l1, l2, 0]
  double d3 = 1.0 / 6.0;  // exp[l1, l2, 0, 0]
  /// exp[-damping, 0] - exp[l1, l2]  ( = stiffness * exp[-damping, l1, l2, 0] ).
  double gap = 0.0;
};

/// Throws DomainError for negative or non-finite inputs.
[[nodiscard]] ExpKernels exp_kernels(double damping, double stiffness);

/// exp[l1, l2] alone, evaluated with the closed-form branches of expm_closed:
/// e^{-damping/2} * sinh(x)/x for real roots, * sin(x)/x for complex roots,
/// six-term series for |delta| < 1e-6 * max(1, damping^2).
[[nodiscard]] double exp_first_divided_difference(double damping, double stiffness);

}  // namespace fcc
