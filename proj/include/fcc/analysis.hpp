#pragma once

#include <array>
#include <span>
#include <vector>

#include "fcc/mat2.hpp"
#include "fcc/model.hpp"
#include "fcc/time_series.hpp"

namespace fcc {

/// Stability of the periodic orbit, decided twice: by the Jury conditions
/// on the closed-form characteristic polynomial of the monodromy matrix M and
/// by the spectral radius of the numerically formed M.
struct StabilityReport {
  double alpha = 0.0;  // closed form, p(l) = l^2 + alpha l + beta
  double beta = 0.0;
  double numeric_alpha = 0.0;  // charpoly(monodromy(sys))
  double numeric_beta = 0.0;
  std::array<double, 2> eig_real{};  // eigenvalues of the numeric M
  std::array<double, 2> eig_imag{};
  double spectral_radius = 0.0;
  double jury_margin_beta = 0.0;   // 1 - |beta|
  double jury_margin_alpha = 0.0;  // 1 + beta - |alpha|
  /// False when |spectral_radius - 1| <= 1e-12: the numeric route cannot
  /// resolve the verdict and only the Jury route decides.
  bool spectral_conclusive = true;
  bool stable = false;
};

/// Anchors of the periodic orbit at t = 0 and t = T/2.
///
/// The `*_centered` vectors hold (i, v - Vdc/2). They are what the solver
/// actually computes; keeping them avoids losing the small offset of v from
/// Vdc/2 to rounding, which Vdc - 2 v(0) would otherwise amplify.
struct SteadyState {
  Vec2 x0;
  Vec2 x_half;
  Vec2 x0_centered;
  Vec2 x_half_centered;
  double fixed_point_residual = 0.0;          // ||x(T) - x0||_inf via piecewise propagation
  double half_period_current_residual = 0.0;  // |i(0) - i(T/2)|
};

struct Averages {
  double v_avg = 0.0;              // V
  double i_avg = 0.0;              // A
  double i_nominal = 0.0;          // Vdc / 2R
  double i_deviation_bound = 0.0;  // T/(2RC) * i_max_half
  double i_max_half = 0.0;         // max |i| on [0, T/2]
};

struct EnergyResiduals {
  double power_balance_residual = 0.0;  // int_0^{T/2} v i  vs  int_{T/2}^T v i
  double ohmic_residual = 0.0;          // int_0^{T/2} i^2  vs  Vdc/2R int_0^{T/2} i
  /// Largest relative change of the underlying integrals between the 4096-
  /// and 8192-panel adaptive passes.
  double refinement_change = 0.0;
};

struct SweepPoint {
  double T = 0.0;
  double i_avg = 0.0;
  double i_nominal = 0.0;
  double bound = 0.0;
  bool conjecture_satisfied = true;  // i_avg <= i_nominal (1 + 1e-9)
};

/// Propagators of x' = A x + f on [0, t] for A = A1 (first half) or A2:
/// x(t) = transition x(0) + forcing f, and forcing2 f = int_0^t (forcing(s) f) ds.
struct HalfFlow {
  Mat2 transition;
  Mat2 forcing;
  Mat2 forcing2;
};

/// Exact propagators for the first half (A1) after time t in [0, T/2],
/// built from exp_kernels so that no entry suffers cancellation.
[[nodiscard]] HalfFlow first_half_flow(const CircuitParams& p, double t);
/// Same for A2 = D A1 D, D = diag(1, -1).
[[nodiscard]] HalfFlow second_half_flow(const CircuitParams& p, double t);

/// M = e^{T/2 A2} e^{T/2 A1} from expm_closed.
[[nodiscard]] Mat2 monodromy(const SwitchedSystem& sys);
/// N = e^{T/2 A2} A1^{-1} (e^{T/2 A1} - I); one period maps x to M x + N b1.
[[nodiscard]] Mat2 forcing_matrix(const SwitchedSystem& sys);

/// beta = e^{-2a}, alpha = -e^{-a} (2 + a^2 S^2) with S = sinh(d/2)/(d/2),
/// d^2 = disc (the cos form when disc < 0, a series when |disc| is small).
[[nodiscard]] CharPoly2 alpha_beta_closed(const ReducedParams& rp);

/// Throws InternalInconsistency when the two routes disagree, or when the
/// orbit comes out unstable (impossible for valid parameters).
[[nodiscard]] StabilityReport stability(const SwitchedSystem& sys);

/// Unique fixed point x0 = (I - M)^{-1} N b1 of the period map. Throws
/// SingularMatrix if the solve degenerates.
[[nodiscard]] SteadyState steady_state(const SwitchedSystem& sys);

/// Closed-form orbit at t in [0, T]; DomainError outside.
[[nodiscard]] Vec2 trajectory_at(const SwitchedSystem& sys, const SteadyState& ss, double t);

/// n + 1 uniform samples on [0, T]; DomainError for n < 16.
[[nodiscard]] TimeSeries sample_orbit(const SwitchedSystem& sys, const SteadyState& ss, int n);

/// max |i(t)| on [0, T/2]: 2048-sample scan plus 32 ternary refinement steps.
[[nodiscard]] double max_abs_current_first_half(const SwitchedSystem& sys, const SteadyState& ss);

/// <v> = Vdc/2 and <i> = (2C/T)(Vdc - 2 v(0)) together with the deviation
/// bound |<i> - Vdc/2R| <= (T/2RC) max |i|.
[[nodiscard]] Averages averages_closed(const SwitchedSystem& sys, const SteadyState& ss);

/// (1/T) int_0^T x(t) dt integrated exactly through the propagators;
/// returns (<i>, <v>).
[[nodiscard]] Vec2 average_exact_integral(const SwitchedSystem& sys, const SteadyState& ss);

[[nodiscard]] EnergyResiduals energy_residuals(const SwitchedSystem& sys, const SteadyState& ss);

/// Average current for each period in `periods`, in input order. Points are
/// evaluated concurrently; throws InvalidParams if any period is not > 0.
[[nodiscard]] std::vector<SweepPoint> sweep_average_current(const CircuitParams& base,
                                                            std::span<const double> periods);

}  // namespace fcc
