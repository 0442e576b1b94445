#pragma once

#include <vector>

#include "fcc/mat2.hpp"
#include "fcc/model.hpp"
#include "fcc/time_series.hpp"

namespace fcc {

struct IntegratorConfig {
  double abs_tol = 1e-9;
  double rel_tol = 1e-9;
  double initial_step = 0.0;  // s; 0 selects T/1000
  long max_steps = 500000;    // attempted steps, rejected ones included
  int output_grid = 512;      // samples per period

  /// Throws InvalidParams unless tolerances > 0, max_steps >= 1000,
  /// output_grid >= 64 and initial_step >= 0.
  void check() const;
};

/// One accepted step [t_start, t_end].
struct StepRecord {
  double t_start = 0.0;
  double t_end = 0.0;
};

/// Dormand-Prince 5(4) on x' = A1 x + b1 / A2 x with every step clipped to
/// land on the switch instants k T/2. Returns n_periods * output_grid + 1
/// samples on the uniform grid t_j = j T / output_grid (dense output between
/// steps). Accepted steps are appended to `step_log` when it is non-null.
///
/// Throws StepLimitExceeded or StepUnderflow (proposed step below
/// 1e-3 * eps * T); DomainError for n_periods < 1.
[[nodiscard]] TimeSeries integrate(const SwitchedSystem& sys, Vec2 x_init, int n_periods,
                                   const IntegratorConfig& cfg = {}, std::vector<StepRecord>* step_log = nullptr);

struct NumericAverages {
  double i_avg = 0.0;
  double v_avg = 0.0;
};

/// Trapezoid rule on the piecewise-linear interpolant of `ts` over
/// [window_start, window_end], divided by the window length. DomainError if
/// the window is empty or leaves the sampled span.
[[nodiscard]] NumericAverages numeric_averages(const TimeSeries& ts, double window_start, double window_end);

/// Zero initial state, n_periods periods, averages over the last one.
[[nodiscard]] NumericAverages protocol_averages(const SwitchedSystem& sys, int n_periods = 20,
                                                const IntegratorConfig& cfg = {});

struct ConvergenceRecord {
  int k = 0;
  double distance = 0.0;  // ||x(kT) - x0*||_inf
};

/// Iterates x <- M x + N b1 from x_init and records the distance to the
/// closed-form anchor for k = 0..n_periods. DomainError for n_periods < 2.
[[nodiscard]] std::vector<ConvergenceRecord> convergence_study(const SwitchedSystem& sys, Vec2 x_init,
                                                               int n_periods, const IntegratorConfig& cfg = {});

}  // namespace fcc
