#include "fcc/integrator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "fcc/analysis.hpp"

namespace fcc {

namespace {

// Dormand-Prince 5(4).
constexpr std::array<double, 6> kC{0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0};
constexpr double kA[6][5] = {
    {0.0, 0.0, 0.0, 0.0, 0.0},
    {1.0 / 5.0, 0.0, 0.0, 0.0, 0.0},
    {3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0},
    {44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0},
    {19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0},
    {9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0},
};
constexpr std::array<double, 6> kB{35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0};
// b - bhat, seven stages (the last one is f at the new point).
constexpr std::array<double, 7> kE{-71.0 / 57600.0,   0.0, 71.0 / 16695.0, -71.0 / 1920.0, 17253.0 / 339200.0,
                                   -22.0 / 525.0, 1.0 / 40.0};
// Continuous extension: y(t0 + s h) = y0 + h sum_j k_j sum_m P[j][m] s^{m+1}.
constexpr double kP[7][4] = {
    {1.0, -8048581381.0 / 2820520608.0, 8663915743.0 / 2820520608.0, -12715105075.0 / 11282082432.0},
    {0.0, 0.0, 0.0, 0.0},
    {0.0, 131558114200.0 / 32700410799.0, -68118460800.0 / 10900136933.0, 87487479700.0 / 32700410799.0},
    {0.0, -1754552775.0 / 470086768.0, 14199869525.0 / 1410260304.0, -10690763975.0 / 1880347072.0},
    {0.0, 127303824393.0 / 49829197408.0, -318862633887.0 / 49829197408.0, 701980252875.0 / 199316789632.0},
    {0.0, -282668133.0 / 205662961.0, 2019193451.0 / 616988883.0, -1453857185.0 / 822651844.0},
    {0.0, 40617522.0 / 29380423.0, -110615467.0 / 29380423.0, 69997945.0 / 29380423.0},
};

struct State {
  double i;
  double v;
};

State rhs(const Mat2& a, const Vec2& b, const State& x) {
  return {a.m11() * x.i + a.m12() * x.v + b.first, a.m21() * x.i + a.m22() * x.v + b.second};
}

State dense(const State& y0, const std::array<State, 7>& k, double h, double s) {
  const double powers[4] = {s, s * s, s * s * s, s * s * s * s};
  State y = y0;
  for (int j = 0; j < 7; ++j) {
    double w = 0.0;
    for (int m = 0; m < 4; ++m) w += kP[j][m] * powers[m];
    y.i += h * w * k[j].i;
    y.v += h * w * k[j].v;
  }
  return y;
}

}  // namespace

void IntegratorConfig::check() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw InvalidParams("tolerances must be > 0");
  if (max_steps < 1000) throw InvalidParams("max_steps must be >= 1000");
  if (output_grid < 64) throw InvalidParams("output_grid must be >= 64");
  if (!(initial_step >= 0.0) || !std::isfinite(initial_step)) throw InvalidParams("initial_step must be >= 0");
}

TimeSeries integrate(const SwitchedSystem& sys, Vec2 x_init, int n_periods, const IntegratorConfig& cfg,
                     std::vector<StepRecord>* step_log) {
  cfg.check();
  if (n_periods < 1) throw DomainError("n_periods must be >= 1");

  const double period = sys.params.T;
  const double half = sys.half_period;
  const long grid = cfg.output_grid;
  const double min_step = 1e-3 * std::numeric_limits<double>::epsilon() * period;
  const Vec2 zero{0.0, 0.0};

  TimeSeries ts;
  ts.source = SeriesSource::rk45;
  const std::size_t n_samples = static_cast<std::size_t>(n_periods * grid + 1);
  ts.times.reserve(n_samples);
  ts.currents.reserve(n_samples);
  ts.voltages.reserve(n_samples);
  ts.times.push_back(0.0);
  ts.currents.push_back(x_init.first);
  ts.voltages.push_back(x_init.second);

  State y{x_init.first, x_init.second};
  double h = cfg.initial_step > 0.0 ? cfg.initial_step : period / 1000.0;
  long attempts = 0;
  long next_sample = 1;

  for (long interval = 0; interval < 2L * n_periods; ++interval) {
    const bool first_half = interval % 2 == 0;
    const Mat2& a = first_half ? sys.A1 : sys.A2;
    const Vec2& b = first_half ? sys.b1 : zero;
    const double t_origin = static_cast<double>(interval) * half;

    // Local time s runs over [0, half]; grid point j sits at local time
    // (2j - interval * grid) T / (2 grid).
    double s = 0.0;
    State f0 = rhs(a, b, y);
    while (s < half) {
      if (++attempts > cfg.max_steps) {
        throw StepLimitExceeded("RK45 exceeded " + std::to_string(cfg.max_steps) + " steps");
      }
      if (h < min_step) throw StepUnderflow("RK45 step fell below " + std::to_string(min_step) + " s");

      const bool lands = s + h >= half;
      const double step = lands ? half - s : h;

      std::array<State, 7> k{};
      k[0] = f0;
      for (int stage = 1; stage < 6; ++stage) {
        State ys = y;
        for (int j = 0; j < stage; ++j) {
          ys.i += step * kA[stage][j] * k[j].i;
          ys.v += step * kA[stage][j] * k[j].v;
        }
        k[stage] = rhs(a, b, ys);
      }
      State y_new = y;
      for (int j = 0; j < 6; ++j) {
        y_new.i += step * kB[j] * k[j].i;
        y_new.v += step * kB[j] * k[j].v;
      }
      k[6] = rhs(a, b, y_new);

      double err = 0.0;
      {
        double ei = 0.0;
        double ev = 0.0;
        for (int j = 0; j < 7; ++j) {
          ei += kE[j] * k[j].i;
          ev += kE[j] * k[j].v;
        }
        const double si = std::max(cfg.abs_tol, cfg.rel_tol * std::max(std::abs(y.i), std::abs(y_new.i)));
        const double sv = std::max(cfg.abs_tol, cfg.rel_tol * std::max(std::abs(y.v), std::abs(y_new.v)));
        err = std::max(std::abs(step * ei) / si, std::abs(step * ev) / sv);
      }
      if (!std::isfinite(err)) throw NonFiniteValue("RK45 produced a non-finite state");

      if (err > 1.0) {
        h = step * std::max(0.2, 0.9 * std::pow(err, -0.2));
        continue;
      }

      const double s_new = lands ? half : s + step;
      if (step_log) step_log->push_back({t_origin + s, lands ? static_cast<double>(interval + 1) * half : t_origin + s_new});

      while (next_sample <= n_periods * grid) {
        const long twice_offset = 2 * next_sample - interval * grid;
        if (twice_offset > grid) break;
        const bool at_end = twice_offset == grid;
        const double s_sample = static_cast<double>(twice_offset) * period / (2.0 * static_cast<double>(grid));
        if (!at_end && s_sample > s_new) break;
        if (at_end && !lands) break;
        const State y_sample = at_end ? y_new : dense(y, k, step, (s_sample - s) / step);
        ts.times.push_back(static_cast<double>(next_sample) * period / static_cast<double>(grid));
        ts.currents.push_back(y_sample.i);
        ts.voltages.push_back(y_sample.v);
        ++next_sample;
      }

      y = y_new;
      f0 = k[6];
      s = s_new;
      const double grow = err == 0.0 ? 10.0 : std::min(10.0, 0.9 * std::pow(err, -0.2));
      // A clipped landing step says nothing about the step the controller wanted.
      if (!lands || step >= h) h = step * std::max(1.0, grow);
    }
  }
  return ts;
}

NumericAverages numeric_averages(const TimeSeries& ts, double window_start, double window_end) {
  if (ts.size() < 2) throw DomainError("numeric_averages needs at least two samples");
  if (!(window_end > window_start)) throw DomainError("averaging window must satisfy end > start");
  const double t_first = ts.times.front();
  const double t_last = ts.times.back();
  const double slack = 1e-12 * (t_last - t_first);
  if (window_start < t_first - slack || window_end > t_last + slack) {
    throw DomainError("averaging window leaves the sampled span");
  }
  window_start = std::max(window_start, t_first);
  window_end = std::min(window_end, t_last);

  auto interpolate = [&](std::size_t k, double t) {
    const double w = (t - ts.times[k]) / (ts.times[k + 1] - ts.times[k]);
    return std::array<double, 2>{ts.currents[k] + w * (ts.currents[k + 1] - ts.currents[k]),
                                 ts.voltages[k] + w * (ts.voltages[k + 1] - ts.voltages[k])};
  };

  double int_i = 0.0;
  double int_v = 0.0;
  for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
    const double lo = std::max(ts.times[k], window_start);
    const double hi = std::min(ts.times[k + 1], window_end);
    if (!(hi > lo)) continue;
    const auto a = lo == ts.times[k] ? std::array<double, 2>{ts.currents[k], ts.voltages[k]} : interpolate(k, lo);
    const auto b = hi == ts.times[k + 1] ? std::array<double, 2>{ts.currents[k + 1], ts.voltages[k + 1]}
                                         : interpolate(k, hi);
    int_i += 0.5 * (hi - lo) * (a[0] + b[0]);
    int_v += 0.5 * (hi - lo) * (a[1] + b[1]);
  }
  const double width = window_end - window_start;
  return {int_i / width, int_v / width};
}

NumericAverages protocol_averages(const SwitchedSystem& sys, int n_periods, const IntegratorConfig& cfg) {
  const TimeSeries ts = integrate(sys, Vec2{0.0, 0.0}, n_periods, cfg);
  const double period = sys.params.T;
  return numeric_averages(ts, (n_periods - 1) * period, ts.times.back());
}

std::vector<ConvergenceRecord> convergence_study(const SwitchedSystem& sys, Vec2 x_init, int n_periods,
                                                 const IntegratorConfig& cfg) {
  cfg.check();
  if (n_periods < 2) throw DomainError("n_periods must be >= 2");
  const Vec2 anchor = steady_state(sys).x0;
  const Mat2 m = monodromy(sys);
  const Vec2 forcing = forcing_matrix(sys) * sys.b1;

  std::vector<ConvergenceRecord> out;
  out.reserve(static_cast<std::size_t>(n_periods) + 1);
  Vec2 x = x_init;
  for (int k = 0; k <= n_periods; ++k) {
    out.push_back({k, max_abs(x - anchor)});
    x = m * x + forcing;
  }
  return out;
}

}  // namespace fcc
