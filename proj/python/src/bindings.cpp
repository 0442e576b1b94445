#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fcc/analysis.hpp"
#include "fcc/integrator.hpp"

namespace py = pybind11;
using namespace fcc;

namespace {

CircuitParams params(double R, double L, double C, double Vdc, double T) {
  CircuitParams p{R, L, C, Vdc, T};
  validate(p);
  return p;
}

py::tuple vec(const Vec2& x) { return py::make_tuple(x.first, x.second); }

py::dict series(const TimeSeries& ts) {
  py::dict d;
  d["t"] = py::array_t<double>(ts.times.size(), ts.times.data());
  d["i"] = py::array_t<double>(ts.currents.size(), ts.currents.data());
  d["v"] = py::array_t<double>(ts.voltages.size(), ts.voltages.data());
  d["source"] = to_string(ts.source);
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  // Later registrations are tried first, so the base class goes first.
  py::register_exception<Error>(m, "NumericalError", PyExc_RuntimeError);
  py::register_exception<InvalidParams>(m, "InvalidParams", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  m.def(
      "stability",
      [](double R, double L, double C, double Vdc, double T) {
        const StabilityReport s = stability(build_system(params(R, L, C, Vdc, T)));
        py::dict d;
        d["alpha"] = s.alpha;
        d["beta"] = s.beta;
        d["spectral_radius"] = s.spectral_radius;
        d["jury_margin_alpha"] = s.jury_margin_alpha;
        d["jury_margin_beta"] = s.jury_margin_beta;
        d["stable"] = s.stable;
        return d;
      },
      py::arg("R"), py::arg("L"), py::arg("C"), py::arg("Vdc"), py::arg("T"));

  m.def(
      "steady_state",
      [](double R, double L, double C, double Vdc, double T) {
        const SteadyState ss = steady_state(build_system(params(R, L, C, Vdc, T)));
        py::dict d;
        d["x0"] = vec(ss.x0);
        d["x_half"] = vec(ss.x_half);
        d["fixed_point_residual"] = ss.fixed_point_residual;
        d["half_period_current_residual"] = ss.half_period_current_residual;
        return d;
      },
      py::arg("R"), py::arg("L"), py::arg("C"), py::arg("Vdc"), py::arg("T"));

  m.def(
      "averages",
      [](double R, double L, double C, double Vdc, double T) {
        const SwitchedSystem sys = build_system(params(R, L, C, Vdc, T));
        const Averages a = averages_closed(sys, steady_state(sys));
        py::dict d;
        d["i_avg"] = a.i_avg;
        d["v_avg"] = a.v_avg;
        d["i_nominal"] = a.i_nominal;
        d["i_deviation_bound"] = a.i_deviation_bound;
        d["i_max_half"] = a.i_max_half;
        return d;
      },
      py::arg("R"), py::arg("L"), py::arg("C"), py::arg("Vdc"), py::arg("T"));

  m.def(
      "sweep",
      [](double R, double L, double C, double Vdc, const std::vector<double>& periods) {
        const std::vector<SweepPoint> pts = sweep_average_current(params(R, L, C, Vdc, 1.0), periods);
        py::array_t<double> i_avg(pts.size());
        py::array_t<bool> ok(pts.size());
        auto iv = i_avg.mutable_unchecked<1>();
        auto ov = ok.mutable_unchecked<1>();
        for (std::size_t k = 0; k < pts.size(); ++k) {
          iv(k) = pts[k].i_avg;
          ov(k) = pts[k].conjecture_satisfied;
        }
        py::dict d;
        d["T"] = py::array_t<double>(periods.size(), periods.data());
        d["i_avg"] = i_avg;
        d["i_nominal"] = pts.empty() ? Vdc / (2 * R) : pts.front().i_nominal;
        d["conjecture_ok"] = ok;
        return d;
      },
      py::arg("R"), py::arg("L"), py::arg("C"), py::arg("Vdc"), py::arg("periods"));

  m.def(
      "simulate",
      [](double R, double L, double C, double Vdc, double T, int periods, const std::string& source, int grid,
         std::optional<std::pair<double, double>> x_init) {
        const SwitchedSystem sys = build_system(params(R, L, C, Vdc, T));
        if (periods < 1) throw InvalidParams("periods must be >= 1");
        if (grid < 64) throw InvalidParams("grid must be >= 64");
        if (source == "closed_form") {
          if (x_init) throw InvalidParams("x_init applies to rk45 only");
          const SteadyState ss = steady_state(sys);
          TimeSeries ts;
          const long total = static_cast<long>(periods) * grid;
          for (long j = 0; j <= total; ++j) {
            const Vec2 x = trajectory_at(sys, ss, T * static_cast<double>(j % grid) / grid);
            ts.times.push_back(T * static_cast<double>(j) / grid);
            ts.currents.push_back(x.first);
            ts.voltages.push_back(x.second);
          }
          return series(ts);
        }
        if (source != "rk45") throw InvalidParams("source must be closed_form or rk45");
        IntegratorConfig cfg;
        cfg.output_grid = grid;
        const Vec2 x = x_init ? Vec2{x_init->first, x_init->second} : Vec2{0.0, 0.0};
        return series(integrate(sys, x, periods, cfg));
      },
      py::arg("R"), py::arg("L"), py::arg("C"), py::arg("Vdc"), py::arg("T"), py::arg("periods") = 20,
      py::arg("source") = "closed_form", py::arg("grid") = 512, py::arg("x_init") = py::none());
}
