#include "fcc/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "fcc/analysis.hpp"
#include "fcc/integrator.hpp"

namespace fcc::cli {

namespace {

using nlohmann::ordered_json;

struct CommonOptions {
  std::optional<double> R, L, C, Vdc, T;
  std::string params_file;
  std::string output;
  std::string gnuplot;
  bool deterministic = false;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool wants_period) {
  cmd->add_option("--R", o.R, "load resistance [ohm]");
  cmd->add_option("--L", o.L, "inductance [H]");
  cmd->add_option("--C", o.C, "flying capacitance [F]");
  cmd->add_option("--Vdc", o.Vdc, "source voltage [V]");
  if (wants_period) cmd->add_option("--T", o.T, "switching period [s]");
  cmd->add_option("--params", o.params_file, "key-value parameter file (flags override it)");
  cmd->add_option("--output", o.output, "output path");
  cmd->add_option("--gnuplot", o.gnuplot, "also write a gnuplot script for the CSV");
  cmd->add_flag("--deterministic", o.deterministic, "omit the timestamp from the manifest");
}

// File first, flags on top. T defaults to 1 s when the command does not use it.
CircuitParams resolve_params(const CommonOptions& o, bool wants_period) {
  CircuitParams p;
  if (!o.params_file.empty()) p = load_params_file(o.params_file);
  if (o.R) p.R = *o.R;
  if (o.L) p.L = *o.L;
  if (o.C) p.C = *o.C;
  if (o.Vdc) p.Vdc = *o.Vdc;
  if (o.T) p.T = *o.T;
  if (!wants_period) p.T = 1.0;
  validate(p);
  return p;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fixed4(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  return buf;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ordered_json params_json(const CircuitParams& p, bool with_period) {
  ordered_json j;
  j["R"] = p.R;
  j["L"] = p.L;
  j["C"] = p.C;
  j["Vdc"] = p.Vdc;
  if (with_period) j["T"] = p.T;
  return j;
}

ordered_json config_json(const IntegratorConfig& c) {
  return {{"abs_tol", c.abs_tol},       {"rel_tol", c.rel_tol},         {"initial_step", c.initial_step},
          {"max_steps", c.max_steps},   {"output_grid", c.output_grid}};
}

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write '" + path + "'");
  return f;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f = open_output(path);
  f << text;
  f.flush();
  if (!f) throw IoError("failed writing '" + path + "'");
}

void write_manifest(const std::string& command, const CommonOptions& o, ordered_json params,
                    const std::optional<IntegratorConfig>& cfg, std::vector<std::string> outputs,
                    ordered_json extra = ordered_json::object()) {
  ordered_json m;
  m["command"] = command;
  m["params"] = std::move(params);
  if (cfg) m["config"] = config_json(*cfg);
  for (auto& [key, value] : extra.items()) m[key] = value;
  m["output_paths"] = std::move(outputs);
  m["tool_version"] = kToolVersion;
  if (!o.deterministic) m["timestamp"] = utc_timestamp();
  write_text(o.output + ".manifest.json", m.dump(2) + "\n");
}

std::string require_output(const CommonOptions& o) {
  if (o.output.empty()) throw InvalidParams("--output is required for CSV data");
  return o.output;
}

void maybe_gnuplot(const CommonOptions& o, const std::string& body) {
  if (o.gnuplot.empty()) return;
  std::ostringstream s;
  s << "set datafile separator ','\n"
    << "set key autotitle columnhead\n"
    << "data = '" << o.output << "'\n"
    << body;
  write_text(o.gnuplot, s.str());
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    const auto last = item.find_last_not_of(" \t");
    const std::string token = item.substr(first, last - first + 1);
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size()) throw InvalidParams("not a number in --t-list: '" + token + "'");
    values.push_back(value);
  }
  return values;
}

// ---------------------------------------------------------------------------

int cmd_analyze(const CommonOptions& o, std::ostream& out) {
  const CircuitParams p = resolve_params(o, true);
  const SwitchedSystem sys = build_system(p);
  const StabilityReport st = stability(sys);
  const SteadyState ss = steady_state(sys);
  const Averages avg = averages_closed(sys, ss);
  const EnergyResiduals er = energy_residuals(sys, ss);

  ordered_json r;
  r["params"] = params_json(p, true);
  r["stability"] = {
      {"alpha", st.alpha},
      {"beta", st.beta},
      {"eig_real", st.eig_real},
      {"eig_imag", st.eig_imag},
      {"spectral_radius", st.spectral_radius},
      {"jury_margin_beta", st.jury_margin_beta},
      {"jury_margin_alpha", st.jury_margin_alpha},
      {"stable", st.stable},
  };
  r["steady_state"] = {
      {"x0", {ss.x0.first, ss.x0.second}},
      {"x_half", {ss.x_half.first, ss.x_half.second}},
      {"fixed_point_residual", ss.fixed_point_residual},
      {"half_period_current_residual", ss.half_period_current_residual},
  };
  r["averages"] = {
      {"v_avg", avg.v_avg},
      {"i_avg", avg.i_avg},
      {"i_nominal", avg.i_nominal},
      {"i_deviation_bound", avg.i_deviation_bound},
      {"i_max_half", avg.i_max_half},
  };
  r["energy_residuals"] = {
      {"power_balance_residual", er.power_balance_residual},
      {"ohmic_residual", er.ohmic_residual},
  };
  r["summary"] = {
      {"i_avg", fixed4(avg.i_avg)},
      {"v_avg", fixed4(avg.v_avg)},
      {"i_nominal", fixed4(avg.i_nominal)},
  };
  const std::string text = r.dump(2) + "\n";
  out << text;
  if (!o.output.empty()) {
    write_text(o.output, text);
    write_manifest("analyze", o, params_json(p, true), std::nullopt, {o.output});
  }
  return kOk;
}

struct SimulateOptions {
  int periods = 20;
  std::string source = "closed_form";
  std::optional<double> i0, v0;
  int grid = 512;
};

int cmd_simulate(const CommonOptions& o, const SimulateOptions& s, std::ostream& out) {
  const CircuitParams p = resolve_params(o, true);
  const std::string path = require_output(o);
  if (s.periods < 1) throw InvalidParams("--periods must be >= 1");
  if (s.grid < 64) throw InvalidParams("--grid must be >= 64");
  const bool rk45 = s.source == "rk45";
  if (!rk45 && (s.i0 || s.v0)) throw InvalidParams("--i0/--v0 apply to --source rk45 only");

  const SwitchedSystem sys = build_system(p);
  TimeSeries ts;
  std::optional<IntegratorConfig> cfg;
  if (rk45) {
    IntegratorConfig c;
    c.output_grid = s.grid;
    cfg = c;
    ts = integrate(sys, Vec2{s.i0.value_or(0.0), s.v0.value_or(0.0)}, s.periods, c);
  } else {
    const SteadyState ss = steady_state(sys);
    const long total = static_cast<long>(s.periods) * s.grid;
    for (long j = 0; j <= total; ++j) {
      const long local = j % s.grid;
      const Vec2 x = trajectory_at(sys, ss, p.T * static_cast<double>(local) / s.grid);
      ts.times.push_back(p.T * static_cast<double>(j) / s.grid);
      ts.currents.push_back(x.first);
      ts.voltages.push_back(x.second);
    }
  }
  ts.check();

  std::ofstream f = open_output(path);
  f << "t_s,i_A,v_V\n";
  for (std::size_t k = 0; k < ts.size(); ++k) {
    f << fmt(ts.times[k]) << ',' << fmt(ts.currents[k]) << ',' << fmt(ts.voltages[k]) << '\n';
  }
  f.flush();
  if (!f) throw IoError("failed writing '" + path + "'");

  const NumericAverages last = numeric_averages(ts, (s.periods - 1) * p.T, ts.times.back());
  out << "source: " << to_string(ts.source) << ", rows: " << ts.size() << "\n"
      << "last-period averages: i_avg = " << fixed4(last.i_avg) << " A, v_avg = " << fixed4(last.v_avg) << " V\n";

  ordered_json extra = {{"source", s.source}, {"periods", s.periods}, {"grid", s.grid}};
  if (rk45) extra["initial_state"] = {s.i0.value_or(0.0), s.v0.value_or(0.0)};
  std::vector<std::string> outputs{path};
  if (!o.gnuplot.empty()) outputs.push_back(o.gnuplot);
  maybe_gnuplot(o,
                "set multiplot layout 2,1\n"
                "plot data using 1:2 with lines\n"
                "plot data using 1:3 with lines\n"
                "unset multiplot\n");
  write_manifest("simulate", o, params_json(p, true), cfg, outputs, extra);
  return kOk;
}

struct SweepOptions {
  double t_from = 0.0;
  double t_to = 0.0;
  int steps = 0;
  std::string scale = "log";
};

int cmd_sweep(const CommonOptions& o, const SweepOptions& s, std::ostream& out, std::ostream& err) {
  const CircuitParams base = resolve_params(o, false);
  const std::string path = require_output(o);
  if (!(s.t_from > 0.0) || !(s.t_to > s.t_from) || !std::isfinite(s.t_to)) {
    throw InvalidParams("sweep range must satisfy 0 < --t-from < --t-to");
  }
  if (s.steps < 2) throw InvalidParams("--steps must be >= 2");

  std::vector<double> periods(static_cast<std::size_t>(s.steps));
  const bool log_scale = s.scale == "log";
  const double lo = log_scale ? std::log(s.t_from) : s.t_from;
  const double hi = log_scale ? std::log(s.t_to) : s.t_to;
  for (int k = 0; k < s.steps; ++k) {
    const double u = lo + (hi - lo) * k / (s.steps - 1);
    periods[static_cast<std::size_t>(k)] = log_scale ? std::exp(u) : u;
  }
  periods.front() = s.t_from;
  periods.back() = s.t_to;

  const std::vector<SweepPoint> points = sweep_average_current(base, periods);

  std::ofstream f = open_output(path);
  f << "T_s,i_avg_A,i_nominal_A,bound_A,conjecture_ok\n";
  int flagged = 0;
  for (const SweepPoint& pt : points) {
    f << fmt(pt.T) << ',' << fmt(pt.i_avg) << ',' << fmt(pt.i_nominal) << ',' << fmt(pt.bound) << ','
      << (pt.conjecture_satisfied ? 1 : 0) << '\n';
    if (!pt.conjecture_satisfied) {
      ++flagged;
      err << "flagged: T = " << fmt(pt.T) << " s, i_avg = " << fmt(pt.i_avg) << " A exceeds " << fmt(pt.i_nominal)
          << " A\n";
    }
  }
  f.flush();
  if (!f) throw IoError("failed writing '" + path + "'");
  out << "rows: " << points.size() << ", conjecture_ok: " << points.size() - static_cast<std::size_t>(flagged)
      << ", flagged: " << flagged << "\n";

  std::vector<std::string> outputs{path};
  if (!o.gnuplot.empty()) outputs.push_back(o.gnuplot);
  maybe_gnuplot(o, std::string(log_scale ? "set logscale x\n" : "") +
                       "set xlabel 'T [s]'\nplot data using 1:2 with linespoints, data using 1:3 with lines\n");
  write_manifest("sweep", o, params_json(base, false), std::nullopt, outputs,
                 {{"t_from", s.t_from}, {"t_to", s.t_to}, {"steps", s.steps}, {"scale", s.scale}});
  return kOk;
}

struct ProfilesOptions {
  std::string t_list;
  int samples = 512;
};

int cmd_profiles(const CommonOptions& o, const ProfilesOptions& s, std::ostream& out) {
  const CircuitParams base = resolve_params(o, false);
  const std::string path = require_output(o);
  const std::vector<double> periods = parse_list(s.t_list);
  if (periods.empty()) throw InvalidParams("--t-list must name at least one period");
  if (s.samples < 16) throw InvalidParams("--samples must be >= 16");

  struct Profile {
    SwitchedSystem sys;
    SteadyState ss;
  };
  std::vector<Profile> profiles;
  for (const double period : periods) {
    CircuitParams p = base;
    p.T = period;
    const SwitchedSystem sys = build_system(p);
    profiles.push_back({sys, steady_state(sys)});
  }

  std::ofstream f = open_output(path);
  f << "tau";
  for (std::size_t k = 1; k <= periods.size(); ++k) f << ",i_A_T" << k << ",v_V_T" << k;
  f << '\n';
  const int rows = 2 * s.samples;
  for (int j = 0; j <= rows; ++j) {
    const double tau = static_cast<double>(j) / s.samples;
    f << fmt(tau);
    const int local = j % s.samples;
    for (const Profile& pr : profiles) {
      const Vec2 x = trajectory_at(pr.sys, pr.ss, pr.sys.params.T * static_cast<double>(local) / s.samples);
      f << ',' << fmt(x.first) << ',' << fmt(x.second);
    }
    f << '\n';
  }
  f.flush();
  if (!f) throw IoError("failed writing '" + path + "'");
  out << "profiles: " << periods.size() << ", rows: " << rows + 1 << "\n";

  std::vector<std::string> outputs{path};
  if (!o.gnuplot.empty()) {
    outputs.push_back(o.gnuplot);
    std::ostringstream plot;
    plot << "set xlabel 'tau = t/T'\nset multiplot layout 2,1\nplot ";
    for (std::size_t k = 0; k < periods.size(); ++k) plot << (k ? ", " : "") << "data using 1:" << 2 + 2 * k << " with lines";
    plot << "\nplot ";
    for (std::size_t k = 0; k < periods.size(); ++k) plot << (k ? ", " : "") << "data using 1:" << 3 + 2 * k << " with lines";
    plot << "\nunset multiplot\n";
    maybe_gnuplot(o, plot.str());
  }
  write_manifest("profiles", o, params_json(base, false), std::nullopt, outputs,
                 {{"T_values", periods}, {"samples", s.samples}});
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Flying capacitor converter analyzer", "fcc"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  CommonOptions analyze_opts, simulate_opts, sweep_opts, profiles_opts;
  SimulateOptions sim;
  SweepOptions sw;
  ProfilesOptions prof;

  CLI::App* analyze = app.add_subcommand("analyze", "stability, steady state, averages and energy checks as JSON");
  add_common(analyze, analyze_opts, true);

  CLI::App* simulate = app.add_subcommand("simulate", "trajectory CSV from the closed form or RK45");
  add_common(simulate, simulate_opts, true);
  simulate->add_option("--periods", sim.periods, "number of periods")->capture_default_str();
  simulate->add_option("--source", sim.source, "closed_form or rk45")
      ->check(CLI::IsMember({"closed_form", "rk45"}))
      ->capture_default_str();
  simulate->add_option("--i0", sim.i0, "initial current for rk45 [A]");
  simulate->add_option("--v0", sim.v0, "initial voltage for rk45 [V]");
  simulate->add_option("--grid", sim.grid, "samples per period")->capture_default_str();

  CLI::App* sweep = app.add_subcommand("sweep", "average current over a range of periods");
  add_common(sweep, sweep_opts, false);
  sweep->add_option("--t-from", sw.t_from, "first period [s]")->required();
  sweep->add_option("--t-to", sw.t_to, "last period [s]")->required();
  sweep->add_option("--steps", sw.steps, "number of periods, endpoints included")->required();
  sweep->add_option("--scale", sw.scale, "linear or log")
      ->check(CLI::IsMember({"linear", "log"}))
      ->capture_default_str();

  CLI::App* profiles = app.add_subcommand("profiles", "steady orbits over two normalized periods");
  add_common(profiles, profiles_opts, false);
  profiles->add_option("--t-list", prof.t_list, "comma-separated periods [s]")->required();
  profiles->add_option("--samples", prof.samples, "samples per period")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion& e) {
    out << kToolVersion << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  }

  try {
    if (analyze->parsed()) return cmd_analyze(analyze_opts, out);
    if (simulate->parsed()) return cmd_simulate(simulate_opts, sim, out);
    if (sweep->parsed()) return cmd_sweep(sweep_opts, sw, out, err);
    return cmd_profiles(profiles_opts, prof, out);
  } catch (const InvalidParams& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
}

}  // namespace fcc::cli
