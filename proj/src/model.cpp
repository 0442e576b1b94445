#include "fcc/model.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>

namespace fcc {

namespace {

void require_positive(double value, const char* name) {
  if (!std::isfinite(value) || !(value > 0.0)) {
    throw InvalidParams(std::string(name) + " must be > 0");
  }
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_number(std::string_view token, std::string_view key, int line_no) {
  double value = 0.0;
  const auto* begin = token.data();
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw InvalidParams("line " + std::to_string(line_no) + ": value of " + std::string(key) +
                        " is not a number: '" + std::string(token) + "'");
  }
  return value;
}

}  // namespace

void validate(const CircuitParams& p) {
  require_positive(p.R, "R");
  require_positive(p.L, "L");
  require_positive(p.C, "C");
  require_positive(p.T, "T");
  if (!std::isfinite(p.Vdc) || !(p.Vdc >= 0.0)) throw InvalidParams("Vdc must be >= 0");
}

SwitchedSystem build_system(const CircuitParams& p) {
  validate(p);
  const double damping = p.R / p.L;
  const Mat2 a1{-damping, -1.0 / p.L, 1.0 / p.C, 0.0};
  const Mat2 a2{-damping, 1.0 / p.L, -1.0 / p.C, 0.0};
  return {a1, a2, Vec2{p.Vdc / p.L, 0.0}, 0.5 * p.T, p};
}

ReducedParams reduced_params(const CircuitParams& p) {
  validate(p);
  ReducedParams rp;
  rp.a = p.T * p.R / (2.0 * p.L);
  rp.b = p.T / (2.0 * p.L);
  rp.c = p.T / (2.0 * p.C);
  rp.disc = rp.a * rp.a - 4.0 * rp.b * rp.c;
  return rp;
}

CircuitParams parse_params(std::string_view text, CircuitParams base) {
  CircuitParams p = base;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto sep = line.find_first_of("=: \t");
    if (sep == std::string_view::npos) {
      throw InvalidParams("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string_view key = trim(line.substr(0, sep));
    std::string_view rest = trim(line.substr(sep + 1));
    if (!rest.empty() && (rest.front() == '=' || rest.front() == ':')) rest = trim(rest.substr(1));

    const double value = parse_number(rest, key, line_no);
    if (key == "R") {
      p.R = value;
    } else if (key == "L") {
      p.L = value;
    } else if (key == "C") {
      p.C = value;
    } else if (key == "Vdc") {
      p.Vdc = value;
    } else if (key == "T") {
      p.T = value;
    } else if (key == "D" || key == "duty" || key == "duty_cycle") {
      throw InvalidParams("line " + std::to_string(line_no) + ": the duty cycle is fixed at 1/2");
    } else {
      throw InvalidParams("line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
    }
  }
  return p;
}

CircuitParams load_params_file(const std::string& path, CircuitParams base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read parameter file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_params(buffer.str(), base);
}

std::ostream& operator<<(std::ostream& os, const CircuitParams& p) {
  return os << "R=" << p.R << " L=" << p.L << " C=" << p.C << " Vdc=" << p.Vdc << " T=" << p.T;
}

}  // namespace fcc
