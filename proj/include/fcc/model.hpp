#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "fcc/mat2.hpp"

namespace fcc {

/// Physical inputs of the three-level single-leg converter, SI units.
struct CircuitParams {
  double R = 0.0;    // load resistance, ohm
  double L = 0.0;    // load inductance, H
  double C = 0.0;    // flying capacitance, F
  double Vdc = 0.0;  // source voltage, V
  double T = 0.0;    // switching period, s
};

/// Throws InvalidParams naming the first violated bound, e.g. "L must be > 0".
void validate(const CircuitParams& p);

/// x' = A1 x + b1 on the first half of every period, x' = A2 x on the second.
/// The duty cycle is fixed at 1/2.
struct SwitchedSystem {
  Mat2 A1;             // 1/s
  Mat2 A2;             // 1/s
  Vec2 b1;             // (A/s, 0)
  double half_period;  // s
  CircuitParams params;
};

/// Dimensionless groups a = TR/2L, b = T/2L, c = T/2C and disc = a^2 - 4bc.
/// The sign of disc separates real (> 0) from complex (< 0) eigenvalues.
struct ReducedParams {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double disc = 0.0;
};

[[nodiscard]] SwitchedSystem build_system(const CircuitParams& p);
[[nodiscard]] ReducedParams reduced_params(const CircuitParams& p);

/// Parses the flat key-value parameter format:
///
///   # comment
///   R = 2
///   L = 10e-3
///
/// Keys are R, L, C, Vdc, T; separators '=', ':' or whitespace. Missing keys
/// keep the value already in `base`. Unknown keys (a duty cycle included) are
/// rejected with InvalidParams. The result is not validated.
[[nodiscard]] CircuitParams parse_params(std::string_view text, CircuitParams base = {});

/// Reads and parses a parameter file; throws IoError when it cannot be read.
[[nodiscard]] CircuitParams load_params_file(const std::string& path, CircuitParams base = {});

std::ostream& operator<<(std::ostream& os, const CircuitParams& p);

}  // namespace fcc
