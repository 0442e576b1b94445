#pragma once

#include <array>
#include <cmath>

#include "fcc/errors.hpp"

namespace fcc {

/// Column vector of two reals. For circuit states `first` is the inductor
/// current i and `second` the capacitor voltage v.
struct Vec2 {
  double first = 0.0;
  double second = 0.0;

  constexpr Vec2() = default;
  Vec2(double first_value, double second_value);

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

/// Real 2x2 matrix stored row-major as (m11, m12, m21, m22).
class Mat2 {
 public:
  constexpr Mat2() = default;
  Mat2(double m11, double m12, double m21, double m22);

  static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static Mat2 diagonal(double d1, double d2) { return {d1, 0.0, 0.0, d2}; }

  /// Zero-based element access.
  [[nodiscard]] double operator()(int row, int col) const { return m_[static_cast<std::size_t>(2 * row + col)]; }

  [[nodiscard]] double m11() const { return m_[0]; }
  [[nodiscard]] double m12() const { return m_[1]; }
  [[nodiscard]] double m21() const { return m_[2]; }
  [[nodiscard]] double m22() const { return m_[3]; }

  [[nodiscard]] const std::array<double, 4>& entries() const { return m_; }

  friend bool operator==(const Mat2&, const Mat2&) = default;

 private:
  std::array<double, 4> m_{};
};

/// p(lambda) = lambda^2 + alpha * lambda + beta.
struct CharPoly2 {
  double alpha = 0.0;
  double beta = 0.0;
};

Mat2 operator+(const Mat2& a, const Mat2& b);
Mat2 operator-(const Mat2& a, const Mat2& b);
Mat2 operator-(const Mat2& a);
Mat2 operator*(double s, const Mat2& a);
Mat2 operator*(const Mat2& a, const Mat2& b);
Vec2 operator*(const Mat2& a, const Vec2& x);

Vec2 operator+(const Vec2& a, const Vec2& b);
Vec2 operator-(const Vec2& a, const Vec2& b);
Vec2 operator*(double s, const Vec2& x);

inline Mat2 mat_mul(const Mat2& a, const Mat2& b) { return a * b; }
inline Vec2 mat_vec(const Mat2& a, const Vec2& x) { return a * x; }

[[nodiscard]] double trace(const Mat2& a);

/// m11*m22 - m12*m21, evaluated with Kahan's fma scheme so that the result
/// is accurate to a few ulps even when the two products nearly cancel.
[[nodiscard]] double det(const Mat2& a);

/// Closed-form adjugate inverse. Throws SingularMatrix when |det| <= 1e-300.
[[nodiscard]] Mat2 inverse(const Mat2& a);

/// alpha = -trace, beta = det.
[[nodiscard]] CharPoly2 charpoly(const Mat2& a);

[[nodiscard]] double frobenius_norm(const Mat2& a);
[[nodiscard]] double max_abs(const Vec2& x);

inline constexpr double kSingularDetThreshold = 1e-300;

enum class ExpmBranch {
  automatic,
  hyperbolic,     // real distinct eigenvalues: cosh / sinh(x)/x
  trigonometric,  // complex pair: cos / sin(x)/x
  series,         // near-repeated eigenvalue: truncated Taylor series
};

/// Matrix exponential from the Cayley-Hamilton closed form
///
///   e^A = e^{tau/2} [ C(delta) I + S(delta) (A - tau/2 I) ],
///   delta = tau^2/4 - det A = ((m11 - m22)/2)^2 + m12*m21,
///
/// with (C, S) = (cosh, sinh(x)/x) of sqrt(delta) for delta > 0, (cos,
/// sin(x)/x) of sqrt(-delta) for delta < 0 and a six-term series in delta
/// when |delta| < 1e-6 * max(1, tau^2). Complex eigenvalues are never formed.
///
/// `branch` forces one formula (used to test continuity across the branch
/// boundary); forcing hyperbolic or trigonometric on the wrong sign of delta
/// throws DomainError.
[[nodiscard]] Mat2 expm_closed(const Mat2& a, ExpmBranch branch = ExpmBranch::automatic);

/// Scaling and squaring with a degree-18 Taylor kernel (scaled inf-norm
/// <= 0.5). Independent of expm_closed; used as its oracle.
[[nodiscard]] Mat2 expm_squaring(const Mat2& a);

}  // namespace fcc
