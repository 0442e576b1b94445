#include "fcc/mat2.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fcc {

namespace {

void require_finite(double value, const char* what) {
  if (!std::isfinite(value)) {
    throw NonFiniteValue(std::string(what) + " has a non-finite entry");
  }
}

// Series threshold and length for the near-repeated eigenvalue branch.
constexpr double kSeriesRelThreshold = 1e-6;
constexpr int kSeriesTerms = 6;

struct CoshSinhc {
  double c;  // cosh(sqrt(delta)) continued analytically
  double s;  // sinh(sqrt(delta)) / sqrt(delta), likewise
};

CoshSinhc series_pair(double delta) {
  // C = sum delta^k/(2k)!, S = sum delta^k/(2k+1)!
  double c = 0.0;
  double s = 0.0;
  double power = 1.0;
  double fact_even = 1.0;  // (2k)!
  double fact_odd = 1.0;   // (2k+1)!
  for (int k = 0; k < kSeriesTerms; ++k) {
    c += power / fact_even;
    s += power / fact_odd;
    power *= delta;
    fact_even = fact_odd * (2.0 * k + 2.0);
    fact_odd = fact_even * (2.0 * k + 3.0);
  }
  return {c, s};
}

}  // namespace

Vec2::Vec2(double first_value, double second_value) : first(first_value), second(second_value) {
  require_finite(first, "Vec2");
  require_finite(second, "Vec2");
}

Mat2::Mat2(double m11, double m12, double m21, double m22) : m_{m11, m12, m21, m22} {
  for (double v : m_) require_finite(v, "Mat2");
}

Mat2 operator+(const Mat2& a, const Mat2& b) {
  return {a.m11() + b.m11(), a.m12() + b.m12(), a.m21() + b.m21(), a.m22() + b.m22()};
}

Mat2 operator-(const Mat2& a, const Mat2& b) {
  return {a.m11() - b.m11(), a.m12() - b.m12(), a.m21() - b.m21(), a.m22() - b.m22()};
}

Mat2 operator-(const Mat2& a) { return {-a.m11(), -a.m12(), -a.m21(), -a.m22()}; }

Mat2 operator*(double s, const Mat2& a) { return {s * a.m11(), s * a.m12(), s * a.m21(), s * a.m22()}; }

Mat2 operator*(const Mat2& a, const Mat2& b) {
  return {a.m11() * b.m11() + a.m12() * b.m21(), a.m11() * b.m12() + a.m12() * b.m22(),
          a.m21() * b.m11() + a.m22() * b.m21(), a.m21() * b.m12() + a.m22() * b.m22()};
}

Vec2 operator*(const Mat2& a, const Vec2& x) {
  return {a.m11() * x.first + a.m12() * x.second, a.m21() * x.first + a.m22() * x.second};
}

Vec2 operator+(const Vec2& a, const Vec2& b) { return {a.first + b.first, a.second + b.second}; }
Vec2 operator-(const Vec2& a, const Vec2& b) { return {a.first - b.first, a.second - b.second}; }
Vec2 operator*(double s, const Vec2& x) { return {s * x.first, s * x.second}; }

double trace(const Mat2& a) { return a.m11() + a.m22(); }

double det(const Mat2& a) {
  const double w = a.m12() * a.m21();
  const double e = std::fma(a.m12(), a.m21(), -w);
  const double f = std::fma(a.m11(), a.m22(), -w);
  return f - e;
}

Mat2 inverse(const Mat2& a) {
  const double d = det(a);
  if (!(std::abs(d) > kSingularDetThreshold)) {
    throw SingularMatrix("matrix is singular (|det| <= 1e-300)");
  }
  return {a.m22() / d, -a.m12() / d, -a.m21() / d, a.m11() / d};
}

CharPoly2 charpoly(const Mat2& a) { return {-trace(a), det(a)}; }

double frobenius_norm(const Mat2& a) {
  return std::hypot(std::hypot(a.m11(), a.m12()), std::hypot(a.m21(), a.m22()));
}

double max_abs(const Vec2& x) { return std::max(std::abs(x.first), std::abs(x.second)); }

Mat2 expm_closed(const Mat2& a, ExpmBranch branch) {
  const double tau = trace(a);
  const double half_tau = 0.5 * tau;
  const double half_gap = 0.5 * (a.m11() - a.m22());
  // delta = tau^2/4 - det(A), written without the cancelling subtraction.
  const double delta = std::fma(half_gap, half_gap, a.m12() * a.m21());

  if (branch == ExpmBranch::automatic) {
    if (std::abs(delta) < kSeriesRelThreshold * std::max(1.0, tau * tau)) {
      branch = ExpmBranch::series;
    } else {
      branch = delta > 0.0 ? ExpmBranch::hyperbolic : ExpmBranch::trigonometric;
    }
  }

  double f0 = 0.0;  // coefficient of I
  double f1 = 0.0;  // coefficient of (A - tau/2 I)
  switch (branch) {
    case ExpmBranch::series: {
      const auto [c, s] = series_pair(delta);
      const double scale = std::exp(half_tau);
      f0 = scale * c;
      f1 = scale * s;
      break;
    }
    case ExpmBranch::hyperbolic: {
      if (!(delta > 0.0)) throw DomainError("hyperbolic branch needs a positive discriminant");
      const double root = std::sqrt(delta);
      // Larger eigenvalue; formed from the product of the roots when the sum
      // would cancel.
      double upper = half_tau + root;
      if (half_tau < 0.0) {
        const double lower = half_tau - root;
        upper = det(a) / lower;
      }
      const double top = std::exp(upper);
      const double ratio = std::exp(-2.0 * root);  // e^{lower - upper}
      f0 = 0.5 * top * (1.0 + ratio);
      f1 = top * (-std::expm1(-2.0 * root)) / (2.0 * root);
      break;
    }
    case ExpmBranch::trigonometric: {
      if (!(delta < 0.0)) throw DomainError("trigonometric branch needs a negative discriminant");
      const double omega = std::sqrt(-delta);
      const double scale = std::exp(half_tau);
      f0 = scale * std::cos(omega);
      f1 = scale * std::sin(omega) / omega;
      break;
    }
    case ExpmBranch::automatic:
      break;
  }

  return {f0 + f1 * half_gap, f1 * a.m12(), f1 * a.m21(), f0 - f1 * half_gap};
}

Mat2 expm_squaring(const Mat2& a) {
  const double norm = std::max(std::abs(a.m11()) + std::abs(a.m12()), std::abs(a.m21()) + std::abs(a.m22()));
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Mat2 x = std::ldexp(1.0, -squarings) * a;

  // Horner evaluation of sum_{k=0}^{18} x^k / k!.
  constexpr int kDegree = 18;
  Mat2 result = Mat2::identity();
  for (int k = kDegree; k >= 1; --k) {
    result = Mat2::identity() + (1.0 / k) * (x * result);
  }
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

}  // namespace fcc
