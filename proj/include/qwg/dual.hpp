#pragma once

#include <cmath>
#include <complex>

namespace qwg {

/// Forward-mode dual number over complex doubles. Running the secular
/// assembly on Dual yields the matrix and its exact k-derivative in one pass,
/// so Newton steps and the argument-principle integrand need no finite
/// differencing.
struct Dual {
  std::complex<double> v{0.0, 0.0};  // value
  std::complex<double> d{0.0, 0.0};  // derivative w.r.t. the seed variable

  Dual() = default;
  Dual(std::complex<double> value) : v(value) {}
  Dual(std::complex<double> value, std::complex<double> deriv)
      : v(value), d(deriv) {}
  Dual(double value) : v(value) {}

  static Dual seed(std::complex<double> value) { return Dual(value, 1.0); }
};

inline Dual operator+(const Dual& a, const Dual& b) {
  return {a.v + b.v, a.d + b.d};
}
inline Dual operator-(const Dual& a, const Dual& b) {
  return {a.v - b.v, a.d - b.d};
}
inline Dual operator-(const Dual& a) { return {-a.v, -a.d}; }
inline Dual operator*(const Dual& a, const Dual& b) {
  return {a.v * b.v, a.d * b.v + a.v * b.d};
}
inline Dual operator/(const Dual& a, const Dual& b) {
  const auto q = a.v / b.v;
  return {q, (a.d - q * b.d) / b.v};
}

inline Dual sin(const Dual& a) {
  return {std::sin(a.v), std::cos(a.v) * a.d};
}
inline Dual cos(const Dual& a) {
  return {std::cos(a.v), -std::sin(a.v) * a.d};
}
inline Dual exp(const Dual& a) {
  const auto e = std::exp(a.v);
  return {e, e * a.d};
}
inline Dual sqrt(const Dual& a) {
  const auto r = std::sqrt(a.v);
  return {r, a.d / (2.0 * r)};
}

inline std::complex<double> value(const Dual& a) { return a.v; }
inline std::complex<double> value(const std::complex<double>& a) { return a; }

}  // namespace qwg
