#pragma once

#include <array>
#include <cmath>

#include "qwg/dual.hpp"
#include "qwg/graph.hpp"
#include "qwg/types.hpp"

namespace qwg {

template <class S>
struct Mat2 {
  S a{0.0}, b{0.0}, c{0.0}, d{0.0};  // [[a, b], [c, d]]

  S det() const { return a * d - b * c; }
  Mat2 operator*(const Mat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d,
            c * o.a + d * o.c, c * o.b + d * o.d};
  }
};

/// Fundamental solution of -g'' + q g = k^2 g over a piece of length len with
/// constant q, propagating (g, g') from the left end to the right end. All
/// entries are even in k_eff = sqrt(k^2 - q) and hence entire in k^2 - q; a
/// series branch keeps them accurate through k_eff = 0.
template <class S>
Mat2<S> free_piece_transfer(S k, double q, double len) {
  const S w = k * k - S(q);  // k_eff^2
  const double L2 = len * len;
  if (std::abs(value(w)) * L2 < 1e-10) {
    // cos(zL), sin(zL)/z, -z sin(zL) expanded in w = z^2
    const S wL2 = w * S(L2);
    const S c = S(1.0) - wL2 * S(0.5) + wL2 * wL2 * S(1.0 / 24.0);
    const S s = S(len) * (S(1.0) - wL2 * S(1.0 / 6.0) + wL2 * wL2 * S(1.0 / 120.0));
    const S zs = -w * S(len) * (S(1.0) - wL2 * S(1.0 / 6.0) + wL2 * wL2 * S(1.0 / 120.0));
    return {c, s, zs, c};
  }
  const S z = sqrt(w);
  const S zl = z * S(len);
  const S c = cos(zl);
  const S sn = sin(zl);
  return {c, sn / z, -z * sn, c};
}

/// Transfer matrix of one edge in gauged variables (g, g') where
/// f = e^{i Phi_e(x)} g and D_e f = e^{i Phi_e(x)} g'. det == 1. The physical
/// pair (f, D_e f) at x = l_e is recovered by multiplying with phase(), so
/// for constant a and q the full propagator is e^{i a l} times the free
/// transfer in (g, g') variables.
template <class S>
Mat2<S> gauged_transfer(const Edge& edge, S k) {
  const auto n = edge.q.values.size();
  const double piece = edge.length / static_cast<double>(n);
  Mat2<S> acc{S(1.0), S(0.0), S(0.0), S(1.0)};
  for (std::size_t i = 0; i < n; ++i)
    acc = free_piece_transfer(k, edge.q.values[i], piece) * acc;
  return acc;
}

/// e^{i Phi_e(l_e)}: the factor between gauged and physical variables at the
/// terminal end.
inline cplx transfer_phase(const Edge& edge) {
  return std::exp(cplx(0.0, edge.a.integral(edge.length, edge.length)));
}

/// Physical transfer of (f, D_e f) from x=0 to x=l_e.
inline Mat2<cplx> transfer_matrix(const Edge& edge, cplx k) {
  Mat2<cplx> t = gauged_transfer(edge, k);
  const cplx ph = transfer_phase(edge);
  return {ph * t.a, ph * t.b, ph * t.c, ph * t.d};
}

}  // namespace qwg
