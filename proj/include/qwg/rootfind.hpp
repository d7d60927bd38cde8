#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "qwg/types.hpp"

namespace qwg {

/// Axis-aligned search rectangle in the complex plane, counterclockwise.
struct Rectangle {
  double re0, re1, im0, im1;

  cplx center() const { return {0.5 * (re0 + re1), 0.5 * (im0 + im1)}; }
  double width() const { return re1 - re0; }
  double height() const { return im1 - im0; }
  double diameter() const { return std::hypot(width(), height()); }
  bool contains(cplx z, double margin = 0.0) const {
    return z.real() >= re0 - margin && z.real() <= re1 + margin &&
           z.imag() >= im0 - margin && z.imag() <= im1 + margin;
  }
  Rectangle scaled(double factor) const {
    const cplx c = center();
    return {c.real() - 0.5 * factor * width(), c.real() + 0.5 * factor * width(),
            c.imag() - 0.5 * factor * height(), c.imag() + 0.5 * factor * height()};
  }
};

/// Holomorphic scalar function with optional exact logarithmic derivative.
/// When logderiv is absent a central difference of log f is used.
struct HolomorphicFn {
  std::function<cplx(cplx)> f;
  std::function<cplx(cplx)> logderiv;   // f'/f
  std::function<double(cplx)> residual; // scaled |f|, defaults to |f(z)|

  cplx log_derivative(cplx z) const;
  double scaled_residual(cplx z) const {
    return residual ? residual(z) : std::abs(f(z));
  }
};

struct RootFindOptions {
  double tol_k = 1e-10;       // root refinement step tolerance
  double tol_f = 1e-10;       // scaled-residual tolerance
  double winding_tol = 1e-3;  // max distance of the contour value to an integer
  int max_nudges = 8;
  int max_newton = 50;
  int max_depth = 40;
  std::uint64_t seed = 1;
};

/// Argument-principle count of zeros inside rect (no nudging; throws
/// ContourThroughZero / QuadratureStall).
int winding_count(const HolomorphicFn& fn, const Rectangle& rect,
                  double winding_tol = 1e-3);

/// Newton iteration on f with exact log-derivative, Muller fallback after
/// three non-improving steps.
cplx refine_root(const HolomorphicFn& fn, cplx k0, double tol_k = 1e-10,
                 double tol_f = 1e-10, int max_iter = 50);

struct FoundZero {
  cplx k;
  int multiplicity = 1;
  double residual = 0.0;
};

struct ZeroReport {
  std::vector<FoundZero> zeros;  // sorted by (Re, Im)
  int winding_total = 0;
  int max_depth_used = 0;
  int total_multiplicity() const {
    int n = 0;
    for (const auto& z : zeros) n += z.multiplicity;
    return n;
  }
};

/// Quadtree subdivision of rect until each cell holds one zero (refined by
/// Newton) or shrinks below tol_k (reported with the cell's multiplicity).
/// Guarantees winding_total == sum of multiplicities or throws NonConvergent.
ZeroReport find_zeros(const HolomorphicFn& fn, const Rectangle& rect,
                      const RootFindOptions& opts = {});

}  // namespace qwg
