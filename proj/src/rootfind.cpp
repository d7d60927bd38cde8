#include "qwg/rootfind.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>

namespace qwg {

cplx HolomorphicFn::log_derivative(cplx z) const {
  if (logderiv) return logderiv(z);
  const double h = 1e-7 * (1.0 + std::abs(z));
  const cplx fp = (f(z + h) - f(z - h)) / (2.0 * h);
  return fp / f(z);
}

namespace {

// Gauss 7 / Kronrod 15 on [-1, 1]
constexpr double kx[15] = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0,
    0.207784955007898,  0.405845151377397,  0.586087235467691,
    0.741531185599394,  0.864864423359769,  0.949107912342759,
    0.991455371120813};
constexpr double kw[15] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728,
    0.204432940075298, 0.190350578064785, 0.169004726639267,
    0.140653259715525, 0.104790010322250, 0.063092092629979,
    0.022935322010529};
constexpr double gw[7] = {0.129484966168870, 0.279705391489277,
                          0.381830050505119, 0.417959183673469,
                          0.381830050505119, 0.279705391489277,
                          0.129484966168870};

struct Segment {
  cplx a, b;
};

// adaptive GK15 of logderiv along a straight segment
cplx integrate_segment(const HolomorphicFn& fn, cplx a, cplx b, double tol,
                       int budget, int& used) {
  std::deque<Segment> work{{a, b}};
  cplx total = 0.0;
  while (!work.empty()) {
    if (++used > budget)
      fail(ErrorKind::QuadratureStall, "contour quadrature budget exceeded");
    const Segment s = work.front();
    work.pop_front();
    const cplx mid = 0.5 * (s.a + s.b);
    const cplx half = 0.5 * (s.b - s.a);
    cplx kres = 0.0, gres = 0.0;
    for (int i = 0; i < 15; ++i) {
      const cplx z = mid + kx[i] * half;
      const cplx v = fn.log_derivative(z);
      kres += kw[i] * v;
      if (i % 2 == 1) gres += gw[i / 2] * v;
    }
    kres *= half;
    gres *= half;
    const double err = std::abs(kres - gres);
    if (err < tol || std::abs(half) < 1e-14) {
      total += kres;
    } else {
      work.push_back({s.a, mid});
      work.push_back({mid, s.b});
    }
  }
  return total;
}

double contour_min_residual(const HolomorphicFn& fn, const Rectangle& r) {
  double m = std::numeric_limits<double>::infinity();
  const cplx corners[4] = {{r.re0, r.im0}, {r.re1, r.im0}, {r.re1, r.im1},
                           {r.re0, r.im1}};
  for (int side = 0; side < 4; ++side) {
    const cplx a = corners[side], b = corners[(side + 1) % 4];
    for (int i = 0; i <= 8; ++i)
      m = std::min(m, fn.scaled_residual(a + (b - a) * (i / 8.0)));
  }
  return m;
}

}  // namespace

int winding_count(const HolomorphicFn& fn, const Rectangle& rect,
                  double winding_tol) {
  if (contour_min_residual(fn, rect) < 1e-14)
    fail(ErrorKind::ContourThroughZero, "contour passes near a zero");
  const cplx corners[4] = {{rect.re0, rect.im0}, {rect.re1, rect.im0},
                           {rect.re1, rect.im1}, {rect.re0, rect.im1}};
  double tol = winding_tol;
  for (int attempt = 0; attempt < 3; ++attempt) {
    int used = 0;
    cplx total = 0.0;
    bool stalled = false;
    try {
      for (int side = 0; side < 4; ++side)
        total += integrate_segment(fn, corners[side], corners[(side + 1) % 4],
                                   0.1 * tol, 4000, used);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::QuadratureStall) throw;
      stalled = true;
    }
    if (!stalled) {
      const double w = (total / cplx(0.0, 2.0 * pi)).real();
      const double nearest = std::round(w);
      if (std::abs(w - nearest) <= winding_tol &&
          std::abs((total / cplx(0.0, 2.0 * pi)).imag()) <= 10 * winding_tol)
        return static_cast<int>(nearest);
    }
    tol *= 0.1;  // tighten and retry once or twice
  }
  fail(ErrorKind::QuadratureStall, "winding integral does not settle near an integer");
}

cplx refine_root(const HolomorphicFn& fn, cplx k0, double tol_k, double tol_f,
                 int max_iter) {
  cplx k = k0;
  cplx best = k0;
  double best_res = fn.scaled_residual(k0);
  int bad_steps = 0;

  // history for the Muller fallback
  cplx h0 = k0, h1 = k0 + 1e-4 * (1.0 + std::abs(k0)),
       h2 = k0 - 1e-4 * cplx(0.0, 1.0) * (1.0 + std::abs(k0));

  for (int it = 0; it < max_iter; ++it) {
    const cplx ld = fn.log_derivative(k);
    cplx step = (ld == cplx(0.0)) ? cplx(0.0) : -1.0 / ld;
    const double cap = 0.5 * (1.0 + std::abs(k));
    if (std::abs(step) > cap) step *= cap / std::abs(step);
    k += step;
    const double res = fn.scaled_residual(k);
    if (res < best_res) {
      best_res = res;
      best = k;
      bad_steps = 0;
    } else {
      ++bad_steps;
    }
    if (std::abs(step) < tol_k * (1.0 + std::abs(k)) && res < tol_f) return k;

    if (bad_steps >= 3) {
      // Muller step through the three most recent distinct points
      const cplx f0 = fn.f(h0), f1 = fn.f(h1), f2 = fn.f(h2);
      const cplx q = (k - h1) / (h1 - h2 + 1e-300);
      const cplx A = q * f0 - q * (1.0 + q) * f1 + q * q * f2;
      const cplx B = (2.0 * q + 1.0) * f0 - (1.0 + q) * (1.0 + q) * f1 +
                     q * q * f2;
      const cplx C = (1.0 + q) * f0;
      const cplx disc = std::sqrt(B * B - 4.0 * A * C);
      const cplx den1 = B + disc, den2 = B - disc;
      const cplx den = std::abs(den1) > std::abs(den2) ? den1 : den2;
      if (std::abs(den) > 0.0) k = k - (k - h1) * (2.0 * C / den);
      bad_steps = 0;
    }
    h2 = h1;
    h1 = h0;
    h0 = k;
  }
  if (best_res < tol_f) return best;
  fail(ErrorKind::NonConvergent, "root refinement did not converge");
}

namespace {

struct Subdivider {
  const HolomorphicFn& fn;
  const RootFindOptions& opts;
  std::mt19937_64 rng;
  ZeroReport report;

  int winding_or_throw(const Rectangle& r) {
    return winding_count(fn, r, opts.winding_tol);
  }

  void solve_cell(const Rectangle& rect, int count, int depth) {
    report.max_depth_used = std::max(report.max_depth_used, depth);
    if (count == 0) return;
    if (depth > opts.max_depth)
      fail(ErrorKind::NonConvergent, "subdivision depth exceeded");
    if (count == 1) {
      try {
        const cplx root =
            refine_root(fn, rect.center(), opts.tol_k, opts.tol_f, opts.max_newton);
        if (rect.contains(root, 1e-9 * (1.0 + rect.diameter()))) {
          report.zeros.push_back({root, 1, fn.scaled_residual(root)});
          return;
        }
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::NonConvergent) throw;
      }
      // refinement escaped or stalled: keep splitting toward the zero
      if (rect.diameter() < opts.tol_k) {
        report.zeros.push_back(
            {rect.center(), count, fn.scaled_residual(rect.center())});
        return;
      }
    } else {
      // an m-fold zero is only locatable to where |f| ~ d^m clears the
      // roundoff floor of the evaluation; splitting past that makes the
      // winding integrand noise-dominated
      const double cluster_tol =
          std::max(opts.tol_k, 5e-6 * (1.0 + std::abs(rect.center())));
      if (rect.diameter() < cluster_tol) {
        report.zeros.push_back(
            {rect.center(), count, fn.scaled_residual(rect.center())});
        return;
      }
    }
    split(rect, count, depth);
  }

  void split(const Rectangle& rect, int count, int depth) {
    std::uniform_real_distribution<double> jitter(-0.05, 0.05);
    for (int attempt = 0; attempt < opts.max_nudges; ++attempt) {
      const double fx = 0.5 + (attempt ? jitter(rng) : 0.0);
      const double fy = 0.5 + (attempt ? jitter(rng) : 0.0);
      const double xm = rect.re0 + fx * rect.width();
      const double ym = rect.im0 + fy * rect.height();
      const Rectangle q[4] = {{rect.re0, xm, rect.im0, ym},
                              {xm, rect.re1, rect.im0, ym},
                              {rect.re0, xm, ym, rect.im1},
                              {xm, rect.re1, ym, rect.im1}};
      int w[4];
      bool ok = true;
      int sum = 0;
      for (int i = 0; i < 4 && ok; ++i) {
        try {
          w[i] = winding_or_throw(q[i]);
          sum += w[i];
        } catch (const Error&) {
          ok = false;
        }
      }
      if (ok && sum == count) {
        for (int i = 0; i < 4; ++i) solve_cell(q[i], w[i], depth + 1);
        return;
      }
    }
    fail(ErrorKind::NonConvergent, "cell split failed to conserve zero count");
  }
};

}  // namespace

ZeroReport find_zeros(const HolomorphicFn& fn, const Rectangle& rect,
                      const RootFindOptions& opts) {
  Subdivider s{fn, opts, std::mt19937_64(opts.seed), {}};

  Rectangle outer = rect;
  int count = -1;
  for (int attempt = 0;; ++attempt) {
    try {
      count = s.winding_or_throw(outer);
      break;
    } catch (const Error&) {
      if (attempt >= opts.max_nudges)
        fail(ErrorKind::ContourThroughZero,
             "outer contour keeps hitting zeros after max nudges");
      // alternately expand and shrink by ~1e-3 of the diameter
      const double f = 1.0 + (attempt % 2 == 0 ? 1.0 : -1.0) * 1e-3 * (1 + attempt);
      outer = outer.scaled(f);
    }
  }
  s.report.winding_total = count;
  s.solve_cell(outer, count, 0);
  if (s.report.total_multiplicity() != count)
    fail(ErrorKind::NonConvergent,
         "argument-principle count does not match refined roots");
  std::sort(s.report.zeros.begin(), s.report.zeros.end(),
            [](const FoundZero& a, const FoundZero& b) {
              if (a.k.real() != b.k.real()) return a.k.real() < b.k.real();
              return a.k.imag() < b.k.imag();
            });
  return s.report;
}

}  // namespace qwg
