#include "qwg/assemble.hpp"

#include <array>
#include <vector>

namespace qwg {

PanelWeights pencil_a_weights(double eps, const Dilation& dilation) {
  const cplx eth = std::exp(dilation.theta);
  PanelWeights w;
  w.edge = {eps, 1.0 / eps, 0.0, eps};
  w.exterior = {eps * std::exp(-dilation.theta), eth / eps, 0.0, 0.0};
  w.patch = {1.0, 1.0, 0.0, 0.0};  // eps^{d-2} with d = 2
  return w;
}

PanelWeights pencil_b_weights(double eps, const Dilation& dilation) {
  const cplx eth = std::exp(dilation.theta);
  PanelWeights w;
  w.edge = {0.0, 0.0, eps, 0.0};
  w.exterior = {0.0, 0.0, eps * eth, 0.0};
  w.patch = {0.0, 0.0, eps * eps, 0.0};
  return w;
}

PanelWeights gram_l2_weights(double eps, const Dilation& dilation) {
  PanelWeights w;
  w.edge = {0.0, 0.0, eps, 0.0};
  w.exterior = {0.0, 0.0, eps * std::abs(std::exp(dilation.theta)), 0.0};
  w.patch = {0.0, 0.0, eps * eps, 0.0};
  return w;
}

PanelWeights gram_h1_free_weights(double eps) {
  PanelWeights w;
  w.edge = {eps, 1.0 / eps, eps, 0.0};
  w.exterior = {eps, 1.0 / eps, eps, 0.0};
  w.patch = {1.0, 1.0, eps * eps, 0.0};
  return w;
}

namespace {

// Q1 element matrices on a rectangle hx x hy, node order
// (i,j), (i+1,j), (i+1,j+1), (i,j+1)
void quad_matrices(double hx, double hy, std::array<std::array<double, 4>, 4>& kx,
                   std::array<std::array<double, 4>, 4>& ky,
                   std::array<std::array<double, 4>, 4>& m) {
  static const int KX[4][4] = {{2, -2, -1, 1}, {-2, 2, 1, -1},
                               {-1, 1, 2, -2}, {1, -1, -2, 2}};
  static const int KY[4][4] = {{2, 1, -1, -2}, {1, 2, -2, -1},
                               {-1, -2, 2, 1}, {-2, -1, 1, 2}};
  static const int M[4][4] = {{4, 2, 1, 2}, {2, 4, 2, 1},
                              {1, 2, 4, 2}, {2, 1, 2, 4}};
  const double cx = hy / hx / 6.0, cy = hx / hy / 6.0, cm = hx * hy / 36.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      kx[a][b] = cx * KX[a][b];
      ky[a][b] = cy * KY[a][b];
      m[a][b] = cm * M[a][b];
    }
}

// P1 matrices on a triangle with vertices p; separate x- and y-gradient parts
void tri_matrices(const std::array<std::array<double, 2>, 3>& p,
                  std::array<std::array<double, 3>, 3>& kx,
                  std::array<std::array<double, 3>, 3>& ky,
                  std::array<std::array<double, 3>, 3>& m) {
  const double x1 = p[0][0], y1 = p[0][1], x2 = p[1][0], y2 = p[1][1],
               x3 = p[2][0], y3 = p[2][1];
  const double det = (x2 - x1) * (y3 - y1) - (x3 - x1) * (y2 - y1);
  const double area = 0.5 * std::abs(det);
  const double gx[3] = {(y2 - y3) / det, (y3 - y1) / det, (y1 - y2) / det};
  const double gy[3] = {(x3 - x2) / det, (x1 - x3) / det, (x2 - x1) / det};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      kx[a][b] = area * gx[a] * gx[b];
      ky[a][b] = area * gy[a] * gy[b];
      m[a][b] = area / 12.0 * (a == b ? 2.0 : 1.0);
    }
}

}  // namespace

SpMat assemble_raw(const Mesh& mesh, const PanelWeights& weights, bool broken,
                   bool tail_only, double tail_frac) {
  const int n = broken ? mesh.n_broken : mesh.n_dofs;
  std::vector<Eigen::Triplet<cplx>> trip;

  auto scatter = [&](const std::vector<int>& nodes, int a, int b, cplx v) {
    if (v == cplx(0.0)) return;
    int ra, rb;
    cplx f = v;
    if (broken) {
      ra = nodes[a];
      rb = nodes[b];
    } else {
      ra = mesh.dof_of_broken(nodes[a]);
      rb = mesh.dof_of_broken(nodes[b]);
      if (ra < 0 || rb < 0) return;
      // conjugate-paired gauge factors keep the reduction spectrally exact
      f = std::conj(mesh.factor_of[nodes[a]]) * v * mesh.factor_of[nodes[b]];
    }
    trip.emplace_back(ra, rb, f);
  };

  for (const auto& panel : mesh.panels) {
    const ClassWeights& w = weights.of(panel.cls);
    const double hy = CrossSection::width / panel.ny;
    for (int i = 0; i < panel.nx(); ++i) {
      const double hx = panel.xs[i + 1] - panel.xs[i];
      if (tail_only) {
        const bool in_tail =
            panel.cls == PanelClass::exterior_strip &&
            0.5 * (panel.xs[i] + panel.xs[i + 1]) >= (1.0 - tail_frac) * mesh.l_ext;
        if (!in_tail) continue;
      }
      const cplx mass_w =
          w.mass + (panel.qvals.empty() ? cplx(0.0) : w.q * panel.qvals[i]);
      for (int j = 0; j < panel.ny; ++j) {
        const std::vector<int> nodes = {panel.node(i, j), panel.node(i + 1, j),
                                        panel.node(i + 1, j + 1),
                                        panel.node(i, j + 1)};
        if (!panel.triangles()) {
          std::array<std::array<double, 4>, 4> kx, ky, m;
          quad_matrices(hx, hy, kx, ky, m);
          for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
              scatter(nodes, a, b,
                      w.stiff_x * kx[a][b] + w.stiff_y * ky[a][b] +
                          mass_w * m[a][b]);
        } else {
          static const int split[2][3] = {{0, 1, 2}, {0, 2, 3}};
          const std::array<std::array<double, 2>, 3> coords[2] = {
              {{{0, 0}, {hx, 0}, {hx, hy}}}, {{{0, 0}, {hx, hy}, {0, hy}}}};
          for (int t = 0; t < 2; ++t) {
            std::array<std::array<double, 3>, 3> kx, ky, m;
            tri_matrices(coords[t], kx, ky, m);
            for (int a = 0; a < 3; ++a)
              for (int b = 0; b < 3; ++b)
                scatter(nodes, split[t][a], split[t][b],
                        w.stiff_x * kx[a][b] + w.stiff_y * ky[a][b] +
                            mass_w * m[a][b]);
          }
        }
      }
    }
  }
  SpMat out(n, n);
  out.setFromTriplets(trip.begin(), trip.end());
  out.makeCompressed();
  return out;
}

FatGraphOperator assemble(std::shared_ptr<const Mesh> mesh,
                          const Dilation& dilation) {
  FatGraphOperator op;
  op.mesh = mesh;
  op.dilation = dilation;
  op.eps = mesh->eps;
  op.A = assemble_raw(*mesh, pencil_a_weights(mesh->eps, dilation));
  op.B = assemble_raw(*mesh, pencil_b_weights(mesh->eps, dilation));
  return op;
}

SpMat broken_injection(const Mesh& mesh) {
  std::vector<Eigen::Triplet<cplx>> trip;
  for (int nb = 0; nb < mesh.n_broken; ++nb) {
    const int dof = mesh.dof_of_broken(nb);
    if (dof >= 0) trip.emplace_back(nb, dof, mesh.factor_of[nb]);
  }
  SpMat r(mesh.n_broken, mesh.n_dofs);
  r.setFromTriplets(trip.begin(), trip.end());
  r.makeCompressed();
  return r;
}

}  // namespace qwg
