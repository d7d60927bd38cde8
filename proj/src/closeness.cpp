#include "qwg/closeness.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace qwg {

namespace {

struct Tri {
  std::vector<Eigen::Triplet<cplx>> t;
  void add(int r, int c, cplx v) {
    if (v != cplx(0.0)) t.emplace_back(r, c, v);
  }
  SpMat mat(int rows, int cols) {
    SpMat m(rows, cols);
    m.setFromTriplets(t.begin(), t.end());
    m.makeCompressed();
    return m;
  }
};

// P1 chain element matrices: stiffness [[1,-1],[-1,1]]/h, mass h/6*[[2,1],[1,2]]
void add_chain(Tri& stiff, Tri& mass, const std::vector<double>& xs, int node0,
               cplx ws, cplx wm, const std::vector<double>* qvals = nullptr,
               cplx wq = 0.0) {
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double h = xs[i + 1] - xs[i];
    const int a = node0 + static_cast<int>(i), b = a + 1;
    stiff.add(a, a, ws / h);
    stiff.add(b, b, ws / h);
    stiff.add(a, b, -ws / h);
    stiff.add(b, a, -ws / h);
    cplx m = wm;
    if (qvals) m = m + wq * (*qvals)[i];
    mass.add(a, a, m * h / 3.0);
    mass.add(b, b, m * h / 3.0);
    mass.add(a, b, m * h / 6.0);
    mass.add(b, a, m * h / 6.0);
  }
}

}  // namespace

int GraphDiscretization::dof_of_vertex(VertexId v) const {
  for (const auto& c : chains) {
    if (c.exterior) continue;
    if (c.vfrom == v) return dof_of_broken(c.node(0));
    if (c.vto == v) return dof_of_broken(c.node(c.nx()));
  }
  fail(ErrorKind::InputError, "vertex has no internal chain");
}

GraphDiscretization discretize_graph(const FatGraphModel& model,
                                     const Mesh& mesh,
                                     const Dilation& dilation) {
  if (!model.terminal_phases.empty())
    fail(ErrorKind::IncompatibleDecomposition,
         "closeness maps require zero magnetic flux (gauge the graph first)");
  const auto& dec = model.decomposition;
  GraphDiscretization gd;

  // chains share the strip x-grids of the waveguide mesh
  for (std::size_t p = 0; p < mesh.panels.size(); ++p) {
    const Panel& panel = mesh.panels[p];
    if (panel.cls == PanelClass::vertex_patch) continue;
    GraphDiscretization::Chain c;
    c.id = panel.tag;
    c.exterior = panel.cls == PanelClass::exterior_strip;
    c.xs = panel.xs;
    c.node0 = gd.n_broken;
    c.panel = static_cast<int>(p);
    if (c.exterior) {
      c.vfrom = -1;
      for (const auto& x : dec.external)
        if (x.id == c.id) c.vfrom = x.from;
      c.vto = -1;
    } else {
      const Edge& e = dec.internal.edge(c.id);
      c.vfrom = e.from;
      c.vto = e.to ? *e.to : -1;
    }
    gd.n_broken += static_cast<int>(c.xs.size());
    gd.chains.push_back(std::move(c));
  }

  // conforming reduction: shared vertex values (interior and Gamma_0 alike)
  std::vector<int> parent(gd.n_broken);
  for (int i = 0; i < gd.n_broken; ++i) parent[i] = i;
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  auto unite = [&](int a, int b) { parent[find(a)] = find(b); };
  std::map<VertexId, int> rep;
  auto attach = [&](VertexId v, int node) {
    auto it = rep.find(v);
    if (it == rep.end())
      rep[v] = node;
    else
      unite(node, it->second);
  };
  for (const auto& c : gd.chains) {
    if (c.exterior) {
      attach(c.vfrom, c.node(0));
    } else {
      attach(c.vfrom, c.node(0));
      attach(c.vto, c.node(c.nx()));
    }
  }
  std::map<int, int> index;
  gd.conf_of.resize(gd.n_broken);
  for (int i = 0; i < gd.n_broken; ++i) {
    const int r = find(i);
    auto it = index.find(r);
    if (it == index.end()) it = index.emplace(r, static_cast<int>(index.size())).first;
    gd.conf_of[i] = it->second;
  }
  gd.n_conf = static_cast<int>(index.size());

  std::set<int> clamped;
  for (const auto& c : gd.chains)
    if (c.exterior) clamped.insert(gd.conf_of[c.node(c.nx())]);
  gd.dof_of_conf.assign(gd.n_conf, -1);
  int dof = 0;
  for (int i = 0; i < gd.n_conf; ++i)
    if (!clamped.count(i)) gd.dof_of_conf[i] = dof++;
  gd.n_dofs = dof;

  // broken matrices, then reduce
  const cplx eth = std::exp(dilation.theta);
  Tri sA, mA, sD, mD, mPair, mL2;
  for (const auto& c : gd.chains) {
    const cplx ws_dil = c.exterior ? std::exp(-dilation.theta) : cplx(1.0);
    const cplx wm_pair = c.exterior ? eth : cplx(1.0);
    const cplx wm_l2 = c.exterior ? std::abs(eth) : 1.0;
    std::vector<double> qvals;
    if (!c.exterior) {
      const Edge& e = dec.internal.edge(c.id);
      qvals.resize(c.nx());
      for (int i = 0; i < c.nx(); ++i)
        qvals[i] = e.q.at(0.5 * (c.xs[i] + c.xs[i + 1]), e.length);
    } else {
      qvals.assign(c.nx(), 0.0);
    }
    add_chain(sA, mA, c.xs, c.node0, ws_dil, 0.0, &qvals, 1.0);
    add_chain(sD, mD, c.xs, c.node0, 1.0, wm_l2);
    add_chain(mPair, mPair, c.xs, c.node0, 0.0, wm_pair);
    add_chain(mL2, mL2, c.xs, c.node0, 0.0, wm_l2);
  }
  const SpMat Ab = sA.mat(gd.n_broken, gd.n_broken) + mA.mat(gd.n_broken, gd.n_broken);
  const SpMat Db = sD.mat(gd.n_broken, gd.n_broken);
  const SpMat L2b = mL2.mat(gd.n_broken, gd.n_broken);
  const SpMat Pairb = mPair.mat(gd.n_broken, gd.n_broken);

  Tri rt;
  for (int nb = 0; nb < gd.n_broken; ++nb) {
    const int d = gd.dof_of_broken(nb);
    if (d >= 0) rt.add(nb, d, 1.0);
  }
  gd.Rg = rt.mat(gd.n_broken, gd.n_dofs);

  gd.A = gd.Rg.transpose() * Ab * gd.Rg;
  gd.Bp = gd.Rg.transpose() * Pairb * gd.Rg;
  gd.B0 = gd.Rg.transpose() * L2b * gd.Rg;
  gd.G1 = gd.Rg.transpose() * (Db + L2b) * gd.Rg;
  gd.B0b = L2b;
  gd.Bpb = Pairb;
  return gd;
}

namespace {

std::vector<double> transverse_weights(int ny) {
  std::vector<double> w(ny + 1, 1.0 / ny);
  w.front() *= 0.5;
  w.back() *= 0.5;
  return w;
}

double smoothstep_cutoff(double dist, double support) {
  if (dist >= support) return 0.0;
  const double t = dist / support;
  return 1.0 - (3.0 * t * t - 2.0 * t * t * t);
}

}  // namespace

IdentificationMaps build_maps(const GraphDiscretization& gd, const Mesh& mesh,
                              const FatGraphModel& model) {
  const auto& dec = model.decomposition;
  const double se = std::sqrt(mesh.eps);
  IdentificationMaps maps;

  Tri jb, jpb;
  for (const auto& c : gd.chains) {
    const Panel& panel = mesh.panels[c.panel];
    if (panel.xs.size() != c.xs.size())
      fail(ErrorKind::IncompatibleDecomposition, "chain/strip grid mismatch");
    const auto wy = transverse_weights(panel.ny);
    for (int i = 0; i <= c.nx(); ++i)
      for (int j = 0; j <= panel.ny; ++j) {
        jb.add(panel.node(i, j), c.node(i), 1.0 / se);
        jpb.add(c.node(i), panel.node(i, j), se * wy[j]);
      }
  }
  maps.Jb = jb.mat(mesh.n_broken, gd.n_broken);
  maps.Jpb = jpb.mat(gd.n_broken, mesh.n_broken);

  maps.Rw = broken_injection(mesh);

  // J^1: strips as J, patches take the vertex value (continuous overall)
  Tri j1;
  std::set<int> written;
  auto put = [&](int wdof, int gdof) {
    if (wdof < 0 || gdof < 0 || written.count(wdof)) return;
    written.insert(wdof);
    j1.add(wdof, gdof, 1.0 / se);
  };
  for (const auto& c : gd.chains) {
    const Panel& panel = mesh.panels[c.panel];
    for (int i = 0; i <= c.nx(); ++i) {
      const int gdof = gd.dof_of_broken(c.node(i));
      for (int j = 0; j <= panel.ny; ++j)
        put(mesh.dof_of_broken(panel.node(i, j)), gdof);
    }
  }
  for (const auto& panel : mesh.panels) {
    if (panel.cls != PanelClass::vertex_patch) continue;
    const int gdof = gd.dof_of_vertex(panel.tag);
    for (int i = 0; i <= panel.nx(); ++i)
      for (int j = 0; j <= panel.ny; ++j)
        put(mesh.dof_of_broken(panel.node(i, j)), gdof);
  }
  maps.J1 = j1.mat(mesh.n_dofs, gd.n_dofs);

  // patch averages C_v: broken-node area weights per vertex
  std::map<VertexId, std::map<int, double>> patch_weight;  // wg dof -> weight
  {
    std::map<VertexId, double> vol;
    std::map<VertexId, std::map<int, double>> raw;
    for (const auto& panel : mesh.panels) {
      if (panel.cls != PanelClass::vertex_patch) continue;
      const auto wy = transverse_weights(panel.ny);
      for (int i = 0; i <= panel.nx(); ++i) {
        // trapezoid x-weight (exact for the nodal average of P1 on the grid)
        double wx = 0.0;
        if (i > 0) wx += 0.5 * (panel.xs[i] - panel.xs[i - 1]);
        if (i < panel.nx()) wx += 0.5 * (panel.xs[i + 1] - panel.xs[i]);
        for (int j = 0; j <= panel.ny; ++j) {
          const int d = mesh.dof_of_broken(panel.node(i, j));
          if (d < 0) continue;
          raw[panel.tag][d] += wx * wy[j] * mesh.eps;  // wy already /width
          vol[panel.tag] += wx * wy[j];
        }
      }
    }
    for (auto& [v, row] : raw) {
      const double volume = vol[v];
      for (auto& [d, w] : row) patch_weight[v][d] = w / (mesh.eps * volume);
    }
  }

  // J'^1: nodal interpolation of eps^{1/2}[N_e u + sum_v rho_{v,e}(C_v u - N_e u(v))]
  Tri jp1;
  std::set<int> rows_done;
  for (const auto& c : gd.chains) {
    const Panel& panel = mesh.panels[c.panel];
    const auto wy = transverse_weights(panel.ny);
    const double len = c.xs.back();
    for (int i = 0; i <= c.nx(); ++i) {
      const int gdof = gd.dof_of_broken(c.node(i));
      if (gdof < 0 || rows_done.count(gdof)) continue;
      rows_done.insert(gdof);
      std::map<int, cplx> coef;
      for (int j = 0; j <= panel.ny; ++j) {
        const int d = mesh.dof_of_broken(panel.node(i, j));
        if (d >= 0) coef[d] += se * wy[j];
      }
      if (!c.exterior) {
        struct End {
          double dist;
          int iv;
          VertexId v;
        };
        std::vector<End> ends;
        if (c.vfrom >= 0 && !dec.is_boundary(c.vfrom))
          ends.push_back({c.xs[i], 0, c.vfrom});
        if (c.vto >= 0 && !dec.is_boundary(c.vto))
          ends.push_back({len - c.xs[i], c.nx(), c.vto});
        for (const auto& end : ends) {
          const double support = std::min(len / 2.0, dec.l0);
          const double rho = smoothstep_cutoff(end.dist, support);
          if (rho <= 0.0 || !patch_weight.count(end.v)) continue;
          for (const auto& [d, w] : patch_weight.at(end.v))
            coef[d] += se * rho * w;
          for (int j = 0; j <= panel.ny; ++j) {
            const int d = mesh.dof_of_broken(panel.node(end.iv, j));
            if (d >= 0) coef[d] -= se * rho * wy[j];
          }
        }
      }
      for (const auto& [d, v] : coef) jp1.add(gdof, d, v);
    }
  }
  maps.Jp1 = jp1.mat(gd.n_dofs, mesh.n_dofs);
  return maps;
}

double operator_norm_dense(const SpMat& X, const SpMat& gout, const SpMat& gin) {
  const Eigen::MatrixXcd S = Eigen::MatrixXcd(X.adjoint() * (gout * X));
  const Eigen::MatrixXcd G = Eigen::MatrixXcd(gin);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> es(
      0.5 * (S + S.adjoint()), 0.5 * (G + G.adjoint()),
      Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
  if (es.info() != Eigen::Success)
    fail(ErrorKind::SingularGram, "generalized eigensolve failed");
  const double lam = es.eigenvalues().maxCoeff();
  return lam > 0.0 ? std::sqrt(lam) : 0.0;
}

namespace {

/// largest generalized eigenvalue of (apply_s, gin) by deterministic power
/// iteration; apply_s must be Hermitian PSD w.r.t. the gin inner product.
double operator_norm_power(
    int n, const std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>& apply_s,
    const SpMat& gin) {
  Eigen::SimplicialLDLT<SpMat> chol(gin);
  if (chol.info() != Eigen::Success)
    fail(ErrorKind::SingularGram, "Gram factorization failed");
  Eigen::VectorXcd v = Eigen::VectorXcd::Ones(n);
  v /= std::sqrt(std::abs(v.dot(gin * v)));
  double rho = 0.0;
  for (int it = 0; it < 2000; ++it) {
    const Eigen::VectorXcd sv = apply_s(v);
    const double rho_new = std::real(v.dot(sv));
    const Eigen::VectorXcd y = chol.solve(sv);
    const double yn = std::sqrt(std::abs(y.dot(gin * y)));
    if (yn < 1e-300) return 0.0;
    v = y / yn;
    if (it > 3 && std::abs(rho_new - rho) < 1e-10 * std::max(rho_new, 1e-30)) {
      rho = rho_new;
      break;
    }
    rho = rho_new;
  }
  return rho > 0.0 ? std::sqrt(rho) : 0.0;
}

}  // namespace

ClosenessReport delta_report(const GraphDiscretization& gd,
                             const FatGraphOperator& wg,
                             const IdentificationMaps& maps) {
  const Mesh& mesh = *wg.mesh;
  ClosenessReport rep;
  rep.eps = mesh.eps;
  rep.h = mesh.max_diameter();

  const SpMat Bwb = assemble_raw(mesh, gram_l2_weights(mesh.eps, wg.dilation), true);
  const SpMat G1w = assemble_raw(mesh, gram_h1_free_weights(mesh.eps));

  // delta_adj: J - J'* over the broken L2 spaces;
  // J'* = B0b^{-1} Jpb^H Bg0b, so test B_wb J - Jpb^H Bg0b directly in the
  // dual pairing: ||J - J'*||_{0->0} = || B_wb^{-1}(B_wb J - Jpb^H B0b) ||.
  {
    const SpMat Y = SpMat(Bwb * maps.Jb) - SpMat(maps.Jpb.adjoint() * gd.B0b);
    // operator X = B_wb^{-1} Y : graph-broken -> wg-broken; norm via
    // lambda_max(Y^H B_wb^{-1} Y, B0b)
    Eigen::SimplicialLDLT<SpMat> chol(Bwb);
    if (chol.info() != Eigen::Success)
      fail(ErrorKind::SingularGram, "broken Gram factorization failed");
    const Eigen::MatrixXcd Yd(Y);
    const Eigen::MatrixXcd Z = chol.solve(Yd);
    const Eigen::MatrixXcd S = Yd.adjoint() * Z;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> es(
        0.5 * (S + S.adjoint()), Eigen::MatrixXcd(gd.B0b),
        Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
    rep.delta_adj = std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
  }

  // delta_inv1: (1 - J'J) on H^1 -> broken L2
  {
    const SpMat X = SpMat(gd.Rg - SpMat(maps.Jpb * SpMat(maps.Jb * gd.Rg)));
    rep.delta_inv1 = operator_norm_dense(X, gd.B0b, gd.G1);
  }

  // delta_inv2: (1 - JJ') on the waveguide H^1 -> broken L2 (power iteration)
  {
    const SpMat X = SpMat(maps.Rw - SpMat(maps.Jb * SpMat(maps.Jpb * maps.Rw)));
    auto apply_s = [&](const Eigen::VectorXcd& v) {
      return Eigen::VectorXcd(X.adjoint() * (Bwb * (X * v)));
    };
    rep.delta_inv2 = operator_norm_power(mesh.n_dofs, apply_s, G1w);
  }

  // delta_form: D = Jp1^H A_g - A_wg J1, norm H^1 -> dual H^1
  {
    const SpMat D = SpMat(maps.Jp1.adjoint() * gd.A) - SpMat(wg.A * maps.J1);
    Eigen::SimplicialLDLT<SpMat> chol(G1w);
    if (chol.info() != Eigen::Success)
      fail(ErrorKind::SingularGram, "H1 Gram factorization failed");
    const Eigen::MatrixXcd Dd(D);
    const Eigen::MatrixXcd Z = chol.solve(Dd);
    const Eigen::MatrixXcd S = Dd.adjoint() * Z;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> es(
        0.5 * (S + S.adjoint()), Eigen::MatrixXcd(gd.G1),
        Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
    rep.delta_form = std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
  }

  rep.norm_j = operator_norm_dense(maps.Jb, Bwb, gd.B0b);
  {
    auto apply_s = [&](const Eigen::VectorXcd& v) {
      return Eigen::VectorXcd(maps.Jpb.adjoint() * (gd.B0b * (maps.Jpb * v)));
    };
    rep.norm_jp = operator_norm_power(mesh.n_broken, apply_s, Bwb);
  }
  return rep;
}

ResolventDiff resolvent_diff_norm(cplx z, const GraphDiscretization& gd,
                                  const FatGraphOperator& wg,
                                  const IdentificationMaps& maps) {
  const Mesh& mesh = *wg.mesh;
  const SpMat Bwb0 = assemble_raw(mesh, gram_l2_weights(mesh.eps, wg.dilation), true);
  const SpMat Bwbp = assemble_raw(mesh, pencil_b_weights(mesh.eps, wg.dilation), true);

  Eigen::SparseLU<SpMat> lu_w(SpMat(wg.A - z * wg.B));
  Eigen::SparseLU<SpMat> lu_g(SpMat(gd.A - z * gd.Bp));
  if (lu_w.info() != Eigen::Success || lu_g.info() != Eigen::Success)
    fail(ErrorKind::ShiftOnSpectrum, "z is (numerically) on a pencil spectrum");

  // X1 = R_w resolve_w(Rw^T Bwbp Jb) - Jb resolve_g(Rg^T Bpb): broken graph input
  const Eigen::MatrixXcd rhs_w =
      Eigen::MatrixXcd(SpMat(maps.Rw.adjoint() * SpMat(Bwbp * maps.Jb)));
  const Eigen::MatrixXcd rhs_g =
      Eigen::MatrixXcd(SpMat(gd.Rg.adjoint() * gd.Bpb));
  const Eigen::MatrixXcd sol_w = lu_w.solve(rhs_w);
  const Eigen::MatrixXcd sol_g = lu_g.solve(rhs_g);
  const Eigen::MatrixXcd X1 = Eigen::MatrixXcd(maps.Rw) * sol_w -
                              Eigen::MatrixXcd(maps.Jb) * (Eigen::MatrixXcd(gd.Rg) * sol_g);
  ResolventDiff out;
  {
    const Eigen::MatrixXcd S = X1.adjoint() * Eigen::MatrixXcd(Bwb0) * X1;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> es(
        0.5 * (S + S.adjoint()), Eigen::MatrixXcd(gd.B0b),
        Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
    out.norm_jr_rj = std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
  }

  // X2 = J R(z) J' - R~(z): waveguide broken input, power iteration
  auto apply_x2 = [&](const Eigen::VectorXcd& u) {
    const Eigen::VectorXcd jr =
        maps.Jb * (gd.Rg * lu_g.solve(Eigen::VectorXcd(gd.Rg.adjoint() * (gd.Bpb * (maps.Jpb * u)))));
    const Eigen::VectorXcd rw =
        maps.Rw * lu_w.solve(Eigen::VectorXcd(maps.Rw.adjoint() * (Bwbp * u)));
    return Eigen::VectorXcd(jr - rw);
  };
  {
    auto apply_s = [&](const Eigen::VectorXcd& v) {
      const Eigen::VectorXcd xv = apply_x2(v);
      const Eigen::VectorXcd bxv = Bwb0 * xv;
      // X^H applied via conjugate chains: (X^H y) = adjoints in reverse
      Eigen::VectorXcd y1 = maps.Rw.adjoint() * bxv;
      Eigen::VectorXcd t1 = lu_w.adjoint().solve(y1);
      Eigen::VectorXcd term_w = Bwbp.adjoint() * (maps.Rw * t1);
      Eigen::VectorXcd y2 = maps.Jb.adjoint() * bxv;
      Eigen::VectorXcd t2 = lu_g.adjoint().solve(Eigen::VectorXcd(gd.Rg.adjoint() * y2));
      Eigen::VectorXcd term_g = maps.Jpb.adjoint() * (gd.Bpb.adjoint() * (gd.Rg * t2));
      return Eigen::VectorXcd(term_g - term_w);
    };
    out.norm_jrjp_r = operator_norm_power(mesh.n_broken, apply_s, Bwb0);
  }
  return out;
}

ProjectionDiff projection_diff(cplx lambda0, double radius,
                               const GraphDiscretization& gd,
                               const FatGraphOperator& wg,
                               const IdentificationMaps& maps,
                               int quad_points) {
  const Mesh& mesh = *wg.mesh;
  const SpMat Bwb0 = assemble_raw(mesh, gram_l2_weights(mesh.eps, wg.dilation), true);
  const SpMat Bwbp = assemble_raw(mesh, pencil_b_weights(mesh.eps, wg.dilation), true);

  // ranks from the pencil spectra inside the disc
  ProjectionDiff out;
  const auto inside = [&](cplx lam) { return std::abs(lam - lambda0) < radius; };
  {
    const auto pairs = solve_eigs(gd.A, gd.Bp, lambda0, std::min(8, gd.n_dofs));
    for (const auto& p : pairs) {
      if (inside(p.lambda)) ++out.rank_graph;
      if (std::abs(std::abs(p.lambda - lambda0) - radius) < 1e-8 * (1 + radius))
        fail(ErrorKind::ContourOnSpectrum, "graph eigenvalue on the contour");
    }
  }
  {
    const auto pairs = solve_eigs(wg.A, wg.B, lambda0, 10);
    for (const auto& p : pairs) {
      if (inside(p.lambda)) ++out.rank_wg;
      if (std::abs(std::abs(p.lambda - lambda0) - radius) < 1e-8 * (1 + radius))
        fail(ErrorKind::ContourOnSpectrum, "waveguide eigenvalue on the contour");
    }
  }

  // trapezoid contour quadrature of J R(z) - R~(z) J over the circle
  const int nb = gd.n_broken;
  Eigen::MatrixXcd X = Eigen::MatrixXcd::Zero(mesh.n_broken, nb);
  const Eigen::MatrixXcd rhs_g = Eigen::MatrixXcd(SpMat(gd.Rg.adjoint() * gd.Bpb));
  const Eigen::MatrixXcd rhs_w =
      Eigen::MatrixXcd(SpMat(maps.Rw.adjoint() * SpMat(Bwbp * maps.Jb)));
  for (int qp = 0; qp < quad_points; ++qp) {
    const double ang = 2.0 * pi * qp / quad_points;
    const cplx zq = lambda0 + radius * std::exp(cplx(0.0, ang));
    const cplx dz = radius * cplx(0.0, 1.0) * std::exp(cplx(0.0, ang)) *
                    (2.0 * pi / quad_points);
    Eigen::SparseLU<SpMat> lu_w(SpMat(wg.A - zq * wg.B));
    Eigen::SparseLU<SpMat> lu_g(SpMat(gd.A - zq * gd.Bp));
    if (lu_w.info() != Eigen::Success || lu_g.info() != Eigen::Success)
      fail(ErrorKind::ContourOnSpectrum, "contour point on a pencil spectrum");
    const Eigen::MatrixXcd sol_g = lu_g.solve(rhs_g);
    const Eigen::MatrixXcd sol_w = lu_w.solve(rhs_w);
    const Eigen::MatrixXcd diff =
        Eigen::MatrixXcd(maps.Jb) * (Eigen::MatrixXcd(gd.Rg) * sol_g) -
        Eigen::MatrixXcd(maps.Rw) * sol_w;
    // P = -(1/2 pi i) contour integral of R(z) dz
    X += (-dz / cplx(0.0, 2.0 * pi)) * diff;
  }
  const Eigen::MatrixXcd S = X.adjoint() * Eigen::MatrixXcd(Bwb0) * X;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> es(
      0.5 * (S + S.adjoint()), Eigen::MatrixXcd(gd.B0b),
      Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
  out.norm = std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
  return out;
}

std::pair<double, double> eigenvector_match(const Eigen::VectorXcd& psi0,
                                            const Eigen::VectorXcd& psieps,
                                            const GraphDiscretization& gd,
                                            const FatGraphOperator& wg,
                                            const IdentificationMaps& maps) {
  const Mesh& mesh = *wg.mesh;
  const SpMat Bwb0 = assemble_raw(mesh, gram_l2_weights(mesh.eps, wg.dilation), true);

  Eigen::VectorXcd f = psi0;
  f /= std::sqrt(std::abs(cplx(f.dot(gd.B0 * f))));
  Eigen::VectorXcd u = maps.Rw * psieps;
  u /= std::sqrt(std::abs(cplx(u.dot(Bwb0 * u))));

  const Eigen::VectorXcd jf = maps.Jb * (gd.Rg * f);
  const cplx ip = u.dot(Bwb0 * jf);
  const cplx alpha = std::abs(ip) > 0.0 ? ip / std::abs(ip) : cplx(1.0);
  const Eigen::VectorXcd ua = alpha * u;

  const Eigen::VectorXcd d1 = jf - ua;
  const double n1 = std::sqrt(std::abs(cplx(d1.dot(Bwb0 * d1))));
  const Eigen::VectorXcd d2 = Eigen::VectorXcd(maps.Jpb * ua) - gd.Rg * f;
  const double n2 = std::sqrt(std::abs(cplx(d2.dot(gd.B0b * d2))));
  return {n1, n2};
}

}  // namespace qwg
