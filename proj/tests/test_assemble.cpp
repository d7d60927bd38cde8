#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include "qwg/assemble.hpp"
#include "qwg/eigs.hpp"

using namespace qwg;

namespace {

std::shared_ptr<const Mesh> interval_mesh(double eps, double h, double l0) {
  auto g = make_interval();
  g.l0 = l0;
  const auto dec = normalize_and_decompose(g);
  const auto model = build_model(dec, eps, Dilation(cplx(0.0, 0.0)), {1.0});
  return std::make_shared<const Mesh>(generate_mesh(model, h));
}

std::shared_ptr<const Mesh> lasso_mesh(double eps, double h, cplx theta,
                                       double l_ext = 2.0, double flux = 0.0) {
  const auto dec = normalize_and_decompose(make_lasso(1.0, flux, 0.5));
  const auto model = build_model(dec, eps, Dilation(theta), {l_ext});
  return std::make_shared<const Mesh>(generate_mesh(model, h));
}

double max_asymmetry(const SpMat& m) {
  return Eigen::MatrixXcd(SpMat(m - SpMat(m.transpose()))).cwiseAbs().maxCoeff();
}

double smallest_real_eig(const SpMat& m) {
  const Eigen::MatrixXd md = Eigen::MatrixXcd(m).real();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (md + md.transpose()));
  return es.eigenvalues().minCoeff();
}

}  // namespace

TEST_CASE("theta = 0 field-free pencil: real, exactly symmetric, B SPD") {
  const auto op = assemble(interval_mesh(0.2, 0.2, 0.2), Dilation(cplx(0.0, 0.0)));
  CHECK(max_asymmetry(op.A) == 0.0);
  CHECK(max_asymmetry(op.B) == 0.0);
  CHECK(Eigen::MatrixXcd(op.A).imag().cwiseAbs().maxCoeff() == 0.0);
  CHECK(Eigen::MatrixXcd(op.B).imag().cwiseAbs().maxCoeff() == 0.0);
  CHECK(smallest_real_eig(op.A) > -1e-12);  // stiffness PSD
  CHECK(smallest_real_eig(op.B) > 0.0);     // mass SPD
}

TEST_CASE("dilated pencil stays exactly complex-symmetric") {
  const auto op = assemble(lasso_mesh(0.1, 0.2, cplx(0.0, 0.8)),
                           Dilation(cplx(0.0, 0.8)));
  CHECK(max_asymmetry(op.A) == 0.0);
  CHECK(max_asymmetry(op.B) == 0.0);
}

TEST_CASE("conjugating theta conjugates the pencil exactly") {
  const auto mesh = lasso_mesh(0.1, 0.25, cplx(0.0, 0.8));
  const auto op1 = assemble(mesh, Dilation(cplx(0.0, 0.8)));
  const auto op2 = assemble(mesh, Dilation(cplx(0.0, -0.8)));
  const double d =
      Eigen::MatrixXcd(SpMat(op2.A - SpMat(op1.A.conjugate()))).cwiseAbs().maxCoeff();
  CHECK(d == 0.0);
}

TEST_CASE("no external edges: theta drops out and the spectrum is real") {
  const auto mesh = interval_mesh(0.2, 0.2, 0.2);
  const auto op0 = assemble(mesh, Dilation(cplx(0.0, 0.0)));
  const auto op1 = assemble(mesh, Dilation(cplx(0.0, 0.8)));
  CHECK(Eigen::MatrixXcd(SpMat(op0.A - op1.A)).cwiseAbs().maxCoeff() == 0.0);
  const auto pairs = solve_eigs(op0.A, op0.B, cplx(9.0, 0.0), 3);
  for (const auto& p : pairs) CHECK(std::abs(p.lambda.imag()) < 1e-9);
}

TEST_CASE("interval waveguide: lowest nonzero eigenvalue near pi^2") {
  // thin end patches: interval limit exact up to O(eps * vol) mass defect
  const auto op = assemble(interval_mesh(0.1, 0.02, 0.02), Dilation(cplx(0.0, 0.0)));
  const auto pairs = solve_eigs(op.A, op.B, cplx(9.8, 0.0), 1);
  REQUIRE(pairs.size() == 1);
  CHECK(std::abs(pairs[0].lambda.real() - pi * pi) / (pi * pi) < 0.01);
  CHECK(pairs[0].residual < 1e-8);
}

TEST_CASE("halving h reduces the discretization error fourfold") {
  // Richardson study on the second interval mode at fixed eps
  auto lam = [&](double h) {
    const auto op = assemble(interval_mesh(0.05, h, 0.02), Dilation(cplx(0.0, 0.0)));
    return solve_eigs(op.A, op.B, cplx(4.0 * pi * pi, 0.0), 1)[0].lambda.real();
  };
  const double l1 = lam(0.08), l2 = lam(0.04), l3 = lam(0.02);
  // eps fixed: the eps-defect cancels in differences; ratio ~ 4 for P1/Q1
  const double ratio = (l1 - l3) / (l2 - l3) - 1.0;  // = (e1-e3)/(e2-e3)-1 ~ 3
  CHECK(ratio > 2.0);
  CHECK(ratio < 4.5);
}

TEST_CASE("substitution pencil matches the explicit jump-constraint pencil") {
  const cplx theta(0.0, 0.8);
  const auto mesh = lasso_mesh(0.2, 0.34, theta, 1.0);
  REQUIRE(mesh->n_dofs <= 400);
  const auto op = assemble(mesh, Dilation(theta));

  // raw dilated weights (eq. h.dil): e^{-2 theta} longitudinal only
  PanelWeights wa = pencil_a_weights(mesh->eps, Dilation(cplx(0.0, 0.0)));
  wa.exterior.stiff_x = mesh->eps * std::exp(-2.0 * theta);
  wa.exterior.stiff_y = 1.0 / mesh->eps;
  PanelWeights wb = pencil_b_weights(mesh->eps, Dilation(cplx(0.0, 0.0)));
  const SpMat Ab = assemble_raw(*mesh, wa, true);
  const SpMat Bb = assemble_raw(*mesh, wb, true);

  // constraint matrices: trial jump e^{theta/2}, test jump conj-pair
  auto constraint = [&](cplx jump) {
    std::vector<Eigen::Triplet<cplx>> t;
    for (int nb = 0; nb < mesh->n_broken; ++nb) {
      const int dof = mesh->dof_of_broken(nb);
      if (dof < 0) continue;
      // exterior panels carry the jump relative to the shared interface dof
      bool exterior = false;
      for (const auto& p : mesh->panels)
        if (p.cls == PanelClass::exterior_strip && nb >= p.node0 &&
            nb < p.node0 + p.nodes())
          exterior = true;
      t.emplace_back(nb, dof, exterior ? jump : cplx(1.0, 0.0));
    }
    SpMat c(mesh->n_broken, mesh->n_dofs);
    c.setFromTriplets(t.begin(), t.end());
    return c;
  };
  const SpMat Cu = constraint(std::exp(theta / 2.0));
  const SpMat Cv = constraint(std::exp(std::conj(theta) / 2.0));
  const SpMat Aj = Cv.adjoint() * Ab * Cu;
  const SpMat Bj = Cv.adjoint() * Bb * Cu;

  const auto e1 = solve_eigs(op.A, op.B, cplx(5.0, -2.0), 6);
  const auto e2 = solve_eigs(Aj, Bj, cplx(5.0, -2.0), 6);
  REQUIRE(e1.size() == e2.size());
  for (std::size_t i = 0; i < e1.size(); ++i) {
    double best = 1e30;
    for (const auto& q : e2) best = std::min(best, std::abs(q.lambda - e1[i].lambda));
    CHECK(best < 1e-10 * (1.0 + std::abs(e1[i].lambda)));
  }
}

TEST_CASE("magnetic ring: flux spectrum (2 pi n + Phi)^2 via interface phases") {
  // circle graph: single vertex, one loop, flux Phi; no exterior
  const double flux = 0.7;
  MetricGraph g;
  g.vertices = {0};
  Edge loop;
  loop.id = 0;
  loop.from = 0;
  loop.to = 0;
  loop.length = 1.0;
  loop.a = PiecewiseCoeff::constant(flux);
  g.edges = {loop};
  g.l0 = 0.1;
  g.d0 = 2;
  const auto dec = normalize_and_decompose(g);
  const auto model = build_model(dec, 0.05, Dilation(cplx(0.0, 0.0)), {1.0});
  const auto mesh = std::make_shared<const Mesh>(generate_mesh(model, 0.05));
  const auto op = assemble(mesh, Dilation(cplx(0.0, 0.0)));
  // Hermitian at theta = 0 (phases enter conjugately), not symmetric
  const double herm =
      Eigen::MatrixXcd(SpMat(op.A - SpMat(op.A.adjoint()))).cwiseAbs().maxCoeff();
  CHECK(herm < 1e-12);
  for (double target : {flux * flux, std::pow(2.0 * pi - flux, 2.0)}) {
    const auto pairs = solve_eigs(op.A, op.B, cplx(target, 0.0), 1);
    REQUIRE(!pairs.empty());
    CHECK(std::abs(pairs[0].lambda.real() - target) / target < 0.05);
    CHECK(std::abs(pairs[0].lambda.imag()) < 1e-8);
  }
}
