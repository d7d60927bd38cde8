#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "qwg/mesh.hpp"

using namespace qwg;

namespace {

FatGraphModel lasso_model(double eps = 0.1, double h = 0.1) {
  (void)h;
  const auto dec = normalize_and_decompose(make_lasso(1.0, 0.0, 0.5));
  BuildOptions opts;
  opts.l_ext = 2.0;
  return build_model(dec, eps, Dilation(cplx(0.0, 0.8)), opts);
}

}  // namespace

TEST_CASE("lasso model: one cross patch, three panels of strips") {
  const auto model = lasso_model();
  const auto mesh = generate_mesh(model, 0.2);
  int strips = 0, ext = 0, patch_panels = 0;
  for (const auto& p : mesh.panels) {
    if (p.cls == PanelClass::edge_strip) ++strips;
    if (p.cls == PanelClass::exterior_strip) ++ext;
    if (p.cls == PanelClass::vertex_patch) ++patch_panels;
  }
  CHECK(strips == 2);        // loop + stub
  CHECK(ext == 1);
  CHECK(patch_panels == 4);  // core + 3 arms (deg 3 template)
}

TEST_CASE("interval model: two single-panel patches") {
  auto g = make_interval();
  g.l0 = 0.2;
  const auto dec = normalize_and_decompose(g);
  const auto model = build_model(dec, 0.1, Dilation(cplx(0.0, 0.0)), {1.0});
  const auto mesh = generate_mesh(model, 0.1);
  int patch_panels = 0, strips = 0;
  for (const auto& p : mesh.panels) {
    if (p.cls == PanelClass::vertex_patch) ++patch_panels;
    if (p.cls == PanelClass::edge_strip) ++strips;
  }
  CHECK(strips == 1);
  CHECK(patch_panels == 2);
  CHECK(mesh.l_ext == doctest::Approx(1.0));
}

TEST_CASE("eps = 1 is the unscaled reference manifold") {
  const auto model = lasso_model(1.0);
  CHECK(model.eps == 1.0);
  CHECK_THROWS_AS(
      (void)build_model(model.decomposition, 1.5, Dilation(cplx(0.0, 0.8)), {2.0}),
      Error);
}

TEST_CASE("degree five has no patch template") {
  MetricGraph g;
  g.vertices = {0, 1, 2, 3, 4, 5};
  for (int i = 0; i < 5; ++i) {
    Edge e;
    e.id = i;
    e.from = 0;
    e.to = i + 1;
    e.length = 1.0;
    g.edges.push_back(e);
  }
  g.d0 = 5;
  const auto dec = normalize_and_decompose(g);
  CHECK_THROWS_AS((void)build_model(dec, 0.1, Dilation(cplx(0.0, 0.0)), {1.0}),
                  Error);
}

TEST_CASE("strip (0,1) x F at h = 0.25 meshes as a 4 x 4 quad grid") {
  auto g = make_interval();
  g.l0 = 0.5;
  const auto dec = normalize_and_decompose(g);
  const auto model = build_model(dec, 0.5, Dilation(cplx(0.0, 0.0)), {1.0});
  const auto mesh = generate_mesh(model, 0.25);
  for (const auto& p : mesh.panels) {
    if (p.cls != PanelClass::edge_strip) continue;
    CHECK(p.nx() == 4);
    CHECK(p.ny == 4);
  }
}

TEST_CASE("patch triangulations keep interior angles above 20 degrees") {
  for (double h : {0.2, 0.1, 0.05}) {
    const auto mesh = generate_mesh(lasso_model(0.1), h);
    CHECK(mesh.min_patch_angle_deg() >= 20.0);
  }
}

TEST_CASE("interface nodes are bijective across regions") {
  const auto mesh = generate_mesh(lasso_model(), 0.2);
  // every glue pair identifies distinct broken nodes, one-to-one
  std::set<int> slaves;
  for (const auto& g : mesh.glue) {
    CHECK(g.a != g.b);
    CHECK(slaves.insert(g.a).second);  // each slave appears once
  }
  // conforming reduction is consistent: same conf index on both sides
  for (const auto& g : mesh.glue)
    CHECK(mesh.conf_of[g.a] == mesh.conf_of[g.b]);
}

TEST_CASE("field breakpoints land on the strip grid") {
  auto g = make_interval();
  g.edges[0].q = PiecewiseCoeff{{1.0, 0.0, 2.0}};  // breaks at 1/3, 2/3
  g.l0 = 0.25;
  const auto dec = normalize_and_decompose(g);
  const auto model = build_model(dec, 0.1, Dilation(cplx(0.0, 0.0)), {1.0});
  const auto mesh = generate_mesh(model, 0.3);
  for (const auto& p : mesh.panels) {
    if (p.cls != PanelClass::edge_strip) continue;
    bool third = false, two_thirds = false;
    for (double x : p.xs) {
      if (std::abs(x - 1.0 / 3.0) < 1e-12) third = true;
      if (std::abs(x - 2.0 / 3.0) < 1e-12) two_thirds = true;
    }
    CHECK(third);
    CHECK(two_thirds);
  }
}

TEST_CASE("gauge flux lands on the terminal interface factor") {
  const double flux = 0.9;
  const auto dec = normalize_and_decompose(make_lasso(1.0, flux, 0.5));
  const auto model = build_model(dec, 0.1, Dilation(cplx(0.0, 0.0)), {2.0});
  const auto mesh = generate_mesh(model, 0.25);
  int twisted = 0;
  for (const auto& g : mesh.glue)
    if (std::abs(g.factor - cplx(1.0, 0.0)) > 1e-14) {
      ++twisted;
      CHECK(std::abs(g.factor - std::exp(cplx(0.0, -flux))) < 1e-14);
    }
  // one interface column of nodes carries the loop flux
  bool found_ny = false;
  for (const auto& p : mesh.panels)
    if (twisted == p.ny + 1) found_ny = true;
  CHECK(found_ny);
}
