#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qwg/fields.hpp"

using namespace qwg;

TEST_CASE("phase integral of zero and constant potentials") {
  auto g = make_interval(1.0);
  CHECK(phase_integral(g, 0, 0.7) == doctest::Approx(0.0));
  g.edges[0].a = PiecewiseCoeff::constant(2.0);
  CHECK(phase_integral(g, 0, 0.7) == doctest::Approx(1.4));
  CHECK_THROWS_AS((void)phase_integral(g, 0, 1.5), Error);
}

TEST_CASE("step potential phase against a quadrature oracle") {
  auto g = make_interval(1.0);
  g.edges[0].a = PiecewiseCoeff{{2.0, 0.0}};  // 2 on (0,1/2), 0 on (1/2,1)
  // midpoint-rule oracle, refined far past the needed accuracy
  const int n = 200000;
  double acc = 0.0;
  for (int i = 0; i < n; ++i)
    acc += g.edges[0].a.at((i + 0.5) / n, 1.0) / n;
  CHECK(acc == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(phase_integral(g, 0, 1.0) == doctest::Approx(1.0));
  CHECK(phase_integral(g, 0, 0.25) == doctest::Approx(0.5));
  CHECK(phase_integral(g, 0, 0.75) == doctest::Approx(1.0));
}

TEST_CASE("lasso loop flux") {
  const double flux = 1.2345;
  const auto g = make_lasso(2.0, flux);
  const auto fluxes = loop_fluxes(g);
  REQUIRE(fluxes.size() == 1);
  CHECK(fluxes[0] == doctest::Approx(flux));
}

TEST_CASE("tree graphs have no fluxes") {
  CHECK(loop_fluxes(make_interval()).empty());
}

TEST_CASE("flux is defined mod 2 pi") {
  const auto g = make_lasso(1.0, 2.0 * pi);
  CHECK(std::abs(loop_fluxes(g)[0]) < 1e-12);
}

TEST_CASE("gauge of a zero potential is the identity") {
  const auto sys = gauge_away(make_lasso(1.0, 0.0));
  for (const auto& [key, phase] : sys.slot_phase)
    CHECK(std::abs(phase - cplx(1.0, 0.0)) < 1e-15);
}

TEST_CASE("gauged lasso carries the flux at the terminal slot") {
  const double flux = pi / 3.0;
  const auto sys = gauge_away(make_lasso(1.0, flux));
  CHECK(std::abs(sys.phase(0, false) - cplx(1.0, 0.0)) < 1e-15);
  CHECK(std::abs(sys.phase(0, true) - std::exp(cplx(0.0, flux))) < 1e-15);
  for (const auto& e : sys.graph.edges) CHECK(e.a.is_zero());
}

TEST_CASE("slot phases reproduce loop fluxes; reversal flips the sign") {
  MetricGraph g;
  g.vertices = {0, 1};
  auto edge = [](EdgeId id, VertexId u, VertexId v, double len, double a) {
    Edge e;
    e.id = id;
    e.from = u;
    e.to = v;
    e.length = len;
    e.a = PiecewiseCoeff::constant(a);
    return e;
  };
  g.edges = {edge(0, 0, 1, 1.0, 0.3), edge(1, 1, 0, 1.0, 0.5)};
  const auto basis = cycle_basis(g);
  const auto fluxes = loop_fluxes(g);
  REQUIRE(basis.size() == 1);
  // signed sum of edge phases around the loop reproduces the flux exactly
  double acc = 0.0;
  for (auto [eid, sign] : basis[0].steps) acc += sign * edge_phase(g, eid);
  CHECK(wrap_flux(acc) == doctest::Approx(fluxes[0]));
  // orientation reversal
  double rev = 0.0;
  for (auto it = basis[0].steps.rbegin(); it != basis[0].steps.rend(); ++it)
    rev += -it->second * edge_phase(g, it->first);
  CHECK(wrap_flux(rev) == doctest::Approx(-fluxes[0]));
  // gauge phases multiply to e^{i Phi_L} around the loop
  const auto sys = gauge_away(g);
  cplx prod(1.0, 0.0);
  for (auto [eid, sign] : basis[0].steps) {
    const cplx p = sys.phase(eid, true);
    prod *= sign > 0 ? p : std::conj(p);
  }
  CHECK(std::abs(prod - std::exp(cplx(0.0, fluxes[0]))) < 1e-14);
}
