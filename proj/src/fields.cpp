#include "qwg/fields.hpp"

#include <cmath>

namespace qwg {

double phase_integral(const MetricGraph& graph, EdgeId edge, double x) {
  const Edge& e = graph.edge(edge);
  if (e.external()) {
    if (x < 0.0) fail(ErrorKind::OutOfRange, "x < 0 on external edge");
    return 0.0;  // a vanishes on external edges
  }
  if (x < 0.0 || x > e.length + 1e-12)
    fail(ErrorKind::OutOfRange, "coordinate outside edge " + std::to_string(edge));
  return e.a.integral(std::min(x, e.length), e.length);
}

double edge_phase(const MetricGraph& graph, EdgeId edge) {
  const Edge& e = graph.edge(edge);
  return e.external() ? 0.0 : phase_integral(graph, edge, e.length);
}

double wrap_flux(double phi) {
  double w = std::fmod(phi, 2.0 * pi);
  if (w <= -pi) w += 2.0 * pi;
  if (w > pi) w -= 2.0 * pi;
  return w;
}

std::vector<double> loop_fluxes(const MetricGraph& graph) {
  std::vector<double> out;
  for (const auto& cycle : cycle_basis(graph)) {
    double phi = 0.0;
    for (auto [eid, sign] : cycle.steps)
      phi += sign * edge_phase(graph, eid);
    out.push_back(wrap_flux(phi));
  }
  return out;
}

GaugedSystem gauge_away(const MetricGraph& graph) {
  // f_hat_e = e^{-i Phi_e(x)} f_e strips the potential from each edge; the
  // vertex conditions then compare e^{i Phi_e(v)} f_hat_e(v), which is 1 at
  // the initial slot and e^{i Phi_e(l_e)} at the terminal slot.
  GaugedSystem sys;
  sys.graph = graph;
  for (auto& e : sys.graph.edges) e.a = PiecewiseCoeff::constant(0.0);
  for (const auto& e : graph.edges) {
    if (e.external()) continue;
    sys.slot_phase[{e.id, false}] = cplx(1.0, 0.0);
    sys.slot_phase[{e.id, true}] = std::exp(cplx(0.0, edge_phase(graph, e.id)));
  }
  return sys;
}

}  // namespace qwg
