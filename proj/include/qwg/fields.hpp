#pragma once

#include <map>
#include <vector>

#include "qwg/graph.hpp"
#include "qwg/types.hpp"

namespace qwg {

/// Accumulated magnetic phase Phi_e(x) = int_0^x a_e ds.
double phase_integral(const MetricGraph& graph, EdgeId edge, double x);

/// Total edge phase Phi_e(l_e).
double edge_phase(const MetricGraph& graph, EdgeId edge);

/// Flux through each basis loop, reduced to (-pi, pi].
std::vector<double> loop_fluxes(const MetricGraph& graph);

double wrap_flux(double phi);

/// Result of trading edge potentials for phase-twisted vertex conditions:
/// a == 0 everywhere, continuity becomes equality of slot_phase * f_e(v)
/// and the current condition uses slot_phase * f_e'(v).
struct GaugedSystem {
  MetricGraph graph;  // same topology, a stripped, q kept
  // phase per (edge, end): key.second false = initial slot, true = terminal
  std::map<std::pair<EdgeId, bool>, cplx> slot_phase;

  cplx phase(EdgeId e, bool at_terminal) const {
    auto it = slot_phase.find({e, at_terminal});
    return it == slot_phase.end() ? cplx(1.0, 0.0) : it->second;
  }
};

GaugedSystem gauge_away(const MetricGraph& graph);

}  // namespace qwg
