#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qwg/types.hpp"

namespace qwg {

using VertexId = std::int32_t;
using EdgeId = std::int32_t;

constexpr double infinite_length = std::numeric_limits<double>::infinity();

/// Piecewise-constant coefficient on (0, len): n values on equal subintervals.
struct PiecewiseCoeff {
  std::vector<double> values{0.0};

  static PiecewiseCoeff constant(double c) { return {{c}}; }
  bool is_zero() const {
    for (double v : values)
      if (v != 0.0) return false;
    return true;
  }
  double at(double x, double len) const {
    if (values.size() == 1) return values[0];
    const double t = x / len * static_cast<double>(values.size());
    auto i = static_cast<std::size_t>(t);
    if (i >= values.size()) i = values.size() - 1;
    return values[i];
  }
  double sup_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
  }
  double min_value() const {
    double m = values.empty() ? 0.0 : values[0];
    for (double v : values) m = std::min(m, v);
    return m;
  }
  /// integral over (0, x)
  double integral(double x, double len) const;
  /// breakpoints strictly inside (0, len)
  std::vector<double> breakpoints(double len) const;
};

/// Oriented edge; external edges have no terminal vertex and infinite length.
struct Edge {
  EdgeId id = 0;
  VertexId from = 0;                 // initial point, d_- e
  std::optional<VertexId> to;        // terminal point, d_+ e; absent iff external
  double length = 1.0;               // edge length, +inf for external
  PiecewiseCoeff a;                  // magnetic potential (1/length)
  PiecewiseCoeff q;                  // electric potential (1/length^2)

  bool external() const { return !to.has_value(); }
};

struct Violation {
  std::string rule;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

/// Metric graph (V, E, d, l) with degree and length bounds.
struct MetricGraph {
  std::vector<VertexId> vertices;
  std::vector<Edge> edges;
  double l0 = 0.0;   // length bound; 0 means "use min edge length"
  int d0 = 0;        // degree bound; 0 means "use max degree"

  double effective_l0() const;
  int effective_d0() const;
  int degree(VertexId v) const;          // counts loop endpoints twice
  bool has_vertex(VertexId v) const;
  std::vector<EdgeId> internal_edges() const;
  std::vector<EdgeId> external_edges() const;
  const Edge& edge(EdgeId e) const;
  double total_finite_length() const;
  bool connected() const;
};

/// Slot of an edge at a vertex: which end of which edge. Loops contribute two
/// distinct slots at the same vertex (the disjoint union E_v+ u E_v-).
struct EdgeSlot {
  EdgeId edge;
  bool at_terminal;  // true: slot at d_+ e (x = l_e), false: at d_- e (x = 0)
};

struct BoundaryCut {
  EdgeId original_edge;   // external edge of the input graph
  VertexId vertex;        // inserted degree-2 boundary vertex
  double arc_distance;    // distance of the cut from d_- of the original edge
  EdgeId stub_edge;       // finite piece d_-e .. cut in the internal graph
  EdgeId halfline_edge;   // remaining half-line, attached at the cut
};

/// Interior/exterior decomposition with degree-2 boundary vertices at arc
/// distance l0 along every lead.
struct GraphDecomposition {
  MetricGraph internal;                  // X_{0,int}: all finite edges
  std::vector<Edge> external;            // half-lines, from = boundary vertex
  std::vector<VertexId> boundary_vertices;  // Gamma_0
  std::vector<BoundaryCut> cuts;
  double l0 = 0.0;

  std::vector<EdgeSlot> slots_at(VertexId v) const;
  bool is_boundary(VertexId v) const;
};

ValidationReport validate(const MetricGraph& graph);

/// Inserts a degree-2 vertex at arc distance cut (default: l0) on every
/// external edge and splits the graph at those vertices. Throws NotValidated
/// if validate() reports violations.
GraphDecomposition normalize_and_decompose(const MetricGraph& graph,
                                           double cut_distance = 0.0);

/// One primary loop as signed edge traversals (+1 along orientation).
struct Cycle {
  std::vector<std::pair<EdgeId, int>> steps;
};

/// Independent cycles of the internal part; size |E_int| - |V| + #components.
std::vector<Cycle> cycle_basis(const MetricGraph& graph);

MetricGraph load_graph_json(const std::string& path);
MetricGraph parse_graph_json(const std::string& text);

MetricGraph make_lasso(double loop_length = 1.0, double flux = 0.0,
                       double l0 = 0.5);
MetricGraph make_interval(double length = 1.0);

}  // namespace qwg
