#include "qwg/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <queue>
#include <set>
#include <sstream>

#include <json.hpp>

namespace qwg {

double PiecewiseCoeff::integral(double x, double len) const {
  const auto n = values.size();
  if (n == 1) return values[0] * x;
  const double piece = len / static_cast<double>(n);
  double acc = 0.0, left = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double right = (i + 1 == n) ? len : left + piece;
    if (x <= left) break;
    acc += values[i] * (std::min(x, right) - left);
    left = right;
  }
  return acc;
}

std::vector<double> PiecewiseCoeff::breakpoints(double len) const {
  std::vector<double> out;
  const auto n = values.size();
  for (std::size_t i = 1; i < n; ++i)
    out.push_back(len * static_cast<double>(i) / static_cast<double>(n));
  return out;
}

double MetricGraph::effective_l0() const {
  if (l0 > 0.0) return l0;
  double m = 1.0;
  for (const auto& e : edges)
    if (!e.external()) m = std::min(m, e.length);
  return m;
}

int MetricGraph::effective_d0() const {
  if (d0 > 0) return d0;
  int m = 1;
  for (VertexId v : vertices) m = std::max(m, degree(v));
  return m;
}

int MetricGraph::degree(VertexId v) const {
  int deg = 0;
  for (const auto& e : edges) {
    if (e.from == v) ++deg;
    if (e.to && *e.to == v) ++deg;
  }
  return deg;
}

bool MetricGraph::has_vertex(VertexId v) const {
  return std::find(vertices.begin(), vertices.end(), v) != vertices.end();
}

std::vector<EdgeId> MetricGraph::internal_edges() const {
  std::vector<EdgeId> out;
  for (const auto& e : edges)
    if (!e.external()) out.push_back(e.id);
  return out;
}

std::vector<EdgeId> MetricGraph::external_edges() const {
  std::vector<EdgeId> out;
  for (const auto& e : edges)
    if (e.external()) out.push_back(e.id);
  return out;
}

const Edge& MetricGraph::edge(EdgeId id) const {
  for (const auto& e : edges)
    if (e.id == id) return e;
  fail(ErrorKind::InputError, "unknown edge id " + std::to_string(id));
}

double MetricGraph::total_finite_length() const {
  double acc = 0.0;
  for (const auto& e : edges)
    if (!e.external()) acc += e.length;
  return acc;
}

bool MetricGraph::connected() const {
  if (vertices.empty()) return true;
  std::set<VertexId> seen;
  std::queue<VertexId> work;
  work.push(vertices.front());
  seen.insert(vertices.front());
  while (!work.empty()) {
    VertexId v = work.front();
    work.pop();
    for (const auto& e : edges) {
      VertexId other;
      if (e.from == v && e.to)
        other = *e.to;
      else if (e.to && *e.to == v)
        other = e.from;
      else
        continue;
      if (seen.insert(other).second) work.push(other);
    }
  }
  return seen.size() == vertices.size();
}

ValidationReport validate(const MetricGraph& graph) {
  ValidationReport report;
  auto add = [&](const std::string& rule, const std::string& detail) {
    report.violations.push_back({rule, detail});
  };

  std::set<VertexId> vset(graph.vertices.begin(), graph.vertices.end());
  if (vset.size() != graph.vertices.size())
    add("unique-vertex-ids", "duplicate vertex id");
  std::set<EdgeId> eset;
  for (const auto& e : graph.edges)
    if (!eset.insert(e.id).second)
      add("unique-edge-ids", "duplicate edge id " + std::to_string(e.id));

  for (const auto& e : graph.edges) {
    if (!vset.count(e.from))
      add("endpoint-exists", "edge " + std::to_string(e.id) + " from unknown vertex");
    if (e.to && !vset.count(*e.to))
      add("endpoint-exists", "edge " + std::to_string(e.id) + " to unknown vertex");
    if (e.external() != std::isinf(e.length))
      add("external-iff-infinite",
          "edge " + std::to_string(e.id) + ": to==null must pair with length inf");
  }

  const double l0 = graph.effective_l0();
  if (!(l0 > 0.0 && l0 <= 1.0))
    add("l0-range", "l0 must lie in (0, 1]");
  for (const auto& e : graph.edges)
    if (!e.external() && !(e.length >= l0))
      add("length >= l0", "edge " + std::to_string(e.id) + " has length " +
                              std::to_string(e.length));

  const int d0 = graph.effective_d0();
  for (VertexId v : graph.vertices)
    if (graph.degree(v) > d0)
      add("deg <= d0", "vertex " + std::to_string(v) + " has degree " +
                           std::to_string(graph.degree(v)));

  if (!graph.connected()) add("connected", "graph is not connected");

  // (H0 3) is structural here: a finite edge list always has |E_ext| finite.
  for (const auto& e : graph.edges) {
    if (e.external()) {
      if (!e.a.is_zero())
        add("a=0 on external", "edge " + std::to_string(e.id));
      if (!e.q.is_zero())
        add("q=0 on external", "edge " + std::to_string(e.id));
    }
    if (e.q.min_value() < 0.0)
      add("q >= 0", "edge " + std::to_string(e.id));
  }
  return report;
}

namespace {

VertexId fresh_vertex_id(const MetricGraph& g) {
  VertexId m = 0;
  for (VertexId v : g.vertices) m = std::max(m, v);
  return m + 1;
}

EdgeId fresh_edge_id(const MetricGraph& g) {
  EdgeId m = 0;
  for (const auto& e : g.edges) m = std::max(m, e.id);
  return m + 1;
}

}  // namespace

GraphDecomposition normalize_and_decompose(const MetricGraph& graph,
                                           double cut_distance) {
  auto report = validate(graph);
  if (!report.ok()) {
    std::string msg = "graph fails validation:";
    for (const auto& v : report.violations) msg += " [" + v.rule + "]";
    fail(ErrorKind::NotValidated, msg);
  }

  GraphDecomposition dec;
  dec.l0 = graph.effective_l0();
  const double cut = cut_distance > 0.0 ? cut_distance : dec.l0;

  dec.internal.vertices = graph.vertices;
  dec.internal.l0 = graph.l0;
  dec.internal.d0 = graph.d0;
  for (const auto& e : graph.edges)
    if (!e.external()) dec.internal.edges.push_back(e);

  VertexId next_v = fresh_vertex_id(graph);
  EdgeId next_e = fresh_edge_id(graph);
  for (const auto& e : graph.edges) {
    if (!e.external()) continue;
    // reuse an existing cut: degree-2 field-free vertex at distance >= l0,
    // so repeated decomposition keeps Gamma_0 coordinates fixed
    const VertexId v = e.from;
    const Edge* other = nullptr;
    int ext_count = 0, slots = 0;
    for (const auto& o : graph.edges) {
      if (o.from == v) {
        ++slots;
        if (o.external())
          ++ext_count;
        else
          other = &o;
      }
      if (o.to && *o.to == v) {
        ++slots;
        other = &o;
      }
    }
    const bool clean = slots == 2 && ext_count == 1 && other != nullptr &&
                       !other->external() && other->length >= dec.l0 &&
                       other->a.is_zero() && other->q.is_zero() &&
                       cut_distance <= 0.0;
    if (clean) {
      Edge half;
      half.id = e.id;
      half.from = v;
      half.length = infinite_length;
      dec.external.push_back(half);
      dec.boundary_vertices.push_back(v);
      dec.cuts.push_back({e.id, v, 0.0, other->id, e.id});
      continue;
    }
    const VertexId b = next_v++;
    dec.internal.vertices.push_back(b);
    Edge stub;
    stub.id = next_e++;
    stub.from = e.from;
    stub.to = b;
    stub.length = cut;
    dec.internal.edges.push_back(stub);
    Edge half;
    half.id = e.id;
    half.from = b;
    half.length = infinite_length;
    dec.external.push_back(half);
    dec.boundary_vertices.push_back(b);
    dec.cuts.push_back({e.id, b, cut, stub.id, e.id});
  }
  return dec;
}

std::vector<EdgeSlot> GraphDecomposition::slots_at(VertexId v) const {
  std::vector<EdgeSlot> out;
  for (const auto& e : internal.edges) {
    if (e.from == v) out.push_back({e.id, false});
    if (e.to && *e.to == v) out.push_back({e.id, true});
  }
  return out;
}

bool GraphDecomposition::is_boundary(VertexId v) const {
  return std::find(boundary_vertices.begin(), boundary_vertices.end(), v) !=
         boundary_vertices.end();
}

std::vector<Cycle> cycle_basis(const MetricGraph& graph) {
  // spanning forest over internal edges; each non-tree edge closes one loop
  std::vector<Cycle> cycles;
  std::map<VertexId, std::pair<EdgeId, int>> tree_edge_to_parent;
  std::map<VertexId, VertexId> parent;
  std::set<VertexId> seen;
  std::set<EdgeId> tree;

  for (VertexId root : graph.vertices) {
    if (seen.count(root)) continue;
    seen.insert(root);
    std::queue<VertexId> work;
    work.push(root);
    while (!work.empty()) {
      VertexId v = work.front();
      work.pop();
      for (const auto& e : graph.edges) {
        if (e.external()) continue;
        VertexId other;
        int dir;
        if (e.from == v && e.to) {
          other = *e.to;
          dir = +1;
        } else if (e.to && *e.to == v) {
          other = e.from;
          dir = -1;
        } else {
          continue;
        }
        if (seen.count(other)) continue;
        seen.insert(other);
        parent[other] = v;
        tree_edge_to_parent[other] = {e.id, dir};
        tree.insert(e.id);
        work.push(other);
      }
    }
  }

  auto path_to_root = [&](VertexId v) {
    std::vector<std::pair<EdgeId, int>> path;  // traversal v -> root
    while (parent.count(v)) {
      auto [eid, dir] = tree_edge_to_parent[v];
      path.emplace_back(eid, -dir);  // walking against the discovery direction
      v = parent[v];
    }
    return path;
  };

  for (const auto& e : graph.edges) {
    if (e.external() || tree.count(e.id)) continue;
    Cycle c;
    c.steps.emplace_back(e.id, +1);
    if (!e.to || *e.to == e.from) {
      cycles.push_back(c);  // self-loop
      continue;
    }
    // close: from d_+e back to d_-e through the tree
    auto up_from_to = path_to_root(*e.to);
    auto up_from_from = path_to_root(e.from);
    // strip the common tail (paths share the part above the meeting point)
    while (!up_from_to.empty() && !up_from_from.empty() &&
           up_from_to.back() == up_from_from.back()) {
      up_from_to.pop_back();
      up_from_from.pop_back();
    }
    for (auto step : up_from_to) c.steps.push_back(step);
    for (auto it = up_from_from.rbegin(); it != up_from_from.rend(); ++it)
      c.steps.emplace_back(it->first, -it->second);
    cycles.push_back(c);
  }
  return cycles;
}

namespace {

PiecewiseCoeff coeff_from_json(const nlohmann::json& j) {
  PiecewiseCoeff c;
  if (j.is_number()) {
    c.values = {j.get<double>()};
  } else if (j.is_array()) {
    c.values.clear();
    for (const auto& v : j) c.values.push_back(v.get<double>());
    if (c.values.empty()) c.values = {0.0};
  } else {
    fail(ErrorKind::InputError, "field coefficient must be number or array");
  }
  return c;
}

}  // namespace

MetricGraph parse_graph_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& ex) {
    fail(ErrorKind::InputError, std::string("bad graph file: ") + ex.what());
  }
  MetricGraph g;
  for (const auto& v : j.at("vertices"))
    g.vertices.push_back(v.at("id").get<VertexId>());
  for (const auto& ej : j.at("edges")) {
    Edge e;
    e.id = ej.at("id").get<EdgeId>();
    e.from = ej.at("from").get<VertexId>();
    const bool to_null = ej.at("to").is_null();
    if (!to_null) e.to = ej.at("to").get<VertexId>();
    const auto& lj = ej.at("length");
    const bool len_inf = lj.is_string() && lj.get<std::string>() == "inf";
    if (to_null != len_inf)
      fail(ErrorKind::InputError,
           "edge " + std::to_string(e.id) + ": to=null and length=\"inf\" must co-occur");
    e.length = len_inf ? infinite_length : lj.get<double>();
    if (ej.contains("a")) e.a = coeff_from_json(ej["a"]);
    if (ej.contains("q")) e.q = coeff_from_json(ej["q"]);
    g.edges.push_back(e);
  }
  if (j.contains("l0")) g.l0 = j["l0"].get<double>();
  if (j.contains("d0")) g.d0 = j["d0"].get<int>();
  return g;
}

MetricGraph load_graph_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::InputError, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_graph_json(ss.str());
}

MetricGraph make_lasso(double loop_length, double flux, double l0) {
  MetricGraph g;
  g.vertices = {0};
  Edge loop;
  loop.id = 0;
  loop.from = 0;
  loop.to = 0;
  loop.length = loop_length;
  loop.a = PiecewiseCoeff::constant(flux / loop_length);
  Edge lead;
  lead.id = 1;
  lead.from = 0;
  lead.length = infinite_length;
  g.edges = {loop, lead};
  g.l0 = l0;
  g.d0 = 3;
  return g;
}

MetricGraph make_interval(double length) {
  MetricGraph g;
  g.vertices = {0, 1};
  Edge e;
  e.id = 0;
  e.from = 0;
  e.to = 1;
  e.length = length;
  g.edges = {e};
  g.d0 = 1;
  return g;
}

}  // namespace qwg
