#include "qwg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace qwg {

FatGraphModel build_model(const GraphDecomposition& dec, double eps,
                          const Dilation& dilation, const BuildOptions& opts) {
  if (!(eps > 0.0 && eps <= 1.0))
    fail(ErrorKind::InputError, "eps must lie in (0, 1]");
  FatGraphModel m;
  m.decomposition = dec;
  m.eps = eps;
  if (opts.l_ext > 0.0) {
    m.l_ext = opts.l_ext;
  } else {
    const double decay = (std::exp(dilation.theta) * opts.k_target).imag();
    if (!(decay > 0.0))
      fail(ErrorKind::InputError,
           "k_target outside the admissible sector; pass l_ext explicitly");
    m.l_ext = 6.0 / decay;
  }
  m.patch_core = opts.patch_core > 0.0 ? opts.patch_core : dec.l0 / 2.0;
  for (EdgeId eid : dec.internal.internal_edges()) {
    const Edge& e = dec.internal.edge(eid);
    const double phi = e.a.integral(e.length, e.length);
    if (phi != 0.0)
      m.terminal_phases.push_back({eid, std::exp(cplx(0.0, phi))});
  }
  // template check: degree <= 4 supported by the cross patch
  for (VertexId v : dec.internal.vertices) {
    if (dec.is_boundary(v)) continue;
    const int deg = static_cast<int>(dec.slots_at(v).size());
    if (deg > 4)
      fail(ErrorKind::UnsupportedDegree,
           "patch template has no degree-" + std::to_string(deg) + " variant");
  }
  return m;
}

namespace {

std::vector<double> strip_grid(double len, double h,
                               const std::vector<double>& breakpoints) {
  std::vector<double> base{0.0, len};
  for (double b : breakpoints)
    if (b > 1e-12 && b < len - 1e-12) base.push_back(b);
  std::sort(base.begin(), base.end());
  std::vector<double> xs{0.0};
  for (std::size_t i = 0; i + 1 < base.size(); ++i) {
    const double seg = base[i + 1] - base[i];
    const int n = std::max(1, static_cast<int>(std::ceil(seg / h - 1e-12)));
    for (int j = 1; j <= n; ++j) xs.push_back(base[i] + seg * j / n);
  }
  return xs;
}

std::vector<double> uniform_grid(double len, int n) {
  std::vector<double> xs(n + 1);
  for (int i = 0; i <= n; ++i) xs[i] = len * i / n;
  return xs;
}

// arm/core subdivision keeping leg aspect <= 2 so split right triangles have
// interior angles >= atan(1/2) ~ 26.6 degrees
int patch_nx(double len, double h, double hy) {
  const int by_h = static_cast<int>(std::ceil(len / h - 1e-12));
  const int by_aspect = static_cast<int>(std::ceil(len / (2.0 * hy) - 1e-12));
  return std::max(1, std::max(by_h, by_aspect));
}

struct PatchLayout {
  std::vector<int> panel_ids;        // panels belonging to this patch
  std::vector<std::pair<int, int>> attachments;  // (panel id, column) per slot
};

}  // namespace

double Mesh::max_diameter() const {
  double m = 0.0;
  for (const auto& p : panels) {
    const double hy = CrossSection::width / p.ny;
    for (int i = 0; i < p.nx(); ++i) {
      const double hx = p.xs[i + 1] - p.xs[i];
      // element diameter: quad diagonal, or the triangle hypotenuse (equal)
      m = std::max(m, std::hypot(hx, hy));
    }
  }
  return m;
}

double Mesh::min_patch_angle_deg() const {
  double m = 90.0;
  for (const auto& p : panels) {
    if (!p.triangles()) continue;
    const double hy = CrossSection::width / p.ny;
    for (int i = 0; i < p.nx(); ++i) {
      const double hx = p.xs[i + 1] - p.xs[i];
      // right triangles with legs hx, hy
      const double a = std::atan2(std::min(hx, hy), std::max(hx, hy));
      m = std::min(m, a * 180.0 / pi);
    }
  }
  return m;
}

Mesh generate_mesh(const FatGraphModel& model, double h_target) {
  if (!(h_target > 0.0)) fail(ErrorKind::InputError, "h_target must be positive");
  const auto& dec = model.decomposition;
  Mesh mesh;
  mesh.eps = model.eps;
  mesh.l_ext = model.l_ext;

  const int ny = std::max(2, static_cast<int>(std::ceil(CrossSection::width / h_target - 1e-12)));
  const double hy = CrossSection::width / ny;

  auto add_panel = [&](Panel p) {
    p.ny = ny;
    p.node0 = mesh.n_broken;
    mesh.n_broken += p.nodes();
    mesh.panels.push_back(p);
    return static_cast<int>(mesh.panels.size()) - 1;
  };

  // strips for internal edges
  std::map<EdgeId, int> strip_of_edge;
  for (EdgeId eid : dec.internal.internal_edges()) {
    const Edge& e = dec.internal.edge(eid);
    Panel p;
    p.cls = PanelClass::edge_strip;
    p.tag = eid;
    std::vector<double> bp = e.q.breakpoints(e.length);
    for (double b : e.a.breakpoints(e.length)) bp.push_back(b);
    p.xs = strip_grid(e.length, h_target, bp);
    p.qvals.resize(p.nx());
    for (int i = 0; i < p.nx(); ++i)
      p.qvals[i] = e.q.at(0.5 * (p.xs[i] + p.xs[i + 1]), e.length);
    strip_of_edge[eid] = add_panel(p);
  }
  // truncated exterior strips
  std::map<EdgeId, int> strip_of_ext;
  for (const auto& x : dec.external) {
    Panel p;
    p.cls = PanelClass::exterior_strip;
    p.tag = x.id;
    p.xs = strip_grid(model.l_ext, h_target, {});
    strip_of_ext[x.id] = add_panel(p);
  }

  // patches; slot order follows dec.slots_at(v)
  std::map<VertexId, PatchLayout> patch_of;
  for (VertexId v : dec.internal.vertices) {
    if (dec.is_boundary(v)) continue;
    const auto slots = dec.slots_at(v);
    const int deg = static_cast<int>(slots.size());
    if (deg == 0) continue;
    const double arm = dec.l0 / 2.0;
    const double core = model.patch_core;
    PatchLayout layout;
    if (deg <= 2) {
      // straight template: collar(s) plus core in one panel
      Panel p;
      p.cls = PanelClass::vertex_patch;
      p.tag = v;
      const double len = deg == 1 ? arm + core : 2.0 * arm + core;
      p.xs = uniform_grid(len, patch_nx(len, h_target, hy));
      const int id = add_panel(p);
      layout.panel_ids = {id};
      layout.attachments.push_back({id, 0});
      if (deg == 2) layout.attachments.push_back({id, mesh.panels[id].nx()});
    } else {
      // cross template: unit square core with deg arms of length l0/2
      Panel pc;
      pc.cls = PanelClass::vertex_patch;
      pc.tag = v;
      pc.xs = uniform_grid(1.0, std::max(ny, patch_nx(1.0, h_target, hy)));
      const int core_id = add_panel(pc);
      layout.panel_ids = {core_id};
      for (int s = 0; s < deg; ++s) {
        Panel pa;
        pa.cls = PanelClass::vertex_patch;
        pa.tag = v;
        pa.xs = uniform_grid(arm, patch_nx(arm, h_target, hy));
        const int arm_id = add_panel(pa);
        layout.panel_ids.push_back(arm_id);
        layout.attachments.push_back({arm_id, 0});
        // glue the arm's inner column to core side s
        const Panel& pcr = mesh.panels[core_id];
        const Panel& par = mesh.panels[arm_id];
        if (pcr.nx() != ny)
          fail(ErrorKind::MeshConformityError, "core side subdivision mismatch");
        for (int j = 0; j <= ny; ++j) {
          int core_node;
          switch (s) {
            case 0: core_node = pcr.node(0, j); break;          // left column
            case 1: core_node = pcr.node(pcr.nx(), j); break;   // right column
            case 2: core_node = pcr.node(j, ny); break;         // top row
            default: core_node = pcr.node(j, 0); break;         // bottom row
          }
          mesh.glue.push_back({par.node(par.nx(), j), core_node, {1.0, 0.0}});
        }
      }
    }
    patch_of[v] = layout;
  }

  // strip <-> patch interfaces, with the gauge phase at terminal slots
  std::map<VertexId, int> next_slot;
  for (VertexId v : dec.internal.vertices) {
    if (dec.is_boundary(v)) continue;
    const auto slots = dec.slots_at(v);
    if (slots.empty()) continue;
    const PatchLayout& layout = patch_of[v];
    for (std::size_t s = 0; s < slots.size(); ++s) {
      const auto [panel_id, col] = layout.attachments[s];
      const Panel& pp = mesh.panels[panel_id];
      const Panel& sp = mesh.panels[strip_of_edge[slots[s].edge]];
      const int strip_col = slots[s].at_terminal ? sp.nx() : 0;
      const cplx factor = slots[s].at_terminal
                              ? std::conj(model.terminal_phase(slots[s].edge))
                              : cplx(1.0, 0.0);
      if (pp.ny != sp.ny)
        fail(ErrorKind::MeshConformityError, "strip/patch transverse mismatch");
      for (int j = 0; j <= ny; ++j)
        mesh.glue.push_back({sp.node(strip_col, j), pp.node(col, j), factor});
    }
  }

  // boundary vertices: stub strip end meets the exterior strip start directly
  for (const auto& cutinfo : dec.cuts) {
    const Panel& stub = mesh.panels[strip_of_edge[cutinfo.stub_edge]];
    const Panel& ext = mesh.panels[strip_of_ext[cutinfo.halfline_edge]];
    const Edge& stub_edge = dec.internal.edge(cutinfo.stub_edge);
    const bool stub_ends_at_cut = stub_edge.to && *stub_edge.to == cutinfo.vertex;
    const int stub_col = stub_ends_at_cut ? stub.nx() : 0;
    for (int j = 0; j <= ny; ++j)
      mesh.glue.push_back({ext.node(0, j), stub.node(stub_col, j), {1.0, 0.0}});
  }

  // conforming reduction with multiplicative union-find
  std::vector<int> parent(mesh.n_broken);
  std::vector<cplx> fac(mesh.n_broken, cplx(1.0, 0.0));  // value = fac * value(parent)
  for (int i = 0; i < mesh.n_broken; ++i) parent[i] = i;
  std::function<std::pair<int, cplx>(int)> find = [&](int x) -> std::pair<int, cplx> {
    if (parent[x] == x) return {x, cplx(1.0, 0.0)};
    auto [root, f] = find(parent[x]);
    parent[x] = root;
    fac[x] *= f;
    return {root, fac[x]};
  };
  for (const auto& g : mesh.glue) {
    auto [ra, fa] = find(g.a);
    auto [rb, fb] = find(g.b);
    if (ra == rb) {
      if (std::abs(fa - g.factor * fb) > 1e-12)
        fail(ErrorKind::MeshConformityError, "inconsistent gauge holonomy in glue");
      continue;
    }
    // value(a)=fa*value(ra), value(b)=fb*value(rb), want value(a)=factor*value(b)
    parent[ra] = rb;
    fac[ra] = g.factor * fb / fa;
  }
  mesh.conf_of.resize(mesh.n_broken);
  mesh.factor_of.resize(mesh.n_broken);
  std::map<int, int> conf_index;
  for (int i = 0; i < mesh.n_broken; ++i) {
    auto [root, f] = find(i);
    auto it = conf_index.find(root);
    if (it == conf_index.end())
      it = conf_index.emplace(root, static_cast<int>(conf_index.size())).first;
    mesh.conf_of[i] = it->second;
    mesh.factor_of[i] = f;
  }
  mesh.n_conf = static_cast<int>(conf_index.size());

  // Dirichlet cap at exterior truncations
  std::set<int> clamped;
  for (const auto& p : mesh.panels) {
    if (p.cls != PanelClass::exterior_strip) continue;
    for (int j = 0; j <= p.ny; ++j)
      clamped.insert(mesh.conf_of[p.node(p.nx(), j)]);
  }
  mesh.dof_of_conf.assign(mesh.n_conf, -1);
  int dof = 0;
  for (int c = 0; c < mesh.n_conf; ++c)
    if (!clamped.count(c)) mesh.dof_of_conf[c] = dof++;
  mesh.n_dofs = dof;
  return mesh;
}

}  // namespace qwg
