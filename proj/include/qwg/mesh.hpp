#pragma once

#include <memory>
#include <vector>

#include "qwg/fields.hpp"
#include "qwg/graph.hpp"
#include "qwg/types.hpp"

namespace qwg {

/// Transverse cross-section F = (-1/2, 1/2), vol F = 1, Neumann eigenvalues
/// (n pi)^2.
struct CrossSection {
  static constexpr double width = 1.0;
  static double neumann_eigenvalue(int n) { return (n * pi) * (n * pi); }
};

enum class PanelClass { edge_strip, exterior_strip, vertex_patch };

/// One structured rectangular panel [0, len] x F in reference coordinates.
/// Strips carry Q1 quads, patch panels are split into P1 triangles.
struct Panel {
  PanelClass cls = PanelClass::edge_strip;
  int tag = -1;                // EdgeId for strips, VertexId for patch panels
  std::vector<double> xs;      // longitudinal grid, xs.front()=0
  int ny = 1;                  // transverse subdivisions of F
  std::vector<double> qvals;   // per x-interval electric potential (strips)
  int node0 = 0;               // broken node offset

  int nx() const { return static_cast<int>(xs.size()) - 1; }
  int nodes() const { return (nx() + 1) * (ny + 1); }
  double length() const { return xs.back(); }
  int node(int i, int j) const { return node0 + i * (ny + 1) + j; }
  bool triangles() const { return cls == PanelClass::vertex_patch; }
};

/// Identification value(a) = factor * value(b) between broken nodes.
struct Glue {
  int a = 0, b = 0;
  cplx factor{1.0, 0.0};
};

/// Reference fat-graph data: strips per edge, patch panels per interior
/// vertex, epsilon, exterior truncation length and per-edge gauge fluxes.
struct FatGraphModel {
  GraphDecomposition decomposition;
  double eps = 0.1;
  double l_ext = 6.0;
  double patch_core = 0.0;   // core depth for degree-1/2 templates (default l0/2)
  // per internal edge id: total gauge phase e^{i Phi_e(l_e)} moved to the
  // terminal interface when the strip is locally gauged
  std::vector<std::pair<EdgeId, cplx>> terminal_phases;

  cplx terminal_phase(EdgeId e) const {
    for (const auto& [id, ph] : terminal_phases)
      if (id == e) return ph;
    return {1.0, 0.0};
  }
};

struct BuildOptions {
  double l_ext = 0.0;        // 0: pick from k_target
  cplx k_target{1.0, 0.0};   // sets default l_ext = 6 / Im(e^theta k)
  double patch_core = 0.0;   // 0: l0/2
};

/// One strip per edge (truncated on exterior edges), one patch per interior
/// vertex; boundary vertices keep the exact product structure and get none.
FatGraphModel build_model(const GraphDecomposition& dec, double eps,
                          const Dilation& dilation,
                          const BuildOptions& opts = {});

struct Mesh {
  std::vector<Panel> panels;
  std::vector<Glue> glue;
  int n_broken = 0;

  // conforming reduction: broken value = factor_of[n] * conforming value
  std::vector<int> conf_of;
  std::vector<cplx> factor_of;
  int n_conf = 0;

  // final dofs: conforming minus Dirichlet caps at exterior truncations
  std::vector<int> dof_of_conf;  // -1 where clamped
  int n_dofs = 0;

  double eps = 0.1;
  double l_ext = 0.0;

  int dof_of_broken(int n) const { return dof_of_conf[conf_of[n]]; }
  /// max element diameter over all panels (reference coordinates)
  double max_diameter() const;
  /// min interior angle of the patch triangulations, degrees
  double min_patch_angle_deg() const;
};

/// Structured conforming mesh; interface nodes shared through glue pairs with
/// the recorded jump/gauge factors. Throws MeshConformityError if interface
/// node counts cannot match.
Mesh generate_mesh(const FatGraphModel& model, double h_target);

}  // namespace qwg
