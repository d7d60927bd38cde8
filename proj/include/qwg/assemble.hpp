#pragma once

#include <Eigen/Sparse>
#include <memory>

#include "qwg/mesh.hpp"
#include "qwg/types.hpp"

namespace qwg {

using SpMat = Eigen::SparseMatrix<cplx>;
using SpMatR = Eigen::SparseMatrix<double>;

/// Coefficient weights per panel class: stiffness (longitudinal, transverse),
/// mass density, and the multiplier for the per-element electric potential.
struct ClassWeights {
  cplx stiff_x{0.0}, stiff_y{0.0}, mass{0.0}, q{0.0};
};

struct PanelWeights {
  ClassWeights edge, exterior, patch;
  const ClassWeights& of(PanelClass c) const {
    switch (c) {
      case PanelClass::edge_strip: return edge;
      case PanelClass::exterior_strip: return exterior;
      default: return patch;
    }
  }
};

/// Weight tables of the epsilon-scaled hat model. theta enters the exterior
/// panels only, through the e^{theta/2} substitution that keeps the field
/// continuous across Gamma_eps.
PanelWeights pencil_a_weights(double eps, const Dilation& dilation);
PanelWeights pencil_b_weights(double eps, const Dilation& dilation);
PanelWeights gram_l2_weights(double eps, const Dilation& dilation);
PanelWeights gram_h1_free_weights(double eps);

/// Core assembler. broken = true assembles on the per-panel node set without
/// the conforming reduction (the L^2 identification space); tail_only
/// restricts to exterior elements with x >= (1 - tail_frac) * l_ext.
SpMat assemble_raw(const Mesh& mesh, const PanelWeights& weights,
                   bool broken = false, bool tail_only = false,
                   double tail_frac = 0.25);

/// Complex-symmetric discrete pencil of the dilated hat-model Hamiltonian.
struct FatGraphOperator {
  SpMat A;  // stiffness + potential, mixed-pair dilation weights
  SpMat B;  // mass, exterior weighted by e^{theta}
  std::shared_ptr<const Mesh> mesh;
  Dilation dilation;
  double eps = 0.1;
};

FatGraphOperator assemble(std::shared_ptr<const Mesh> mesh,
                          const Dilation& dilation);

/// Broken -> conforming-dof injection matrix R (value copies with gauge
/// factors), so conforming vectors can be compared in the broken L^2 space.
SpMat broken_injection(const Mesh& mesh);

}  // namespace qwg
