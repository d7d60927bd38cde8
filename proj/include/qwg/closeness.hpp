#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <vector>

#include "qwg/assemble.hpp"
#include "qwg/eigs.hpp"
#include "qwg/mesh.hpp"

namespace qwg {

/// 1D discretization of the decomposed graph sharing the waveguide strips'
/// longitudinal grids, so the identification maps are exact on the discrete
/// spaces. Works in substituted coordinates: the e^{theta/2} jump at Gamma_0
/// sits in the exterior weights, dofs are continuous across the cut.
struct GraphDiscretization {
  struct Chain {
    EdgeId id;
    bool exterior;
    std::vector<double> xs;
    int node0;  // broken 1D node offset
    VertexId vfrom;
    VertexId vto;  // -1 for exterior chains
    int panel;     // matching waveguide panel index
    int nx() const { return static_cast<int>(xs.size()) - 1; }
    int node(int i) const { return node0 + i; }
  };
  std::vector<Chain> chains;
  int n_broken = 0;
  std::vector<int> conf_of;
  int n_conf = 0;
  std::vector<int> dof_of_conf;  // -1 at the exterior Dirichlet caps
  int n_dofs = 0;

  SpMat A;     // dilated 1D pencil stiffness (+ potential)
  SpMat Bp;    // mixed-pair mass, exterior weighted by e^{theta}
  SpMat B0;    // L2 Gram on dofs
  SpMat G1;    // free H1 Gram on dofs
  SpMat B0b;   // L2 Gram on the broken space
  SpMat Bpb;   // mixed-pair mass on the broken space
  SpMat Rg;    // broken <- dofs injection

  int dof_of_broken(int n) const { return dof_of_conf[conf_of[n]]; }
  int dof_of_vertex(VertexId v) const;
};

GraphDiscretization discretize_graph(const FatGraphModel& model,
                                     const Mesh& mesh,
                                     const Dilation& dilation);

/// J (transverse-constant extension), J' (transverse average) on the broken
/// L2 spaces, and their order-1 variants J^1 (constant f(v) on patches) and
/// J'^1 (vertex-average correction with smoothstep cutoffs) between the
/// conforming spaces.
struct IdentificationMaps {
  SpMat Jb;   // graph broken -> waveguide broken
  SpMat Jpb;  // waveguide broken -> graph broken
  SpMat J1;   // graph dofs -> waveguide dofs
  SpMat Jp1;  // waveguide dofs -> graph dofs
  SpMat Rw;   // waveguide broken <- waveguide dofs
};

IdentificationMaps build_maps(const GraphDiscretization& gd, const Mesh& mesh,
                              const FatGraphModel& model);

struct ClosenessReport {
  double delta_adj = 0;   // ||J - J'*||_{0->0}
  double delta_inv1 = 0;  // ||1 - J'J||_{1->0}
  double delta_inv2 = 0;  // ||1 - JJ'||_{1->0}
  double delta_form = 0;  // sup |h(J'1 u, f) - h~(u, J1 f)| / (||u||_1 ||f||_1)
  double norm_j = 0;      // ||J||, <= 2
  double norm_jp = 0;     // ||J'||, <= 2
  double eps = 0;
  double h = 0;
};

ClosenessReport delta_report(const GraphDiscretization& gd,
                             const FatGraphOperator& wg,
                             const IdentificationMaps& maps);

struct ResolventDiff {
  double norm_jr_rj = 0;   // ||J R(z) - R~(z) J||
  double norm_jrjp_r = 0;  // ||J R(z) J' - R~(z)||
};

ResolventDiff resolvent_diff_norm(cplx z, const GraphDiscretization& gd,
                                  const FatGraphOperator& wg,
                                  const IdentificationMaps& maps);

struct ProjectionDiff {
  double norm = 0;
  int rank_graph = 0;
  int rank_wg = 0;
};

/// Contour quadrature of resolvent differences around the disc |z - lambda0|
/// = radius; ranks counted from the pencil spectra inside the disc.
ProjectionDiff projection_diff(cplx lambda0, double radius,
                               const GraphDiscretization& gd,
                               const FatGraphOperator& wg,
                               const IdentificationMaps& maps,
                               int quad_points = 24);

/// (||J psi0 - psi_eps||, ||J' psi_eps - psi0||) after the unitary scalar
/// aligning the first norm. Inputs are dof vectors, normalized internally.
std::pair<double, double> eigenvector_match(const Eigen::VectorXcd& psi0,
                                            const Eigen::VectorXcd& psieps,
                                            const GraphDiscretization& gd,
                                            const FatGraphOperator& wg,
                                            const IdentificationMaps& maps);

/// sqrt of the largest eigenvalue of X^H Gout X v = lambda Gin v (dense path).
double operator_norm_dense(const SpMat& X, const SpMat& gout,
                           const SpMat& gin);

}  // namespace qwg
