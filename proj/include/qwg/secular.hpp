#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "qwg/fields.hpp"
#include "qwg/graph.hpp"
#include "qwg/transfer.hpp"
#include "qwg/types.hpp"

namespace qwg {

/// Column layout of the secular matrix: two amplitude slots per internal edge
/// (value and D-derivative at x=0 in gauged variables) and one outgoing
/// amplitude per external edge.
struct SecularLayout {
  std::vector<EdgeId> internal;  // column pairs 2i, 2i+1
  std::vector<EdgeId> external;  // columns 2*n_int + j
  int dim() const {
    return 2 * static_cast<int>(internal.size()) +
           static_cast<int>(external.size());
  }
  int value_col(EdgeId e) const;
  int deriv_col(EdgeId e) const;
  int external_col(EdgeId e) const;
};

struct SecularSystem {
  Eigen::MatrixXcd M;
  SecularLayout layout;
  cplx k;
  Dilation dilation;
};

/// Assembles M(k; theta) for the decomposed graph. The matrix is entire in k;
/// zeros of det M are the dilated-operator eigenvalues when the outgoing
/// column decays (dilation.admissible(k)) and analytic continuations of the
/// resonance condition otherwise. With require_admissible the call refuses
/// k outside the admissible sector.
SecularSystem secular_matrix(const GraphDecomposition& dec,
                             const Dilation& dilation, cplx k,
                             const GaugedSystem* gauged = nullptr,
                             bool require_admissible = false);

/// Same assembly over dual numbers: returns M and dM/dk.
void secular_with_derivative(const GraphDecomposition& dec,
                             const Dilation& dilation, cplx k,
                             const GaugedSystem* gauged,
                             Eigen::MatrixXcd& M, Eigen::MatrixXcd& dM);

/// Raw determinant, the exact logarithmic derivative d/dk log det M, and a
/// scale-invariant singularity measure sigma_min/sigma_max (robust even when
/// a whole row degenerates, as happens at embedded eigenvalues).
struct SecularDet {
  cplx det;
  double sigma_ratio;
  cplx logderiv;
  double residual() const { return sigma_ratio; }
};

SecularDet secular_det(const GraphDecomposition& dec, const Dilation& dilation,
                       cplx k, const GaugedSystem* gauged = nullptr);

struct SpectralRay {
  double base;     // threshold on the real axis
  cplx direction;  // e^{-2 theta}
};

/// eps = 0: single ray from 0. eps > 0: rays from (n pi / eps)^2 up to the
/// energy cap.
std::vector<SpectralRay> essential_spectrum_rays(const Dilation& dilation,
                                                 double eps,
                                                 double energy_cap = 2000.0);

struct LassoClosedForm {
  std::function<cplx(cplx)> residual;   // 2(cos kl - cos Phi) - i sin kl
  std::vector<cplx> lambda;             // embedded (2 pi j / l)^2, j != 0
  std::vector<cplx> lambda_hat;         // ((2 pi j - i ln 3)/l)^2
  std::function<double(cplx)> parabola; // Im + (2 ln3/l) sqrt(Re + (ln3/l)^2)
};

LassoClosedForm lasso_closed_form(double ell, double flux, int j_max);

}  // namespace qwg
