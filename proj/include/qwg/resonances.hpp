#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qwg/rootfind.hpp"
#include "qwg/secular.hpp"

namespace qwg {

struct Resonance {
  cplx k;
  cplx lambda;          // k^2
  double residual = 0;  // Hadamard-scaled |det M(k)|
  int multiplicity = 1;
  enum class Kind { resonance, embedded_eigenvalue } kind = Kind::resonance;
  bool revealed = false;  // eigenvalue of H^theta: Im(e^theta k) > 0
  Eigen::VectorXcd nullvector;
};

struct ResonanceOptions {
  RootFindOptions root;
  double embedded_tol = 1e-8;  // external-amplitude / Im(lambda) threshold
};

/// Zeros of det M(k; theta) inside the region, refined, classified and tagged.
/// The winding total always equals the summed multiplicities (find_zeros
/// enforces it), which is the argument-principle consistency check.
std::vector<Resonance> find_resonances(const GraphDecomposition& dec,
                                       const Dilation& dilation,
                                       const Rectangle& region,
                                       const ResonanceOptions& opts = {},
                                       const GaugedSystem* gauged = nullptr);

/// Convenience: HolomorphicFn wrapping the secular determinant.
HolomorphicFn secular_function(const GraphDecomposition& dec,
                               const Dilation& dilation,
                               const GaugedSystem* gauged = nullptr);

}  // namespace qwg
