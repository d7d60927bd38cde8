#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <string>
#include <vector>

#include "qwg/assemble.hpp"
#include "qwg/secular.hpp"
#include "qwg/types.hpp"

namespace qwg {

struct EigPair {
  cplx lambda;
  Eigen::VectorXcd vector;
  double residual = 0.0;  // ||A v - lambda B v|| / ||B v||
};

struct SolveOptions {
  int dense_threshold = 2000;
  int max_basis = 120;
  double tol = 1e-8;
  int max_restarts = 3;
  std::uint64_t seed = 1;
};

/// Eigenpairs of the pencil (A, B) nearest the shift: dense below the
/// threshold, shift-invert Arnoldi above it. Retries with a perturbed shift
/// when the factorization of (A - shift B) fails.
std::vector<EigPair> solve_eigs(const SpMat& A, const SpMat& B, cplx shift,
                                int count, const SolveOptions& opts = {});

struct WaveguideCandidate {
  cplx lambda;
  double residual = 0.0;
  double tail_mass = 0.0;
  bool kept = true;
  std::string reason;  // empty when kept
};

struct FilterOptions {
  double ray_margin = 0.05;     // rad, in arg(lambda - threshold)
  double tail_threshold = 0.5;  // exterior-tail mass fraction
  double tail_frac = 0.25;      // tail = last quarter of the truncated lead
};

/// Drops discretized-continuum eigenvalues near the rotated essential rays
/// and truncation artifacts whose mass sits on the exterior tail.
std::vector<WaveguideCandidate> filter_resonances(
    const std::vector<EigPair>& pairs, const FatGraphOperator& op,
    const FilterOptions& opts = {});

}  // namespace qwg
