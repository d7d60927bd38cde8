#include "qwg/eigs.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <random>

namespace qwg {

namespace {

double pair_residual(const SpMat& A, const SpMat& B, cplx lambda,
                     const Eigen::VectorXcd& v) {
  const Eigen::VectorXcd bv = B * v;
  return (A * v - lambda * bv).norm() / std::max(bv.norm(), 1e-300);
}

std::vector<EigPair> dense_path(const SpMat& A, const SpMat& B, cplx shift,
                                int count) {
  const Eigen::MatrixXcd Ad(A), Bd(B);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(Ad - shift * Bd);
  const Eigen::MatrixXcd op = lu.solve(Bd);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(op);
  std::vector<EigPair> all;
  for (int i = 0; i < op.rows(); ++i) {
    const cplx mu = es.eigenvalues()(i);
    if (std::abs(mu) < 1e-14) continue;  // infinite/defective direction
    EigPair p;
    p.lambda = shift + 1.0 / mu;
    p.vector = es.eigenvectors().col(i);
    all.push_back(std::move(p));
  }
  std::sort(all.begin(), all.end(), [&](const EigPair& a, const EigPair& b) {
    return std::abs(a.lambda - shift) < std::abs(b.lambda - shift);
  });
  if (static_cast<int>(all.size()) > count) all.resize(count);
  for (auto& p : all) {
    p.vector.normalize();
    p.residual = pair_residual(A, B, p.lambda, p.vector);
  }
  return all;
}

std::vector<EigPair> arnoldi_path(const SpMat& A, const SpMat& B, cplx shift,
                                  int count, const SolveOptions& opts) {
  const int n = static_cast<int>(A.rows());
  Eigen::SparseLU<SpMat> lu;
  cplx sigma = shift;
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> un(0.5, 1.5);
  bool factored = false;
  for (int attempt = 0; attempt < 4 && !factored; ++attempt) {
    SpMat shifted = A - sigma * B;
    lu.compute(shifted);
    if (lu.info() == Eigen::Success) {
      factored = true;
    } else {
      sigma = shift + cplx(1e-6 * un(rng), 1e-6 * un(rng)) *
                          (1.0 + std::abs(shift));
    }
  }
  if (!factored)
    fail(ErrorKind::FactorizationFailed,
         "LU of (A - shift B) failed after perturbed retries");

  int m = std::min(n, std::max(3 * count + 20, 60));
  for (int restart = 0; restart <= opts.max_restarts; ++restart) {
    Eigen::MatrixXcd V(n, m + 1);
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(m + 1, m);
    V.col(0) = Eigen::VectorXcd::Ones(n);
    V.col(0).normalize();
    int built = m;
    for (int j = 0; j < m; ++j) {
      Eigen::VectorXcd w = lu.solve(B * V.col(j));
      for (int pass = 0; pass < 2; ++pass)  // MGS with reorthogonalization
        for (int i = 0; i <= j; ++i) {
          const cplx h = V.col(i).dot(w);
          w -= h * V.col(i);
          H(i, j) += h;
        }
      const double hn = w.norm();
      H(j + 1, j) = hn;
      if (hn < 1e-13) {
        built = j + 1;
        break;
      }
      V.col(j + 1) = w / hn;
    }
    const Eigen::MatrixXcd Hm = H.topLeftCorner(built, built);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(Hm);

    struct Ritz {
      cplx mu;
      Eigen::VectorXcd y;
    };
    std::vector<Ritz> ritz;
    for (int i = 0; i < built; ++i) {
      const cplx mu = es.eigenvalues()(i);
      if (std::abs(mu) < 1e-14) continue;
      ritz.push_back({mu, es.eigenvectors().col(i)});
    }
    std::sort(ritz.begin(), ritz.end(), [&](const Ritz& a, const Ritz& b) {
      return std::abs(a.mu) > std::abs(b.mu);  // largest mu = nearest shift
    });

    std::vector<EigPair> out;
    for (const auto& r : ritz) {
      if (static_cast<int>(out.size()) >= count) break;
      EigPair p;
      p.lambda = sigma + 1.0 / r.mu;
      p.vector = V.leftCols(built) * r.y;
      p.vector.normalize();
      p.residual = pair_residual(A, B, p.lambda, p.vector);
      out.push_back(std::move(p));
    }
    const bool converged =
        static_cast<int>(out.size()) >= std::min(count, built) &&
        std::all_of(out.begin(), out.end(),
                    [&](const EigPair& p) { return p.residual < opts.tol; });
    if (converged) return out;
    if (restart == opts.max_restarts || m >= n)
      fail(ErrorKind::NotConverged, "Arnoldi residuals above tolerance");
    m = std::min(n, 2 * m);
  }
  fail(ErrorKind::NotConverged, "unreachable");
}

}  // namespace

std::vector<EigPair> solve_eigs(const SpMat& A, const SpMat& B, cplx shift,
                                int count, const SolveOptions& opts) {
  if (A.rows() != B.rows() || A.rows() != A.cols())
    fail(ErrorKind::InputError, "pencil matrices must be square and equal size");
  if (A.rows() <= opts.dense_threshold) return dense_path(A, B, shift, count);
  return arnoldi_path(A, B, shift, count, opts);
}

std::vector<WaveguideCandidate> filter_resonances(
    const std::vector<EigPair>& pairs, const FatGraphOperator& op,
    const FilterOptions& opts) {
  double cap = 10.0;
  for (const auto& p : pairs) cap = std::max(cap, std::abs(p.lambda) * 1.5);
  const auto rays = essential_spectrum_rays(op.dilation, op.eps, cap);

  const SpMat g = assemble_raw(*op.mesh, gram_l2_weights(op.eps, op.dilation));
  const SpMat tail = assemble_raw(*op.mesh, gram_l2_weights(op.eps, op.dilation),
                                  false, true, opts.tail_frac);

  std::vector<WaveguideCandidate> out;
  for (const auto& p : pairs) {
    WaveguideCandidate c;
    c.lambda = p.lambda;
    c.residual = p.residual;
    const double total = std::real(p.vector.dot(g * p.vector));
    const double tm = std::real(p.vector.dot(tail * p.vector));
    c.tail_mass = total > 0.0 ? tm / total : 0.0;

    for (const auto& ray : rays) {
      const cplx z = (p.lambda - ray.base) / ray.direction;
      if (std::abs(z) < 1e-12) {
        c.kept = false;
        c.reason = "at threshold";
        break;
      }
      if (std::abs(std::arg(z)) < opts.ray_margin && z.real() > 0.0) {
        c.kept = false;
        c.reason = "essential ray";
        break;
      }
    }
    if (c.kept && c.tail_mass > opts.tail_threshold) {
      c.kept = false;
      c.reason = "truncation tail";
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace qwg
