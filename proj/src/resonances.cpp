#include "qwg/resonances.hpp"

#include <cmath>

namespace qwg {

HolomorphicFn secular_function(const GraphDecomposition& dec,
                               const Dilation& dilation,
                               const GaugedSystem* gauged) {
  HolomorphicFn fn;
  fn.f = [&dec, dilation, gauged](cplx k) {
    return secular_det(dec, dilation, k, gauged).det;
  };
  fn.logderiv = [&dec, dilation, gauged](cplx k) {
    return secular_det(dec, dilation, k, gauged).logderiv;
  };
  fn.residual = [&dec, dilation, gauged](cplx k) {
    return secular_det(dec, dilation, k, gauged).residual();
  };
  return fn;
}

std::vector<Resonance> find_resonances(const GraphDecomposition& dec,
                                       const Dilation& dilation,
                                       const Rectangle& region,
                                       const ResonanceOptions& opts,
                                       const GaugedSystem* gauged) {
  const HolomorphicFn fn = secular_function(dec, dilation, gauged);
  const ZeroReport zeros = find_zeros(fn, region, opts.root);

  std::vector<Resonance> out;
  for (const auto& z : zeros.zeros) {
    Resonance r;
    r.k = z.k;
    r.lambda = z.k * z.k;
    r.residual = z.residual;
    r.multiplicity = z.multiplicity;
    r.revealed = dilation.admissible(z.k);

    const SecularSystem sys = secular_matrix(dec, dilation, z.k, gauged);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(sys.M, Eigen::ComputeFullV);
    r.nullvector = svd.matrixV().col(sys.M.cols() - 1);

    double ext_amp = 0.0;
    for (EdgeId e : sys.layout.external)
      ext_amp = std::max(ext_amp,
                         std::abs(r.nullvector(sys.layout.external_col(e))));
    const bool real_lambda =
        std::abs(r.lambda.imag()) <= opts.embedded_tol * (1.0 + std::abs(r.lambda));
    r.kind = (ext_amp <= opts.embedded_tol && real_lambda)
                 ? Resonance::Kind::embedded_eigenvalue
                 : Resonance::Kind::resonance;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace qwg
