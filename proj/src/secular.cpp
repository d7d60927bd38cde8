#include "qwg/secular.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace qwg {

int SecularLayout::value_col(EdgeId e) const {
  for (std::size_t i = 0; i < internal.size(); ++i)
    if (internal[i] == e) return 2 * static_cast<int>(i);
  fail(ErrorKind::InputError, "edge not internal");
}

int SecularLayout::deriv_col(EdgeId e) const { return value_col(e) + 1; }

int SecularLayout::external_col(EdgeId e) const {
  for (std::size_t j = 0; j < external.size(); ++j)
    if (external[j] == e) return 2 * static_cast<int>(internal.size()) +
                                 static_cast<int>(j);
  fail(ErrorKind::InputError, "edge not external");
}

namespace {

template <class S>
struct RowBuilder {
  std::vector<S>& data;
  int dim;
  int row = 0;
  void add(int col, S v) { data[static_cast<std::size_t>(row) * dim + col] = data[static_cast<std::size_t>(row) * dim + col] + v; }
  void next() { ++row; }
};

// slot data: linear coefficients of (value, outward D-derivative) in the two
// edge columns, already including the terminal transfer and gauge phase
template <class S>
struct SlotCoeffs {
  S val_a, val_b;   // value = val_a * A + val_b * B
  S der_a, der_b;   // outward D f = der_a * A + der_b * B
};

template <class S>
SlotCoeffs<S> slot_coeffs(const Edge& edge, bool at_terminal, S k, cplx phase,
                          cplx slot_mult) {
  SlotCoeffs<S> c;
  if (!at_terminal) {
    c.val_a = S(slot_mult);
    c.val_b = S(0.0);
    c.der_a = S(0.0);
    c.der_b = S(slot_mult);
    return c;
  }
  const Mat2<S> t = gauged_transfer(edge, k);
  const cplx m = slot_mult * phase;
  c.val_a = S(m) * t.a;
  c.val_b = S(m) * t.b;
  c.der_a = -(S(m) * t.c);
  c.der_b = -(S(m) * t.d);
  return c;
}

template <class S>
void assemble(const GraphDecomposition& dec, const Dilation& dilation, S k,
              const GaugedSystem* gauged, std::vector<S>& data,
              SecularLayout& layout) {
  const MetricGraph& g = gauged ? gauged->graph : dec.internal;
  layout.internal = g.internal_edges();
  for (const auto& e : dec.external) layout.external.push_back(e.id);
  const int dim = layout.dim();
  data.assign(static_cast<std::size_t>(dim) * dim, S(0.0));
  RowBuilder<S> rows{data, dim};

  std::map<EdgeId, cplx> phase;
  std::map<std::pair<EdgeId, bool>, cplx> mult;
  for (EdgeId eid : layout.internal) {
    const Edge& e = g.edge(eid);
    phase[eid] = transfer_phase(e);
    mult[{eid, false}] = gauged ? gauged->phase(eid, false) : cplx(1.0, 0.0);
    mult[{eid, true}] = gauged ? gauged->phase(eid, true) : cplx(1.0, 0.0);
  }

  const cplx eth_mhalf = std::exp(-dilation.theta / 2.0);

  for (VertexId v : dec.internal.vertices) {
    const auto slots = dec.slots_at(v);
    if (dec.is_boundary(v)) {
      // exactly one internal slot plus one external edge by construction
      if (slots.size() != 1)
        fail(ErrorKind::IncompatibleDecomposition,
             "boundary vertex must have one internal slot");
      const EdgeSlot s = slots.front();
      const Edge& e = g.edge(s.edge);
      const auto c = slot_coeffs(e, s.at_terminal, k, phase[s.edge],
                                 mult[{s.edge, s.at_terminal}]);
      EdgeId ext_id = -1;
      for (const auto& x : dec.external)
        if (x.from == v) ext_id = x.id;
      if (ext_id < 0)
        fail(ErrorKind::IncompatibleDecomposition, "boundary vertex without lead");
      const int gcol = layout.external_col(ext_id);
      const int ca = layout.value_col(s.edge), cb = layout.deriv_col(s.edge);
      // jump rows normalized by e^{theta/2} resp. e^{3 theta/2}: theta then
      // enters only the external column (a nonzero scaling, so the zero set
      // of det M is theta-independent by inspection).
      // value: e^{-theta/2} gamma = f_int(v)
      rows.add(gcol, S(eth_mhalf));
      rows.add(ca, -c.val_a);
      rows.add(cb, -c.val_b);
      rows.next();
      // derivative: i e^{-theta/2} k gamma = f'_int(v) toward the exterior,
      // i.e. minus the outward D; folded as i e^{-theta/2} k gamma + D = 0
      rows.add(gcol, S(cplx(0.0, 1.0)) * S(eth_mhalf) * k);
      rows.add(ca, c.der_a);
      rows.add(cb, c.der_b);
      rows.next();
      continue;
    }
    if (slots.empty()) continue;
    std::vector<SlotCoeffs<S>> cs;
    cs.reserve(slots.size());
    for (const auto& s : slots)
      cs.push_back(slot_coeffs(g.edge(s.edge), s.at_terminal, k, phase[s.edge],
                               mult[{s.edge, s.at_terminal}]));
    // continuity against the first slot
    for (std::size_t i = 1; i < slots.size(); ++i) {
      rows.add(layout.value_col(slots[i].edge), cs[i].val_a);
      rows.add(layout.deriv_col(slots[i].edge), cs[i].val_b);
      rows.add(layout.value_col(slots[0].edge), -cs[0].val_a);
      rows.add(layout.deriv_col(slots[0].edge), -cs[0].val_b);
      rows.next();
    }
    // current conservation
    for (std::size_t i = 0; i < slots.size(); ++i) {
      rows.add(layout.value_col(slots[i].edge), cs[i].der_a);
      rows.add(layout.deriv_col(slots[i].edge), cs[i].der_b);
    }
    rows.next();
  }
  if (rows.row != dim)
    fail(ErrorKind::IncompatibleDecomposition, "secular system is not square");
}

}  // namespace

SecularSystem secular_matrix(const GraphDecomposition& dec,
                             const Dilation& dilation, cplx k,
                             const GaugedSystem* gauged,
                             bool require_admissible) {
  if (require_admissible && !dilation.admissible(k))
    fail(ErrorKind::OutsideAdmissibleSector,
         "Im(e^theta k) <= 0: outgoing column does not decay");
  SecularSystem sys;
  sys.k = k;
  sys.dilation = dilation;
  std::vector<cplx> data;
  assemble(dec, dilation, k, gauged, data, sys.layout);
  const int n = sys.layout.dim();
  sys.M.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      sys.M(i, j) = data[static_cast<std::size_t>(i) * n + j];
  return sys;
}

void secular_with_derivative(const GraphDecomposition& dec,
                             const Dilation& dilation, cplx k,
                             const GaugedSystem* gauged, Eigen::MatrixXcd& M,
                             Eigen::MatrixXcd& dM) {
  std::vector<Dual> data;
  SecularLayout layout;
  assemble(dec, dilation, Dual::seed(k), gauged, data, layout);
  const int n = layout.dim();
  M.resize(n, n);
  dM.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Dual& d = data[static_cast<std::size_t>(i) * n + j];
      M(i, j) = d.v;
      dM(i, j) = d.d;
    }
}

SecularDet secular_det(const GraphDecomposition& dec, const Dilation& dilation,
                       cplx k, const GaugedSystem* gauged) {
  Eigen::MatrixXcd M, dM;
  secular_with_derivative(dec, dilation, k, gauged, M, dM);
  SecularDet out;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(M);
  out.det = lu.determinant();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
  const double smax = svd.singularValues()(0);
  out.sigma_ratio =
      smax > 0.0 ? svd.singularValues()(M.rows() - 1) / smax : 0.0;
  // Jacobi's formula: (log det)' = tr(M^{-1} M')
  out.logderiv = lu.solve(dM).trace();
  return out;
}

std::vector<SpectralRay> essential_spectrum_rays(const Dilation& dilation,
                                                 double eps,
                                                 double energy_cap) {
  const cplx dir = std::exp(-2.0 * dilation.theta);
  std::vector<SpectralRay> rays;
  if (eps <= 0.0) {
    rays.push_back({0.0, dir});
    return rays;
  }
  for (int n = 0;; ++n) {
    const double base = std::pow(n * pi / eps, 2.0);
    if (base > energy_cap) break;
    rays.push_back({base, dir});
  }
  return rays;
}

LassoClosedForm lasso_closed_form(double ell, double flux, int j_max) {
  if (!(ell > 0.0)) fail(ErrorKind::InputError, "loop length must be positive");
  LassoClosedForm out;
  out.residual = [ell, flux](cplx k) {
    return 2.0 * (std::cos(k * ell) - std::cos(cplx(flux))) -
           cplx(0.0, 1.0) * std::sin(k * ell);
  };
  // Re k >= 0 branch: the j-th resonance pair (2 pi j - i ln 3)/l and the
  // embedded eigenvalues (2 pi j / l)^2, j >= 1
  const double ln3 = std::log(3.0);
  if (std::abs(wrap_flux(flux)) < 1e-15) {
    for (int j = 0; j <= j_max; ++j) {
      if (j != 0)
        out.lambda.push_back(std::pow(cplx(2.0 * pi * j / ell), 2.0));
      out.lambda_hat.push_back(std::pow(cplx(2.0 * pi * j, -ln3) / ell, 2.0));
    }
  }
  out.parabola = [ell, ln3](cplx lam) {
    const double s = lam.real() + std::pow(ln3 / ell, 2.0);
    return lam.imag() + (2.0 * ln3 / ell) * std::sqrt(std::max(s, 0.0));
  };
  return out;
}

}  // namespace qwg
