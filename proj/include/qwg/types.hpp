#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace qwg {

using cplx = std::complex<double>;

constexpr double pi = 3.14159265358979323846;

/// Error categories used across the library. Violations of data invariants
/// are reported through ValidationReport instead; these are hard failures.
enum class ErrorKind {
  NotValidated,
  OutOfRange,
  OutsideAdmissibleSector,
  ContourThroughZero,
  NonConvergent,
  QuadratureStall,
  UnsupportedDegree,
  MeshConformityError,
  FactorizationFailed,
  NotConverged,
  IncompatibleDecomposition,
  SingularGram,
  ShiftOnSpectrum,
  ContourOnSpectrum,
  InputError,
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) {
  throw Error(kind, msg);
}

/// Complex exterior-scaling parameter restricted to the admissible strip
/// S_theta = { |Im theta| < sector/2 } with sector in [0, pi).
struct Dilation {
  cplx theta{0.0, 0.0};
  double sector_bound = pi - 1e-9;

  Dilation() = default;
  Dilation(cplx th, double sector = pi - 1e-9)
      : theta(th), sector_bound(sector) {
    if (sector < 0.0 || sector >= pi)
      fail(ErrorKind::InputError, "sector bound must lie in [0, pi)");
    if (std::abs(th.imag()) >= sector / 2.0)
      fail(ErrorKind::InputError, "theta outside the admissible strip");
  }

  /// true iff the dilated outgoing exponential e^{i e^theta k x} decays.
  bool admissible(cplx k) const {
    return (std::exp(theta) * k).imag() > 0.0;
  }
};

}  // namespace qwg
