#pragma once

#include <complex>
#include <vector>

#include "wavedelay/chareq.hpp"
#include "wavedelay/verdict.hpp"

namespace wavedelay {

/// Real polynomial, coefficients in ascending degree. Leading zeros are
/// stripped on construction and counted in `stripped_leading`.
class PolyReal {
 public:
  PolyReal() = default;
  explicit PolyReal(std::vector<double> ascending);

  const std::vector<double>& coeffs() const { return coeffs_; }
  /// -1 for the zero polynomial.
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  int stripped_leading() const { return stripped_; }

  cplx eval(cplx z) const;
  cplx derivative(cplx z) const;
  double operator[](int i) const { return coeffs_[static_cast<std::size_t>(i)]; }

  /// z^deg P(1/z).
  PolyReal reversed() const;
  PolyReal negated() const;

 private:
  std::vector<double> coeffs_;
  int stripped_ = 0;
};

/// Unit-disk reduction for tau = m/n with z = e^{-lambda/n}:
///   1 + z^{2n} + (c1 + c2) z^m + (c1 - c2) z^{m+2n}.
/// The equal-gain case is z^{2n} + 2c z^m + 1 and the direct case
/// -k z^{m+2n} + k z^m + z^{2n} + 1. Re lambda >= 0 iff |z| <= 1.
/// Throws InvalidArgument when sys has no rational delay.
PolyReal reduce_to_polynomial(const DelaySystem& sys);

/// lambda = -n (log|z| + i (arg z + 2 pi branch)).
cplx z_to_lambda(cplx z, std::int64_t n, std::int64_t branch = 0);

struct DiskRootReport {
  std::vector<cplx> roots;
  int count_inside = 0;
  int count_on = 0;
  int count_outside = 0;
  int stripped_leading = 0;
};

inline constexpr double kOnCircleTolerance = 1e-9;

/// All roots (balanced companion eigenvalues plus Newton polish), classified
/// by |z| against 1 with band |modulus - 1| < tol counted as "on".
DiskRootReport disk_roots(const PolyReal& p, double tol = kOnCircleTolerance);

/// Jury innerwise test: true iff every root is strictly inside |z| < 1.
/// A nonzero constant is vacuously inside.
bool jury_all_inside(const PolyReal& p);

struct PolyStability {
  StabilityVerdict verdict;  ///< witness in the z-plane
  DiskRootReport report;
  /// Independent Jury route on the reversed polynomial: true iff all roots of
  /// P lie strictly outside the closed unit disk.
  bool jury_reversed_inside = false;
};

/// Stable iff no root in the closed disk; Marginal iff none inside but some on
/// the circle; Unstable otherwise.
PolyStability stability_from_poly(const PolyReal& p, double tol = kOnCircleTolerance);

}  // namespace wavedelay
