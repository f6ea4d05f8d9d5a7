#pragma once

#include <complex>
#include <optional>
#include <utility>
#include <vector>

namespace wavedelay {

using cplx = std::complex<double>;

/// Value and derivative of an entire function at one point, both multiplied
/// by the same positive factor exp(-log_scale). The factor is real and
/// positive, so zeros, arguments and the Newton ratio value/derivative are
/// those of the unscaled function.
struct ScaledValue {
  cplx value;
  cplx derivative;
  double log_scale = 0.0;

  cplx unscaled() const { return value * std::exp(log_scale); }
};

/// Exponential polynomial sum_k coef_k * exp(rate_k * lambda) with real
/// coefficients and real rates. All characteristic functions of the closed
/// loop are of this form.
class ExpPoly {
 public:
  struct Term {
    double coef;
    double rate;
  };

  ExpPoly() = default;
  /// Terms with equal rates (within 1e-14) are merged; zero coefficients dropped.
  explicit ExpPoly(std::vector<Term> terms);

  const std::vector<Term>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  cplx eval(cplx lambda) const;
  cplx derivative(cplx lambda) const;

  /// Evaluation normalized so the largest exponential factor exp(rate*Re lambda)
  /// equals one. Overflow-free for any finite lambda.
  ScaledValue eval_scaled(cplx lambda) const;

  /// Bounds (lo, hi) such that every zero has lo < Re lambda < hi. Empty when
  /// the function has fewer than two terms (no zeros at all).
  std::optional<std::pair<double, double>> real_part_bounds() const;

  double min_rate() const;
  double max_rate() const;

 private:
  std::vector<Term> terms_;
};

}  // namespace wavedelay
