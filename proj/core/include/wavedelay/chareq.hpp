#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "wavedelay/exppoly.hpp"
#include "wavedelay/rational.hpp"

namespace wavedelay {

/// Feedback gains of u(t) = -c1 w(1,t) - c2 z_t(1,t).
struct DelayGains {
  double c1 = 0.0;
  double c2 = 0.0;
};

/// Which characteristic function describes the closed loop.
///  - CascadeFull: general (c1, c2).
///  - CascadeEqualGains: c1 == c2 == c, in the cleared form e^{2l} + 2c e^{(2-tau)l} + 1.
///  - DirectDelayFeedback: z_x(1,t) = -k z_t(1,t-tau); k is stored in c2, c1 == 0.
enum class CharKind { CascadeFull, CascadeEqualGains, DirectDelayFeedback };

const char* to_string(CharKind kind);

struct DelaySystem {
  DelayGains gains;
  double tau = 1.0;
  std::optional<Rational> tau_rational;
  CharKind kind = CharKind::CascadeFull;

  static DelaySystem cascade(double c1, double c2, double tau);
  static DelaySystem cascade(double c1, double c2, Rational tau);
  static DelaySystem equal_gains(double c, double tau);
  static DelaySystem equal_gains(double c, Rational tau);
  static DelaySystem direct(double k, double tau);
  static DelaySystem direct(double k, Rational tau);

  /// Gain used by the single-gain variants (c for equal gains, k for direct).
  double gain() const { return gains.c2; }

  /// Throws InvalidArgument when an invariant of the variant is violated.
  void validate() const;
};

/// (c1, c2) of the underlying operator regardless of variant.
DelayGains effective_gains(const DelaySystem& sys);

/// Characteristic function of the variant as an exponential polynomial.
ExpPoly char_function(const DelaySystem& sys);

/// Unscaled characteristic function value (may overflow for huge |Re lambda|).
cplx eval_char(const DelaySystem& sys, cplx lambda);

/// Overflow-free value and derivative; see ScaledValue.
ScaledValue eval_char_scaled(const DelaySystem& sys, cplx lambda);

/// g(lambda) = -(e^{tau l} + e^{(tau-2) l}) / 2; equal-gain roots solve g = c.
/// Requires kind == CascadeEqualGains.
cplx eval_g(const DelaySystem& sys, cplx lambda);

/// g(lambda) - c as an exponential polynomial.
ExpPoly g_minus_c(const DelaySystem& sys);

/// A state (f, g, h) sampled at x_i = i / n, i = 0..n.
struct SampledTriple {
  std::vector<cplx> f;
  std::vector<cplx> g;
  std::vector<cplx> h;

  std::size_t intervals() const { return f.empty() ? 0 : f.size() - 1; }
};

/// A state given by closed-form component functions of x in [0, 1].
struct StateFunctions {
  std::function<cplx(double)> f;
  std::function<cplx(double)> g;
  std::function<cplx(double)> h;
};

/// Scaled residual below which a point counts as a characteristic root.
inline constexpr double kRootTolerance = 1e-9;

/// Eigenfunction (f, g, h) of the closed-loop operator for a characteristic
/// root lambda, sampled on grid_n + 1 points. Throws NotARoot otherwise.
SampledTriple eigenfunction(const DelaySystem& sys, cplx lambda, int grid_n);

/// X = R(lambda, A) Y sampled on grid_n + 1 points. Quadrature is composite
/// trapezoid on an internal grid doubled until the output moves by < 1e-8.
/// Throws NearSpectrum when lambda is numerically a characteristic root and
/// QuadratureTooCoarse when refinement does not settle.
SampledTriple resolvent_apply(const DelaySystem& sys, cplx lambda, const StateFunctions& y, int grid_n);

}  // namespace wavedelay
