#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "wavedelay/chareq.hpp"
#include "wavedelay/rational.hpp"
#include "wavedelay/verdict.hpp"

namespace wavedelay {

enum class CriticalSource { Emn, CabNumeric };

/// Gains at which a characteristic root sits on the stability boundary.
/// Values sorted, deduplicated within 1e-12.
struct CriticalSet {
  std::vector<double> values;
  CriticalSource source = CriticalSource::Emn;
};

/// Equal-gain critical set for tau = m/n: gains c for which
/// z^{2n} + 2c z^m + 1 has a root on |z| = 1. These are -cos(m theta) at
/// theta = k pi / |m - n|, k = 0 .. 2|m - n| - 1, together with 0.
CriticalSet critical_set_E(int m, int n);

/// Axis-crossing gains of g(lambda) = c with Im lambda in [a pi, b pi].
CriticalSet critical_set_strip(double tau, int a, int b);

/// Signed endpoint of the tau = m stability interval nearest to zero:
/// -sin(pi/(2(m-1))) for m = 4s - 2, +sin(pi/(2(m-1))) for m = 4s.
double nearest_boundary(int m);

/// Sign of d|z|/dc along the unit-circle root branch at a nonzero critical gain.
int branch_sign_r(double c_star, int m, int n);

/// Sign of d|z_k|/dc at c = 0 for the root z_k = exp(i (2k+1) pi / (2n)).
/// Zero when the first derivative vanishes (n = 1, m odd).
int branch_sign_at_zero(int k, int m, int n);

/// Sign of d Re(lambda)/dc for g(lambda) = c at an axis crossing.
int branch_sign_strip(double c_star, double tau);

/// Continuation oracles. Each tracks a boundary root from the critical gain
/// to c_star +/- step with predictor-corrector steps and reports the sign of
/// the change in |z| (or Re lambda). Absent when no boundary root exists.
std::optional<int> continuation_sign_r(double c_star, int m, int n, double step = 1e-5);
std::optional<int> continuation_sign_strip(double c_star, double tau, double step = 1e-5);

/// |z_k(c)| after following the root z_k(0) = exp(i (2k+1) pi / (2n)) to gain c.
double track_zero_branch_modulus(int k, int m, int n, double c);

/// Smallest |j| and |l| (<= bound) with cos(tau (j + 1/2) pi) > 0 and
/// cos(tau (l + 1/2) pi) < 0. Throws SearchExhausted otherwise.
std::pair<int, int> find_pos_neg_cos(double tau, int bound);

/// Open interval (lower, upper) of gains for which the variant is
/// exponentially stable, or empty.
struct RegionSpec {
  double lower = 0.0;
  double upper = 0.0;
  bool empty = true;

  bool contains(double c) const { return !empty && c > lower && c < upper; }
};

RegionSpec stability_region(double tau, CharKind kind);

/// 1 + a1 > |a2 + a3| and 1 - a1 > |a2 - a3|.
bool hale_two_delay(double a1, double a2, double a3);

struct ClassifyOptions {
  /// Take the delay as rationally independent of 2 and use the Hale route.
  bool treat_as_irrational = false;
  /// Largest denominator tried when recovering a rational delay from tau.
  std::int64_t max_denominator = 1000000;
  /// Above this polynomial degree the Hale route is used instead.
  int max_poly_degree = 512;
};

/// Exponential stability of the closed loop. Rational delays go through the
/// unit-disk polynomial; the witness is a lambda-plane root with
/// Re lambda >= 0 (residual < 1e-9).
StabilityVerdict classify(const DelaySystem& sys, const ClassifyOptions& opts = {});

/// Builds a system of the given variant with one gain value.
DelaySystem make_system(CharKind kind, double gain, Rational tau);

/// Bisection of the classifier between a stable gain and an unstable one;
/// returns the crossing to within tol.
double bisect_boundary(CharKind kind, Rational tau, double c_stable, double c_other, double tol = 1e-12);

/// Stable intervals found on the grid lo:step:hi, endpoints refined by bisection.
std::vector<RegionSpec> scan_region(CharKind kind, Rational tau, double lo, double hi, double step,
                                    double tol = 1e-12);

}  // namespace wavedelay
