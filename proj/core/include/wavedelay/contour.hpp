#pragma once

#include <complex>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "wavedelay/chareq.hpp"
#include "wavedelay/exppoly.hpp"
#include "wavedelay/polyform.hpp"

namespace wavedelay {

/// Axis-aligned rectangle in the lambda-plane.
struct ComplexRect {
  double re_min = 0.0;
  double re_max = 0.0;
  double im_min = 0.0;
  double im_max = 0.0;

  void validate() const;
  double width() const { return re_max - re_min; }
  double height() const { return im_max - im_min; }
  cplx center() const { return {0.5 * (re_min + re_max), 0.5 * (im_min + im_max)}; }
  bool contains(cplx z, double slack = 0.0) const {
    return z.real() >= re_min - slack && z.real() <= re_max + slack && z.imag() >= im_min - slack &&
           z.imag() <= im_max + slack;
  }
};

using AnalyticFn = std::function<cplx(cplx)>;

struct WindingOptions {
  /// Consecutive samples are refined until their argument change is below this.
  double max_arg_step = 1.5707963267948966;
  int min_samples_per_edge = 16;
  /// Initial sampling density along edges (samples per unit length).
  double samples_per_unit = 8.0;
  /// |fn| below this at a sample means the contour touches a zero.
  double zero_tol = 1e-12;
  /// Maximum halvings of one initial sampling interval.
  int max_bisections = 48;
  /// Bound on |fn'| along the contour; when positive, pieces are also split
  /// until this bound rules out a zero or a full phase turn inside them.
  double lipschitz = 0.0;
};

/// Winding number of fn around 0 along the positively oriented boundary of
/// rect, i.e. the number of zeros inside for an entire fn. Throws
/// OnContourZero when the contour passes through (or numerically onto) a zero.
int winding_rect(const AnalyticFn& fn, const ComplexRect& rect, const WindingOptions& opts = {});

/// Same count for an exponential polynomial, evaluated in scaled form with
/// the initial sampling density derived from its rate spread.
int winding_rect(const ExpPoly& fn, const ComplexRect& rect, const WindingOptions& opts = {});

/// Winding of an exponential polynomial with the contour-contact policy: on
/// OnContourZero the rectangle is dilated by 1e-7 (1 + |coordinate|) with
/// jitter, up to 8 times.
int winding_rect_dilated(const ExpPoly& fn, const ComplexRect& rect);

/// Winding along the counter-clockwise circle |z - center| = radius.
int winding_circle(const AnalyticFn& fn, cplx center, double radius, const WindingOptions& opts = {});

/// Zeros of P inside the unit circle by the argument principle.
int count_in_disk(const PolyReal& p);

/// Roots of g(lambda) = c in [re_min, re_max] x [a pi, b pi] for the
/// equal-gain variant. a, b nonzero integers with a < b. A NaN re_max
/// selects the automatic right bound (dominance bound + 0.5). No contact
/// recovery here: a zero on the contour throws OnContourZero.
int count_in_strip(const DelaySystem& sys, int a, int b,
                   double re_max = std::numeric_limits<double>::quiet_NaN(), double re_min = 0.0);

struct RootEntry {
  cplx lambda;
  double residual = 0.0;
  int multiplicity = 1;
};

struct RootList {
  std::vector<RootEntry> roots;
};

/// Declared residual for refined roots (scaled characteristic value).
inline constexpr double kRefinedResidual = 1e-10;

/// Locates every zero of fn in rect: bisection into sub-rectangles of
/// winding <= 1, then Newton. A winding-2 cluster that cannot be split is a
/// double root; winding > 2 throws MultiplicityExceeded. Contour contact on
/// the outer rectangle is handled by dilating it (up to 8 jittered retries).
RootList isolate_and_refine(const ExpPoly& fn, const ComplexRect& rect);
RootList isolate_and_refine(const DelaySystem& sys, const ComplexRect& rect);

/// Dominance bound + 0.5: no characteristic root has Re lambda beyond it.
/// Returns -inf when the characteristic function has no zeros.
double re_bound(const DelaySystem& sys);

/// max Re over all characteristic roots. Needs a rational delay (the search
/// covers one period 2 pi n of Im lambda). Returns -inf when there are none.
double spectral_abscissa(const DelaySystem& sys);

/// Smallest |Im lambda| over roots with Re lambda >= 0 and |Im lambda| <= im_cap.
std::optional<double> min_unstable_imag(const DelaySystem& sys, double im_cap);

/// Roots with Re lambda >= -1e-9 and 0 <= Im lambda <= im_cap (upper half;
/// the lower half follows by conjugation).
RootList unstable_roots(const DelaySystem& sys, double im_cap);

}  // namespace wavedelay
