#include "wavedelay/contour.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "wavedelay/error.hpp"

namespace wavedelay {

void ComplexRect::validate() const {
  if (!(re_min < re_max) || !(im_min < im_max)) {
    throw Error(ErrorCode::InvalidArgument, "degenerate rectangle");
  }
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

cplx eval_checked(const AnalyticFn& fn, cplx z, const WindingOptions& o) {
  const cplx f = fn(z);
  if (!std::isfinite(f.real()) || !std::isfinite(f.imag())) {
    throw Error(ErrorCode::InvalidArgument, "non-finite function value on contour");
  }
  if (std::abs(f) < o.zero_tol) {
    throw Error(ErrorCode::OnContourZero,
                "zero at (" + std::to_string(z.real()) + ", " + std::to_string(z.imag()) + ")");
  }
  return f;
}

// Refinement bisects the path parameter so midpoints stay on the contour.
template <typename Path>
double refine_step(const AnalyticFn& fn, const Path& path, double ta, cplx fa, double tb, cplx fb, int depth,
                   const WindingOptions& o) {
  const double d = std::arg(fb / fa);
  bool settled = std::abs(d) < o.max_arg_step;
  if (settled && o.lipschitz > 0.0) {
    // Every point of the piece is within half its length of an end, so a
    // bound on |f'| keeps f away from 0 and the phase from wrapping.
    const double len = 0.5 * std::numbers::pi * std::abs(path(tb) - path(ta));
    settled = 0.5 * len * o.lipschitz < std::min(std::abs(fa), std::abs(fb)) / std::numbers::sqrt2;
  }
  if (settled) return d;
  if (depth >= o.max_bisections) {
    const cplx za = path(ta);
    throw Error(ErrorCode::OnContourZero, "argument jump unresolved near (" + std::to_string(za.real()) +
                                              ", " + std::to_string(za.imag()) + ")");
  }
  const double tm = 0.5 * (ta + tb);
  const cplx fm = eval_checked(fn, path(tm), o);
  return refine_step(fn, path, ta, fa, tm, fm, depth + 1, o) + refine_step(fn, path, tm, fm, tb, fb, depth + 1, o);
}

template <typename Path>
double track_path(const AnalyticFn& fn, Path path, int samples, const WindingOptions& o) {
  double total = 0.0;
  double t_prev = 0.0;
  cplx f_prev = eval_checked(fn, path(0.0), o);
  for (int i = 1; i <= samples; ++i) {
    const double t = static_cast<double>(i) / samples;
    const cplx f = eval_checked(fn, path(t), o);
    total += refine_step(fn, path, t_prev, f_prev, t, f, 0, o);
    t_prev = t;
    f_prev = f;
  }
  return total;
}

int to_winding(double total) {
  const double turns = total / kTwoPi;
  const double rounded = std::round(turns);
  if (std::abs(turns - rounded) > 1e-6) {
    throw Error(ErrorCode::OnContourZero, "argument total is not a whole number of turns");
  }
  return static_cast<int>(rounded);
}

int edge_samples(double length, const WindingOptions& o) {
  return std::max(o.min_samples_per_edge, static_cast<int>(std::ceil(length * o.samples_per_unit)));
}

WindingOptions for_exppoly(const ExpPoly& fn, WindingOptions o) {
  o.samples_per_unit = std::max(o.samples_per_unit, 2.0 * (fn.max_rate() - fn.min_rate()));
  return o;
}

AnalyticFn scaled_view(const ExpPoly& fn) {
  return [&fn](cplx z) { return fn.eval_scaled(z).value; };
}

}  // namespace

int winding_rect(const AnalyticFn& fn, const ComplexRect& r, const WindingOptions& o) {
  r.validate();
  const cplx c00(r.re_min, r.im_min), c10(r.re_max, r.im_min), c11(r.re_max, r.im_max), c01(r.re_min, r.im_max);
  const std::array<std::pair<cplx, cplx>, 4> edges{{{c00, c10}, {c10, c11}, {c11, c01}, {c01, c00}}};
  double total = 0.0;
  for (const auto& [a, b] : edges) {
    total += track_path(fn, [a = a, b = b](double t) { return a + (b - a) * t; }, edge_samples(std::abs(b - a), o),
                        o);
  }
  return to_winding(total);
}

int winding_rect(const ExpPoly& fn, const ComplexRect& rect, const WindingOptions& opts) {
  return winding_rect(scaled_view(fn), rect, for_exppoly(fn, opts));
}

int winding_circle(const AnalyticFn& fn, cplx center, double radius, const WindingOptions& o) {
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "radius must be positive");
  const int samples = edge_samples(kTwoPi * radius, o);
  const double total = track_path(
      fn, [center, radius](double t) { return center + std::polar(radius, kTwoPi * t); }, samples, o);
  return to_winding(total);
}

int count_in_disk(const PolyReal& p) {
  if (p.degree() < 0) throw Error(ErrorCode::InvalidArgument, "zero polynomial");
  WindingOptions o;
  o.min_samples_per_edge = std::max(64, 8 * p.degree());
  // Normalize by the largest coefficient so zero_tol is relative.
  double scale = 0.0;
  for (double c : p.coeffs()) scale = std::max(scale, std::abs(c));
  const auto fn = [&p, scale](cplx z) { return p.eval(z) / scale; };
  // sup |P'| / scale on radii up to 1 + tol
  const double r = 1.0 + kOnCircleTolerance;
  for (int k = 1; k <= p.degree(); ++k) o.lipschitz += k * std::abs(p[k]) * std::pow(r, k - 1) / scale;
  // A root on the circle itself rarely lands on a sample, so compare the
  // counts just inside and just outside instead of trusting |P| alone.
  const int inner = winding_circle(fn, 0.0, 1.0 - kOnCircleTolerance, o);
  const int outer = winding_circle(fn, 0.0, 1.0 + kOnCircleTolerance, o);
  if (inner != outer) {
    throw Error(ErrorCode::OnContourZero, std::to_string(outer - inner) + " root(s) on the unit circle");
  }
  return inner;
}

int count_in_strip(const DelaySystem& sys, int a, int b, double re_max, double re_min) {
  if (a == 0 || b == 0 || a >= b) {
    throw Error(ErrorCode::InvalidArgument, "strip needs nonzero integers a < b");
  }
  const ExpPoly fn = g_minus_c(sys);
  if (std::isnan(re_max)) {
    const auto bounds = fn.real_part_bounds();
    re_max = bounds ? std::max(bounds->second + 0.5, re_min + 1.0) : re_min + 1.0;
  }
  const ComplexRect rect{re_min, re_max, a * std::numbers::pi, b * std::numbers::pi};
  return winding_rect(fn, rect);
}

namespace {

struct ContactResult {
  int winding;
  ComplexRect rect;
};

ContactResult winding_with_contact_policy(const ExpPoly& fn, ComplexRect rect) {
  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> jitter(1.0, 2.0);
  constexpr int kRetries = 8;
  for (int attempt = 0;; ++attempt) {
    try {
      return {winding_rect(fn, rect), rect};
    } catch (const Error& e) {
      if (e.code() != ErrorCode::OnContourZero || attempt == kRetries) throw;
    }
    rect.re_min -= 1e-7 * (1.0 + std::abs(rect.re_min)) * jitter(rng);
    rect.re_max += 1e-7 * (1.0 + std::abs(rect.re_max)) * jitter(rng);
    rect.im_min -= 1e-7 * (1.0 + std::abs(rect.im_min)) * jitter(rng);
    rect.im_max += 1e-7 * (1.0 + std::abs(rect.im_max)) * jitter(rng);
  }
}

std::optional<cplx> newton_in_box(const ExpPoly& fn, cplx z, const ComplexRect& box, int multiplicity) {
  const double roam = 0.25 * std::max(box.width(), box.height());
  for (int it = 0; it < 100; ++it) {
    const ScaledValue sv = fn.eval_scaled(z);
    if (sv.derivative == cplx(0.0, 0.0)) return std::nullopt;
    const cplx step = static_cast<double>(multiplicity) * sv.value / sv.derivative;
    z -= step;
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || !box.contains(z, roam)) return std::nullopt;
    if (std::abs(step) <= 4e-16 * (1.0 + std::abs(z))) break;
  }
  if (!box.contains(z, 1e-12 * (1.0 + std::abs(z)))) return std::nullopt;
  if (!(std::abs(fn.eval_scaled(z).value) < kRefinedResidual)) return std::nullopt;
  return z;
}

struct Box {
  ComplexRect rect;
  int winding;
  int depth;
};

constexpr int kMaxDepth = 60;
constexpr std::array<double, 7> kSplitFractions{0.5, 0.5137, 0.4789, 0.4123, 0.5917, 0.3271, 0.6733};

std::pair<Box, Box> split_box(const ExpPoly& fn, const Box& box) {
  const auto& r = box.rect;
  const bool vertical_cut = r.width() >= r.height();
  for (double frac : kSplitFractions) {
    ComplexRect lo = r, hi = r;
    if (vertical_cut) {
      const double x = r.re_min + frac * r.width();
      lo.re_max = x;
      hi.re_min = x;
    } else {
      const double y = r.im_min + frac * r.height();
      lo.im_max = y;
      hi.im_min = y;
    }
    try {
      const int w_lo = winding_rect(fn, lo);
      int w_hi = box.winding - w_lo;
      if (w_hi < 0 || w_lo < 0) w_hi = winding_rect(fn, hi);
      return {Box{lo, w_lo, box.depth + 1}, Box{hi, w_hi, box.depth + 1}};
    } catch (const Error& e) {
      if (e.code() != ErrorCode::OnContourZero) throw;
    }
  }
  if (box.winding > 2) {
    // |f| ~ r^w around a w-fold zero, so a high-order cluster touches every cut.
    throw Error(ErrorCode::MultiplicityExceeded,
                "unsplittable cluster of winding " + std::to_string(box.winding) +
                    " contradicts the at-most-double spectrum");
  }
  throw Error(ErrorCode::OnContourZero, "every split line of a box touches a zero");
}

// Rounding splits a double zero into two simple ones about sqrt(eps) apart.
// Pairs that close are merged when a small square around them winds twice.
void merge_split_doubles(const ExpPoly& fn, std::vector<RootEntry>& roots) {
  std::vector<RootEntry> out;
  std::vector<bool> used(roots.size(), false);
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (used[i]) continue;
    RootEntry merged = roots[i];
    for (std::size_t j = i + 1; j < roots.size(); ++j) {
      if (used[j] || roots[i].multiplicity != 1 || roots[j].multiplicity != 1) continue;
      const cplx a = roots[i].lambda, b = roots[j].lambda;
      if (std::abs(a - b) > 1e-6 * (1.0 + std::abs(a))) continue;
      const cplx mid = 0.5 * (a + b);
      const double half = 1e-5 * (1.0 + std::abs(mid));
      int w = 0;
      try {
        w = winding_rect(fn, {mid.real() - half, mid.real() + half, mid.imag() - half, mid.imag() + half});
      } catch (const Error& e) {
        if (e.code() != ErrorCode::OnContourZero) throw;
      }
      if (w != 2) continue;
      merged = {mid, std::abs(fn.eval_scaled(mid).value), 2};
      used[j] = true;
      break;
    }
    out.push_back(merged);
  }
  roots = std::move(out);
}

// A winding-w box that shrank to a cluster: accept a root of multiplicity w
// when modified Newton lands inside and a tiny square around it winds w times.
std::optional<RootEntry> try_cluster(const ExpPoly& fn, const Box& box) {
  const auto z = newton_in_box(fn, box.rect.center(), box.rect, box.winding);
  if (!z) return std::nullopt;
  const double half = 1e-7 * (1.0 + std::abs(*z));
  const ComplexRect tiny{z->real() - half, z->real() + half, z->imag() - half, z->imag() + half};
  if (!box.rect.contains({tiny.re_min, tiny.im_min}) || !box.rect.contains({tiny.re_max, tiny.im_max})) {
    return std::nullopt;
  }
  int w = 0;
  try {
    w = winding_rect(fn, tiny);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::OnContourZero) throw;
    return std::nullopt;
  }
  if (w != box.winding) return std::nullopt;
  if (w > 2) {
    throw Error(ErrorCode::MultiplicityExceeded,
                "root of multiplicity " + std::to_string(w) + " contradicts the at-most-double spectrum");
  }
  return RootEntry{*z, std::abs(fn.eval_scaled(*z).value), w};
}

}  // namespace

int winding_rect_dilated(const ExpPoly& fn, const ComplexRect& rect) {
  return winding_with_contact_policy(fn, rect).winding;
}

RootList isolate_and_refine(const ExpPoly& fn, const ComplexRect& rect) {
  rect.validate();
  RootList out;
  if (fn.terms().size() < 2) return out;
  const auto start = winding_with_contact_policy(fn, rect);
  std::vector<Box> stack{{start.rect, start.winding, 0}};
  while (!stack.empty()) {
    const Box box = stack.back();
    stack.pop_back();
    if (box.winding == 0) continue;
    if (box.winding < 0) throw Error(ErrorCode::OnContourZero, "negative winding for an entire function");
    if (box.depth > kMaxDepth) {
      throw Error(ErrorCode::MaxDepth, "bisection exceeded " + std::to_string(kMaxDepth) + " levels");
    }
    if (box.winding == 1) {
      if (auto z = newton_in_box(fn, box.rect.center(), box.rect, 1)) {
        out.roots.push_back({*z, std::abs(fn.eval_scaled(*z).value), 1});
        continue;
      }
    } else {
      const double diam = std::hypot(box.rect.width(), box.rect.height());
      if (diam < 1e-3 * (1.0 + std::abs(box.rect.center()))) {
        if (auto root = try_cluster(fn, box)) {
          out.roots.push_back(*root);
          continue;
        }
      }
    }
    auto [a, b] = split_box(fn, box);
    stack.push_back(b);
    stack.push_back(a);
  }
  merge_split_doubles(fn, out.roots);
  std::sort(out.roots.begin(), out.roots.end(), [](const RootEntry& x, const RootEntry& y) {
    return x.lambda.imag() != y.lambda.imag() ? x.lambda.imag() < y.lambda.imag() : x.lambda.real() < y.lambda.real();
  });
  return out;
}

RootList isolate_and_refine(const DelaySystem& sys, const ComplexRect& rect) {
  sys.validate();
  return isolate_and_refine(char_function(sys), rect);
}

double re_bound(const DelaySystem& sys) {
  const auto bounds = char_function(sys).real_part_bounds();
  return bounds ? bounds->second + 0.5 : -std::numeric_limits<double>::infinity();
}

double spectral_abscissa(const DelaySystem& sys) {
  sys.validate();
  if (!sys.tau_rational) throw Error(ErrorCode::InvalidArgument, "spectral abscissa search needs tau = m/n");
  const ExpPoly fn = char_function(sys);
  const auto bounds = fn.real_part_bounds();
  if (!bounds) return -std::numeric_limits<double>::infinity();
  // Im lambda -> Im lambda + 2 pi n leaves every exponential unchanged.
  const double period = kTwoPi * static_cast<double>(sys.tau_rational->den);
  const double y0 = -0.3713;
  const ComplexRect strip{bounds->first - 0.5, bounds->second + 0.5, y0, y0 + period};
  const RootList roots = isolate_and_refine(fn, strip);
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& r : roots.roots) best = std::max(best, r.lambda.real());
  return best;
}

RootList unstable_roots(const DelaySystem& sys, double im_cap) {
  sys.validate();
  if (!(im_cap > 0.0)) throw Error(ErrorCode::InvalidArgument, "im_cap must be positive");
  const ExpPoly fn = char_function(sys);
  const auto bounds = fn.real_part_bounds();
  RootList out;
  const double left = -1e-6;
  if (!bounds || bounds->second + 0.5 <= left) return out;
  const ComplexRect rect{left, bounds->second + 0.5, -1e-3, im_cap};
  for (const auto& r : isolate_and_refine(fn, rect).roots) {
    if (r.lambda.real() >= -1e-9 && r.lambda.imag() >= -1e-9 && r.lambda.imag() <= im_cap) out.roots.push_back(r);
  }
  return out;
}

std::optional<double> min_unstable_imag(const DelaySystem& sys, double im_cap) {
  std::optional<double> best;
  for (const auto& r : unstable_roots(sys, im_cap).roots) {
    const double v = std::abs(r.lambda.imag());
    if (!best || v < *best) best = v;
  }
  return best;
}

}  // namespace wavedelay
