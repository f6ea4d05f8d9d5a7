#include "wavedelay/regions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "wavedelay/contour.hpp"
#include "wavedelay/error.hpp"
#include "wavedelay/polyform.hpp"

namespace wavedelay {

namespace {

constexpr double kPi = std::numbers::pi;

int sgn(double x) { return (x > 0.0) - (x < 0.0); }

void require_coprime(int m, int n) {
  if (m <= 0 || n <= 0 || std::gcd(m, n) != 1) {
    throw Error(ErrorCode::InvalidArgument, "m, n must be coprime positive integers");
  }
}

std::vector<double> dedupe_sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double x : v) {
    if (out.empty() || std::abs(x - out.back()) > 1e-12) out.push_back(x);
  }
  return out;
}

// P(z; c) = z^{2n} + 2c z^m + 1 and its z-derivative.
cplx p_eq(cplx z, double c, int m, int n) { return std::pow(z, 2 * n) + 2.0 * c * std::pow(z, m) + 1.0; }
cplx dp_eq(cplx z, double c, int m, int n) {
  return 2.0 * n * std::pow(z, 2 * n - 1) + 2.0 * c * m * std::pow(z, m - 1);
}

std::optional<cplx> track_disk_root(cplx z, double c0, double c1, int m, int n, int steps) {
  const double dc = (c1 - c0) / steps;
  double c = c0;
  for (int s = 0; s < steps; ++s) {
    const cplx pz = dp_eq(z, c, m, n);
    if (std::abs(pz) < 1e-10) return std::nullopt;
    z += -2.0 * std::pow(z, m) / pz * dc;
    c += dc;
    for (int it = 0; it < 3; ++it) {
      const cplx d = dp_eq(z, c, m, n);
      if (std::abs(d) < 1e-14) return std::nullopt;
      z -= p_eq(z, c, m, n) / d;
    }
  }
  return z;
}

cplx g_eval(cplx l, double tau) { return -0.5 * (std::exp(tau * l) + std::exp((tau - 2.0) * l)); }
cplx g_deriv(cplx l, double tau) { return -0.5 * (tau * std::exp(tau * l) + (tau - 2.0) * std::exp((tau - 2.0) * l)); }

std::optional<cplx> track_strip_root(cplx l, double c0, double c1, double tau, int steps) {
  const double dc = (c1 - c0) / steps;
  double c = c0;
  for (int s = 0; s < steps; ++s) {
    const cplx d = g_deriv(l, tau);
    if (std::abs(d) < 1e-10) return std::nullopt;
    l += dc / d;
    c += dc;
    for (int it = 0; it < 3; ++it) l -= (g_eval(l, tau) - c) / g_deriv(l, tau);
  }
  return l;
}

cplx polish_lambda(const ExpPoly& f, cplx z) {
  for (int it = 0; it < 60; ++it) {
    const ScaledValue sv = f.eval_scaled(z);
    if (sv.derivative == cplx(0.0, 0.0)) break;
    const cplx step = sv.value / sv.derivative;
    z -= step;
    if (std::abs(step) <= 1e-15 * (1.0 + std::abs(z))) break;
  }
  return z;
}

StabilityVerdict hale_route(const DelaySystem& sys, std::vector<std::string> notes) {
  const DelayGains g = effective_gains(sys);
  StabilityVerdict v;
  v.notes = std::move(notes);
  const bool ok = hale_two_delay(-1.0, -(g.c1 + g.c2), -(g.c1 - g.c2));
  if (ok) {
    v.state = Stability::Stable;
    return v;
  }
  v.state = Stability::Unstable;
  DelaySystem probe = sys;
  probe.tau_rational.reset();
  for (double cap : {40.0, 160.0, 640.0}) {
    const RootList roots = unstable_roots(probe, cap);
    if (!roots.roots.empty()) {
      v.witness = roots.roots.front().lambda;
      for (const auto& r : roots.roots) {
        if (r.lambda.real() > v.witness->real()) v.witness = r.lambda;
      }
      return v;
    }
  }
  v.notes.push_back("no root with Re >= 0 below |Im| = 640; instability rests on the two-delay criterion");
  return v;
}

}  // namespace

CriticalSet critical_set_E(int m, int n) {
  require_coprime(m, n);
  if (m == n) throw Error(ErrorCode::InvalidArgument, "tau = 1 has no finite critical set of this form");
  const int d = std::abs(m - n);
  std::vector<double> vals{0.0};
  for (int k = 0; k < 2 * d; ++k) {
    const double theta = k * kPi / d;
    double v = -std::cos(m * theta);
    if (std::abs(v) < 1e-15) v = 0.0;
    vals.push_back(v);
  }
  return {dedupe_sorted(std::move(vals)), CriticalSource::Emn};
}

CriticalSet critical_set_strip(double tau, int a, int b) {
  if (a >= b) throw Error(ErrorCode::InvalidArgument, "strip needs a < b");
  if (!(tau > 0.0) || tau == 1.0) throw Error(ErrorCode::InvalidArgument, "strip critical set needs tau > 0, tau != 1");
  std::vector<double> vals;
  // g(i beta) = -exp(i (tau-1) beta) cos(beta): real on (tau-1) beta = j pi, or zero where cos(beta) = 0.
  const double s = tau - 1.0;
  const double jlo = std::min(a * s, b * s), jhi = std::max(a * s, b * s);
  for (auto j = static_cast<long>(std::ceil(jlo - 1e-12)); j <= static_cast<long>(std::floor(jhi + 1e-12)); ++j) {
    vals.push_back(-std::cos(tau * j * kPi / s));
  }
  for (auto k = static_cast<long>(std::ceil(a - 0.5)); k + 0.5 <= b; ++k) {
    if (k + 0.5 >= a) {
      vals.push_back(0.0);
      break;
    }
  }
  return {dedupe_sorted(std::move(vals)), CriticalSource::CabNumeric};
}

double nearest_boundary(int m) {
  if (m < 2 || m % 2 != 0) throw Error(ErrorCode::InvalidArgument, "nearest_boundary needs even m >= 2");
  const double mag = std::sin(kPi / (2.0 * (m - 1)));
  return m % 4 == 2 ? -mag : mag;
}

int branch_sign_r(double c_star, int m, int n) {
  require_coprime(m, n);
  if (c_star == 0.0) throw Error(ErrorCode::InvalidArgument, "c* = 0: use branch_sign_at_zero");
  return sgn(static_cast<double>(n - m)) * sgn(c_star);
}

int branch_sign_at_zero(int k, int m, int n) {
  require_coprime(m, n);
  if (k < 0 || k > 2 * n - 1) throw Error(ErrorCode::InvalidArgument, "k must lie in [0, 2n-1]");
  // sign of cos(x pi / (2n)) with x = m(2k+1) reduced mod 4n, done in integers.
  const long r = (static_cast<long>(m) * (2 * k + 1)) % (4L * n);
  if (r == n || r == 3L * n) return 0;
  return (r < n || r > 3L * n) ? 1 : -1;
}

int branch_sign_strip(double c_star, double tau) {
  if (c_star == 0.0) throw Error(ErrorCode::InvalidArgument, "c* must be nonzero");
  return sgn(tau - 1.0) * sgn(c_star);
}

std::optional<int> continuation_sign_r(double c_star, int m, int n, double step) {
  require_coprime(m, n);
  const PolyReal p = reduce_to_polynomial(DelaySystem::equal_gains(c_star, Rational::make(m, n)));
  const DiskRootReport rep = disk_roots(p, 1e-7);
  std::optional<int> sign;
  for (cplx z : rep.roots) {
    if (std::abs(std::abs(z) - 1.0) > 1e-7) continue;
    const auto up = track_disk_root(z, c_star, c_star + step, m, n, 4);
    const auto dn = track_disk_root(z, c_star, c_star - step, m, n, 4);
    if (!up || !dn) continue;
    const int s = sgn(std::abs(*up) - std::abs(*dn));
    if (!sign) {
      sign = s;
    } else if (*sign != s) {
      return 0;
    }
  }
  return sign;
}

std::optional<int> continuation_sign_strip(double c_star, double tau, double step) {
  if (!(tau > 0.0) || tau == 1.0) return std::nullopt;
  const double s = std::abs(tau - 1.0);
  for (int j = 0; j <= 4000; ++j) {
    const double beta = j * kPi / s;
    if (std::abs(-std::cos(tau * beta) - c_star) > 1e-9) continue;
    const cplx l0(0.0, beta);
    const auto up = track_strip_root(l0, c_star, c_star + step, tau, 4);
    const auto dn = track_strip_root(l0, c_star, c_star - step, tau, 4);
    if (!up || !dn) continue;
    return sgn(up->real() - dn->real());
  }
  return std::nullopt;
}

double track_zero_branch_modulus(int k, int m, int n, double c) {
  require_coprime(m, n);
  const cplx z0 = std::polar(1.0, (2 * k + 1) * kPi / (2.0 * n));
  const auto z = track_disk_root(z0, 0.0, c, m, n, 64);
  if (!z) throw Error(ErrorCode::NotFound, "branch hit a double root during continuation");
  return std::abs(*z);
}

std::pair<int, int> find_pos_neg_cos(double tau, int bound) {
  if (!(tau > 1.0) || bound < 1) throw Error(ErrorCode::InvalidArgument, "need tau > 1 and bound >= 1");
  std::optional<int> pos, neg;
  for (int a = 0; a <= bound && (!pos || !neg); ++a) {
    for (int j : {a, -a}) {
      const double v = std::cos(tau * (j + 0.5) * kPi);
      if (!pos && v > 1e-12) pos = j;
      if (!neg && v < -1e-12) neg = j;
      if (a == 0) break;
    }
  }
  if (!pos || !neg) {
    throw Error(ErrorCode::SearchExhausted,
                std::string("no ") + (!pos ? "positive" : "negative") + " cosine within |j| <= " + std::to_string(bound));
  }
  return {*pos, *neg};
}

RegionSpec stability_region(double tau, CharKind kind) {
  const double t = std::round(tau);
  if (std::abs(tau - t) > 1e-12 || t < 2.0) return {};
  const auto ti = static_cast<long>(t);
  if (ti % 2 != 0) return {};
  const double w = kind == CharKind::DirectDelayFeedback ? std::tan(kPi / (2.0 * t)) : std::sin(kPi / (2.0 * (t - 1.0)));
  if (ti % 4 == 2) return {-w, 0.0, false};
  return {0.0, w, false};
}

bool hale_two_delay(double a1, double a2, double a3) {
  return 1.0 + a1 > std::abs(a2 + a3) && 1.0 - a1 > std::abs(a2 - a3);
}

StabilityVerdict classify(const DelaySystem& sys_in, const ClassifyOptions& opts) {
  sys_in.validate();
  std::vector<std::string> notes;
  if (opts.treat_as_irrational) return hale_route(sys_in, std::move(notes));

  DelaySystem sys = sys_in;
  if (!sys.tau_rational) {
    const auto r = Rational::from_double(sys.tau, opts.max_denominator);
    if (!r || r->num <= 0) {
      notes.push_back("tau has no rational form with denominator <= " + std::to_string(opts.max_denominator) +
                      "; treated as irrational");
      return hale_route(sys_in, std::move(notes));
    }
    sys.tau_rational = r;
    sys.tau = r->value();
  }
  const std::int64_t m = sys.tau_rational->num, n = sys.tau_rational->den;
  if (m + 2 * n > opts.max_poly_degree) {
    notes.push_back("polynomial degree " + std::to_string(m + 2 * n) + " too large; used the two-delay criterion");
    return hale_route(sys_in, std::move(notes));
  }

  const PolyReal p = reduce_to_polynomial(sys);
  PolyStability ps = stability_from_poly(p);
  StabilityVerdict v = std::move(ps.verdict);
  v.notes.insert(v.notes.begin(), notes.begin(), notes.end());
  if (v.witness) v.witness = polish_lambda(char_function(sys), z_to_lambda(*v.witness, n));

  if (sys.kind != CharKind::CascadeFull || sys.gains.c1 == sys.gains.c2) {
    const RegionSpec reg = stability_region(sys.tau, sys.kind == CharKind::DirectDelayFeedback
                                                         ? CharKind::DirectDelayFeedback
                                                         : CharKind::CascadeEqualGains);
    const bool closed_form = reg.contains(sys.gain());
    if (closed_form != (v.state == Stability::Stable)) {
      v.notes.push_back("polynomial verdict disagrees with the closed-form region");
    }
  }
  return v;
}

DelaySystem make_system(CharKind kind, double gain, Rational tau) {
  switch (kind) {
    case CharKind::CascadeFull: return DelaySystem::cascade(gain, gain, tau);
    case CharKind::CascadeEqualGains: return DelaySystem::equal_gains(gain, tau);
    case CharKind::DirectDelayFeedback: return DelaySystem::direct(gain, tau);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown kind");
}

double bisect_boundary(CharKind kind, Rational tau, double c_stable, double c_other, double tol) {
  auto stable = [&](double c) { return classify(make_system(kind, c, tau)).state == Stability::Stable; };
  if (!stable(c_stable)) throw Error(ErrorCode::InvalidArgument, "bisection start is not stable");
  if (stable(c_other)) throw Error(ErrorCode::InvalidArgument, "bisection end is stable");
  double a = c_stable, b = c_other;
  while (std::abs(b - a) > tol) {
    const double mid = 0.5 * (a + b);
    (stable(mid) ? a : b) = mid;
  }
  return 0.5 * (a + b);
}

std::vector<RegionSpec> scan_region(CharKind kind, Rational tau, double lo, double hi, double step, double tol) {
  if (!(step > 0.0) || !(hi > lo)) throw Error(ErrorCode::InvalidArgument, "scan needs lo < hi and step > 0");
  const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> grid;
  std::vector<bool> stable;
  for (long i = 0; i < count; ++i) {
    const double c = lo + i * step;
    grid.push_back(c);
    stable.push_back(classify(make_system(kind, c, tau)).state == Stability::Stable);
  }
  std::vector<RegionSpec> out;
  for (long i = 0; i < count;) {
    if (!stable[i]) {
      ++i;
      continue;
    }
    long j = i;
    while (j + 1 < count && stable[j + 1]) ++j;
    RegionSpec r;
    r.empty = false;
    r.lower = i > 0 ? bisect_boundary(kind, tau, grid[i], grid[i - 1], tol) : grid[i];
    r.upper = j + 1 < count ? bisect_boundary(kind, tau, grid[j], grid[j + 1], tol) : grid[j];
    out.push_back(r);
    i = j + 1;
  }
  return out;
}

}  // namespace wavedelay
