#include "wavedelay/chareq.hpp"

#include <algorithm>
#include <cmath>

#include "wavedelay/error.hpp"

namespace wavedelay {

const char* to_string(CharKind kind) {
  switch (kind) {
    case CharKind::CascadeFull: return "cascade-full";
    case CharKind::CascadeEqualGains: return "cascade";
    case CharKind::DirectDelayFeedback: return "direct";
  }
  return "unknown";
}

DelaySystem DelaySystem::cascade(double c1, double c2, double tau) {
  return DelaySystem{{c1, c2}, tau, std::nullopt, CharKind::CascadeFull};
}
DelaySystem DelaySystem::cascade(double c1, double c2, Rational tau) {
  return DelaySystem{{c1, c2}, tau.value(), tau, CharKind::CascadeFull};
}
DelaySystem DelaySystem::equal_gains(double c, double tau) {
  return DelaySystem{{c, c}, tau, std::nullopt, CharKind::CascadeEqualGains};
}
DelaySystem DelaySystem::equal_gains(double c, Rational tau) {
  return DelaySystem{{c, c}, tau.value(), tau, CharKind::CascadeEqualGains};
}
DelaySystem DelaySystem::direct(double k, double tau) {
  return DelaySystem{{0.0, k}, tau, std::nullopt, CharKind::DirectDelayFeedback};
}
DelaySystem DelaySystem::direct(double k, Rational tau) {
  return DelaySystem{{0.0, k}, tau.value(), tau, CharKind::DirectDelayFeedback};
}

void DelaySystem::validate() const {
  if (!std::isfinite(gains.c1) || !std::isfinite(gains.c2)) {
    throw Error(ErrorCode::InvalidArgument, "gains must be finite");
  }
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw Error(ErrorCode::InvalidArgument, "tau must be >= 0");
  if (tau_rational) {
    if (tau_rational->den <= 0 || tau_rational->num <= 0) {
      throw Error(ErrorCode::InvalidArgument, "rational delay must be positive");
    }
    if (tau_rational->value() != tau) {
      throw Error(ErrorCode::InvalidArgument, "tau differs from its rational form");
    }
  }
  if (kind == CharKind::CascadeEqualGains && gains.c1 != gains.c2) {
    throw Error(ErrorCode::InvalidArgument, "equal-gain variant requires c1 == c2");
  }
  if (kind == CharKind::DirectDelayFeedback && gains.c1 != 0.0) {
    throw Error(ErrorCode::InvalidArgument, "direct delay feedback requires c1 == 0");
  }
}

DelayGains effective_gains(const DelaySystem& sys) {
  switch (sys.kind) {
    case CharKind::CascadeEqualGains: return {sys.gains.c2, sys.gains.c2};
    case CharKind::DirectDelayFeedback: return {0.0, sys.gains.c2};
    case CharKind::CascadeFull: break;
  }
  return sys.gains;
}

ExpPoly char_function(const DelaySystem& sys) {
  const double tau = sys.tau;
  if (sys.kind == CharKind::CascadeEqualGains) {
    const double c = sys.gains.c2;
    return ExpPoly({{1.0, 2.0}, {2.0 * c, 2.0 - tau}, {1.0, 0.0}});
  }
  // -cosh(l)(1 + c1 e^{-tau l}) - c2 sinh(l) e^{-tau l}, expanded.
  const auto [c1, c2] = effective_gains(sys);
  return ExpPoly({{-0.5, 1.0},
                  {-0.5, -1.0},
                  {-0.5 * (c1 + c2), 1.0 - tau},
                  {-0.5 * (c1 - c2), -1.0 - tau}});
}

cplx eval_char(const DelaySystem& sys, cplx lambda) { return char_function(sys).eval(lambda); }

ScaledValue eval_char_scaled(const DelaySystem& sys, cplx lambda) {
  return char_function(sys).eval_scaled(lambda);
}

ExpPoly g_minus_c(const DelaySystem& sys) {
  if (sys.kind != CharKind::CascadeEqualGains) {
    throw Error(ErrorCode::InvalidArgument, "g(lambda) is defined for the equal-gain variant only");
  }
  return ExpPoly({{-0.5, sys.tau}, {-0.5, sys.tau - 2.0}, {-sys.gains.c2, 0.0}});
}

cplx eval_g(const DelaySystem& sys, cplx lambda) {
  if (sys.kind != CharKind::CascadeEqualGains) {
    throw Error(ErrorCode::InvalidArgument, "g(lambda) is defined for the equal-gain variant only");
  }
  return -0.5 * (std::exp(sys.tau * lambda) + std::exp((sys.tau - 2.0) * lambda));
}

SampledTriple eigenfunction(const DelaySystem& sys, cplx lambda, int grid_n) {
  if (grid_n < 1) throw Error(ErrorCode::InvalidArgument, "grid_n must be positive");
  const auto [c1, c2] = effective_gains(sys);
  SampledTriple out;
  out.f.resize(grid_n + 1);
  out.g.resize(grid_n + 1);
  out.h.resize(grid_n + 1);

  if (lambda == cplx(0.0, 0.0)) {
    if (c1 != -1.0) throw Error(ErrorCode::NotARoot, "lambda = 0 is an eigenvalue only when c1 = -1");
    for (int i = 0; i <= grid_n; ++i) {
      out.f[i] = static_cast<double>(i) / grid_n;
      out.g[i] = 1.0;
      out.h[i] = 1.0;
    }
    return out;
  }

  // The equal-gain and direct variants are scalar multiples of the full
  // determinant, so one residual check covers all three.
  const DelaySystem full = DelaySystem::cascade(c1, c2, sys.tau);
  const double residual = std::abs(eval_char_scaled(full, lambda).value);
  if (!(residual < kRootTolerance)) {
    throw Error(ErrorCode::NotARoot, "characteristic residual " + std::to_string(residual));
  }
  const cplx damp = std::exp(-sys.tau * lambda);
  const cplx edge = lambda * std::cosh(lambda);
  for (int i = 0; i <= grid_n; ++i) {
    const double x = static_cast<double>(i) / grid_n;
    out.f[i] = damp * std::sinh(lambda * x);
    out.g[i] = lambda * out.f[i];
    out.h[i] = edge * std::exp(-sys.tau * lambda * x);
  }
  out.f[0] = 0.0;
  out.g[0] = 0.0;
  return out;
}

namespace {

// Closed-form solve of (lambda - A) X = Y on a uniform grid of n intervals.
// With r = -(lambda f1 + g1):
//   U(x) = int_0^x e^{ lambda(x-s)} r(s) ds,  V(x) = int_0^x e^{-lambda(x-s)} r(s) ds,
//   W(x) = int_0^x e^{-tau lambda(x-s)} h1(s) ds,
//   F0 = (U - V) / (2 lambda),  H0 = tau W.
// The boundary conditions give a 2x2 system for (a, b):
//   a lambda cosh(l) - b e^{-tau l}            = F1 = -(U(1)+V(1))/2 + tau W(1)
//   a c2 lambda sinh(l) + b (1 + c1 e^{-tau l}) = F2 = -c2 (U(1)-V(1))/2 - c1 tau W(1) + c2 f1(1)
SampledTriple resolvent_on_grid(double c1, double c2, double tau, cplx lambda, const StateFunctions& y,
                                int n) {
  const double dx = 1.0 / n;
  std::vector<cplx> f1(n + 1), g1(n + 1), h1(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double x = i * dx;
    f1[i] = y.f(x);
    g1[i] = y.g(x);
    h1[i] = y.h(x);
  }
  std::vector<cplx> u(n + 1), v(n + 1), w(n + 1);
  const cplx ep = std::exp(lambda * dx);
  const cplx em = std::exp(-lambda * dx);
  const cplx et = std::exp(-tau * lambda * dx);
  for (int i = 0; i < n; ++i) {
    const cplx ri = -(lambda * f1[i] + g1[i]);
    const cplx rn = -(lambda * f1[i + 1] + g1[i + 1]);
    u[i + 1] = ep * u[i] + 0.5 * dx * (ep * ri + rn);
    v[i + 1] = em * v[i] + 0.5 * dx * (em * ri + rn);
    w[i + 1] = et * w[i] + 0.5 * dx * (et * h1[i] + h1[i + 1]);
  }
  const cplx delay = std::exp(-tau * lambda);
  const cplx ch = std::cosh(lambda);
  const cplx sh = std::sinh(lambda);
  const cplx big_f1 = -0.5 * (u[n] + v[n]) + tau * w[n];
  const cplx big_f2 = -c2 * 0.5 * (u[n] - v[n]) - c1 * tau * w[n] + c2 * f1[n];
  const cplx det = lambda * ch * (1.0 + c1 * delay) + c2 * lambda * sh * delay;
  const cplx a = (big_f1 * (1.0 + c1 * delay) + big_f2 * delay) / det;
  const cplx b = (lambda * ch * big_f2 - c2 * lambda * sh * big_f1) / det;

  SampledTriple out;
  out.f.resize(n + 1);
  out.g.resize(n + 1);
  out.h.resize(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double x = i * dx;
    out.f[i] = a * std::sinh(lambda * x) + (u[i] - v[i]) / (2.0 * lambda);
    out.g[i] = lambda * out.f[i] - f1[i];
    out.h[i] = b * std::exp(-tau * lambda * x) + tau * w[i];
  }
  return out;
}

SampledTriple restrict_to(const SampledTriple& fine, int factor) {
  const std::size_t n = fine.intervals() / factor;
  SampledTriple out;
  out.f.resize(n + 1);
  out.g.resize(n + 1);
  out.h.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    out.f[i] = fine.f[i * factor];
    out.g[i] = fine.g[i * factor];
    out.h[i] = fine.h[i * factor];
  }
  return out;
}

double max_diff(const SampledTriple& a, const SampledTriple& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.f.size(); ++i) {
    d = std::max({d, std::abs(a.f[i] - b.f[i]), std::abs(a.g[i] - b.g[i]), std::abs(a.h[i] - b.h[i])});
  }
  return d;
}

}  // namespace

SampledTriple resolvent_apply(const DelaySystem& sys, cplx lambda, const StateFunctions& y, int grid_n) {
  if (grid_n < 1) throw Error(ErrorCode::InvalidArgument, "grid_n must be positive");
  if (std::abs(lambda) < 1e-8) {
    throw Error(ErrorCode::InvalidArgument, "resolvent formula is singular at lambda = 0");
  }
  const auto [c1, c2] = effective_gains(sys);
  const DelaySystem full = DelaySystem::cascade(c1, c2, sys.tau);
  if (std::abs(eval_char_scaled(full, lambda).value) < kRootTolerance) {
    throw Error(ErrorCode::NearSpectrum, "lambda is numerically a characteristic root");
  }
  constexpr double kSettle = 1e-8;
  constexpr int kMaxFactor = 64;
  SampledTriple prev = resolvent_on_grid(c1, c2, sys.tau, lambda, y, grid_n);
  for (int factor = 2; factor <= kMaxFactor; factor *= 2) {
    SampledTriple next = restrict_to(resolvent_on_grid(c1, c2, sys.tau, lambda, y, grid_n * factor), factor);
    if (max_diff(prev, next) < kSettle) return next;
    prev = std::move(next);
  }
  throw Error(ErrorCode::QuadratureTooCoarse, "trapezoid refinement did not settle below 1e-8");
}

}  // namespace wavedelay
