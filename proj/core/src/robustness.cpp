#include "wavedelay/robustness.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "wavedelay/contour.hpp"
#include "wavedelay/error.hpp"

namespace wavedelay {

namespace {

constexpr double kPi = std::numbers::pi;

double c_tilde_for(int l, double c) { return 2.0 * (2 * l - 1) / kPi * std::asin(std::abs(c)); }

}  // namespace

int PerturbationCase::l() const { return static_cast<int>(std::lround(base_tau / 2.0)); }

void PerturbationCase::validate() const {
  if (!std::isfinite(base_tau) || !std::isfinite(epsilon) || !std::isfinite(c)) {
    throw Error(ErrorCode::InvalidArgument, "non-finite perturbation case");
  }
  if (base_tau < 0.0 || std::abs(base_tau - 2.0 * l()) > 1e-12) {
    throw Error(ErrorCode::InvalidArgument, "base delay must be 0 or an even integer");
  }
  if (!(tau() > 0.0)) throw Error(ErrorCode::InvalidArgument, "perturbed delay must be positive");
  if (l() == 0) {
    if (!(c > 0.0)) throw Error(ErrorCode::InvalidArgument, "base delay 0 needs c > 0");
    return;
  }
  const double edge = std::sin(kPi / (2.0 * (2 * l() - 1)));
  const bool sign_ok = l() % 2 == 1 ? c < 0.0 : c > 0.0;
  if (!sign_ok || !(std::abs(c) < edge)) {
    throw Error(ErrorCode::InvalidArgument, "gain is outside the stability region of the base delay");
  }
}

DelaySystem PerturbationCase::system() const {
  if (epsilon == 0.0 && l() > 0) return DelaySystem::equal_gains(c, Rational::make(2 * l(), 1));
  return DelaySystem::equal_gains(c, tau());
}

double RobustnessBounds::lower(double eps) const { return C1 / std::abs(eps); }
double RobustnessBounds::upper() const { return static_cast<double>(S_eps) * kPi + kPi; }

RobustnessBounds bounds_for(const PerturbationCase& pc) {
  pc.validate();
  RobustnessBounds b;
  const double ae = std::abs(pc.epsilon);
  if (pc.l() == 0) {
    b.C1 = kPi / 2.0;
    b.C2 = kBaseZeroC2Factor * kPi;
  } else {
    b.c_tilde = c_tilde_for(pc.l(), pc.c);
    b.C1 = (1.0 - b.c_tilde) * kPi / 2.0;
    b.C2 = kPi / 2.0;
  }
  if (ae == 0.0) return b;
  // s: smallest integer with s pi > C1/|eps|.
  b.s_eps = static_cast<long>(std::floor(b.C1 / (ae * kPi))) + 1;
  if (pc.l() == 0) {
    b.S_eps = static_cast<long>(std::floor(1.0 / ae)) + 1;
  } else {
    // S: largest integer with S pi < C2/|eps|.
    b.S_eps = static_cast<long>(std::ceil(b.C2 / (ae * kPi))) - 1;
  }
  return b;
}

bool check_low_freq_clear(const PerturbationCase& pc) {
  const RobustnessBounds b = bounds_for(pc);
  const DelaySystem sys = pc.system();
  if (pc.epsilon == 0.0) return spectral_abscissa(sys) < 0.0;
  const double height = b.C1 / std::abs(pc.epsilon);
  if (height >= 1e4) throw Error(ErrorCode::InvalidArgument, "|eps| too small for a desk-scale scan");
  const double right = re_bound(sys);
  const double left = -1e-7;
  if (right <= left) return true;
  const double h = height - 1e-6 * height;
  return winding_rect_dilated(char_function(sys), {left, right, -h, h}) == 0;
}

LambdaEps find_lambda_eps(const PerturbationCase& pc) {
  const RobustnessBounds b = bounds_for(pc);
  LambdaEps out;
  if (pc.epsilon == 0.0) {
    out.within = true;
    return out;
  }
  out.lower = b.lower(pc.epsilon);
  out.upper = b.upper();
  const DelaySystem sys = pc.system();
  double cap = 2.0 * b.C2 / std::abs(pc.epsilon) + 2.0 * kPi;
  for (int attempt = 0; attempt < 2; ++attempt, cap *= 2.0) {
    out.cap = cap;
    if (const auto v = min_unstable_imag(sys, cap)) {
      out.value = v;
      out.within = *v >= out.lower && *v <= out.upper;
      return out;
    }
  }
  std::ostringstream msg;
  msg << "no unstable root with |Im| <= " << out.cap << "; windings on [-1e-7, re_bound] x [-h, h]:";
  const double right = re_bound(sys);
  for (double h : {out.cap / 4.0, out.cap / 2.0, out.cap}) {
    msg << " h=" << h << ":";
    try {
      msg << winding_rect_dilated(char_function(sys), {-1e-7, right, -h, h});
    } catch (const Error& e) {
      msg << "error";
    }
  }
  throw Error(ErrorCode::NotFound, msg.str());
}

cplx h_delta(int l, double delta, cplx lambda) {
  return -0.5 * std::exp(delta * lambda) * std::exp(2.0 * l * lambda) * (1.0 + std::exp(-2.0 * lambda));
}

Witness witness_F_epsilon(int l, double eps, double c) {
  if (l < 1 || !(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "need l >= 1 and eps > 0");
  const PerturbationCase pc{2.0 * l, eps, c};
  const RobustnessBounds b = bounds_for(pc);
  const long n = l;
  const long d = 2 * n - 1;
  Witness w;
  w.c_tilde = b.c_tilde;
  const double beta_cap = static_cast<double>(b.S_eps) * kPi;
  // h_delta(i beta) = -e^{i (d + delta) beta} cos(beta); the construction
  // makes (d + delta) beta = k pi, which lands on c only for k = n mod d.
  for (long q = 0;; ++q) {
    const long k = n + q * d;
    const double delta = d * (1.0 - b.c_tilde) / (2.0 * k - 1.0 + b.c_tilde);
    const double beta = k * kPi / (d + delta);
    if (beta >= beta_cap) break;
    if (delta > eps) continue;
    w.k_star = k;
    w.l_star = q;
    w.delta_star = delta;
    w.beta_star = beta;
    w.residual = std::abs(h_delta(l, delta, cplx(0.0, beta)) - c);
    return w;
  }
  throw Error(ErrorCode::WindowEmpty, "no k with delta <= eps and beta < S_eps pi");
}

std::vector<SweepRow> sweep(const PerturbationCase& tmpl, const std::vector<double>& eps_list) {
  std::vector<SweepRow> rows;
  rows.reserve(eps_list.size());
  for (double eps : eps_list) {
    SweepRow row;
    row.eps = eps;
    PerturbationCase pc = tmpl;
    pc.epsilon = eps;
    try {
      const LambdaEps le = find_lambda_eps(pc);
      row.lambda_eps = le.value;
      if (le.value) row.scaled = std::abs(eps) * *le.value;
      row.within = le.within;
      row.low_freq_clear = check_low_freq_clear(pc);
    } catch (const Error& e) {
      row.error = e.what();
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace wavedelay
