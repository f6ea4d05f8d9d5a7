#include "wavedelay/pdesim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wavedelay/error.hpp"

namespace wavedelay {

namespace {

constexpr double kPi = std::numbers::pi;

double trapezoid_sq(const std::vector<double>& v) {
  const std::size_t cells = v.size() - 1;
  double s = 0.5 * (v.front() * v.front() + v.back() * v.back());
  for (std::size_t i = 1; i < cells; ++i) s += v[i] * v[i];
  return s / static_cast<double>(cells);
}

}  // namespace

InitialCondition make_ic(const std::string& name) {
  auto zero = [](double) { return 0.0; };
  if (name == "zero") return {name, zero, zero, zero, zero};
  if (name == "sine") {
    return {name, [](double x) { return 2.0 / kPi * std::sin(kPi * x / 2.0); },
            [](double x) { return std::cos(kPi * x / 2.0); }, zero, zero};
  }
  if (name == "smooth") {
    return {name, [](double x) { return std::sin(kPi * x / 2.0); },
            [](double x) { return kPi / 2.0 * std::cos(kPi * x / 2.0); },
            [](double x) { return 0.5 * std::sin(kPi * x); },
            [](double x) { return 0.3 * std::cos(kPi * x) + 0.2; }};
  }
  if (name == "transport") {
    return {name, zero, zero, zero, [](double x) { return std::sin(2.0 * kPi * x) + 0.5 * x; }};
  }
  throw Error(ErrorCode::InvalidArgument, "unknown initial condition '" + name + "'");
}

std::vector<std::string> ic_names() { return {"zero", "sine", "smooth", "transport"}; }

void SimConfig::validate() const {
  if (tau.num <= 0 || tau.den <= 0) throw Error(ErrorCode::InvalidArgument, "delay must be a positive rational");
  if (cells_per_unit < 1) throw Error(ErrorCode::InvalidArgument, "K must be positive");
  if (!(t_final >= 0.0) || !std::isfinite(t_final)) throw Error(ErrorCode::InvalidArgument, "t_final must be >= 0");
  if (!(sample_every > 0.0)) throw Error(ErrorCode::InvalidArgument, "sampling interval must be positive");
  if (!std::isfinite(gains.c1) || !std::isfinite(gains.c2)) throw Error(ErrorCode::InvalidArgument, "gains must be finite");
  if (!ic.f || !ic.df || !ic.g || !ic.h) throw Error(ErrorCode::InvalidArgument, "incomplete initial condition");
  if (wave_cells() > 50'000'000 || transport_cells() > 50'000'000) {
    throw Error(ErrorCode::InvalidArgument, "grid too large");
  }
}

SimState init(const SimConfig& cfg) {
  cfg.validate();
  if (std::abs(cfg.ic.f(0.0)) > 1e-12) throw Error(ErrorCode::InvalidArgument, "initial condition needs f(0) = 0");
  const auto nw = cfg.wave_cells();
  const auto nt = cfg.transport_cells();
  SimState s;
  s.p.resize(static_cast<std::size_t>(nw) + 1);
  s.q.resize(s.p.size());
  s.w.resize(static_cast<std::size_t>(nt) + 1);
  for (std::int64_t i = 0; i <= nw; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(nw);
    const double g = cfg.ic.g(x), dz = cfg.ic.df(x);
    s.p[static_cast<std::size_t>(i)] = g + dz;
    s.q[static_cast<std::size_t>(i)] = g - dz;
  }
  for (std::int64_t j = 0; j <= nt; ++j) {
    s.w[static_cast<std::size_t>(j)] = cfg.ic.h(static_cast<double>(j) / static_cast<double>(nt));
  }
  return s;
}

void step(SimState& s, const SimConfig& cfg) {
  const std::size_t nw = s.p.size() - 1, nt = s.w.size() - 1;
  const double q_in_right = s.q[nw - 1];
  const double w_right = s.w[nt - 1];
  const double p_right = q_in_right + 2.0 * w_right;
  // z_t(1) = (p + q) / 2 = q + w at the right end.
  const double w_left = -cfg.gains.c1 * w_right - cfg.gains.c2 * (q_in_right + w_right);

  for (std::size_t i = nw; i > 0; --i) s.q[i] = s.q[i - 1];
  for (std::size_t i = 0; i < nw; ++i) s.p[i] = s.p[i + 1];
  for (std::size_t j = nt; j > 0; --j) s.w[j] = s.w[j - 1];
  s.p[nw] = p_right;
  s.q[0] = -s.p[0];
  s.w[0] = w_left;

  ++s.steps;
  s.t = static_cast<double>(s.steps) / static_cast<double>(nw);
}

double energy(const SimState& s) {
  return 0.5 * (0.5 * (trapezoid_sq(s.p) + trapezoid_sq(s.q)) + trapezoid_sq(s.w));
}

SimResult simulate(const SimConfig& cfg) {
  SimResult r;
  r.final_state = init(cfg);
  SimState& s = r.final_state;
  const auto per_unit = static_cast<double>(cfg.wave_cells());
  const auto total = static_cast<std::int64_t>(std::llround(cfg.t_final * per_unit));
  const double sample_steps = cfg.sample_every * per_unit;
  r.trace.t.push_back(0.0);
  r.trace.energy.push_back(energy(s));
  std::int64_t next_sample = 1;
  for (std::int64_t k = 1; k <= total; ++k) {
    step(s, cfg);
    if (cfg.record_boundary) {
      r.trace.p_right.push_back(s.p.back());
      r.trace.w_right.push_back(s.w.back());
    }
    if (k == std::llround(next_sample * sample_steps)) {
      r.trace.t.push_back(s.t);
      r.trace.energy.push_back(energy(s));
      ++next_sample;
    }
  }
  return r;
}

std::optional<double> decay_rate(const EnergyTrace& trace, double t_start, double t_end) {
  double st = 0, sy = 0, stt = 0, sty = 0;
  int count = 0;
  for (std::size_t i = 0; i < trace.t.size(); ++i) {
    const double t = trace.t[i];
    if (t < t_start - 1e-9 || t > t_end + 1e-9) continue;
    if (!(trace.energy[i] > 0.0)) return std::nullopt;
    const double y = std::log(trace.energy[i]);
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
    ++count;
  }
  if (count < 2) throw Error(ErrorCode::InvalidArgument, "fit window holds fewer than two samples");
  const double denom = count * stt - st * st;
  return (count * sty - st * sy) / denom;
}

double fit_window_start(double expected_rate) {
  if (expected_rate == 0.0 || !std::isfinite(expected_rate)) return 10.0;
  return std::max(10.0, 3.0 / std::abs(expected_rate));
}

}  // namespace wavedelay
