#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wavedelay/chareq.hpp"
#include "wavedelay/rational.hpp"

namespace wavedelay {

/// Real initial state: z(x,0) = f, z_x(x,0) = df, z_t(x,0) = g, w(x,0) = h.
struct InitialCondition {
  std::string name;
  std::function<double(double)> f;
  std::function<double(double)> df;
  std::function<double(double)> g;
  std::function<double(double)> h;
};

/// Named initial conditions: "zero", "sine" (f = (2/pi) sin(pi x/2)),
/// "smooth" (all three components nonzero), "transport" (w only).
InitialCondition make_ic(const std::string& name);
std::vector<std::string> ic_names();

struct SimConfig {
  Rational tau = Rational::make(1, 1);
  DelayGains gains;
  int cells_per_unit = 64;  ///< K; time step 1/(n K)
  double t_final = 10.0;
  double sample_every = 1.0;
  InitialCondition ic = make_ic("smooth");
  bool record_boundary = false;

  void validate() const;
  std::int64_t wave_cells() const { return tau.den * cells_per_unit; }
  std::int64_t transport_cells() const { return tau.num * cells_per_unit; }
  double dt() const { return 1.0 / static_cast<double>(wave_cells()); }
};

/// Riemann invariants p = z_t + z_x (moving left) and q = z_t - z_x (moving
/// right) on nodes i/(nK), and w on nodes j/(mK).
struct SimState {
  std::vector<double> p;
  std::vector<double> q;
  std::vector<double> w;
  std::int64_t steps = 0;
  double t = 0.0;
};

struct EnergyTrace {
  std::vector<double> t;
  std::vector<double> energy;
  /// p(1, t) and w(1, t) after every step when record_boundary is set.
  std::vector<double> p_right;
  std::vector<double> w_right;
};

SimState init(const SimConfig& cfg);

/// One exact shift along the characteristics plus the boundary algebra
///   q(0) = -p(0), p(1) = q(1) + 2 w(1), w(0) = -c1 w(1) - c2 z_t(1).
void step(SimState& s, const SimConfig& cfg);

/// (1/2) int_0^1 (z_x^2 + z_t^2 + w^2) dx by the trapezoid rule.
double energy(const SimState& s);

struct SimResult {
  EnergyTrace trace;
  SimState final_state;
};

SimResult simulate(const SimConfig& cfg);

/// Least-squares slope of log E on [t_start, t_end]. Absent when some E
/// in the window is zero (extinction).
std::optional<double> decay_rate(const EnergyTrace& trace, double t_start, double t_end);

/// Late-time fit window [max(10, 3/|rate|), t_final].
double fit_window_start(double expected_rate);

}  // namespace wavedelay
