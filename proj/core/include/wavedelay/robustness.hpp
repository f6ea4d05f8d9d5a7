#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wavedelay/chareq.hpp"

namespace wavedelay {

/// Equal-gain loop with perturbed delay tau = base_tau + epsilon.
/// base_tau is 0 (then c > 0) or an even integer 2l with (2l, c) stable.
struct PerturbationCase {
  double base_tau = 0.0;
  double epsilon = 0.0;
  double c = 0.0;

  double tau() const { return base_tau + epsilon; }
  /// l for base_tau = 2l; 0 for base_tau = 0.
  int l() const;
  DelaySystem system() const;
  void validate() const;
};

struct RobustnessBounds {
  double c_tilde = 0.0;  ///< 0 for base_tau = 0 (unused there)
  double C1 = 0.0;
  double C2 = 0.0;
  long s_eps = 0;
  long S_eps = 0;

  /// [C1/|eps|, S_eps pi + pi]: where the first unstable frequency must lie.
  double lower(double eps) const;
  double upper() const;
};

/// Fixed C2 for base_tau = 0; any value > pi works.
inline constexpr double kBaseZeroC2Factor = 1.1;

RobustnessBounds bounds_for(const PerturbationCase& pc);

/// True iff no root with Re >= 0 has |Im| < C1/|eps| (less a 1e-6 relative
/// margin). At eps = 0 this is plain stability of the base loop.
bool check_low_freq_clear(const PerturbationCase& pc);

struct LambdaEps {
  std::optional<double> value;  ///< absent at eps = 0
  double lower = 0.0;
  double upper = 0.0;
  bool within = false;  ///< value in [lower, upper]
  double cap = 0.0;     ///< scan height actually used
};

/// Smallest |Im lambda| over unstable roots, scanning up to 2 C2/|eps| + 2 pi
/// and doubling once. Throws NotFound (with nested counts) if none turns up.
LambdaEps find_lambda_eps(const PerturbationCase& pc);

struct Witness {
  long k_star = 0;
  long l_star = 0;  ///< k_star = n + l_star (2n - 1)
  double delta_star = 0.0;
  double beta_star = 0.0;
  double c_tilde = 0.0;
  double residual = 0.0;  ///< |h_delta(i beta) - c|
};

/// h_delta(lambda) = -(1/2) e^{delta lambda} e^{2 l lambda} (1 + e^{-2 lambda}).
cplx h_delta(int l, double delta, cplx lambda);

/// Perturbation delta in (0, eps] and frequency beta < S_eps pi with
/// h_delta(i beta) = c: the smallest admissible k with
/// delta = (2n-1)(1-c~)/(2k-1+c~), beta = k pi/(2n-1+delta), n = l.
/// Throws WindowEmpty when no k qualifies.
Witness witness_F_epsilon(int l, double eps, double c);

struct SweepRow {
  double eps = 0.0;
  std::optional<double> lambda_eps;
  std::optional<double> scaled;  ///< eps * lambda_eps
  std::optional<bool> low_freq_clear;
  std::optional<bool> within;
  std::string error;
};

/// One row per eps, in input order. Errors are captured per row.
std::vector<SweepRow> sweep(const PerturbationCase& tmpl, const std::vector<double>& eps_list);

}  // namespace wavedelay
