#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace wavedelay {

enum class Stability { Stable, Marginal, Unstable };

const char* to_string(Stability s);

/// Three-way classification. `witness` is a root in the closed right
/// half-plane (lambda-plane) or, for polynomial verdicts, in the closed unit
/// disk (z-plane); it is absent only for Stable.
struct StabilityVerdict {
  Stability state = Stability::Unstable;
  std::optional<std::complex<double>> witness;
  std::vector<std::string> notes;
};

inline const char* to_string(Stability s) {
  switch (s) {
    case Stability::Stable: return "stable";
    case Stability::Marginal: return "marginal";
    case Stability::Unstable: return "unstable";
  }
  return "unknown";
}

}  // namespace wavedelay
