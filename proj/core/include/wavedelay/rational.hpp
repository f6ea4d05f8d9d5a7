#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace wavedelay {

/// Reduced fraction num/den with den > 0.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  /// Normalizes sign and divides out the gcd. Throws on den == 0.
  static Rational make(std::int64_t num, std::int64_t den);

  /// Parses "M/N" or a bare integer "M".
  static Rational parse(std::string_view text);

  /// Continued-fraction recovery of x with denominator <= max_den, accepted
  /// only when |x - p/q| <= tol.
  static std::optional<Rational> from_double(double x, std::int64_t max_den, double tol = 1e-12);

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const;

  friend bool operator==(const Rational&, const Rational&) = default;
};

}  // namespace wavedelay
