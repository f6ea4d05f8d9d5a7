#include <cmath>
#include <cstdio>

#include <wavedelay/contour.hpp>

int main() {
  using namespace wavedelay;
  const double s = spectral_abscissa(DelaySystem::equal_gains(-0.25, Rational::make(2, 1)));
  const bool ok = std::abs(s - 0.5 * std::log(0.5)) < 1e-9;
  std::printf("%s %.12g\n", ok ? "ok" : "bad", s);
  return ok ? 0 : 1;
}
