#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "wavedelay/contour.hpp"
#include "wavedelay/error.hpp"
#include "wavedelay/polyform.hpp"
#include "wavedelay/regions.hpp"

using namespace wavedelay;
using oracle::kPi;

namespace {

bool contains(const std::vector<double>& v, double x, double tol = 1e-12) {
  return std::any_of(v.begin(), v.end(), [&](double y) { return std::abs(x - y) < tol; });
}

// Real gains c with z^{2n} + 2c z^m + 1 = 0 on |z| = 1, found by scanning
// theta: c(theta) = -cos(n theta) e^{-i (m-n) theta} must be real.
std::vector<double> scan_critical(int m, int n) {
  std::vector<double> found;
  auto cval = [&](double th) { return -std::cos(n * th) * std::exp(cplx(0, -(m - n) * th)); };
  const int steps = 200000;
  double prev_th = 0.0;
  cplx prev = cval(0.0);
  auto add = [&](double v) {
    if (std::abs(v) < 1e-10) v = 0.0;
    if (!contains(found, v, 1e-8)) found.push_back(v);
  };
  if (std::abs(prev.imag()) < 1e-14) add(prev.real());
  for (int i = 1; i <= steps; ++i) {
    const double th = 2 * kPi * i / steps;
    const cplx cur = cval(th);
    if (std::abs(cur.imag()) < 1e-14) {
      add(cur.real());
    } else if ((prev.imag() < 0) != (cur.imag() < 0) && std::abs(prev.imag()) >= 1e-14) {
      double a = prev_th, b = th;
      for (int k = 0; k < 80; ++k) {
        const double mid = 0.5 * (a + b);
        ((cval(mid).imag() < 0) == (cval(a).imag() < 0) ? a : b) = mid;
      }
      add(cval(0.5 * (a + b)).real());
    }
    prev = cur;
    prev_th = th;
  }
  std::sort(found.begin(), found.end());
  return found;
}

int disk_count(double c, int m, int n) {
  return count_in_disk(reduce_to_polynomial(DelaySystem::equal_gains(c, Rational::make(m, n))));
}

}  // namespace

TEST_CASE("critical set examples") {
  const auto e21 = critical_set_E(2, 1).values;
  CHECK(e21 == std::vector<double>{-1.0, 0.0});
  CHECK(e21.front() == doctest::Approx(-std::sin(kPi / 2)));
  const auto e41 = critical_set_E(4, 1).values;
  CHECK(contains(e41, 0.5));
  CHECK(contains(e41, std::sin(kPi / 6)));
  // -0.5 would need z^2 + z^4 ... = 0 on the circle with c = -1/2; it is not critical
  CHECK_FALSE(contains(e41, -0.5));
  CHECK(critical_set_E(4, 1).source == CriticalSource::Emn);
  CHECK_THROWS_AS(critical_set_E(1, 1), Error);
  CHECK_THROWS_AS(critical_set_E(4, 2), Error);
}

TEST_CASE("every critical value puts a root on the circle") {
  for (auto [m, n] : std::vector<std::pair<int, int>>{{2, 1}, {3, 1}, {4, 1}, {3, 2}, {5, 2}, {7, 3}, {1, 2}}) {
    for (double v : critical_set_E(m, n).values) {
      const PolyReal p = reduce_to_polynomial(DelaySystem::equal_gains(v, Rational::make(m, n)));
      auto mod = [&](double th) { return std::abs(p.eval(std::polar(1.0, th))); };
      // coarse theta grid, then golden-section refinement around the best cell
      const int grid = 4096;
      const double h = 2 * kPi / grid;
      double best = 1e300;
      for (int i = 0; i < grid; ++i) {
        if (mod(i * h) > mod((i - 1) * h) || mod(i * h) > mod((i + 1) * h)) continue;
        double a = (i - 1) * h, b = (i + 1) * h;
        const double g = (std::sqrt(5.0) - 1) / 2;
        for (int k = 0; k < 200; ++k) {
          const double x1 = b - g * (b - a), x2 = a + g * (b - a);
          (mod(x1) < mod(x2) ? b : a) = (mod(x1) < mod(x2) ? x2 : x1);
        }
        best = std::min(best, mod(0.5 * (a + b)));
      }
      INFO("m=" << m << " n=" << n << " v=" << v);
      CHECK(best < 1e-6);
    }
  }
}

TEST_CASE("critical set is complete against a theta scan") {
  for (auto [m, n] : std::vector<std::pair<int, int>>{{2, 1}, {3, 1}, {4, 1}, {3, 2}, {5, 2}, {5, 3}, {1, 3}}) {
    const auto e = critical_set_E(m, n).values;
    const auto s = scan_critical(m, n);
    INFO("m=" << m << " n=" << n);
    REQUIRE(e.size() == s.size());
    for (std::size_t i = 0; i < e.size(); ++i) CHECK(e[i] == doctest::Approx(s[i]).epsilon(1e-8));
  }
}

TEST_CASE("disk count is constant between critical values and grows with |c|") {
  for (auto [m, n] : std::vector<std::pair<int, int>>{{2, 1}, {3, 1}, {4, 1}, {3, 2}, {5, 2}, {6, 1}}) {
    const auto e = critical_set_E(m, n).values;
    std::vector<double> pts{-2.0};
    pts.insert(pts.end(), e.begin(), e.end());
    pts.push_back(2.0);
    std::vector<std::pair<double, int>> mids;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      const double a = pts[i], b = pts[i + 1];
      const int mid = disk_count(0.5 * (a + b), m, n);
      CHECK(disk_count(a + 1e-4 * (b - a), m, n) == mid);
      CHECK(disk_count(b - 1e-4 * (b - a), m, n) == mid);
      mids.push_back({0.5 * (a + b), mid});
    }
    // non-decreasing in |c| on each side of zero
    for (std::size_t i = 0; i + 1 < mids.size(); ++i) {
      if (mids[i].first >= 0) CHECK(mids[i + 1].second >= mids[i].second);
      if (mids[i + 1].first <= 0) CHECK(mids[i].second >= mids[i + 1].second);
    }
    CHECK(disk_count(1.5, m, n) == m);
  }
}

TEST_CASE("nearest boundary") {
  CHECK(std::abs(nearest_boundary(2)) == doctest::Approx(1.0));
  CHECK(std::abs(nearest_boundary(4)) == doctest::Approx(0.5));
  CHECK(std::abs(nearest_boundary(6)) == doctest::Approx(0.309017).epsilon(1e-6));
  CHECK(nearest_boundary(2) < 0);
  CHECK(nearest_boundary(4) > 0);
  CHECK(nearest_boundary(6) < 0);
  CHECK_THROWS_AS(nearest_boundary(3), Error);
  // it is the critical value closest to zero on its side
  for (int m : {2, 4, 6, 8}) {
    const auto e = critical_set_E(m, 1).values;
    const double nb = nearest_boundary(m);
    for (double v : e) {
      if (v != 0.0 && (v > 0) == (nb > 0)) CHECK(std::abs(v) >= std::abs(nb) - 1e-12);
    }
  }
}

TEST_CASE("branch sign formula") {
  CHECK(branch_sign_r(0.5, 4, 1) == -1);
  CHECK(branch_sign_r(-0.5, 4, 1) == 1);
  CHECK(branch_sign_r(0.5, 1, 2) == 1);
  CHECK_THROWS_AS(branch_sign_r(0.0, 4, 1), Error);
  const auto cont = continuation_sign_r(0.5, 4, 1);
  REQUIRE(cont.has_value());
  CHECK(*cont == branch_sign_r(0.5, 4, 1));
}

TEST_CASE("branch sign formula agrees with continuation on random critical points") {
  std::mt19937_64 rng(17);
  int checked = 0;
  for (int t = 0; checked < 50 && t < 2000; ++t) {
    const int m = 1 + static_cast<int>(rng() % 9), n = 1 + static_cast<int>(rng() % 5);
    if (std::gcd(m, n) != 1 || m == n) continue;
    const auto e = critical_set_E(m, n).values;
    const double c = e[rng() % e.size()];
    if (c == 0.0) continue;
    const auto cont = continuation_sign_r(c, m, n);
    if (!cont) continue;
    INFO("m=" << m << " n=" << n << " c=" << c);
    CHECK(*cont == branch_sign_r(c, m, n));
    ++checked;
  }
  CHECK(checked == 50);
}

TEST_CASE("branch signs at zero") {
  CHECK(branch_sign_at_zero(0, 4, 1) == 1);
  CHECK(branch_sign_at_zero(1, 4, 1) == 1);
  CHECK(branch_sign_at_zero(0, 3, 1) == 0);
  CHECK(branch_sign_at_zero(1, 3, 1) == 0);
  std::vector<int> s;
  for (int k = 0; k < 4; ++k) s.push_back(branch_sign_at_zero(k, 3, 2));
  CHECK(std::count(s.begin(), s.end(), 1) > 0);
  CHECK(std::count(s.begin(), s.end(), -1) > 0);
  CHECK_THROWS_AS(branch_sign_at_zero(2, 4, 1), Error);
}

TEST_CASE("zero-gain branch signs match continuation") {
  for (auto [m, n] : std::vector<std::pair<int, int>>{{4, 1}, {2, 1}, {3, 2}, {5, 2}, {1, 2}, {7, 4}, {5, 3}}) {
    for (int k = 0; k < 2 * n; ++k) {
      const int s = branch_sign_at_zero(k, m, n);
      if (s == 0) continue;
      const double up = track_zero_branch_modulus(k, m, n, 1e-5);
      CHECK((up > 1.0 ? 1 : -1) == s);
    }
  }
  // first derivative vanishes; second order pulls both sides inside the disk
  for (int m : {3, 5}) {
    CHECK(track_zero_branch_modulus(0, m, 1, 1e-4) < 1.0);
    CHECK(track_zero_branch_modulus(0, m, 1, -1e-4) < 1.0);
  }
}

TEST_CASE("strip branch signs") {
  CHECK(branch_sign_strip(0.6, 2.0) == 1);
  CHECK(branch_sign_strip(-0.6, 2.0) == -1);
  CHECK(branch_sign_strip(0.6, 0.5) == -1);
  // +-0.6 is not an axis crossing at tau = 2, so there is nothing to continue
  CHECK_FALSE(continuation_sign_strip(0.6, 2.0).has_value());
  for (auto [c, tau] : std::vector<std::pair<double, double>>{{-1.0, 2.0}, {1.0, 3.0}, {-1.0, 0.5}, {1.0, 0.5}}) {
    const auto cont = continuation_sign_strip(c, tau);
    REQUIRE(cont.has_value());
    CHECK(*cont == branch_sign_strip(c, tau));
  }
  const auto cab = critical_set_strip(2.0, -2, 2);
  CHECK(cab.source == CriticalSource::CabNumeric);
  CHECK(contains(cab.values, -1.0));
  CHECK(contains(cab.values, 0.0));
}

TEST_CASE("positive and negative cosines") {
  const auto [j, l] = find_pos_neg_cos(2.5, 10);
  CHECK(j == 1);
  CHECK(l == 0);
  CHECK(std::cos(2.5 * (j + 0.5) * kPi) > 0);
  const auto [j2, l2] = find_pos_neg_cos(4.2, 10);
  CHECK(std::cos(4.2 * (j2 + 0.5) * kPi) > 0);
  CHECK(std::cos(4.2 * (l2 + 0.5) * kPi) < 0);
  // cos((2j+1) pi) = -1 for every j
  try {
    find_pos_neg_cos(2.0, 50);
    FAIL("expected SearchExhausted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SearchExhausted);
  }
}

TEST_CASE("closed-form regions") {
  auto r = stability_region(2.0, CharKind::CascadeEqualGains);
  CHECK_FALSE(r.empty);
  CHECK(r.lower == doctest::Approx(-1.0));
  CHECK(r.upper == 0.0);
  r = stability_region(4.0, CharKind::CascadeEqualGains);
  CHECK(r.lower == 0.0);
  CHECK(r.upper == doctest::Approx(0.5));
  r = stability_region(4.0, CharKind::DirectDelayFeedback);
  CHECK(r.upper == doctest::Approx(0.414214).epsilon(1e-6));
  CHECK(stability_region(6.0, CharKind::CascadeEqualGains).lower == doctest::Approx(-std::sin(kPi / 10)));
  for (double tau : {0.5, 1.0, 1.5, 3.0, 5.0, std::sqrt(2.0)}) CHECK(stability_region(tau, CharKind::CascadeEqualGains).empty);
}

TEST_CASE("two-delay criterion") {
  CHECK_FALSE(hale_two_delay(-1.0, 0.1, -0.2));
  CHECK(hale_two_delay(0.0, 0.3, 0.2));
  CHECK_FALSE(hale_two_delay(0.5, 1.0, 1.0));
}

TEST_CASE("classifier examples") {
  CHECK(classify(DelaySystem::equal_gains(-0.25, Rational::make(2, 1))).state == Stability::Stable);
  const auto v = classify(DelaySystem::equal_gains(0.7, Rational::make(1, 1)));
  CHECK(v.state != Stability::Stable);
  REQUIRE(v.witness.has_value());
  CHECK(v.witness->real() >= -1e-9);
  for (double c = -2.0; c <= 2.0; c += 0.25) {
    CHECK(classify(DelaySystem::equal_gains(c, Rational::make(3, 1))).state != Stability::Stable);
  }
}

TEST_CASE("classifier witnesses are roots in the closed right half-plane") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int t = 0; t < 40; ++t) {
    const auto sys = DelaySystem::cascade(u(rng), u(rng), Rational::make(1 + t % 7, 1 + t % 3));
    const auto v = classify(sys);
    if (v.state == Stability::Stable) {
      CHECK_FALSE(v.witness.has_value());
      continue;
    }
    REQUIRE(v.witness.has_value());
    CHECK(std::abs(eval_char_scaled(sys, *v.witness).value) < 1e-9);
    CHECK(v.witness->real() >= -1e-7);
  }
}

TEST_CASE("classifier agrees with the closed-form regions") {
  for (int tau : {2, 4, 6, 8}) {
    for (auto kind : {CharKind::CascadeEqualGains, CharKind::DirectDelayFeedback}) {
      const RegionSpec r = stability_region(tau, kind);
      const double w = r.upper - r.lower, mid = 0.5 * (r.lower + r.upper);
      for (int i = 0; i < 100; ++i) {
        const double c = mid - w + 2 * w * (i + 0.5) / 100;
        const auto st = classify(make_system(kind, c, Rational::make(tau, 1))).state;
        INFO("tau=" << tau << " c=" << c);
        CHECK((st == Stability::Stable) == r.contains(c));
      }
      CHECK(classify(make_system(kind, r.lower, Rational::make(tau, 1))).state == Stability::Marginal);
      CHECK(classify(make_system(kind, r.upper, Rational::make(tau, 1))).state == Stability::Marginal);
    }
  }
}

TEST_CASE("no stability away from even delays") {
  for (auto tau : {Rational::make(1, 2), Rational::make(1, 1), Rational::make(3, 2), Rational::make(3, 1),
                   Rational::make(5, 1)}) {
    for (int i = 0; i <= 600; i += 3) {
      CHECK(classify(DelaySystem::equal_gains(-3.0 + 0.01 * i, tau)).state != Stability::Stable);
    }
  }
}

TEST_CASE("irrational route") {
  ClassifyOptions o;
  o.treat_as_irrational = true;
  const auto sys = DelaySystem::equal_gains(-0.3, std::sqrt(2.0));
  const auto v = classify(sys, o);
  CHECK(v.state == Stability::Unstable);
  REQUIRE(v.witness.has_value());
  CHECK(v.witness->real() >= -1e-9);
  CHECK(std::abs(eval_char_scaled(sys, *v.witness).value) < 1e-9);
  // a float delay with no small rational form falls back to the same route
  const auto w = classify(DelaySystem::equal_gains(-0.3, std::sqrt(2.0)));
  CHECK(w.state == Stability::Unstable);
  CHECK_FALSE(w.notes.empty());
}

TEST_CASE("bisected and scanned boundaries") {
  CHECK(bisect_boundary(CharKind::CascadeEqualGains, Rational::make(2, 1), -0.5, -1.5) == doctest::Approx(-1.0).epsilon(1e-6));
  const auto rs = scan_region(CharKind::CascadeEqualGains, Rational::make(4, 1), -1, 1, 0.05);
  REQUIRE(rs.size() == 1);
  CHECK(std::abs(rs[0].lower) < 1e-6);
  CHECK(std::abs(rs[0].upper - 0.5) < 1e-6);
  CHECK(scan_region(CharKind::CascadeEqualGains, Rational::make(3, 1), -2, 2, 0.05).empty());
}
