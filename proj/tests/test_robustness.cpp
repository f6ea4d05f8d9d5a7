#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "wavedelay/contour.hpp"
#include "wavedelay/error.hpp"
#include "wavedelay/robustness.hpp"

using namespace wavedelay;
using oracle::kPi;

TEST_CASE("bounds for a perturbed even delay") {
  const RobustnessBounds b = bounds_for({2.0, 0.05, -0.3});
  const double ct = 2.0 / kPi * std::asin(0.3);
  CHECK(b.c_tilde == doctest::Approx(ct).epsilon(1e-14));
  CHECK(b.c_tilde == doctest::Approx(0.19397).epsilon(1e-4));
  // |c| = sin(c~ pi / (2 (2l - 1)))
  CHECK(std::sin(b.c_tilde * kPi / 2) == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(b.C1 == doctest::Approx((1 - ct) * kPi / 2).epsilon(1e-14));
  CHECK(b.C1 == doctest::Approx(1.2661).epsilon(1e-3));
  CHECK(b.C2 == doctest::Approx(kPi / 2));
  CHECK(b.C1 < b.C2);
  // S pi < C2/eps = 10 pi, strictly
  CHECK(b.S_eps == 9);
  CHECK(b.s_eps * kPi > b.C1 / 0.05);
  CHECK((b.s_eps - 1) * kPi <= b.C1 / 0.05);
}

TEST_CASE("bounds for a small positive delay") {
  const RobustnessBounds b = bounds_for({0.0, 0.1, 1.0});
  CHECK(b.C1 == doctest::Approx(kPi / 2));
  CHECK(b.C2 > kPi);
  CHECK(b.S_eps == 11);
  CHECK(bounds_for({0.0, 0.05, 1.0}).S_eps == 21);
  CHECK(bounds_for({2.0, 0.05, -1e-9}).C1 == doctest::Approx(kPi / 2));
}

TEST_CASE("case validation") {
  CHECK_THROWS_AS(bounds_for({2.0, 0.05, 0.3}), Error);   // wrong side for tau = 2
  CHECK_THROWS_AS(bounds_for({2.0, 0.05, -1.2}), Error);  // outside (-1, 0)
  CHECK_THROWS_AS(bounds_for({4.0, 0.05, 0.6}), Error);   // outside (0, 0.5)
  CHECK_THROWS_AS(bounds_for({0.0, 0.05, -1.0}), Error);
  CHECK_THROWS_AS(bounds_for({0.0, -0.05, 1.0}), Error);
  CHECK_THROWS_AS(bounds_for({3.0, 0.05, -0.3}), Error);
  CHECK_NOTHROW(bounds_for({4.0, 0.05, 0.3}));
}

TEST_CASE("low-frequency clearance") {
  CHECK(check_low_freq_clear({0.0, 0.01, 1.0}));
  CHECK(check_low_freq_clear({2.0, 0.05, -0.3}));
  CHECK(check_low_freq_clear({2.0, 0.0, -0.3}));
  CHECK(check_low_freq_clear({4.0, 0.02, 0.25}));
}

TEST_CASE("first unstable frequency for tau = 2.05") {
  const PerturbationCase pc{2.0, 0.05, -0.3};
  const LambdaEps le = find_lambda_eps(pc);
  REQUIRE(le.value.has_value());
  CHECK(le.within);
  CHECK(*le.value >= 25.33);
  CHECK(*le.value <= 31.42);
  const auto roots = oracle::newton_seed_scan([](cplx l) { return oracle::delta_full(-0.3, -0.3, 2.05, l); },
                                              [](cplx l) { return oracle::delta_full_deriv(-0.3, -0.3, 2.05, l); },
                                              -0.05, 0.6, 0.0, 35.0, 0.2);
  double best = 1e300;
  for (cplx r : roots) {
    if (r.real() >= -1e-9) best = std::min(best, r.imag());
  }
  CHECK(*le.value == doctest::Approx(best).epsilon(1e-9));
}

TEST_CASE("first unstable frequency for tau = eps") {
  // e^{2l} + 2 e^{(2-eps) l} + 1 vanishes at l = i pi / eps when 1/eps is an integer
  for (double eps : {0.1, 0.05, 0.02}) {
    const LambdaEps le = find_lambda_eps({0.0, eps, 1.0});
    REQUIRE(le.value.has_value());
    CHECK(le.within);
    CHECK(eps * *le.value >= kPi / 2);
    CHECK(eps * *le.value <= kPi + eps * kPi);
    CHECK(*le.value == doctest::Approx(kPi / eps).epsilon(1e-9));
    CHECK(std::abs(oracle::delta_full(1.0, 1.0, eps, cplx(0, kPi / eps))) < 1e-9);
  }
}

TEST_CASE("scaled frequency stays bounded") {
  for (double eps : {0.1, 0.05, 0.02, 0.01}) {
    const PerturbationCase pc{2.0, eps, -0.3};
    const LambdaEps le = find_lambda_eps(pc);
    REQUIRE(le.value.has_value());
    CHECK(le.within);
    CHECK(eps * *le.value >= bounds_for(pc).C1);
    CHECK(eps * *le.value <= 4.0);
  }
}

TEST_CASE("negative perturbations") {
  // the existence part is only argued for eps > 0; check the other sign directly
  const LambdaEps up = find_lambda_eps({2.0, 0.05, -0.3});
  const LambdaEps dn = find_lambda_eps({2.0, -0.05, -0.3});
  REQUIRE(dn.value.has_value());
  CHECK(dn.within);
  CHECK(check_low_freq_clear({2.0, -0.05, -0.3}));
  CHECK(std::abs(*up.value - *dn.value) > 0.1);
}

TEST_CASE("no unstable roots at eps = 0") {
  const LambdaEps le = find_lambda_eps({2.0, 0.0, -0.3});
  CHECK_FALSE(le.value.has_value());
  CHECK(le.within);
}

TEST_CASE("witness for l = 1") {
  const Witness w = witness_F_epsilon(1, 0.05, -0.3);
  CHECK(w.delta_star <= 0.05);
  CHECK(w.delta_star > 0.0);
  CHECK(w.k_star == 9);
  CHECK(w.residual < 1e-8);
  CHECK(std::abs(h_delta(1, w.delta_star, cplx(0, w.beta_star)) - (-0.3)) < 1e-8);
  const RobustnessBounds b = bounds_for({2.0, 0.05, -0.3});
  CHECK(w.beta_star < b.S_eps * kPi);
  // 2 delta k / (2n - 1 + delta) = 1 - c~
  CHECK(2 * w.delta_star * w.k_star / (1 + w.delta_star) == doctest::Approx(1 - w.c_tilde).epsilon(1e-12));
  // the perturbed system then has an axis root at i beta
  CHECK(std::abs(oracle::delta_full(-0.3, -0.3, 2 + w.delta_star, cplx(0, w.beta_star))) < 1e-8);
}

TEST_CASE("witness for l = 2") {
  const Witness w = witness_F_epsilon(2, 0.05, 0.3);
  CHECK(w.residual < 1e-8);
  CHECK(w.delta_star <= 0.05);
  CHECK((w.k_star - 2) % 3 == 0);
  CHECK(w.beta_star < bounds_for({4.0, 0.05, 0.3}).S_eps * kPi);
}

TEST_CASE("witness window empties for large eps") {
  try {
    witness_F_epsilon(1, 1.0, -0.3);
    FAIL("expected WindowEmpty");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::WindowEmpty);
  }
}

TEST_CASE("sweep keeps order and captures errors") {
  const auto rows = sweep({0.0, 0.0, 1.0}, {0.1, -0.2, 0.05});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].eps == 0.1);
  CHECK(rows[0].scaled.has_value());
  CHECK(rows[0].error.empty());
  CHECK_FALSE(rows[1].error.empty());
  CHECK(rows[2].scaled.has_value());
  CHECK(rows[2].low_freq_clear.value_or(false));
}
