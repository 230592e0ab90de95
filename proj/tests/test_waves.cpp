#include <catch2/catch_amalgamated.hpp>

#include "pbl/waves.hpp"

using namespace pbl;

TEST_CASE("orthogonal polynomial recurrences") {
  CHECK(hermite(0, 1.7) == 1.0);
  CHECK(hermite(2, 1.0) == Catch::Approx(2.0));          // 4x^2 - 2
  CHECK(hermite(3, 0.5) == Catch::Approx(-5.0));         // 8x^3 - 12x
  CHECK(laguerre(0, 0.3) == 1.0);
  CHECK(laguerre(1, -2.0) == Catch::Approx(3.0));        // 1 - x
  CHECK(laguerre(2, -1.0) == Catch::Approx(3.5));        // (x^2 - 4x + 2)/2
  // L_n(-t) grows with n for t > 0 (all-positive series)
  for (int n = 0; n < 10; ++n) CHECK(laguerre(n + 1, -0.7) > laguerre(n, -0.7));
}

TEST_CASE("deformed gaussian evaluation") {
  double g = 0.25;
  DeformedGaussianState s = model1_phi(0, 0, g);
  double x1 = 1.0, x2 = -0.5;
  double expo = -0.5 * (x1 * x1 + x2 * x2) + kSqrt2 * g * (x1 + x2) + 2 * g * x1 * x2;
  CHECK(std::abs(phi_eval(s, x1, x2) - std::exp(expo) / std::sqrt(kPi)) < 1e-14);

  DeformedGaussianState e21 = model1_phi(2, 1, g);
  cplx expect = hermite(2, x1) * hermite(1, x2) * std::exp(expo) /
                (std::sqrt(kPi) * std::sqrt(8.0 * 2.0));
  CHECK(std::abs(phi_eval(e21, x1, x2) - expect) < 1e-14);

  // the psi twin flips the sign of every gamma-dependent piece
  DeformedGaussianState t = model1_psi(0, 0, g);
  CHECK(t.Q(0, 1) == Catch::Approx(2 * g));
  CHECK(t.l(0) == Catch::Approx(-kSqrt2 * g));
}

TEST_CASE("normalizability boundary is exact") {
  CHECK(model1_phi(0, 0, 0.5 - 1e-6).normalizable());
  CHECK_FALSE(model1_phi(0, 0, 0.5 + 1e-6).normalizable());
  CHECK_FALSE(model1_phi(0, 0, -0.5 - 1e-6).normalizable());
  CHECK(model1_phi(0, 0, -0.5 + 1e-6).normalizable());

  DeformedGaussianState bad = model1_phi(0, 0, 0.6);
  CHECK_THROWS_AS(inner2d(bad, bad), NonIntegrableError);
}

TEST_CASE("pairing normalization") {
  for (double g : {0.1, 0.25, 0.4, -0.3}) {
    cplx pairing = inner2d(model1_phi(0, 0, g), model1_psi(0, 0, g));
    CHECK(std::abs(pairing - 1.0) < 1e-12);
  }
}

TEST_CASE("quadrature is order-independent beyond exactness") {
  DeformedGaussianState a = model1_phi(3, 2, 0.2);
  DeformedGaussianState b = model1_phi(2, 2, 0.2);
  cplx lo = inner2d(a, b, 20);
  cplx hi = inner2d(a, b, 45);
  CHECK(std::abs(lo - hi) < 1e-12 * std::abs(hi));
}

TEST_CASE("biorthogonality holds in real space") {
  double g = 0.2;
  for (int t1 = 0; t1 <= 3; ++t1)
    for (int n1 = 0; n1 <= t1; ++n1)
      for (int t2 = 0; t2 <= 3; ++t2)
        for (int m1 = 0; m1 <= t2; ++m1) {
          cplx v = inner2d(model1_phi(n1, t1 - n1, g), model1_psi(m1, t2 - m1, g));
          double expect = (t1 == t2 && n1 == m1) ? 1.0 : 0.0;
          CHECK(std::abs(v - expect) < 1e-10);
        }
}

TEST_CASE("squared norms diverge above the printed bound") {
  std::vector<int> ns;
  for (int n = 0; n <= 15; ++n) ns.push_back(n);

  for (double g : {0.1, 0.25, 0.4}) {
    auto est = norm_growth(g, ns);
    REQUIRE(est.size() == ns.size());
    // closed-form check at n = 0: I_0 = pi e^{4g^2/(1-2g)} / sqrt(1-4g^2)
    double i0 = kPi * std::exp(4 * g * g / (1 - 2 * g)) / std::sqrt(1 - 4 * g * g);
    CHECK(est[0].value == Catch::Approx(i0).epsilon(1e-12));
    for (std::size_t k = 0; k < est.size(); ++k) {
      CHECK(est[k].value >= est[k].lower_bound * (1.0 - 1e-12));
      if (k > 0) CHECK(est[k].value > est[k - 1].value);
    }
  }

  // the n = 0 bound at gamma = 0.25 is pi e^{1/2}
  auto e25 = norm_growth(0.25, {0});
  CHECK(e25[0].lower_bound == Catch::Approx(kPi * std::exp(0.5)));
  CHECK(e25[0].shift == Catch::Approx(kSqrt2 * 0.25 / 0.5));

  CHECK_THROWS_AS(norm_growth(0.0, {0}), NonIntegrableError);
  CHECK_THROWS_AS(norm_growth(0.55, {0}), NonIntegrableError);
}
