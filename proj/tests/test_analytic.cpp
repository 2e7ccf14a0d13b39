#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "tpdsim/analytic.hpp"
#include "tpdsim/gdm.hpp"

using namespace tpdsim;

TEST_CASE("transmission is bounded by one, saturated only when matched") {
  const MoleculeParams matched;
  CHECK(std::norm(transmission1(0.0, matched)) == doctest::Approx(1.0));
  CHECK(std::norm(transmission2(0.0, matched)) == doctest::Approx(1.0));
  const MoleculeParams lopsided{2.0, 0.5, 1.0, 1.0};
  CHECK(std::norm(transmission1(0.0, lopsided)) == doctest::Approx(0.64));
  for (double w = -8.0; w <= 8.0; w += 0.37) {
    CHECK(std::norm(transmission1(w, matched)) <= 1.0 + 1e-12);
    CHECK(std::norm(transmission1(w, lopsided)) < 1.0);
  }
}

TEST_CASE("spectral grid covers and resolves the problem scales") {
  const MoleculeParams p;
  const GaussianPulse g(0.5, 0.0);
  const SpectralGrid grid = SpectralGrid::for_problem(p, {&g});
  CHECK(grid.n % 2 == 1);
  CHECK(grid.dw > 0.0);
  // Scales here: both linewidths 2, pulse bandwidth 1/sigma = 2.
  CHECK(grid.w(grid.n - 1) >= 40.0);           // span floor: 40x fastest
  CHECK(grid.dw <= 2.0 / 40.0 + 1e-12);        // resolution: slowest / 40
  CHECK(grid.w(grid.n / 2) == 0.0);
}

TEST_CASE("single-photon absorption: spectral, closed-form, quadrature") {
  const MoleculeParams p;
  const ExponentialPulse e(0.2);
  const double closed = p_alpha_exponential(0.2, p);
  CHECK(closed == doctest::Approx(10.0 / 11.0));
  CHECK(p_alpha(e, p) == doctest::Approx(closed).epsilon(1e-5));
  const NullPulse none;
  CHECK(two_photon_quadrature(e, none, p).r_final ==
        doctest::Approx(closed).epsilon(1e-5));

  const GaussianPulse g(0.5, 0.0);
  CHECK(p_alpha(g, p) == doctest::Approx(0.655680).epsilon(1e-5));
}

TEST_CASE("detuned photon is absorbed with the frozen yield in both routes") {
  const MoleculeParams p;
  const ExponentialPulse e(0.2, 0.0, 0.5);
  const NullPulse none;
  const double quad = two_photon_quadrature(e, none, p).r_final;
  CHECK(quad == doctest::Approx(0.753425).epsilon(1e-5));
  CHECK(p_alpha(e, p) == doctest::Approx(quad).epsilon(1e-5));
}

TEST_CASE("autocorrelation at zero lag recovers the absorption probability") {
  const MoleculeParams p;
  const GaussianPulse g(0.5, 0.0);
  const SpectralGrid grid = SpectralGrid::for_problem(p, {&g});
  const LagFunction f1 = f1_spectrum(g, p, grid);
  const double pa = p_alpha(g, p);
  CHECK(std::abs(std::sqrt(2.0 * std::numbers::pi) * f1.at(0) - pa) < 1e-6);
}

TEST_CASE("spectral and time-domain first-photon correlations agree") {
  const MoleculeParams p;
  const GaussianPulse g(0.5, 1.0);
  const SpectralGrid grid = SpectralGrid::for_problem(p, {&g});
  const LagFunction f1 = f1_spectrum(g, p, grid);
  for (int k : {0, 3, 17, 60}) {
    const Complex td = f1_time_domain(g, p, k * f1.dx);
    CHECK(std::abs(f1.at(k) - td) < 1e-4);
  }
}

TEST_CASE("fft correlation matches the direct sum") {
  std::mt19937 gen(5);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  const int n = 64;
  std::vector<Complex> a(n), b(n);
  for (int i = 0; i < n; ++i) {
    a[i] = Complex(d(gen), d(gen));
    b[i] = Complex(d(gen), d(gen));
  }
  const double dw = 0.37;
  const std::vector<Complex> c = correlate_lags(a, b, dw);
  REQUIRE(c.size() == 2 * n - 1);
  for (int lag : {-(n - 1), -5, 0, 1, 13, n - 1}) {
    Complex direct = 0.0;
    for (int j = 0; j < n; ++j) {
      const int k = j - lag;
      if (k >= 0 && k < n) direct += a[j] * b[k];
    }
    direct *= dw;
    CHECK(std::abs(c[lag + n - 1] - direct) < 1e-10);
  }
}

TEST_CASE("two-photon yield: frozen references across engines") {
  const MoleculeParams p;

  SUBCASE("exponential pair, growing delay") {
    const ExponentialPulse a(0.2);
    for (auto [delay, f4] : {std::pair{10.0, 0.750502},
                             std::pair{25.0, 0.822665},
                             std::pair{50.0, 0.826421}}) {
      const ExponentialPulse b(0.2, delay);
      CHECK(two_photon_quadrature(a, b, p).f4_final ==
            doctest::Approx(f4).epsilon(3e-6));
    }
  }
  SUBCASE("gaussian pair, late and early second pulse") {
    const GaussianPulse a(0.5, 0.0);
    CHECK(two_photon_quadrature(a, GaussianPulse(0.5, 3.0), p).f4_final ==
          doctest::Approx(0.419691).epsilon(3e-6));
    CHECK(two_photon_quadrature(a, GaussianPulse(0.5, -0.25), p).f4_final ==
          doctest::Approx(0.031306).epsilon(3e-5));
  }
}

TEST_CASE("overlap decomposition is internally consistent") {
  const MoleculeParams p;
  const GaussianPulse a(0.5, 0.0), b(0.7, 1.0);
  const OverlapResult r = p_overlap(a, b, p);
  CHECK(r.overlap == doctest::Approx(0.5 * r.pa * r.pb + r.pab));
  CHECK(r.rho2424 == doctest::Approx(r.pa * r.pb - r.overlap));
  CHECK(r.pa == doctest::Approx(p_alpha(a, p)).epsilon(1e-10));
  CHECK(r.pb == doctest::Approx(p_beta(b, p)).epsilon(1e-10));
}

TEST_CASE("overlap term vanishes at long delay") {
  const MoleculeParams p;
  const GaussianPulse a(0.5, 0.0), b(0.5, 10.0);
  const OverlapResult r = p_overlap(a, b, p);
  CHECK(std::abs(r.overlap) < 1e-3);
}

TEST_CASE("overlap term reaches the product limit when beta comes first") {
  const MoleculeParams p;
  const GaussianPulse a(0.5, 0.0), b(0.5, -10.0);
  const OverlapResult r = p_overlap(a, b, p);
  CHECK(std::abs(r.overlap - r.pa * r.pb) < 1e-3);
  CHECK(std::abs(r.rho2424) < 1e-3);  // no detection without ordering
}

TEST_CASE("overlap-corrected yield matches the nested quadrature") {
  const MoleculeParams p;
  const GaussianPulse a(0.5, 0.0);
  for (double delay : {0.0, 1.0, 3.0}) {
    const GaussianPulse b(0.5, delay);
    const OverlapResult r = p_overlap(a, b, p);
    const double direct = two_photon_quadrature(a, b, p).f4_final;
    CHECK(std::abs(r.rho2424 - direct) < 1e-4);
  }
}

TEST_CASE("partial-shelf trajectory point equals the full-time value") {
  const MoleculeParams p;
  const GaussianPulse a(0.5, 0.0), b(0.5, 3.0);
  const double t = 4.0;
  const double r_t = rho_a2a2_quadrature(a, p, t);
  CHECK(r_t > 0.0);
  CHECK(r_t < 1.0);
  const double f4_t = rho_2424_quadrature(a, b, p, t);
  CHECK(f4_t >= 0.0);
  CHECK(f4_t < two_photon_quadrature(a, b, p).f4_final);
}
