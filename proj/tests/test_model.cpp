#include <random>

#include "doctest.h"
#include "tpdsim/model.hpp"

using namespace tpdsim;

namespace {

Mat5 random_hermitian(unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Mat5 a;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) a(i, j) = Complex(d(gen), d(gen));
  return Mat5(0.5 * (a + a.adjoint()));
}

}  // namespace

TEST_CASE("parameter validation accepts positive rates") {
  MoleculeParams p;
  CHECK_NOTHROW(p.validate());
  p = {0.5, 2.0, 0.1, 3.0};
  CHECK_NOTHROW(p.validate());
  CHECK(p.max_rate() == doctest::Approx(3.0));
  CHECK(p.total_width_1() == doctest::Approx(2.5));
  CHECK(p.total_width_2() == doctest::Approx(3.1));
}

TEST_CASE("parameter validation rejects bad rates") {
  MoleculeParams p;
  p.gamma2 = 0.0;
  CHECK_THROWS_WITH_AS(p.validate(), "invalid rate", std::invalid_argument);
  p.gamma2 = -1.0;
  CHECK_THROWS_WITH_AS(p.validate(), "invalid rate", std::invalid_argument);
  p.gamma2 = 1.0;
  p.gamma3 = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_WITH_AS(p.validate(), "non-finite parameter",
                       std::invalid_argument);
  p.gamma3 = std::numeric_limits<double>::infinity();
  CHECK_THROWS_WITH_AS(p.validate(), "non-finite parameter",
                       std::invalid_argument);
}

TEST_CASE("transition operators compose along the cascade") {
  const Mat5 up01 = transition_operator(F0, F1);   // |F1><F0|
  const Mat5 down12 = transition_operator(F1, F2); // |F2><F1|
  CHECK(up01(F1, F0) == Complex(1.0, 0.0));
  CHECK(up01.cwiseAbs().sum() == doctest::Approx(1.0));
  const Mat5 two_step = down12 * up01;             // |F2><F0|
  CHECK(two_step(F2, F0) == Complex(1.0, 0.0));
  CHECK(two_step.cwiseAbs().sum() == doctest::Approx(1.0));
}

TEST_CASE("collapse operators carry the square-root rates") {
  const MoleculeParams p{0.25, 4.0, 9.0, 16.0};
  const CollapseOperators c = collapse_operators(p);
  CHECK(c.decay10(F0, F1).real() == doctest::Approx(0.5));
  CHECK(c.decay12(F2, F1).real() == doctest::Approx(2.0));
  CHECK(c.decay32(F2, F3).real() == doctest::Approx(3.0));
  CHECK(c.decay34(F4, F3).real() == doctest::Approx(4.0));
}

TEST_CASE("dissipator moves population down one decay channel") {
  const MoleculeParams p;
  const Mat5 x = collapse_operators(p).decay12;  // |F2><F1|
  Mat5 rho = Mat5::Zero();
  rho(F1, F1) = 1.0;
  const Mat5 d = lindblad_dissipator(x, rho);
  CHECK(d(F1, F1).real() == doctest::Approx(-1.0));
  CHECK(d(F2, F2).real() == doctest::Approx(1.0));
  CHECK(std::abs(d.trace()) < 1e-14);
}

TEST_CASE("molecular dissipator equals the sum of the four channels") {
  const MoleculeParams p{0.7, 1.3, 2.1, 0.4};
  const CollapseOperators c = collapse_operators(p);
  const Mat5 rho = random_hermitian(42);
  const Mat5 expected = lindblad_dissipator(c.decay10, rho) +
                        lindblad_dissipator(c.decay12, rho) +
                        lindblad_dissipator(c.decay32, rho) +
                        lindblad_dissipator(c.decay34, rho);
  const Mat5 got = molecular_dissipator(rho, p);
  CHECK((got - expected).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(std::abs(got.trace()) < 1e-14);
}
