#include <cmath>

#include "doctest.h"
#include "tpdsim/bridge.hpp"

using namespace tpdsim;

namespace {

Mat20 initial_rho() {
  Mat20 rho = Mat20::Zero();
  rho(lio_index(1, 1, F0), lio_index(1, 1, F0)) = 1.0;
  return rho;
}

}  // namespace

TEST_CASE("the trace rule at t0 selects the vacuum-completed variant") {
  CHECK(select_rho22_variant() == Rho22Variant::kWithVacuum);

  const TildeCoefficients c = extract_tilde(initial_rho(), 0.0, 0.0, 0.0);
  const GdmState with = tilde_to_gdm(c, Rho22Variant::kWithVacuum);
  const GdmState without = tilde_to_gdm(c, Rho22Variant::kAsWritten);
  CHECK(with.block[kTwoTwo].trace().real() == doctest::Approx(1.0));
  CHECK(without.block[kTwoTwo].trace().real() == doctest::Approx(0.0));
}

TEST_CASE("initial cascaded state maps exactly onto the initial labels") {
  const TildeCoefficients c = extract_tilde(initial_rho(), 0.0, 0.0, 0.0);
  const GdmState mapped = tilde_to_gdm(c);
  const GdmState expected = gdm_initial_state();
  for (int k = 0; k < kGdmLabels; ++k)
    CHECK((mapped.block[k] - expected.block[k]).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("coefficient blocks rescale by the exhaustion exponentials") {
  // Build a synthetic 20x20 state with recognizable entries in each cavity
  // sector and check the per-label scaling of the map.
  Mat20 rho = Mat20::Zero();
  auto put = [&](int ket_base, int bra_base, double v) {
    rho(ket_base + F0, bra_base + F0) = v;
  };
  // Sector bases: (1,1) photons-present = 15 ... (0,0) = 0 (both absorbed).
  const int b11 = lio_index(1, 1, 0), b01 = lio_index(0, 1, 0);
  const int b10 = lio_index(1, 0, 0), b00 = lio_index(0, 0, 0);
  put(b00, b00, 0.11);  // tilde_{2,2}
  put(b01, b00, 0.13);  // tilde_{alpha,2}
  put(b01, b01, 0.17);  // tilde_{alpha,alpha}
  put(b11, b01, 0.19);  // tilde_{0,alpha}
  put(b11, b11, 0.23);  // tilde_{0,0}
  put(b10, b00, 0.29);  // tilde_{beta,2}
  const double l1 = 0.7, l2 = 0.3;
  const TildeCoefficients c = extract_tilde(rho, l1, l2, 1.0);
  CHECK(c.block[kTwoTwo](F0, F0).real() == doctest::Approx(0.11));
  CHECK(c.block[kVacAlpha](F0, F0).real() == doctest::Approx(0.19));

  const GdmState g = tilde_to_gdm(c, Rho22Variant::kWithVacuum);
  const double e1 = std::exp(l1), e2 = std::exp(l2);
  const double h1 = std::exp(0.5 * l1), h2 = std::exp(0.5 * l2);
  CHECK(g.block[kVacVac](F0, F0).real() == doctest::Approx(0.23 * e1 * e2));
  CHECK(g.block[kAlphaAlpha](F0, F0).real() ==
        doctest::Approx((0.17 + 0.23) * e2));
  CHECK(g.block[kTwoTwo](F0, F0).real() ==
        doctest::Approx(0.11 + 0.17 + 0.0 + 0.23));
  CHECK(g.block[kVacAlpha](F0, F0).real() ==
        doctest::Approx(0.19 * h1 * e2));
  CHECK(g.block[kBetaTwo](F0, F0).real() ==
        doctest::Approx((0.29 + 0.19) * h1));
  CHECK(g.block[kAlphaTwo](F0, F0).real() == doctest::Approx(0.13 * h2));
}

TEST_CASE("joint integration matches the direct labels: two gaussians") {
  const MoleculeParams p;
  const GaussianPulse alpha(0.5, 0.0), beta(0.5, 3.0);
  const EquivalenceReport rep = run_equivalence(alpha, beta, p);
  CHECK(rep.trace_check_passed);
  CHECK(rep.variant_used == Rho22Variant::kWithVacuum);
  CHECK(rep.samples > 30);
  CHECK(rep.worst < 1e-6);
  CHECK(!rep.worst_label.empty());
}

TEST_CASE("joint integration matches the direct labels: mixed shapes") {
  const MoleculeParams p{1.0, 0.9, 1.1, 0.8};
  const GaussianPulse alpha(0.75, 0.0);
  const ExponentialPulse beta(0.5, 0.5, 0.2);  // delayed and detuned
  const EquivalenceReport rep = run_equivalence(alpha, beta, p);
  CHECK(rep.trace_check_passed);
  CHECK(rep.worst < 1e-5);
}
