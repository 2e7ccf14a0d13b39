#pragma once

#include "tpdsim/common.hpp"

namespace tpdsim {

// Five-level molecule. F0 is the ground state; F1 and F3 are optically
// excited states; F2 and F4 are metastable shelving states whose occupation
// registers the first and second photon detection. The cascade is
//   F0 --photon alpha--> F1 --gamma2--> F2 --photon beta--> F3 --gamma4--> F4
// with radiative decays F1 --gamma1--> F0 and F3 --gamma3--> F2.
enum Level : int { F0 = 0, F1 = 1, F2 = 2, F3 = 3, F4 = 4 };

// Decay rates, in units of gamma1 (which sets the time unit). All dynamics
// run in the rotating frame: level energies are removed and detunings are
// carried as phases on the pulse envelopes.
struct MoleculeParams {
  double gamma1 = 1.0;  // F1 -> F0
  double gamma2 = 1.0;  // F1 -> F2
  double gamma3 = 1.0;  // F3 -> F2
  double gamma4 = 1.0;  // F3 -> F4

  // Throws std::invalid_argument with message "invalid rate" when any rate
  // is <= 0, or "non-finite parameter" when any rate is NaN/inf.
  void validate() const;

  double max_rate() const;
  double total_width_1() const { return gamma1 + gamma2; }  // F1 linewidth
  double total_width_2() const { return gamma3 + gamma4; }  // F3 linewidth
};

// |to><from| in the five-level basis: 1 at matrix entry (to, from).
Mat5 transition_operator(Level from, Level to);

// D_X[rho] = X rho X^dag - 1/2 {X^dag X, rho}.
Mat5 lindblad_dissipator(const Mat5& x, const Mat5& rho);

// The four molecular decay channels as collapse operators (scaled by
// sqrt(rate)): sqrt(g1)|F0><F1|, sqrt(g2)|F2><F1|, sqrt(g3)|F2><F3|,
// sqrt(g4)|F4><F3|.
struct CollapseOperators {
  Mat5 decay10;  // sqrt(gamma1) |F0><F1|
  Mat5 decay12;  // sqrt(gamma2) |F2><F1|
  Mat5 decay32;  // sqrt(gamma3) |F2><F3|
  Mat5 decay34;  // sqrt(gamma4) |F4><F3|
};
CollapseOperators collapse_operators(const MoleculeParams& p);

// Sum of the four decay dissipators applied to rho.
Mat5 molecular_dissipator(const Mat5& rho, const MoleculeParams& p);

}  // namespace tpdsim
