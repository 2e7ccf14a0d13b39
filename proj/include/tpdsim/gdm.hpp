#pragma once

#include <array>
#include <string>
#include <vector>

#include "tpdsim/integrator.hpp"
#include "tpdsim/model.hpp"
#include "tpdsim/pulses.hpp"

namespace tpdsim {

// Generalized-density-matrix label (i, j): the 5x5 system operator
// conditioned on photon-sector states i (ket side) and j (bra side), with
// sectors 0 = vacuum, alpha/beta = one photon in the respective pulse mode,
// and 2 = the two-photon product state. Only these ten labels close under
// the hierarchy; the conjugate labels are their adjoints.
enum GdmLabel : int {
  kTwoTwo = 0,     // (2, 2) -- the physical density matrix
  kAlphaTwo = 1,   // (alpha, 2)
  kBetaTwo = 2,    // (beta, 2)
  kAlphaAlpha = 3,
  kBetaBeta = 4,
  kAlphaBeta = 5,
  kVacTwo = 6,     // (0, 2)
  kVacAlpha = 7,   // (0, alpha)
  kVacBeta = 8,    // (0, beta)
  kVacVac = 9,     // (0, 0)
};
inline constexpr int kGdmLabels = 10;
extern const std::array<const char*, kGdmLabels> kGdmLabelNames;

struct GdmState {
  std::array<Mat5, kGdmLabels> block;
  double time = 0.0;
};

// Sector orthogonality fixes the initial conditions: every diagonal label
// starts as |F0><F0|, every off-diagonal label as 0.
GdmState gdm_initial_state();

// Time derivative of all ten labels for instantaneous envelope values
// u_alpha, u_beta. Every label decays under the four molecular dissipators;
// the photon sectors feed each other through commutators with the two
// radiative collapse operators.
void gdm_rhs(const GdmState& s, Complex u_alpha, Complex u_beta,
             const MoleculeParams& p, GdmState* out);

// Level populations of a 5x5 block, clamped to [-1e-8, 1 + 1e-8].
std::array<double, 5> populations(const Mat5& block);

struct GdmOptions {
  double dt = 0.0;          // 0 = default_time_step heuristic
  double t_end = 0.0;       // 0 = run until steady state
  int sample_stride = 16;   // trajectory sampling interval in steps
  bool adaptive = false;    // halve dt until final populations move < 1e-6
  bool keep_states = false; // retain full sampled GdmStates
};

struct GdmSample {
  double t;
  std::array<double, 5> pops;               // physical populations (2,2)
  Complex coh01, coh23;                     // F0-F1 and F2-F3 coherences
};

struct GdmResult {
  GdmState final_state;
  std::vector<GdmSample> trajectory;
  std::vector<GdmState> states;             // when keep_states
  double dt_used = 0.0;
  bool steady = false;
};

// Fixed-step segmented RK4 over [t0, T]. Throws std::runtime_error
// "integrator unstable, reduce dt" when the trace of the physical label
// drifts from 1 by more than 1e-4.
GdmResult gdm_integrate(const Pulse& pulse_alpha, const Pulse& pulse_beta,
                        const MoleculeParams& p, const GdmOptions& opt = {});

// Steady state: both excited populations < 1e-8 and every pulse exhausted
// (cumulative norm at its truncation plateau).
bool gdm_steady(const GdmState& s, const Pulse& a, const Pulse& b);

}  // namespace tpdsim
