#pragma once

#include <vector>

#include "tpdsim/model.hpp"
#include "tpdsim/pulses.hpp"

namespace tpdsim {

// Uniform angular-frequency grid, symmetric about 0.
struct SpectralGrid {
  double dw = 0.0;
  int n = 0;                    // number of samples (odd; center index n/2)
  double w(int j) const { return (j - n / 2) * dw; }

  // Span covers 40x the largest rate and resolves the smallest with 40
  // points; an additional refinement dw <= 0.5 / max(1, |t_shift|) keeps the
  // oscillatory e^{i w t_shift} factors of delayed pulses on-grid.
  static SpectralGrid for_problem(const MoleculeParams& p,
                                  const std::vector<const Pulse*>& pulses,
                                  double t_shift = 0.0);
};

// Single-excitation transmission amplitude of the first three-level chain
// (F0 -> F1 -> F2): T1(w) = sqrt(g1 g2) / ((g1+g2)/2 - i w), and of the
// second chain (F2 -> F3 -> F4) with g3, g4. |T|^2 <= 1, saturated on
// resonance when the two rates match (impedance matching).
Complex transmission1(double w, const MoleculeParams& p);
Complex transmission2(double w, const MoleculeParams& p);

// Absorption probability of a lone photon through chain 1 / chain 2:
// P = int |T(w)|^2 |u(w)|^2 dw.
double p_alpha(const Pulse& pulse, const MoleculeParams& p);
double p_beta(const Pulse& pulse, const MoleculeParams& p);

// Closed form for an exponential envelope (rate kappa) through chain 1,
// derived by partial fractions: 4 g1 g2 / ((g1 + g2)(kappa + g1 + g2)).
double p_alpha_exponential(double kappa, const MoleculeParams& p);

// First-photon spectral autocorrelation on the lag grid x_k = k dw:
//   F1(x) = (2 pi)^{-1/2} int dw h*(w - x) h(w),  h = T1 u_alpha.
// sqrt(2 pi) F1(0) = p_alpha. Returned on lags -m..m as a dense vector.
struct LagFunction {
  std::vector<Complex> v;  // size 2m+1, lag index k -> v[m + k]
  int m = 0;
  double dx = 0.0;
  Complex at(int k) const { return v[m + k]; }
};
LagFunction f1_spectrum(const Pulse& pulse_alpha, const MoleculeParams& p,
                        const SpectralGrid& grid);

// Time-domain route to the same object: F1(x) = g2 (2 pi)^{-1/2}
// int P1(t) e^{i x t} dt with P1 the excited population of chain 1 driven by
// u_alpha alone; used as the dual-domain oracle.
Complex f1_time_domain(const Pulse& pulse_alpha, const MoleculeParams& p,
                       double x);

// Second-photon kernel G(x) = int dw u_beta*(w) T2(w) u_beta(w - x).
LagFunction g_kernel(const Pulse& pulse_beta, const MoleculeParams& p,
                     const SpectralGrid& grid);

// Cross term of the two-photon overlap:
//   P_ab = sqrt(g3 g4) / (sqrt(2 pi) (g3 + g4)) *
//          2 Re[-i int dx F1(x) PV(1/x) G(x)].
// The principal value is regularized by the +-i eps average
// (kernel x / (x^2 + eps^2)) with a geometric eps sweep from dx down until
// successive values change < 1e-5 (throws "principal value not converged"
// otherwise), followed by one grid-halving Richardson step.
double p_ab(const Pulse& pulse_alpha, const Pulse& pulse_beta,
            const MoleculeParams& p);

struct OverlapResult {
  double pa = 0.0;
  double pb = 0.0;
  double pab = 0.0;       // cross term
  double overlap = 0.0;   // p_overlap = pa pb / 2 + pab
  double rho2424 = 0.0;   // pa pb - p_overlap
};
OverlapResult p_overlap(const Pulse& pulse_alpha, const Pulse& pulse_beta,
                        const MoleculeParams& p);

// Nested time-quadrature route (exact for this cascade):
//   m' = -(g1+g2)/2 m + u_alpha        R' = g1 g2 |m|^2
//   v' = -(g3+g4)/2 v + u_beta R       q' = -(g3+g4) q + 2 Re(u_beta* v)
//   F4' = g3 g4 q
// R(t) is the first-shelf occupation fed by photon alpha alone
// (rho_a2a2(t)); F4(t) is the two-photon detection probability
// (rho_2424(t)).
struct QuadratureSample {
  double t;
  double r;   // rho_a2a2(t)
  double f4;  // rho_2424(t)
};
struct QuadratureResult {
  double r_final = 0.0;
  double f4_final = 0.0;
  std::vector<QuadratureSample> trajectory;
};
QuadratureResult two_photon_quadrature(const Pulse& pulse_alpha,
                                       const Pulse& pulse_beta,
                                       const MoleculeParams& p,
                                       double t_end = 0.0, double dt = 0.0,
                                       bool want_trajectory = false);

double rho_a2a2_quadrature(const Pulse& pulse_alpha, const MoleculeParams& p,
                           double t);
double rho_2424_quadrature(const Pulse& pulse_alpha, const Pulse& pulse_beta,
                           const MoleculeParams& p, double t);

// Full correlation c[k] = sum_j a[j] b[j - k] dw (lags -(n-1)..n-1),
// via zero-padded FFT. Exposed for the unit tests.
std::vector<Complex> correlate_lags(const std::vector<Complex>& a,
                                    const std::vector<Complex>& b, double dw);

}  // namespace tpdsim
