#pragma once

#include <string>
#include <vector>

#include "tpdsim/model.hpp"
#include "tpdsim/pulses.hpp"

namespace tpdsim {

// Midpoint discretization of the detection window [t0, T]:
// s_j = t0 + (j + 1/2) dt. The grid must resolve the first-chain linewidth:
// dt <= 1 / (20 (gamma1 + gamma2)) is enforced where operators are built.
struct TimeGrid {
  double t0 = 0.0;
  double t_end = 0.0;
  int n = 0;
  double dt = 0.0;
  std::vector<double> s;

  static TimeGrid make(double t0, double t_end, int n);
};

// Weight per unit time of the one-photon outcome at detection time t:
// W_t = (g1 g2 / (g1 + g2)) (1 - e^{-(g1+g2)(t - t0)}).
double weight_w(double t, double t0, double gamma1, double gamma2);
// Two-photon inner weight with the second chain's rates and t' as origin.
double weight_wtt(double t, double tp, double gamma3, double gamma4);

// Detection states on the grid. phi_t rises exponentially toward the
// detection time, phi_t(s) ~ e^{(g1+g2)(s - t)/2} on (t0, t]; psi_{t,t'}
// likewise on (t', t] with the second chain's width. Both are normalized on
// the grid: sum_j |v_j|^2 dt = 1. Rotating-frame carrier phases are dropped
// (a diagonal unitary on the time basis; eigenvalues and rotating-frame Born
// values are unaffected). If the support covers fewer than two samples the
// state degenerates to a single sample and `degenerate` is set.
struct DetectionState {
  Eigen::VectorXd v;
  bool degenerate = false;
};
DetectionState phi_state(int k, const TimeGrid& g, const MoleculeParams& p);
DetectionState psi_state(int k, int kp, const TimeGrid& g,
                         const MoleculeParams& p);

// One-photon measurement operator as an N x N kernel matrix:
//   Pi1[j,j'] = sum_k dt W_{s_k} phi_k(s_j) phi_k(s_j').
// The associated discrete operator (whose eigenvalues approximate the
// continuum ones) is kernel * dt.
struct Povm1 {
  Eigen::MatrixXd kernel;
  TimeGrid grid;
  Eigen::MatrixXd op() const { return kernel * grid.dt; }
  double trace() const { return (kernel.diagonal().sum()) * grid.dt; }
};
Povm1 build_pi1(const TimeGrid& g, const MoleculeParams& p);

// Closed-form bandwidth Tr Pi1 = (g1 g2 / G1) [DT - (1 - e^{-G1 DT}) / G1].
double trace_pi1_closed_form(double dt_window, double gamma1, double gamma2);

// Two-photon operator, kept as rank-1 factors (weight, phi_{t'}, psi_{t,t'})
// over ordered pairs t' < t; contracted lazily against product states.
// Dense assembly (N^2 x N^2) only for n <= 64.
struct Povm2 {
  struct Term {
    double weight;  // dt^2 W_{t'} W_{t,t'}
    int k, kp;
    Eigen::VectorXd phi, psi;
  };
  std::vector<Term> terms;
  TimeGrid grid;
};
Povm2 build_pi2(const TimeGrid& g, const MoleculeParams& p);
Eigen::MatrixXd dense_pi2_operator(const Povm2& op);  // includes dt^2 factor

// Born-rule probabilities for (product) pulse inputs sampled on the grid.
double born_probability1(const Povm1& op, const Pulse& pulse);
double born_probability2(const Povm2& op, const Pulse& pulse_alpha,
                         const Pulse& pulse_beta);

// Descending eigendecomposition with a Hermiticity guard (off-symmetric
// residual > 1e-8 -> internal-consistency error), eigenvalues below 1e-12
// floored to zero.
struct EigenDecomposition {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // columns match values
};
EigenDecomposition eigendecompose(const Eigen::MatrixXd& op);

}  // namespace tpdsim
