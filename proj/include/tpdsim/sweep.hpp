#pragma once

#include <string>
#include <vector>

#include "tpdsim/model.hpp"
#include "tpdsim/scenarios.hpp"

namespace tpdsim {

// Two-axis x delay parameter sweep evaluated point-by-point with the
// spectral/quadrature engine (cheap enough to run thousands of points).
// Axis parameters address pulse-shape knobs:
//   sigma_alpha, sigma_beta       (Gaussian width of |u|^2)
//   kappa_alpha, kappa_beta       (exponential rate)
//   inv_kappa_beta                (exponential 1/rate, mixed grids)
// The delay axis shifts pulse beta: center-to-center for two Gaussians,
// alpha-center to beta-onset for mixed pairs, onset-to-onset otherwise.
struct SweepAxis {
  std::string param;
  std::vector<double> values;
};

struct SweepConfig {
  MoleculeParams params;
  std::string alpha_shape = "gaussian";      // gaussian | exponential
  std::string beta_shape = "gaussian";
  SweepAxis axis1;
  SweepAxis axis2;
  std::vector<double> delays;
  std::string quantity = "rho2424_inf";
  // p_alpha | p_beta | p_overlap | rho2424_inf | F2_inf | F4_inf
};
SweepConfig sweep_from_json(const std::string& json_text);

struct SweepRow {
  double p1 = 0.0, p2 = 0.0, delay = 0.0;
  double pa = 0.0, pb = 0.0, overlap = 0.0, rho2424 = 0.0;
  std::string error;  // empty on success; failures do not stop the sweep
};

// Rows in axis1-major, axis2-middle, delay-minor order, computed by a worker
// pool (size from the TPDSIM_THREADS environment variable, default: hardware
// parallelism) and gathered in input order for deterministic output.
std::vector<SweepRow> run_sweep(const SweepConfig& cfg);

// Frozen CSV columns:
// param1,param2,delay,p_alpha,p_beta,p_overlap,rho2424_inf,error
std::string sweep_csv(const SweepConfig& cfg, const std::vector<SweepRow>& rows);

double sweep_quantity(const SweepRow& row, const std::string& quantity);

}  // namespace tpdsim
