#include "tpdsim/povm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tpdsim {

TimeGrid TimeGrid::make(double t0, double t_end, int n) {
  if (!(t_end > t0) || n < 1)
    throw std::invalid_argument("invalid time grid");
  TimeGrid g;
  g.t0 = t0;
  g.t_end = t_end;
  g.n = n;
  g.dt = (t_end - t0) / n;
  g.s.resize(n);
  for (int j = 0; j < n; ++j) g.s[j] = t0 + (j + 0.5) * g.dt;
  return g;
}

double weight_w(double t, double t0, double gamma1, double gamma2) {
  const double width = gamma1 + gamma2;
  return gamma1 * gamma2 / width * (1.0 - std::exp(-width * (t - t0)));
}

double weight_wtt(double t, double tp, double gamma3, double gamma4) {
  const double width = gamma3 + gamma4;
  return gamma3 * gamma4 / width * (1.0 - std::exp(-width * (t - tp)));
}

namespace {

DetectionState rising_state(int first, int last, const TimeGrid& g,
                            double width) {
  DetectionState st;
  st.v = Eigen::VectorXd::Zero(g.n);
  if (last < first) {
    st.degenerate = true;
    return st;
  }
  for (int j = first; j <= last; ++j)
    st.v[j] = std::exp(0.5 * width * (g.s[j] - g.s[last]));
  const double nrm = st.v.squaredNorm() * g.dt;
  st.v /= std::sqrt(nrm);
  st.degenerate = (last - first + 1) < 2;
  return st;
}

void check_resolution(const TimeGrid& g, double width) {
  if (g.dt > 1.0 / (20.0 * width) * (1.0 + 1e-9))
    throw std::runtime_error("time grid too coarse for the detection linewidth");
}

}  // namespace

DetectionState phi_state(int k, const TimeGrid& g, const MoleculeParams& p) {
  return rising_state(0, k, g, p.total_width_1());
}

DetectionState psi_state(int k, int kp, const TimeGrid& g,
                         const MoleculeParams& p) {
  return rising_state(kp + 1, k, g, p.total_width_2());
}

Povm1 build_pi1(const TimeGrid& g, const MoleculeParams& p) {
  p.validate();
  check_resolution(g, p.total_width_1());
  Povm1 op;
  op.grid = g;
  op.kernel = Eigen::MatrixXd::Zero(g.n, g.n);
  for (int k = 0; k < g.n; ++k) {
    const DetectionState phi = phi_state(k, g, p);
    const double w = g.dt * weight_w(g.s[k], g.t0, p.gamma1, p.gamma2);
    const auto seg = phi.v.head(k + 1);
    op.kernel.topLeftCorner(k + 1, k + 1) += w * (seg * seg.transpose());
  }
  return op;
}

double trace_pi1_closed_form(double dt_window, double gamma1, double gamma2) {
  const double width = gamma1 + gamma2;
  return gamma1 * gamma2 / width *
         (dt_window - (1.0 - std::exp(-width * dt_window)) / width);
}

Povm2 build_pi2(const TimeGrid& g, const MoleculeParams& p) {
  p.validate();
  check_resolution(g, p.total_width_1());
  check_resolution(g, p.total_width_2());
  Povm2 op;
  op.grid = g;
  op.terms.reserve(static_cast<std::size_t>(g.n) * (g.n - 1) / 2);
  for (int kp = 0; kp < g.n; ++kp) {
    const double w1 = weight_w(g.s[kp], g.t0, p.gamma1, p.gamma2);
    const DetectionState phi = phi_state(kp, g, p);
    for (int k = kp + 1; k < g.n; ++k) {
      const double w2 = weight_wtt(g.s[k], g.s[kp], p.gamma3, p.gamma4);
      Povm2::Term term;
      term.weight = g.dt * g.dt * w1 * w2;
      term.k = k;
      term.kp = kp;
      term.phi = phi.v;
      term.psi = psi_state(k, kp, g, p).v;
      op.terms.push_back(std::move(term));
    }
  }
  return op;
}

Eigen::MatrixXd dense_pi2_operator(const Povm2& op) {
  const int n = op.grid.n;
  if (n > 64)
    throw std::runtime_error("time grid too large for the two-photon operator");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n * n, n * n);
  Eigen::MatrixXd outer(n, n);
  for (const Povm2::Term& t : op.terms) {
    // Column-major (j2, j1) layout flattens to prod[j1 * n + j2].
    outer.noalias() = t.psi * t.phi.transpose();
    const Eigen::Map<const Eigen::VectorXd> prod(outer.data(), n * n);
    m.selfadjointView<Eigen::Lower>().rankUpdate(prod, t.weight);
  }
  m.triangularView<Eigen::StrictlyUpper>() =
      m.transpose().triangularView<Eigen::StrictlyUpper>();
  // Two powers of the grid measure turn kernel samples into the discrete
  // operator, matching the one-photon op() convention.
  return m * (op.grid.dt * op.grid.dt);
}

double born_probability1(const Povm1& op, const Pulse& pulse) {
  const int n = op.grid.n;
  Eigen::VectorXcd u(n);
  for (int j = 0; j < n; ++j) u[j] = pulse.amplitude(op.grid.s[j]);
  const Complex val = (u.adjoint() * op.kernel.cast<Complex>() * u).value();
  return val.real() * op.grid.dt * op.grid.dt;
}

double born_probability2(const Povm2& op, const Pulse& pulse_alpha,
                         const Pulse& pulse_beta) {
  const int n = op.grid.n;
  const double dt = op.grid.dt;
  Eigen::VectorXcd ua(n), ub(n);
  for (int j = 0; j < n; ++j) {
    ua[j] = pulse_alpha.amplitude(op.grid.s[j]);
    ub[j] = pulse_beta.amplitude(op.grid.s[j]);
  }
  double prob = 0.0;
  for (const Povm2::Term& t : op.terms) {
    const Complex da = t.phi.cast<Complex>().dot(ua) * dt;
    const Complex db = t.psi.cast<Complex>().dot(ub) * dt;
    prob += t.weight * std::norm(da) * std::norm(db);
  }
  return prob;
}

EigenDecomposition eigendecompose(const Eigen::MatrixXd& op) {
  const double scale = std::max(1.0, op.cwiseAbs().maxCoeff());
  const double asym = (op - op.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-8 * scale)
    throw std::runtime_error("measurement operator not symmetric");
  const Eigen::MatrixXd sym = 0.5 * (op + op.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigendecomposition failed");
  const int n = static_cast<int>(op.rows());
  EigenDecomposition d;
  d.values.resize(n);
  d.vectors.resize(n, n);
  for (int i = 0; i < n; ++i) {
    double v = solver.eigenvalues()[n - 1 - i];
    if (std::abs(v) < 1e-12) v = 0.0;
    d.values[i] = v;
    d.vectors.col(i) = solver.eigenvectors().col(n - 1 - i);
  }
  return d;
}

}  // namespace tpdsim
