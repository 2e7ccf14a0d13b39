#include "tpdsim/liouvillian.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace tpdsim {

namespace {

// All operators entering the generator are sparse with unit entries; the
// right-hand side is assembled from row/column updates instead of dense
// 20x20 products.
struct Ent {
  int r, c;
};

struct Structure {
  std::vector<Ent> a1, a2;            // cavity lowering operators
  std::vector<Ent> s01, s23;          // radiative transitions
  std::vector<Ent> s12, s34;          // shelving transitions
  std::vector<Ent> c1, c2;            // cross terms sigma_i a_i^dag
  std::array<double, kLioDim> n1d{};  // diagonals of n1, n2, |F1><F1|, |F3><F3|
  std::array<double, kLioDim> n2d{};
  std::array<double, kLioDim> p1d{};
  std::array<double, kLioDim> p3d{};
};

const Structure& structure() {
  static const Structure table = [] {
    Structure t;
    for (int n2 = 0; n2 < 2; ++n2)
      for (int k = 0; k < 5; ++k)
        t.a1.push_back({lio_index(0, n2, k), lio_index(1, n2, k)});
    for (int n1 = 0; n1 < 2; ++n1)
      for (int k = 0; k < 5; ++k)
        t.a2.push_back({lio_index(n1, 0, k), lio_index(n1, 1, k)});
    for (int n1 = 0; n1 < 2; ++n1)
      for (int n2 = 0; n2 < 2; ++n2) {
        t.s01.push_back({lio_index(n1, n2, F0), lio_index(n1, n2, F1)});
        t.s23.push_back({lio_index(n1, n2, F2), lio_index(n1, n2, F3)});
        t.s12.push_back({lio_index(n1, n2, F2), lio_index(n1, n2, F1)});
        t.s34.push_back({lio_index(n1, n2, F4), lio_index(n1, n2, F3)});
      }
    for (int n2 = 0; n2 < 2; ++n2)
      t.c1.push_back({lio_index(1, n2, F0), lio_index(0, n2, F1)});
    for (int n1 = 0; n1 < 2; ++n1)
      t.c2.push_back({lio_index(n1, 1, F2), lio_index(n1, 0, F3)});
    for (int n1 = 0; n1 < 2; ++n1)
      for (int n2 = 0; n2 < 2; ++n2)
        for (int k = 0; k < 5; ++k) {
          const int j = lio_index(n1, n2, k);
          t.n1d[j] = n1;
          t.n2d[j] = n2;
          t.p1d[j] = (k == F1) ? 1.0 : 0.0;
          t.p3d[j] = (k == F3) ? 1.0 : 0.0;
        }
    return t;
  }();
  return table;
}

// out += w * O * m, w * O^dag * m, w * m * O, w * m * O^dag for unit-entry O.
void lacc(Complex w, const std::vector<Ent>& op, const Mat20& m, Mat20& out) {
  for (const Ent& e : op) out.row(e.r) += w * m.row(e.c);
}
void lacc_adj(Complex w, const std::vector<Ent>& op, const Mat20& m,
              Mat20& out) {
  for (const Ent& e : op) out.row(e.c) += w * m.row(e.r);
}
void racc(Complex w, const std::vector<Ent>& op, const Mat20& m, Mat20& out) {
  for (const Ent& e : op) out.col(e.c) += w * m.col(e.r);
}
void racc_adj(Complex w, const std::vector<Ent>& op, const Mat20& m,
              Mat20& out) {
  for (const Ent& e : op) out.col(e.r) += w * m.col(e.c);
}

struct WEnt {
  Ent e;
  Complex w;
};

// out += X m X^dag with X = sum of weighted unit entries.
void sandwich(const std::vector<WEnt>& x, const Mat20& m, Mat20& out) {
  for (const WEnt& a : x)
    for (const WEnt& b : x)
      out(a.e.r, b.e.r) += a.w * std::conj(b.w) * m(a.e.c, b.e.c);
}

std::vector<WEnt> collapse_entries(const std::vector<Ent>& cav,
                                   const std::vector<Ent>& rad, Complex g,
                                   double c) {
  std::vector<WEnt> x;
  x.reserve(cav.size() + rad.size());
  for (const Ent& e : cav) x.push_back({e, std::conj(g)});
  for (const Ent& e : rad) x.push_back({e, Complex(c, 0.0)});
  return x;
}

double diag_expect(const std::array<double, kLioDim>& d, const Mat20& rho) {
  double v = 0.0;
  for (int j = 0; j < kLioDim; ++j) v += d[j] * rho(j, j).real();
  return v;
}

Complex trace_with(const std::vector<Ent>& op, const Mat20& rho) {
  Complex v = 0.0;
  for (const Ent& e : op) v += rho(e.c, e.r);
  return v;
}

Complex trace_with_adj(const std::vector<Ent>& op, const Mat20& rho) {
  Complex v = 0.0;
  for (const Ent& e : op) v += rho(e.r, e.c);
  return v;
}

// Instantaneous rates feeding the four integrated-flux identities.
std::array<double, 4> flux_rates(const Mat20& rho, Complex g1, Complex g2,
                                 const MoleculeParams& p) {
  const Structure& st = structure();
  const double c1 = std::sqrt(p.gamma1), c2 = std::sqrt(p.gamma3);
  const double occ1 = diag_expect(st.n1d, rho);
  const double occ2 = diag_expect(st.n2d, rho);
  const double pop1 = diag_expect(st.p1d, rho);
  const double pop3 = diag_expect(st.p3d, rho);
  const Complex t1 = trace_with(st.c1, rho), t1a = trace_with_adj(st.c1, rho);
  const Complex t2 = trace_with(st.c2, rho), t2a = trace_with_adj(st.c2, rho);
  const double x1 = std::norm(g1) * occ1 + p.gamma1 * pop1 +
                    (g1 * c1 * t1 + c1 * std::conj(g1) * t1a).real();
  const double x2 = std::norm(g2) * occ2 + p.gamma3 * pop3 +
                    (g2 * c2 * t2 + c2 * std::conj(g2) * t2a).real();
  return {x1, p.gamma2 * pop1, x2, p.gamma4 * pop3};
}

}  // namespace

CascadeOperators build_operators() {
  const Structure& st = structure();
  CascadeOperators ops;
  auto dense = [](const std::vector<Ent>& entries) {
    Mat20 m = Mat20::Zero();
    for (const Ent& e : entries) m(e.r, e.c) = 1.0;
    return m;
  };
  ops.a1 = dense(st.a1);
  ops.a2 = dense(st.a2);
  ops.n1 = ops.a1.adjoint() * ops.a1;
  ops.n2 = ops.a2.adjoint() * ops.a2;
  ops.sm01 = dense(st.s01);
  ops.sm23 = dense(st.s23);
  ops.sm12 = dense(st.s12);
  ops.sm34 = dense(st.s34);
  for (int k = 0; k < 5; ++k) {
    Mat20 m = Mat20::Zero();
    for (int n1 = 0; n1 < 2; ++n1)
      for (int n2 = 0; n2 < 2; ++n2) m(lio_index(n1, n2, k), lio_index(n1, n2, k)) = 1.0;
    ops.level_proj[k] = m;
  }
  return ops;
}

void master_rhs(const Mat20& rho, Complex g1, Complex g2,
                const MoleculeParams& p, Mat20* out) {
  const Structure& st = structure();
  const double c1 = std::sqrt(p.gamma1), c2 = std::sqrt(p.gamma3);
  out->setZero();

  // -i[H, rho] with H = w1 C1 + w1* C1^dag + w2 C2 + w2* C2^dag,
  // C_i = sigma_i a_i^dag, w_i = (i/2) c_i g_i.
  const Complex w1 = Complex(0.0, 0.5) * c1 * g1;
  const Complex w2 = Complex(0.0, 0.5) * c2 * g2;
  const Complex mi(0.0, -1.0);
  lacc(mi * w1, st.c1, rho, *out);
  lacc_adj(mi * std::conj(w1), st.c1, rho, *out);
  racc(-mi * w1, st.c1, rho, *out);
  racc_adj(-mi * std::conj(w1), st.c1, rho, *out);
  lacc(mi * w2, st.c2, rho, *out);
  lacc_adj(mi * std::conj(w2), st.c2, rho, *out);
  racc(-mi * w2, st.c2, rho, *out);
  racc_adj(-mi * std::conj(w2), st.c2, rho, *out);

  // X_i rho X_i^dag and the shelving sandwiches.
  sandwich(collapse_entries(st.a1, st.s01, g1, c1), rho, *out);
  sandwich(collapse_entries(st.a2, st.s23, g2, c2), rho, *out);
  for (const Ent& a : st.s12)
    for (const Ent& b : st.s12)
      (*out)(a.r, b.r) += p.gamma2 * rho(a.c, b.c);
  for (const Ent& a : st.s34)
    for (const Ent& b : st.s34)
      (*out)(a.r, b.r) += p.gamma4 * rho(a.c, b.c);

  // -1/2 {X_i^dag X_i, rho}: off-diagonal cross pieces g_i c_i C_i + h.c. ...
  lacc(-0.5 * g1 * c1, st.c1, rho, *out);
  lacc_adj(-0.5 * c1 * std::conj(g1), st.c1, rho, *out);
  racc(-0.5 * g1 * c1, st.c1, rho, *out);
  racc_adj(-0.5 * c1 * std::conj(g1), st.c1, rho, *out);
  lacc(-0.5 * g2 * c2, st.c2, rho, *out);
  lacc_adj(-0.5 * c2 * std::conj(g2), st.c2, rho, *out);
  racc(-0.5 * g2 * c2, st.c2, rho, *out);
  racc_adj(-0.5 * c2 * std::conj(g2), st.c2, rho, *out);

  // ... plus the diagonal damping (cavity occupation and level widths).
  std::array<double, kLioDim> d;
  for (int j = 0; j < kLioDim; ++j)
    d[j] = 0.5 * (std::norm(g1) * st.n1d[j] + std::norm(g2) * st.n2d[j] +
                  (p.gamma1 + p.gamma2) * st.p1d[j] +
                  (p.gamma3 + p.gamma4) * st.p3d[j]);
  for (int c = 0; c < kLioDim; ++c)
    for (int r = 0; r < kLioDim; ++r) (*out)(r, c) -= (d[r] + d[c]) * rho(r, c);
}

double expectation(const Mat20& op, const Mat20& rho) {
  return (op * rho).trace().real();
}

std::array<double, 5> molecule_populations(const Mat20& rho) {
  std::array<double, 5> pops;
  for (int k = 0; k < 5; ++k) {
    double v = 0.0;
    for (int n1 = 0; n1 < 2; ++n1)
      for (int n2 = 0; n2 < 2; ++n2) v += rho(lio_index(n1, n2, k), lio_index(n1, n2, k)).real();
    pops[k] = std::clamp(v, -1e-8, 1.0 + 1e-8);
  }
  return pops;
}

namespace {

Mat20 initial_rho() {
  Mat20 rho = Mat20::Zero();
  rho(lio_index(1, 1, F0), lio_index(1, 1, F0)) = 1.0;
  return rho;
}

bool lio_steady(const Mat20& rho, double t, const Pulse& a, const Pulse& b) {
  const auto pops = molecule_populations(rho);
  if (pops[F1] >= 1e-8 || pops[F3] >= 1e-8) return false;
  for (const Pulse* q : {&a, &b}) {
    const Support sup = q->support();
    if (!sup.empty() && t < sup.hi - 1e-12) return false;
  }
  return true;
}

}  // namespace

LioResult lio_integrate(const Pulse& pulse_alpha, const Pulse& pulse_beta,
                        const MoleculeParams& p, const LioOptions& opt) {
  p.validate();
  const double dt = opt.dt > 0.0
                        ? opt.dt
                        : default_time_step(p.max_rate(), {&pulse_alpha, &pulse_beta});
  LioResult res;
  res.dt_used = dt;
  Mat20 rho = initial_rho();
  Mat20 k1, k2, k3, k4, tmp1, tmp2, tmp3;

  double t0 = 0.0, horizon = 0.0;
  for (const Pulse* q : {&pulse_alpha, &pulse_beta}) {
    const Support sup = q->support();
    if (!sup.empty()) {
      t0 = std::min(t0, sup.lo);
      horizon = std::max(horizon, sup.hi);
    }
  }
  double t = t0;
  const double settle = 24.0 / std::min(p.total_width_1(), p.total_width_2());
  const bool until_steady = (opt.t_end == 0.0);
  double t_end = until_steady ? horizon + settle : opt.t_end;
  if (!(t_end > t0)) t_end = t0 + settle;

  const Structure& st = structure();
  auto sample = [&]() {
    res.trajectory.push_back({t, molecule_populations(rho),
                              diag_expect(st.n1d, rho), diag_expect(st.n2d, rho)});
    if (opt.keep_states) res.states.push_back(rho);
    const Complex tr = rho.trace();
    double range_err = 0.0;
    for (int j = 0; j < 20; ++j) {
      const double d = rho(j, j).real();
      range_err = std::max(range_err, std::max(-d, d - 1.0));
    }
    if (std::abs(tr.real() - 1.0) + std::abs(tr.imag()) > 1e-4 ||
        range_err > 1e-4)
      throw std::runtime_error("integrator unstable, reduce dt");
  };

  sample();
  for (int chunk = 0; chunk < 64; ++chunk) {
    const auto steps = segment_steps({&pulse_alpha, &pulse_beta}, t, t_end, dt);
    int i = 0;
    for (const Step& s : steps) {
      const double h = s.h;
      const Complex ga0 = pulse_alpha.coupling_in_segment(s.t, s.a, s.b);
      const Complex gb0 = pulse_beta.coupling_in_segment(s.t, s.a, s.b);
      const Complex gam = pulse_alpha.coupling_in_segment(s.t + 0.5 * h, s.a, s.b);
      const Complex gbm = pulse_beta.coupling_in_segment(s.t + 0.5 * h, s.a, s.b);
      const Complex ga1 = pulse_alpha.coupling_in_segment(s.t + h, s.a, s.b);
      const Complex gb1 = pulse_beta.coupling_in_segment(s.t + h, s.a, s.b);

      master_rhs(rho, ga0, gb0, p, &k1);
      const auto f1 = flux_rates(rho, ga0, gb0, p);
      tmp1 = rho + 0.5 * h * k1;
      master_rhs(tmp1, gam, gbm, p, &k2);
      const auto f2 = flux_rates(tmp1, gam, gbm, p);
      tmp2 = rho + 0.5 * h * k2;
      master_rhs(tmp2, gam, gbm, p, &k3);
      const auto f3 = flux_rates(tmp2, gam, gbm, p);
      tmp3 = rho + h * k3;
      master_rhs(tmp3, ga1, gb1, p, &k4);
      const auto f4 = flux_rates(tmp3, ga1, gb1, p);

      rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      t = s.t + h;
      double* acc[4] = {&res.flux.out1, &res.flux.shelf1, &res.flux.out2,
                        &res.flux.shelf2};
      for (int q = 0; q < 4; ++q)
        *acc[q] += (h / 6.0) * (f1[q] + 2.0 * f2[q] + 2.0 * f3[q] + f4[q]);
      if (++i % opt.sample_stride == 0 || &s == &steps.back()) sample();
    }
    if (!until_steady || lio_steady(rho, t, pulse_alpha, pulse_beta)) break;
    t_end += settle;
  }
  res.steady = lio_steady(rho, t, pulse_alpha, pulse_beta);
  res.final_rho = rho;
  return res;
}

FluxBalanceReport flux_balance_report(const LioResult& r) {
  const auto pops = molecule_populations(r.final_rho);
  const double n2 = diag_expect(structure().n2d, r.final_rho);
  FluxBalanceReport rep;
  rep.residual[0] = std::abs(r.flux.out1 + r.flux.shelf1 - 1.0);
  rep.residual[1] = std::abs(r.flux.shelf1 - (pops[F2] + pops[F4]));
  rep.residual[2] = std::abs(r.flux.shelf2 - pops[F4]);
  rep.residual[3] = std::abs(r.flux.out2 + r.flux.shelf2 - (1.0 - n2));
  rep.worst = *std::max_element(rep.residual.begin(), rep.residual.end());
  rep.pass = rep.worst < 1e-4;
  return rep;
}

Eigen::MatrixXcd build_superoperator(Complex g1, Complex g2,
                                     const MoleculeParams& p) {
  Eigen::MatrixXcd sup(kLioDim * kLioDim, kLioDim * kLioDim);
  Mat20 basis, image;
  for (int c = 0; c < kLioDim; ++c)
    for (int r = 0; r < kLioDim; ++r) {
      basis = Mat20::Zero();
      basis(r, c) = 1.0;
      master_rhs(basis, g1, g2, p, &image);
      sup.col(r + kLioDim * c) =
          Eigen::Map<const Eigen::VectorXcd>(image.data(), kLioDim * kLioDim);
    }
  return sup;
}

LioResult lio_integrate_vectorized(const Pulse& pulse_alpha,
                                   const Pulse& pulse_beta,
                                   const MoleculeParams& p,
                                   const LioOptions& opt) {
  p.validate();
  const double dt = opt.dt > 0.0
                        ? opt.dt
                        : default_time_step(p.max_rate(), {&pulse_alpha, &pulse_beta});

  // The generator is bilinear in each coupling: L(g) = L0 + g A + g* B + |g|^2 C
  // per chain. Recover the seven constant superoperators from probe builds.
  using Sup = Eigen::MatrixXcd;
  const Complex iu(0.0, 1.0);
  auto chain_parts = [&](bool first) {
    auto probe = [&](Complex g) {
      return first ? build_superoperator(g, 0.0, p) : build_superoperator(0.0, g, p);
    };
    const Sup l0 = probe(0.0);
    const Sup m1 = probe(1.0) - l0;
    const Sup m2 = probe(iu) - l0;
    const Sup m3 = probe(2.0) - l0;
    Sup cpart = 0.5 * (m3 - 2.0 * m1);
    Sup apb = m1 - cpart;
    Sup amb = -iu * (m2 - cpart);
    return std::array<Sup, 3>{0.5 * (apb + amb), 0.5 * (apb - amb), cpart};
  };
  const Sup l0 = build_superoperator(0.0, 0.0, p);
  const auto part1 = chain_parts(true);
  const auto part2 = chain_parts(false);

  auto deriv = [&](const Eigen::VectorXcd& v, Complex g1, Complex g2) {
    Eigen::VectorXcd dv = l0 * v;
    if (g1 != Complex(0.0)) {
      dv += g1 * (part1[0] * v) + std::conj(g1) * (part1[1] * v) +
            std::norm(g1) * (part1[2] * v);
    }
    if (g2 != Complex(0.0)) {
      dv += g2 * (part2[0] * v) + std::conj(g2) * (part2[1] * v) +
            std::norm(g2) * (part2[2] * v);
    }
    return dv;
  };

  LioResult res;
  res.dt_used = dt;
  Mat20 rho0 = initial_rho();
  Eigen::VectorXcd v =
      Eigen::Map<const Eigen::VectorXcd>(rho0.data(), kLioDim * kLioDim);

  double t0 = 0.0, horizon = 0.0;
  for (const Pulse* q : {&pulse_alpha, &pulse_beta}) {
    const Support sup = q->support();
    if (!sup.empty()) {
      t0 = std::min(t0, sup.lo);
      horizon = std::max(horizon, sup.hi);
    }
  }
  double t = t0;
  const double settle = 24.0 / std::min(p.total_width_1(), p.total_width_2());
  const bool until_steady = (opt.t_end == 0.0);
  double t_end = until_steady ? horizon + settle : opt.t_end;
  if (!(t_end > t0)) t_end = t0 + settle;

  const Structure& st = structure();
  auto as_rho = [&]() {
    return Mat20(Eigen::Map<const Mat20>(v.data()));
  };
  auto sample = [&](const Mat20& rho) {
    res.trajectory.push_back({t, molecule_populations(rho),
                              diag_expect(st.n1d, rho), diag_expect(st.n2d, rho)});
    if (opt.keep_states) res.states.push_back(rho);
    const Complex tr = rho.trace();
    double range_err = 0.0;
    for (int j = 0; j < 20; ++j) {
      const double d = rho(j, j).real();
      range_err = std::max(range_err, std::max(-d, d - 1.0));
    }
    if (std::abs(tr.real() - 1.0) + std::abs(tr.imag()) > 1e-4 ||
        range_err > 1e-4)
      throw std::runtime_error("integrator unstable, reduce dt");
  };

  sample(as_rho());
  for (int chunk = 0; chunk < 64; ++chunk) {
    const auto steps = segment_steps({&pulse_alpha, &pulse_beta}, t, t_end, dt);
    int i = 0;
    for (const Step& s : steps) {
      const double h = s.h;
      const Complex ga0 = pulse_alpha.coupling_in_segment(s.t, s.a, s.b);
      const Complex gb0 = pulse_beta.coupling_in_segment(s.t, s.a, s.b);
      const Complex gam = pulse_alpha.coupling_in_segment(s.t + 0.5 * h, s.a, s.b);
      const Complex gbm = pulse_beta.coupling_in_segment(s.t + 0.5 * h, s.a, s.b);
      const Complex ga1 = pulse_alpha.coupling_in_segment(s.t + h, s.a, s.b);
      const Complex gb1 = pulse_beta.coupling_in_segment(s.t + h, s.a, s.b);

      const Eigen::VectorXcd k1 = deriv(v, ga0, gb0);
      const Eigen::VectorXcd v1 = v + 0.5 * h * k1;
      const Eigen::VectorXcd k2 = deriv(v1, gam, gbm);
      const Eigen::VectorXcd v2 = v + 0.5 * h * k2;
      const Eigen::VectorXcd k3 = deriv(v2, gam, gbm);
      const Eigen::VectorXcd v3 = v + h * k3;
      const Eigen::VectorXcd k4 = deriv(v3, ga1, gb1);

      const auto f1 = flux_rates(Eigen::Map<const Mat20>(v.data()), ga0, gb0, p);
      const auto f2 = flux_rates(Eigen::Map<const Mat20>(v1.data()), gam, gbm, p);
      const auto f3 = flux_rates(Eigen::Map<const Mat20>(v2.data()), gam, gbm, p);
      const auto f4 = flux_rates(Eigen::Map<const Mat20>(v3.data()), ga1, gb1, p);

      v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      t = s.t + h;
      double* acc[4] = {&res.flux.out1, &res.flux.shelf1, &res.flux.out2,
                        &res.flux.shelf2};
      for (int q = 0; q < 4; ++q)
        *acc[q] += (h / 6.0) * (f1[q] + 2.0 * f2[q] + 2.0 * f3[q] + f4[q]);
      if (++i % opt.sample_stride == 0 || &s == &steps.back()) sample(as_rho());
    }
    if (!until_steady || lio_steady(as_rho(), t, pulse_alpha, pulse_beta)) break;
    t_end += settle;
  }
  res.final_rho = as_rho();
  res.steady = lio_steady(res.final_rho, t, pulse_alpha, pulse_beta);
  return res;
}

}  // namespace tpdsim
