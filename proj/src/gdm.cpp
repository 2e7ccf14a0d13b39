#include "tpdsim/gdm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tpdsim {

const std::array<const char*, kGdmLabels> kGdmLabelNames = {
    "(2,2)", "(a,2)", "(b,2)", "(a,a)", "(b,b)",
    "(a,b)", "(0,2)", "(0,a)", "(0,b)", "(0,0)"};

GdmState gdm_initial_state() {
  GdmState s;
  for (auto& m : s.block) m = Mat5::Zero();
  const Mat5 ground = transition_operator(F0, F0);
  s.block[kTwoTwo] = ground;
  s.block[kAlphaAlpha] = ground;
  s.block[kBetaBeta] = ground;
  s.block[kVacVac] = ground;
  s.time = 0.0;
  return s;
}

void gdm_rhs(const GdmState& s, Complex ua, Complex ub,
             const MoleculeParams& p, GdmState* out) {
  const Mat5 l1 = std::sqrt(p.gamma1) * transition_operator(F1, F0);
  const Mat5 l2 = std::sqrt(p.gamma3) * transition_operator(F3, F2);
  const Mat5 l1d = l1.adjoint();
  const Mat5 l2d = l2.adjoint();
  const Complex cua = std::conj(ua), cub = std::conj(ub);

  const Mat5& r22 = s.block[kTwoTwo];
  const Mat5& ra2 = s.block[kAlphaTwo];
  const Mat5& rb2 = s.block[kBetaTwo];
  const Mat5& raa = s.block[kAlphaAlpha];
  const Mat5& rbb = s.block[kBetaBeta];
  const Mat5& rab = s.block[kAlphaBeta];
  const Mat5& r02 = s.block[kVacTwo];
  const Mat5& r0a = s.block[kVacAlpha];
  const Mat5& r0b = s.block[kVacBeta];
  const Mat5& r00 = s.block[kVacVac];

  const Mat5 feed = ua * commutator(rb2, l1d) + ub * commutator(ra2, l2d);

  out->block[kTwoTwo] = molecular_dissipator(r22, p) + feed + feed.adjoint();
  out->block[kAlphaTwo] = molecular_dissipator(ra2, p) +
                          ua * commutator(r02, l1d) +
                          cua * commutator(l1, rab) +
                          cub * commutator(l2, raa);
  out->block[kBetaTwo] = molecular_dissipator(rb2, p) +
                         ub * commutator(r02, l2d) +
                         cua * commutator(l1, rbb) +
                         cub * commutator(l2, Mat5(rab.adjoint()));
  out->block[kAlphaAlpha] = molecular_dissipator(raa, p) +
                            ua * commutator(r0a, l1d) +
                            cua * commutator(l1, Mat5(r0a.adjoint()));
  out->block[kBetaBeta] = molecular_dissipator(rbb, p) +
                          ub * commutator(r0b, l2d) +
                          cub * commutator(l2, Mat5(r0b.adjoint()));
  out->block[kAlphaBeta] = molecular_dissipator(rab, p) +
                           ua * commutator(r0b, l1d) +
                           cub * commutator(l2, Mat5(r0a.adjoint()));
  out->block[kVacTwo] = molecular_dissipator(r02, p) +
                        cua * commutator(l1, r0b) +
                        cub * commutator(l2, r0a);
  out->block[kVacAlpha] = molecular_dissipator(r0a, p) +
                          cua * commutator(l1, r00);
  out->block[kVacBeta] = molecular_dissipator(r0b, p) +
                         cub * commutator(l2, r00);
  out->block[kVacVac] = molecular_dissipator(r00, p);
}

std::array<double, 5> populations(const Mat5& block) {
  std::array<double, 5> pops;
  for (int k = 0; k < 5; ++k)
    pops[k] = std::clamp(block(k, k).real(), -1e-8, 1.0 + 1e-8);
  return pops;
}

bool gdm_steady(const GdmState& s, const Pulse& a, const Pulse& b) {
  const auto pops = populations(s.block[kTwoTwo]);
  if (pops[F1] >= 1e-8 || pops[F3] >= 1e-8) return false;
  for (const Pulse* p : {&a, &b}) {
    const Support sup = p->support();
    if (sup.empty()) continue;
    if (s.time < sup.hi - 1e-12) return false;
  }
  return true;
}

namespace {

void rk4_gdm_step(GdmState& s, const Step& st, const Pulse& pa,
                  const Pulse& pb, const MoleculeParams& p, GdmState* k1,
                  GdmState* k2, GdmState* k3, GdmState* k4, GdmState* tmp) {
  const double h = st.h;
  const Complex ua0 = pa.amplitude_in_segment(st.t, st.a, st.b);
  const Complex ub0 = pb.amplitude_in_segment(st.t, st.a, st.b);
  const Complex uam = pa.amplitude_in_segment(st.t + 0.5 * h, st.a, st.b);
  const Complex ubm = pb.amplitude_in_segment(st.t + 0.5 * h, st.a, st.b);
  const Complex ua1 = pa.amplitude_in_segment(st.t + h, st.a, st.b);
  const Complex ub1 = pb.amplitude_in_segment(st.t + h, st.a, st.b);

  gdm_rhs(s, ua0, ub0, p, k1);
  for (int i = 0; i < kGdmLabels; ++i)
    tmp->block[i] = s.block[i] + 0.5 * h * k1->block[i];
  gdm_rhs(*tmp, uam, ubm, p, k2);
  for (int i = 0; i < kGdmLabels; ++i)
    tmp->block[i] = s.block[i] + 0.5 * h * k2->block[i];
  gdm_rhs(*tmp, uam, ubm, p, k3);
  for (int i = 0; i < kGdmLabels; ++i)
    tmp->block[i] = s.block[i] + h * k3->block[i];
  gdm_rhs(*tmp, ua1, ub1, p, k4);
  for (int i = 0; i < kGdmLabels; ++i)
    s.block[i] += (h / 6.0) * (k1->block[i] + 2.0 * k2->block[i] +
                               2.0 * k3->block[i] + k4->block[i]);
  s.time = st.t + h;
}

GdmResult integrate_once(const Pulse& pa, const Pulse& pb,
                         const MoleculeParams& p, const GdmOptions& opt,
                         double dt) {
  GdmResult res;
  res.dt_used = dt;
  GdmState s = gdm_initial_state();
  GdmState k1, k2, k3, k4, tmp;

  double t0 = 0.0;
  double horizon = 0.0;
  for (const Pulse* q : {&pa, &pb}) {
    const Support sup = q->support();
    if (!sup.empty()) {
      t0 = std::min(t0, sup.lo);
      horizon = std::max(horizon, sup.hi);
    }
  }
  s.time = t0;
  const double settle =
      24.0 / std::min(p.total_width_1(), p.total_width_2());
  const bool until_steady = (opt.t_end == 0.0);
  double t_end = until_steady ? horizon + settle : opt.t_end;
  if (!(t_end > t0)) t_end = t0 + settle;

  auto sample = [&](const GdmState& st) {
    const Mat5& phys = st.block[kTwoTwo];
    res.trajectory.push_back({st.time, populations(phys),
                              phys(F0, F1), phys(F2, F3)});
    if (opt.keep_states) res.states.push_back(st);
    double range_err = 0.0;
    for (int k = 0; k < 5; ++k) {
      const double v = phys(k, k).real();
      range_err = std::max(range_err, std::max(-v, v - 1.0));
    }
    const double trace_err = std::abs(phys.trace().real() - 1.0) +
                             std::abs(phys.trace().imag());
    if (trace_err > 1e-4 || range_err > 1e-4)
      throw std::runtime_error("integrator unstable, reduce dt");
  };

  sample(s);
  for (int chunk = 0; chunk < 64; ++chunk) {
    const auto steps = segment_steps({&pa, &pb}, s.time, t_end, dt);
    int i = 0;
    for (const Step& st : steps) {
      rk4_gdm_step(s, st, pa, pb, p, &k1, &k2, &k3, &k4, &tmp);
      if (++i % opt.sample_stride == 0 || &st == &steps.back()) sample(s);
    }
    if (!until_steady || gdm_steady(s, pa, pb)) break;
    t_end += settle;
  }
  res.steady = gdm_steady(s, pa, pb);
  res.final_state = s;
  return res;
}

}  // namespace

GdmResult gdm_integrate(const Pulse& pa, const Pulse& pb,
                        const MoleculeParams& p, const GdmOptions& opt) {
  p.validate();
  double dt = opt.dt > 0.0 ? opt.dt
                           : default_time_step(p.max_rate(), {&pa, &pb});
  GdmResult res = integrate_once(pa, pb, p, opt, dt);
  if (!opt.adaptive) return res;

  for (int i = 0; i < 10; ++i) {
    GdmResult finer = integrate_once(pa, pb, p, opt, dt / 2.0);
    const auto a = populations(res.final_state.block[kTwoTwo]);
    const auto b = populations(finer.final_state.block[kTwoTwo]);
    double diff = 0.0;
    for (int k = 0; k < 5; ++k) diff = std::max(diff, std::abs(a[k] - b[k]));
    dt /= 2.0;
    res = std::move(finer);
    if (diff < 1e-6) return res;
  }
  throw std::runtime_error("integrator did not converge under refinement");
}

}  // namespace tpdsim
