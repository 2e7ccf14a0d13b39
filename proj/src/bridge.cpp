#include "tpdsim/bridge.hpp"

#include <algorithm>
#include <cmath>

namespace tpdsim {

namespace {

// Cavity sectors of the 20-dim basis, keyed by how many photons each chain
// has already released: both absorbed -> rows 0..4, alpha absorbed -> 5..9,
// beta absorbed -> 10..14, none absorbed (both cavities loaded) -> 15..19.
constexpr int kSecTwo = 0, kSecAlpha = 5, kSecBeta = 10, kSecVac = 15;

struct SectorPair {
  int ket, bra;
};

constexpr std::array<SectorPair, kGdmLabels> kSectors = {{
    {kSecTwo, kSecTwo},      // (2,2)
    {kSecAlpha, kSecTwo},    // (a,2)
    {kSecBeta, kSecTwo},     // (b,2)
    {kSecAlpha, kSecAlpha},  // (a,a)
    {kSecBeta, kSecBeta},    // (b,b)
    {kSecAlpha, kSecBeta},   // (a,b)
    {kSecVac, kSecTwo},      // (0,2)
    {kSecVac, kSecAlpha},    // (0,a)
    {kSecVac, kSecBeta},     // (0,b)
    {kSecVac, kSecVac},      // (0,0)
}};

Mat20 cascade_initial_rho() {
  Mat20 rho = Mat20::Zero();
  rho(lio_index(1, 1, F0), lio_index(1, 1, F0)) = 1.0;
  return rho;
}

bool unit_diagonal_traces(const GdmState& s) {
  for (GdmLabel l : {kTwoTwo, kAlphaAlpha, kBetaBeta, kVacVac}) {
    const Complex tr = s.block[l].trace();
    if (std::abs(tr.real() - 1.0) + std::abs(tr.imag()) > 1e-9) return false;
  }
  return true;
}

}  // namespace

TildeCoefficients extract_tilde(const Mat20& rho, double l1, double l2,
                                double time) {
  TildeCoefficients c;
  c.l1 = l1;
  c.l2 = l2;
  c.time = time;
  for (int l = 0; l < kGdmLabels; ++l)
    c.block[l] = rho.block<5, 5>(kSectors[l].ket, kSectors[l].bra);
  return c;
}

GdmState tilde_to_gdm(const TildeCoefficients& c, Rho22Variant variant) {
  const double e1 = std::exp(c.l1), e2 = std::exp(c.l2);
  const double h1 = std::exp(0.5 * c.l1), h2 = std::exp(0.5 * c.l2);
  const auto& t = c.block;
  GdmState s;
  s.time = c.time;
  s.block[kVacVac] = t[kVacVac] * (e1 * e2);
  s.block[kAlphaAlpha] = (t[kAlphaAlpha] + t[kVacVac]) * e2;
  s.block[kBetaBeta] = (t[kBetaBeta] + t[kVacVac]) * e1;
  s.block[kTwoTwo] = t[kTwoTwo] + t[kAlphaAlpha] + t[kBetaBeta];
  if (variant == Rho22Variant::kWithVacuum) s.block[kTwoTwo] += t[kVacVac];
  s.block[kVacAlpha] = t[kVacAlpha] * (h1 * e2);
  s.block[kBetaTwo] = (t[kBetaTwo] + t[kVacAlpha]) * h1;
  s.block[kVacBeta] = t[kVacBeta] * (e1 * h2);
  s.block[kAlphaTwo] = (t[kAlphaTwo] + t[kVacBeta]) * h2;
  s.block[kAlphaBeta] = t[kAlphaBeta] * (h1 * h2);
  s.block[kVacTwo] = t[kVacTwo] * (h1 * h2);
  return s;
}

Rho22Variant select_rho22_variant() {
  const TildeCoefficients c = extract_tilde(cascade_initial_rho(), 0.0, 0.0, 0.0);
  for (Rho22Variant v : {Rho22Variant::kWithVacuum, Rho22Variant::kAsWritten}) {
    if (unit_diagonal_traces(tilde_to_gdm(c, v))) return v;
  }
  return Rho22Variant::kWithVacuum;
}

namespace {

void gdm_step(GdmState& s, const Step& st, const Pulse& pa, const Pulse& pb,
              const MoleculeParams& p) {
  const double h = st.h;
  const Complex ua0 = pa.amplitude_in_segment(st.t, st.a, st.b);
  const Complex ub0 = pb.amplitude_in_segment(st.t, st.a, st.b);
  const Complex uam = pa.amplitude_in_segment(st.t + 0.5 * h, st.a, st.b);
  const Complex ubm = pb.amplitude_in_segment(st.t + 0.5 * h, st.a, st.b);
  const Complex ua1 = pa.amplitude_in_segment(st.t + h, st.a, st.b);
  const Complex ub1 = pb.amplitude_in_segment(st.t + h, st.a, st.b);
  GdmState k1, k2, k3, k4, tmp;
  gdm_rhs(s, ua0, ub0, p, &k1);
  for (int i = 0; i < kGdmLabels; ++i)
    tmp.block[i] = s.block[i] + 0.5 * h * k1.block[i];
  gdm_rhs(tmp, uam, ubm, p, &k2);
  for (int i = 0; i < kGdmLabels; ++i)
    tmp.block[i] = s.block[i] + 0.5 * h * k2.block[i];
  gdm_rhs(tmp, uam, ubm, p, &k3);
  for (int i = 0; i < kGdmLabels; ++i)
    tmp.block[i] = s.block[i] + h * k3.block[i];
  gdm_rhs(tmp, ua1, ub1, p, &k4);
  for (int i = 0; i < kGdmLabels; ++i)
    s.block[i] += (h / 6.0) * (k1.block[i] + 2.0 * k2.block[i] +
                               2.0 * k3.block[i] + k4.block[i]);
  s.time = st.t + h;
}

void lio_step(Mat20& rho, const Step& st, const Pulse& pa, const Pulse& pb,
              const MoleculeParams& p) {
  const double h = st.h;
  const Complex ga0 = pa.coupling_in_segment(st.t, st.a, st.b);
  const Complex gb0 = pb.coupling_in_segment(st.t, st.a, st.b);
  const Complex gam = pa.coupling_in_segment(st.t + 0.5 * h, st.a, st.b);
  const Complex gbm = pb.coupling_in_segment(st.t + 0.5 * h, st.a, st.b);
  const Complex ga1 = pa.coupling_in_segment(st.t + h, st.a, st.b);
  const Complex gb1 = pb.coupling_in_segment(st.t + h, st.a, st.b);
  Mat20 k1, k2, k3, k4, tmp;
  master_rhs(rho, ga0, gb0, p, &k1);
  tmp = rho + 0.5 * h * k1;
  master_rhs(tmp, gam, gbm, p, &k2);
  tmp = rho + 0.5 * h * k2;
  master_rhs(tmp, gam, gbm, p, &k3);
  tmp = rho + h * k3;
  master_rhs(tmp, ga1, gb1, p, &k4);
  rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

EquivalenceReport run_equivalence(const Pulse& pulse_alpha,
                                  const Pulse& pulse_beta,
                                  const MoleculeParams& p, double t_end,
                                  double dt, int num_samples) {
  p.validate();
  if (dt <= 0.0)
    dt = default_time_step(p.max_rate(), {&pulse_alpha, &pulse_beta});

  double t0 = 0.0, horizon = 0.0;
  for (const Pulse* q : {&pulse_alpha, &pulse_beta}) {
    const Support sup = q->support();
    if (!sup.empty()) {
      t0 = std::min(t0, sup.lo);
      horizon = std::max(horizon, sup.hi);
    }
  }
  if (t_end <= t0)
    t_end = horizon + 24.0 / std::min(p.total_width_1(), p.total_width_2());

  EquivalenceReport rep;
  rep.variant_used = select_rho22_variant();

  GdmState s = gdm_initial_state();
  s.time = t0;
  Mat20 rho = cascade_initial_rho();

  auto compare = [&](double t) {
    const double l1 = pulse_alpha.coupling_norm_integral(t);
    const double l2 = pulse_beta.coupling_norm_integral(t);
    const GdmState mapped =
        tilde_to_gdm(extract_tilde(rho, l1, l2, t), rep.variant_used);
    for (int l = 0; l < kGdmLabels; ++l) {
      const double diff =
          (mapped.block[l] - s.block[l]).cwiseAbs().maxCoeff();
      rep.per_label_max[l] = std::max(rep.per_label_max[l], diff);
      if (diff > rep.worst) {
        rep.worst = diff;
        rep.worst_label = kGdmLabelNames[l];
        rep.worst_time = t;
      }
    }
    ++rep.samples;
  };

  rep.trace_check_passed = unit_diagonal_traces(
      tilde_to_gdm(extract_tilde(rho, 0.0, 0.0, t0), rep.variant_used));

  const auto steps = segment_steps({&pulse_alpha, &pulse_beta}, t0, t_end, dt);
  const std::size_t stride =
      std::max<std::size_t>(1, steps.size() / std::max(1, num_samples));
  compare(t0);
  for (std::size_t i = 0; i < steps.size(); ++i) {
    gdm_step(s, steps[i], pulse_alpha, pulse_beta, p);
    lio_step(rho, steps[i], pulse_alpha, pulse_beta, p);
    if ((i + 1) % stride == 0 || i + 1 == steps.size())
      compare(steps[i].t + steps[i].h);
  }
  return rep;
}

}  // namespace tpdsim
