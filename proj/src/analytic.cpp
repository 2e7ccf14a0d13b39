#include "tpdsim/analytic.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tpdsim/integrator.hpp"

namespace tpdsim {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

SpectralGrid SpectralGrid::for_problem(const MoleculeParams& p,
                                       const std::vector<const Pulse*>& pulses,
                                       double t_shift) {
  p.validate();
  double fast = std::max(p.total_width_1(), p.total_width_2());
  double slow = std::min(p.total_width_1(), p.total_width_2());
  for (const Pulse* q : pulses) {
    if (q->support().empty()) continue;
    const double r = q->rate_scale();
    if (r > 0.0) {
      fast = std::max(fast, r);
      slow = std::min(slow, r);
    }
  }
  double span = 40.0 * fast;

  // Widen until the pulse spectra peak well inside the window and are
  // negligible at its edges (guards against large detunings).
  auto spectra_at = [&](double w) {
    double v = 0.0;
    for (const Pulse* q : pulses)
      if (!q->support().empty()) v += std::norm(q->spectrum(w));
    return v;
  };
  for (int tries = 0; tries < 8; ++tries) {
    double best = 0.0, bestw = 0.0;
    for (int i = 0; i <= 400; ++i) {
      const double w = -span + i * span / 200.0;
      const double v = spectra_at(w);
      if (v > best) {
        best = v;
        bestw = w;
      }
    }
    if (best == 0.0) break;
    if (std::abs(bestw) <= 0.5 * span &&
        spectra_at(span) + spectra_at(-span) <= 1e-3 * best)
      break;
    span *= 2.0;
  }

  double dw = slow / 40.0;
  dw = std::min(dw, 0.5 / std::max(1.0, std::abs(t_shift)));
  int half = static_cast<int>(std::ceil(span / dw));
  half = std::min(half, 1 << 21);
  SpectralGrid g;
  g.n = 2 * half + 1;
  g.dw = span / half;
  return g;
}

Complex transmission1(double w, const MoleculeParams& p) {
  return std::sqrt(p.gamma1 * p.gamma2) /
         Complex(0.5 * (p.gamma1 + p.gamma2), -w);
}

Complex transmission2(double w, const MoleculeParams& p) {
  return std::sqrt(p.gamma3 * p.gamma4) /
         Complex(0.5 * (p.gamma3 + p.gamma4), -w);
}

namespace {

double filtered_norm(const Pulse& pulse, const MoleculeParams& p,
                     Complex (*filter)(double, const MoleculeParams&)) {
  const SpectralGrid g = SpectralGrid::for_problem(p, {&pulse});
  double sum = 0.0;
  for (int j = 0; j < g.n; ++j) {
    const double w = g.w(j);
    sum += std::norm(filter(w, p)) * std::norm(pulse.spectrum(w));
  }
  return sum * g.dw;
}

}  // namespace

double p_alpha(const Pulse& pulse, const MoleculeParams& p) {
  return filtered_norm(pulse, p, &transmission1);
}

double p_beta(const Pulse& pulse, const MoleculeParams& p) {
  return filtered_norm(pulse, p, &transmission2);
}

double p_alpha_exponential(double kappa, const MoleculeParams& p) {
  return 4.0 * p.gamma1 * p.gamma2 /
         ((p.gamma1 + p.gamma2) * (kappa + p.gamma1 + p.gamma2));
}

std::vector<Complex> correlate_lags(const std::vector<Complex>& a,
                                    const std::vector<Complex>& b, double dw) {
  const int n = static_cast<int>(a.size());
  int nfft = 1;
  while (nfft < 2 * n - 1) nfft <<= 1;
  std::vector<Complex> fa(nfft, Complex(0.0)), fb(nfft, Complex(0.0));
  std::copy(a.begin(), a.end(), fa.begin());
  for (int i = 0; i < n; ++i) fb[i] = b[n - 1 - i];
  Eigen::FFT<double> fft;
  std::vector<Complex> sa, sb;
  fft.fwd(sa, fa);
  fft.fwd(sb, fb);
  for (int i = 0; i < nfft; ++i) sa[i] *= sb[i];
  std::vector<Complex> conv;
  fft.inv(conv, sa);
  std::vector<Complex> c(2 * n - 1);
  for (int s = 0; s < 2 * n - 1; ++s) c[s] = conv[s] * dw;
  return c;
}

LagFunction f1_spectrum(const Pulse& pulse_alpha, const MoleculeParams& p,
                        const SpectralGrid& grid) {
  std::vector<Complex> h(grid.n), hc(grid.n);
  for (int j = 0; j < grid.n; ++j) {
    const double w = grid.w(j);
    h[j] = transmission1(w, p) * pulse_alpha.spectrum(w);
    hc[j] = std::conj(h[j]);
  }
  LagFunction f;
  f.m = grid.n - 1;
  f.dx = grid.dw;
  f.v = correlate_lags(h, hc, grid.dw);
  const double scale = 1.0 / std::sqrt(kTwoPi);
  for (Complex& z : f.v) z *= scale;
  return f;
}

Complex f1_time_domain(const Pulse& pulse_alpha, const MoleculeParams& p,
                       double x) {
  p.validate();
  const double hw1 = 0.5 * p.total_width_1();
  double t0 = 0.0, hi = 0.0;
  const Support sup = pulse_alpha.support();
  if (!sup.empty()) {
    t0 = std::min(t0, sup.lo);
    hi = std::max(hi, sup.hi);
  }
  const double t_end = hi + 36.0 / p.total_width_1();
  const double dt = default_time_step(p.max_rate(), {&pulse_alpha});
  const double c = p.gamma1 * p.gamma2 / std::sqrt(kTwoPi);

  Complex m = 0.0, acc = 0.0;
  auto rhs = [&](Complex mm, Complex u, double t) {
    return std::make_pair(-hw1 * mm + u,
                          c * std::norm(mm) * std::polar(1.0, x * t));
  };
  for (const Step& s : segment_steps({&pulse_alpha}, t0, t_end, dt)) {
    const double h = s.h;
    const Complex u0 = pulse_alpha.amplitude_in_segment(s.t, s.a, s.b);
    const Complex um = pulse_alpha.amplitude_in_segment(s.t + 0.5 * h, s.a, s.b);
    const Complex u1 = pulse_alpha.amplitude_in_segment(s.t + h, s.a, s.b);
    const auto k1 = rhs(m, u0, s.t);
    const auto k2 = rhs(m + 0.5 * h * k1.first, um, s.t + 0.5 * h);
    const auto k3 = rhs(m + 0.5 * h * k2.first, um, s.t + 0.5 * h);
    const auto k4 = rhs(m + h * k3.first, u1, s.t + h);
    m += (h / 6.0) * (k1.first + 2.0 * k2.first + 2.0 * k3.first + k4.first);
    acc += (h / 6.0) *
           (k1.second + 2.0 * k2.second + 2.0 * k3.second + k4.second);
  }
  return acc;
}

LagFunction g_kernel(const Pulse& pulse_beta, const MoleculeParams& p,
                     const SpectralGrid& grid) {
  std::vector<Complex> a(grid.n), b(grid.n);
  for (int j = 0; j < grid.n; ++j) {
    const double w = grid.w(j);
    const Complex u = pulse_beta.spectrum(w);
    a[j] = std::conj(u) * transmission2(w, p);
    b[j] = u;
  }
  LagFunction g;
  g.m = grid.n - 1;
  g.dx = grid.dw;
  g.v = correlate_lags(a, b, grid.dw);
  return g;
}

namespace {

// Regularized principal-value pairing of the two lag kernels; eps sweeps
// geometrically down from dx until the value settles.
double cross_term(const Pulse& pa, const Pulse& pb, const MoleculeParams& p,
                  const SpectralGrid& grid) {
  const LagFunction f1 = f1_spectrum(pa, p, grid);
  const LagFunction g = g_kernel(pb, p, grid);
  const double c =
      std::sqrt(p.gamma3 * p.gamma4) / (std::sqrt(kTwoPi) * (p.gamma3 + p.gamma4));
  const double dx = grid.dw;
  const int m = f1.m;

  auto value = [&](double eps) {
    Complex acc = 0.0;
    for (int k = -m; k <= m; ++k) {
      const double x = k * dx;
      acc += f1.at(k) * g.at(k) * (x / (x * x + eps * eps));
    }
    acc *= dx;
    return c * 2.0 * (Complex(0.0, -1.0) * acc).real();
  };

  double eps = dx;
  double prev = value(eps);
  for (int i = 0; i < 48; ++i) {
    eps *= 0.5;
    const double cur = value(eps);
    if (std::abs(cur - prev) < 1e-5) return cur;
    prev = cur;
  }
  throw std::runtime_error("principal value not converged");
}

}  // namespace

double p_ab(const Pulse& pulse_alpha, const Pulse& pulse_beta,
            const MoleculeParams& p) {
  p.validate();
  double t_shift = 0.0;
  for (const Pulse* q : {&pulse_alpha, &pulse_beta}) {
    const Support sup = q->support();
    if (!sup.empty())
      t_shift = std::max({t_shift, std::abs(sup.lo), std::abs(sup.hi)});
  }
  const SpectralGrid coarse =
      SpectralGrid::for_problem(p, {&pulse_alpha, &pulse_beta}, t_shift);
  SpectralGrid fine;
  fine.dw = 0.5 * coarse.dw;
  fine.n = 2 * coarse.n - 1;
  const double v1 = cross_term(pulse_alpha, pulse_beta, p, coarse);
  const double v2 = cross_term(pulse_alpha, pulse_beta, p, fine);
  return 2.0 * v2 - v1;
}

OverlapResult p_overlap(const Pulse& pulse_alpha, const Pulse& pulse_beta,
                        const MoleculeParams& p) {
  OverlapResult r;
  r.pa = p_alpha(pulse_alpha, p);
  r.pb = p_beta(pulse_beta, p);
  r.pab = p_ab(pulse_alpha, pulse_beta, p);
  r.overlap = 0.5 * r.pa * r.pb + r.pab;
  r.rho2424 = r.pa * r.pb - r.overlap;
  return r;
}

namespace {

// Five-component nested quadrature: first-chain dipole m feeds the shelf R,
// which drives the second chain (v, q) into the final shelf F4.
struct ChainState {
  Complex m{0.0}, v{0.0};
  double r = 0.0, q = 0.0, f4 = 0.0;
};

ChainState chain_rhs(const ChainState& s, Complex ua, Complex ub,
                     const MoleculeParams& p) {
  ChainState d;
  const double hw1 = 0.5 * p.total_width_1();
  const double hw2 = 0.5 * p.total_width_2();
  d.m = -hw1 * s.m + ua;
  d.r = p.gamma1 * p.gamma2 * std::norm(s.m);
  d.v = -hw2 * s.v + ub * s.r;
  d.q = -2.0 * hw2 * s.q + 2.0 * (std::conj(ub) * s.v).real();
  d.f4 = p.gamma3 * p.gamma4 * s.q;
  return d;
}

ChainState advanced(const ChainState& s, double h, const ChainState& k) {
  ChainState o;
  o.m = s.m + h * k.m;
  o.v = s.v + h * k.v;
  o.r = s.r + h * k.r;
  o.q = s.q + h * k.q;
  o.f4 = s.f4 + h * k.f4;
  return o;
}

}  // namespace

QuadratureResult two_photon_quadrature(const Pulse& pulse_alpha,
                                       const Pulse& pulse_beta,
                                       const MoleculeParams& p, double t_end,
                                       double dt, bool want_trajectory) {
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
  const double settle =
      24.0 / std::min(p.total_width_1(), p.total_width_2());
  const bool until_steady = (t_end == 0.0);
  double stop = until_steady ? horizon + settle : t_end;

  QuadratureResult res;
  ChainState s;
  double t = t0;
  if (stop <= t0) {
    res.trajectory.push_back({t0, 0.0, 0.0});
    return res;
  }
  if (want_trajectory) res.trajectory.push_back({t, s.r, s.f4});

  for (int chunk = 0; chunk < 64; ++chunk) {
    const auto steps = segment_steps({&pulse_alpha, &pulse_beta}, t, stop, dt);
    int i = 0;
    for (const Step& st : steps) {
      const double h = st.h;
      const Complex ua0 = pulse_alpha.amplitude_in_segment(st.t, st.a, st.b);
      const Complex ub0 = pulse_beta.amplitude_in_segment(st.t, st.a, st.b);
      const Complex uam =
          pulse_alpha.amplitude_in_segment(st.t + 0.5 * h, st.a, st.b);
      const Complex ubm =
          pulse_beta.amplitude_in_segment(st.t + 0.5 * h, st.a, st.b);
      const Complex ua1 = pulse_alpha.amplitude_in_segment(st.t + h, st.a, st.b);
      const Complex ub1 = pulse_beta.amplitude_in_segment(st.t + h, st.a, st.b);

      const ChainState k1 = chain_rhs(s, ua0, ub0, p);
      const ChainState k2 = chain_rhs(advanced(s, 0.5 * h, k1), uam, ubm, p);
      const ChainState k3 = chain_rhs(advanced(s, 0.5 * h, k2), uam, ubm, p);
      const ChainState k4 = chain_rhs(advanced(s, h, k3), ua1, ub1, p);
      s.m += (h / 6.0) * (k1.m + 2.0 * k2.m + 2.0 * k3.m + k4.m);
      s.v += (h / 6.0) * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v);
      s.r += (h / 6.0) * (k1.r + 2.0 * k2.r + 2.0 * k3.r + k4.r);
      s.q += (h / 6.0) * (k1.q + 2.0 * k2.q + 2.0 * k3.q + k4.q);
      s.f4 += (h / 6.0) * (k1.f4 + 2.0 * k2.f4 + 2.0 * k3.f4 + k4.f4);
      t = st.t + h;
      if (want_trajectory && (++i % 8 == 0 || &st == &steps.back()))
        res.trajectory.push_back({t, s.r, s.f4});
    }
    if (!until_steady) break;
    if (t >= horizon && std::norm(s.m) < 1e-14 && std::abs(s.q) < 1e-14) break;
    stop += settle;
  }
  // Both quantities are probabilities; leaving [0, 1] flags a blown-up step.
  if (s.r < -1e-6 || s.r > 1.0 + 1e-6 || s.f4 < -1e-6 || s.f4 > 1.0 + 1e-6)
    throw std::runtime_error("integrator unstable, reduce dt");
  res.r_final = s.r;
  res.f4_final = s.f4;
  return res;
}

double rho_a2a2_quadrature(const Pulse& pulse_alpha, const MoleculeParams& p,
                           double t) {
  NullPulse none;
  return two_photon_quadrature(pulse_alpha, none, p, t).r_final;
}

double rho_2424_quadrature(const Pulse& pulse_alpha, const Pulse& pulse_beta,
                           const MoleculeParams& p, double t) {
  return two_photon_quadrature(pulse_alpha, pulse_beta, p, t).f4_final;
}

}  // namespace tpdsim
