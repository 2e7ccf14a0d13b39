#pragma once

#include <memory>
#include <string>
#include <vector>

#include "tpdsim/common.hpp"

namespace tpdsim {

struct Support {
  double lo = 0.0;
  double hi = 0.0;
  bool empty() const { return !(hi > lo); }
};

// Normalized single-photon temporal envelope u(t) with int |u|^2 dt = 1
// (up to the truncation tail kNormTruncation). Detunings from the
// rotating-frame carrier appear as envelope phases e^{-i delta (t - t_ref)}.
//
// The envelope also defines the virtual-cavity out-coupling
//   g(t) = u*(t) / sqrt(1 - C(t)),   C(t) = int_{-inf}^t |u|^2,
// which synthesizes the traveling pulse from a leaky mode initialized with
// one photon. The denominator is floored at kNormTruncation so g stays
// continuous up to the support edge (an exponential pulse has g = sqrt(kappa)
// exactly, including at the edge).
class Pulse {
 public:
  virtual ~Pulse() = default;

  // u(t): zero outside the support window.
  Complex amplitude(double t) const;

  // Envelope formula without the window test; valid only inside the support.
  // Integrators call this at Runge-Kutta stage times of segments that lie
  // wholly inside the support, so that a stage landing exactly on a support
  // edge gets the correct one-sided limit.
  virtual Complex amplitude_smooth(double t) const = 0;

  // C(t) = cumulative norm, clipped to [0, 1 - kNormTruncation].
  virtual double cumulative_norm(double t) const = 0;

  virtual Support support() const = 0;

  // Spectral amplitude u(w) = (2 pi)^{-1/2} int u(t) e^{i w t} dt.
  virtual Complex spectrum(double w) const = 0;

  // Characteristic bandwidth used by default-step heuristics
  // (kappa for exponential, 1/sigma for Gaussian).
  virtual double rate_scale() const = 0;

  virtual std::unique_ptr<Pulse> clone() const = 0;

  // g(t), windowed to the support.
  Complex coupling(double t) const;
  // g at a stage time of a segment [a, b] (see amplitude_smooth).
  Complex coupling_in_segment(double t, double a, double b) const;
  Complex amplitude_in_segment(double t, double a, double b) const;

  // int_{t0}^t |g|^2 dt' = -ln(1 - C(t)), frozen at -ln(kNormTruncation)
  // once the pulse is exhausted.
  double coupling_norm_integral(double t) const;

  // Set when a tabulated envelope reached saturation (cumulative norm
  // 1 - kNormTruncation) before its sample grid ended; the support is then
  // truncated at the saturation time and the coupling stays floored.
  bool emission_saturated() const { return emission_saturated_; }

 protected:
  bool emission_saturated_ = false;
};

// u(t) = sqrt(kappa) e^{-kappa (t - onset)/2} Theta(t - onset).
class ExponentialPulse final : public Pulse {
 public:
  explicit ExponentialPulse(double kappa, double onset = 0.0,
                            double detuning = 0.0);
  Complex amplitude_smooth(double t) const override;
  double cumulative_norm(double t) const override;
  Support support() const override;
  Complex spectrum(double w) const override;
  double rate_scale() const override { return kappa_; }
  std::unique_ptr<Pulse> clone() const override;

  double kappa() const { return kappa_; }
  double onset() const { return onset_; }

 private:
  double kappa_, onset_, detuning_, t_end_;
};

// Gaussian intensity profile: sigma is the standard deviation of |u(t)|^2,
// so u(t) = (2 pi sigma^2)^{-1/4} e^{-(t - center)^2 / (4 sigma^2)}.
class GaussianPulse final : public Pulse {
 public:
  explicit GaussianPulse(double sigma, double center = 0.0,
                         double detuning = 0.0);
  Complex amplitude_smooth(double t) const override;
  double cumulative_norm(double t) const override;
  Support support() const override;
  Complex spectrum(double w) const override;
  double rate_scale() const override { return 1.0 / sigma_; }
  std::unique_ptr<Pulse> clone() const override;

  double sigma() const { return sigma_; }
  double center() const { return center_; }

 private:
  double sigma_, center_, detuning_, lo_, hi_;
};

// Sampled envelope on a (strictly increasing) time grid, linearly
// interpolated, zero outside the grid. Renormalized on construction when the
// sample norm is within 1e-3 of 1; rejected otherwise.
class TabulatedPulse final : public Pulse {
 public:
  TabulatedPulse(std::vector<double> times, std::vector<Complex> values);
  static TabulatedPulse from_csv(const std::string& path);

  Complex amplitude_smooth(double t) const override;
  double cumulative_norm(double t) const override;
  Support support() const override;
  Complex spectrum(double w) const override;
  double rate_scale() const override { return rate_scale_; }
  std::unique_ptr<Pulse> clone() const override;

 private:
  std::vector<double> times_;
  std::vector<Complex> values_;
  std::vector<double> cum_;  // cumulative |u|^2 at sample points
  double lo_ = 0.0, hi_ = 0.0, rate_scale_ = 1.0;
};

// The absent pulse (u = 0); used for single-photon runs.
class NullPulse final : public Pulse {
 public:
  Complex amplitude_smooth(double) const override { return {0.0, 0.0}; }
  double cumulative_norm(double) const override { return 0.0; }
  Support support() const override { return {0.0, 0.0}; }
  Complex spectrum(double) const override { return {0.0, 0.0}; }
  double rate_scale() const override { return 1.0; }
  std::unique_ptr<Pulse> clone() const override {
    return std::make_unique<NullPulse>();
  }
};

// Inverse map: u(t) = g*(t) e^{-1/2 int_{t0}^t |g|^2}, sampled on a uniform
// grid and returned as a tabulated pulse. Round-trips coupling(u) -> u
// within 1e-6 on the unsaturated domain.
TabulatedPulse envelope_from_coupling(const std::vector<double>& times,
                                      const std::vector<Complex>& couplings);

}  // namespace tpdsim
