#include "tpdsim/pulses.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace tpdsim {
namespace {

// z such that a Gaussian leaves total two-sided tail mass kNormTruncation
// outside +-z sigma: sqrt(2) * erfinv(1 - 1e-9).
constexpr double kGaussTailZ = 6.10941020938345;

const Complex kI(0.0, 1.0);

double clip_cumulative(double c) {
  return std::clamp(c, 0.0, 1.0 - kNormTruncation);
}

}  // namespace

Complex Pulse::amplitude(double t) const {
  const Support s = support();
  if (t < s.lo || t > s.hi || s.empty()) return {0.0, 0.0};
  return amplitude_smooth(t);
}

Complex Pulse::amplitude_in_segment(double t, double a, double b) const {
  const Support s = support();
  if (s.empty()) return {0.0, 0.0};
  if (a >= s.lo - 1e-12 && b <= s.hi + 1e-12) return amplitude_smooth(t);
  return {0.0, 0.0};
}

Complex Pulse::coupling(double t) const {
  const Support s = support();
  if (t < s.lo || t > s.hi || s.empty()) return {0.0, 0.0};
  const double rem = std::max(1.0 - cumulative_norm(t), kNormTruncation);
  return std::conj(amplitude_smooth(t)) / std::sqrt(rem);
}

Complex Pulse::coupling_in_segment(double t, double a, double b) const {
  const Support s = support();
  if (s.empty()) return {0.0, 0.0};
  if (a >= s.lo - 1e-12 && b <= s.hi + 1e-12) {
    const double rem = std::max(1.0 - cumulative_norm(t), kNormTruncation);
    return std::conj(amplitude_smooth(t)) / std::sqrt(rem);
  }
  return {0.0, 0.0};
}

double Pulse::coupling_norm_integral(double t) const {
  return -std::log(std::max(1.0 - cumulative_norm(t), kNormTruncation));
}

// ---------------------------------------------------------------- exponential

ExponentialPulse::ExponentialPulse(double kappa, double onset, double detuning)
    : kappa_(kappa), onset_(onset), detuning_(detuning) {
  if (!std::isfinite(kappa) || !std::isfinite(onset) || !std::isfinite(detuning))
    throw std::invalid_argument("non-finite parameter");
  if (kappa <= 0.0) throw std::invalid_argument("invalid rate");
  t_end_ = onset_ - std::log(kNormTruncation) / kappa_;
}

Complex ExponentialPulse::amplitude_smooth(double t) const {
  const double s = t - onset_;
  return std::sqrt(kappa_) * std::exp(-0.5 * kappa_ * s) *
         std::exp(-kI * detuning_ * s);
}

double ExponentialPulse::cumulative_norm(double t) const {
  if (t <= onset_) return 0.0;
  return clip_cumulative(1.0 - std::exp(-kappa_ * (t - onset_)));
}

Support ExponentialPulse::support() const { return {onset_, t_end_}; }

Complex ExponentialPulse::spectrum(double w) const {
  const double norm = std::sqrt(kappa_ / (2.0 * std::numbers::pi));
  return norm / Complex(0.5 * kappa_, -(w - detuning_)) *
         std::exp(kI * w * onset_);
}

std::unique_ptr<Pulse> ExponentialPulse::clone() const {
  return std::make_unique<ExponentialPulse>(*this);
}

// ------------------------------------------------------------------- gaussian

GaussianPulse::GaussianPulse(double sigma, double center, double detuning)
    : sigma_(sigma), center_(center), detuning_(detuning) {
  if (!std::isfinite(sigma) || !std::isfinite(center) || !std::isfinite(detuning))
    throw std::invalid_argument("non-finite parameter");
  if (sigma <= 0.0) throw std::invalid_argument("invalid rate");
  lo_ = center_ - kGaussTailZ * sigma_;
  hi_ = center_ + kGaussTailZ * sigma_;
}

Complex GaussianPulse::amplitude_smooth(double t) const {
  const double s = t - center_;
  const double peak =
      std::pow(2.0 * std::numbers::pi * sigma_ * sigma_, -0.25);
  return peak * std::exp(-s * s / (4.0 * sigma_ * sigma_)) *
         std::exp(-kI * detuning_ * s);
}

double GaussianPulse::cumulative_norm(double t) const {
  if (t < lo_) return 0.0;
  if (t > hi_) return 1.0 - kNormTruncation;
  const double z = (t - center_) / (std::numbers::sqrt2 * sigma_);
  return clip_cumulative(0.5 * (1.0 + std::erf(z)) - 0.5 * kNormTruncation);
}

Support GaussianPulse::support() const { return {lo_, hi_}; }

Complex GaussianPulse::spectrum(double w) const {
  const double wd = w - detuning_;
  const double norm =
      std::pow(2.0 * sigma_ * sigma_ / std::numbers::pi, 0.25);
  return norm * std::exp(-sigma_ * sigma_ * wd * wd) *
         std::exp(kI * w * center_);
}

std::unique_ptr<Pulse> GaussianPulse::clone() const {
  return std::make_unique<GaussianPulse>(*this);
}

// ------------------------------------------------------------------ tabulated

TabulatedPulse::TabulatedPulse(std::vector<double> times,
                               std::vector<Complex> values)
    : times_(std::move(times)), values_(std::move(values)) {
  if (times_.size() != values_.size() || times_.size() < 2)
    throw std::invalid_argument("tabulated pulse needs >= 2 samples");
  for (size_t i = 0; i + 1 < times_.size(); ++i)
    if (!(times_[i + 1] > times_[i]))
      throw std::invalid_argument("tabulated pulse times must increase");
  for (size_t i = 0; i < times_.size(); ++i) {
    if (!std::isfinite(times_[i]) || !std::isfinite(values_[i].real()) ||
        !std::isfinite(values_[i].imag()))
      throw std::invalid_argument("non-finite parameter");
  }

  auto build_cum = [&] {
    cum_.assign(times_.size(), 0.0);
    for (size_t i = 1; i < times_.size(); ++i) {
      const double h = times_[i] - times_[i - 1];
      cum_[i] = cum_[i - 1] + 0.5 * h * (std::norm(values_[i - 1]) +
                                         std::norm(values_[i]));
    }
  };
  build_cum();
  const double total = cum_.back();
  if (std::abs(total - 1.0) > 1e-3)
    throw std::invalid_argument("tabulated pulse not normalized");
  const double scale = 1.0 / std::sqrt(total);
  for (auto& v : values_) v *= scale;
  build_cum();

  lo_ = times_.front();
  hi_ = times_.back();
  // If the cumulative norm saturates before the grid ends, truncate there.
  for (size_t i = 0; i < cum_.size(); ++i) {
    if (cum_[i] >= 1.0 - kNormTruncation) {
      hi_ = times_[i];
      emission_saturated_ = (i + 1 < cum_.size());
      break;
    }
  }

  double med = 0.0;
  std::vector<double> gaps;
  gaps.reserve(times_.size() - 1);
  for (size_t i = 1; i < times_.size(); ++i)
    gaps.push_back(times_[i] - times_[i - 1]);
  std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
  med = gaps[gaps.size() / 2];
  rate_scale_ = 1.0 / (20.0 * med);
}

TabulatedPulse TabulatedPulse::from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open pulse csv: " + path);
  std::vector<double> times;
  std::vector<Complex> values;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double t, re, im;
    if (row >> t >> re >> im) {
      times.push_back(t);
      values.emplace_back(re, im);
    }
  }
  return TabulatedPulse(std::move(times), std::move(values));
}

Complex TabulatedPulse::amplitude_smooth(double t) const {
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  if (it == times_.begin() || it == times_.end()) {
    if (it == times_.begin()) return values_.front();
    return values_.back();
  }
  const size_t i = static_cast<size_t>(it - times_.begin());
  const double w = (t - times_[i - 1]) / (times_[i] - times_[i - 1]);
  return (1.0 - w) * values_[i - 1] + w * values_[i];
}

double TabulatedPulse::cumulative_norm(double t) const {
  if (t <= times_.front()) return 0.0;
  if (t >= hi_) return 1.0 - kNormTruncation;
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const size_t i = static_cast<size_t>(it - times_.begin());
  const double h = t - times_[i - 1];
  const Complex ut = amplitude_smooth(t);
  const double c = cum_[i - 1] +
                   0.5 * h * (std::norm(values_[i - 1]) + std::norm(ut));
  return clip_cumulative(c);
}

Support TabulatedPulse::support() const { return {lo_, hi_}; }

Complex TabulatedPulse::spectrum(double w) const {
  // Direct trapezoid transform of the samples; adequate for the modest
  // sample counts tabulated pulses carry in practice.
  Complex acc(0.0, 0.0);
  for (size_t i = 1; i < times_.size(); ++i) {
    const double h = times_[i] - times_[i - 1];
    acc += 0.5 * h *
           (values_[i - 1] * std::exp(kI * w * times_[i - 1]) +
            values_[i] * std::exp(kI * w * times_[i]));
  }
  return acc / std::sqrt(2.0 * std::numbers::pi);
}

std::unique_ptr<Pulse> TabulatedPulse::clone() const {
  return std::make_unique<TabulatedPulse>(*this);
}

// --------------------------------------------------------- coupling inversion

TabulatedPulse envelope_from_coupling(const std::vector<double>& times,
                                      const std::vector<Complex>& couplings) {
  if (times.size() != couplings.size() || times.size() < 2)
    throw std::invalid_argument("coupling table needs >= 2 samples");
  std::vector<Complex> u(times.size());
  double integral = 0.0;  // int |g|^2 up to t_i
  u[0] = std::conj(couplings[0]);
  for (size_t i = 1; i < times.size(); ++i) {
    const double h = times[i] - times[i - 1];
    integral += 0.5 * h * (std::norm(couplings[i - 1]) + std::norm(couplings[i]));
    u[i] = std::conj(couplings[i]) * std::exp(-0.5 * integral);
  }
  return TabulatedPulse(times, u);
}

}  // namespace tpdsim
