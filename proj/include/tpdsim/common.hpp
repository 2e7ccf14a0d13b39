#pragma once

#include <Eigen/Dense>
#include <complex>

namespace tpdsim {

using Complex = std::complex<double>;
using Mat5 = Eigen::Matrix<Complex, 5, 5>;
using Mat20 = Eigen::Matrix<Complex, 20, 20>;

// Pulse envelopes are truncated where their cumulative norm reaches
// 1 - kNormTruncation; the same constant floors the coupling denominator
// so that g(t) stays continuous up to the support edge.
inline constexpr double kNormTruncation = 1e-9;

inline Mat5 commutator(const Mat5& a, const Mat5& b) { return a * b - b * a; }

}  // namespace tpdsim
