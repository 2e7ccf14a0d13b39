#include "tpdsim/model.hpp"

#include <cmath>
#include <stdexcept>

namespace tpdsim {

void MoleculeParams::validate() const {
  for (double g : {gamma1, gamma2, gamma3, gamma4}) {
    if (!std::isfinite(g)) throw std::invalid_argument("non-finite parameter");
    if (g <= 0.0) throw std::invalid_argument("invalid rate");
  }
}

double MoleculeParams::max_rate() const {
  return std::max({gamma1, gamma2, gamma3, gamma4});
}

Mat5 transition_operator(Level from, Level to) {
  Mat5 m = Mat5::Zero();
  m(static_cast<int>(to), static_cast<int>(from)) = Complex(1.0, 0.0);
  return m;
}

Mat5 lindblad_dissipator(const Mat5& x, const Mat5& rho) {
  const Mat5 xdx = x.adjoint() * x;
  return x * rho * x.adjoint() - 0.5 * (xdx * rho + rho * xdx);
}

CollapseOperators collapse_operators(const MoleculeParams& p) {
  CollapseOperators ops;
  ops.decay10 = std::sqrt(p.gamma1) * transition_operator(F1, F0);
  ops.decay12 = std::sqrt(p.gamma2) * transition_operator(F1, F2);
  ops.decay32 = std::sqrt(p.gamma3) * transition_operator(F3, F2);
  ops.decay34 = std::sqrt(p.gamma4) * transition_operator(F3, F4);
  return ops;
}

Mat5 molecular_dissipator(const Mat5& rho, const MoleculeParams& p) {
  // The four decay channels only involve elementary |i><j| operators, so the
  // dissipators reduce to row/column scalings; the explicit form keeps the
  // code close to the defining expression while staying cheap for 5x5.
  const double g1 = p.gamma1, g2 = p.gamma2, g3 = p.gamma3, g4 = p.gamma4;
  Mat5 out = Mat5::Zero();
  // Population feeds: F1 -> F0 (g1), F1 -> F2 (g2), F3 -> F2 (g3), F3 -> F4 (g4).
  out(F0, F0) += g1 * rho(F1, F1);
  out(F2, F2) += g2 * rho(F1, F1) + g3 * rho(F3, F3);
  out(F4, F4) += g4 * rho(F3, F3);
  // Anticommutator decay: level widths G(F1) = g1+g2, G(F3) = g3+g4.
  const double w1 = g1 + g2, w3 = g3 + g4;
  const double width[5] = {0.0, w1, 0.0, w3, 0.0};
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      out(i, j) -= 0.5 * (width[i] + width[j]) * rho(i, j);
  return out;
}

}  // namespace tpdsim
