#include "tpdsim/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace tpdsim {

std::vector<Step> segment_steps(const std::vector<const Pulse*>& pulses,
                                double t0, double t_end, double dt) {
  if (!(t_end > t0)) throw std::invalid_argument("empty integration window");
  if (!(dt > 0.0)) throw std::invalid_argument("invalid time step");

  std::set<double> edges{t0, t_end};
  for (const Pulse* p : pulses) {
    const Support s = p->support();
    if (s.empty()) continue;
    for (double e : {s.lo, s.hi})
      if (e > t0 && e < t_end) edges.insert(e);
  }

  std::vector<Step> steps;
  auto it = edges.begin();
  double a = *it;
  for (++it; it != edges.end(); ++it) {
    const double b = *it;
    const int n = std::max(1, static_cast<int>(std::ceil((b - a) / dt - 1e-12)));
    const double h = (b - a) / n;
    for (int i = 0; i < n; ++i) steps.push_back({a + i * h, h, a, b});
    a = b;
  }
  return steps;
}

double default_time_step(double max_molecular_rate,
                         const std::vector<const Pulse*>& pulses) {
  double fastest = max_molecular_rate;
  for (const Pulse* p : pulses)
    if (!p->support().empty()) fastest = std::max(fastest, p->rate_scale());
  return 1.0 / (40.0 * fastest);
}

}  // namespace tpdsim
