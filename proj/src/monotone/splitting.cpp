#include <cmath>
#include <string>

#include "vsum/monotone.hpp"

namespace vsum {

SplittingResult douglas_rachford(const ResolventFn& jp, const ResolventFn& jq, const Vector& w, double scale,
                                 double tol, int max_iterations) {
  if (!(scale > 0.0)) throw ConfigError("douglas_rachford: scale must be positive");
  constexpr double gamma = 1.0;
  const double shrink = 1.0 + 0.5 * gamma;
  const double step = scale * gamma / shrink;
  // J of gamma * ((I - w)/2 + scale T) in terms of J^T.
  auto balanced = [&](const ResolventFn& j, const Vector& v) {
    Vector arg = v;
    axpy(0.5 * gamma, w, arg);
    arg *= 1.0 / shrink;
    return j(step, arg);
  };

  Vector z = w;
  SplittingResult res{w, 0.0, 0};
  for (res.iterations = 0; res.iterations < max_iterations; ++res.iterations) {
    const Vector x = balanced(jp, z);
    const Vector reflected = 2.0 * x - z;
    const Vector y = balanced(jq, reflected);
    const Vector delta = y - x;
    res.u = x;
    res.residual = norm2(delta);
    if (res.residual <= tol) return res;
    z += delta;
  }
  throw NonConvergenceError("Douglas-Rachford did not converge (residual " + std::to_string(res.residual) + ")",
                            res.residual, res.u.values());
}

}  // namespace vsum
