#include <algorithm>
#include <cmath>
#include <string>

#include "vsum/sums.hpp"

namespace vsum {

FilterPath FilterPath::make(std::string label, std::vector<PathPoint> points) {
  if (points.empty()) throw ConfigError("filter path '" + label + "' is empty");
  double prev = kPlusInfinity;
  for (std::size_t k = 0; k < points.size(); ++k) {
    const auto& p = points[k];
    if (!(p.lambda >= 0.0) || !(p.mu >= 0.0) || p.lambda + p.mu == 0.0 || !std::isfinite(p.lambda) ||
        !std::isfinite(p.mu)) {
      throw ConfigError("filter path '" + label + "' point " + std::to_string(k) +
                        " is outside {lambda, mu >= 0, lambda + mu != 0}");
    }
    const double m = std::max(p.lambda, p.mu);
    if (!(m < prev)) throw ConfigError("filter path '" + label + "' is not strictly decreasing at point " + std::to_string(k));
    prev = m;
  }
  if (prev > 1e-6) throw ConfigError("filter path '" + label + "' must end with max(lambda, mu) <= 1e-6");
  return FilterPath(std::move(label), std::move(points));
}

FilterPath FilterPath::diagonal(int last) {
  std::vector<PathPoint> pts;
  for (int k = 0; k <= last; ++k) pts.push_back({std::ldexp(1.0, -k), std::ldexp(1.0, -k)});
  return make("default", std::move(pts));
}

FilterPath FilterPath::skewed(int last) {
  std::vector<PathPoint> pts;
  for (int k = 0; k <= last; ++k) pts.push_back({std::ldexp(1.0, -k), std::ldexp(1.0, -2 * k)});
  return make("alternate", std::move(pts));
}

FilterPath FilterPath::lambda_only(int last) {
  std::vector<PathPoint> pts;
  for (int k = 0; k <= last; ++k) pts.push_back({std::ldexp(1.0, -k), 0.0});
  return make("lambda_only", std::move(pts));
}

FilterPath FilterPath::mu_only(int last) {
  std::vector<PathPoint> pts;
  for (int k = 0; k <= last; ++k) pts.push_back({0.0, std::ldexp(1.0, -k)});
  return make("mu_only", std::move(pts));
}

FilterPath FilterPath::named(const std::string& label, int last) {
  if (label == "default") return diagonal(last);
  if (label == "alternate") return skewed(last);
  if (label == "lambda_only") return lambda_only(last);
  if (label == "mu_only") return mu_only(last);
  throw ConfigError("unknown filter path '" + label + "' (expected default, alternate, lambda_only, mu_only)");
}

}  // namespace vsum
