#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <string>

#include "vsum/sums.hpp"

namespace vsum {

Vector random_vector(std::size_t n, std::uint64_t seed, const std::optional<GridMeta>& grid) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = normal(rng);
  return Vector(std::move(v), grid);
}

DiagnosticReport check_resolvent_commutation(const OperatorSpec& a, const OperatorSpec& b,
                                             const std::vector<double>& lambdas, const std::vector<double>& mus,
                                             std::size_t samples, double tol, std::uint64_t seed) {
  if (!a.is_linear() || !b.is_linear()) {
    throw CapabilityError("resolvent commutation check is defined for linear operators only");
  }
  if (a.dimension() != b.dimension()) throw ConfigError("operator dimensions differ");
  if (lambdas.empty() || mus.empty() || samples == 0) throw ConfigError("commutation check needs parameters and samples");

  DiagnosticReport rep;
  rep.name = "commutation";
  rep.samples = samples;
  rep.tolerance = tol;
  rep.comparison = "<=";
  rep.worst_value = -1.0;
  double worst_lambda = 0.0;
  double worst_mu = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const Vector w = random_vector(a.dimension(), seed + s, a.grid());
    const double wn = norm2(w);
    for (double l : lambdas) {
      for (double m : mus) {
        const Vector ab = resolvent(a, l, resolvent(b, m, w));
        const Vector ba = resolvent(b, m, resolvent(a, l, w));
        const double v = norm2(ab - ba) / wn;
        if (v > rep.worst_value) {
          rep.worst_value = v;
          rep.witness = w;
          worst_lambda = l;
          worst_mu = m;
        }
      }
    }
  }
  rep.pass = rep.worst_value <= tol;
  std::ostringstream d;
  d << "max ||J^A_l J^B_m w - J^B_m J^A_l w|| / ||w|| = " << rep.worst_value << " at lambda=" << worst_lambda
    << ", mu=" << worst_mu;
  rep.detail = d.str();
  return rep;
}

DiagnosticReport check_acute_angle(const OperatorSpec& a, const OperatorSpec& b, const std::vector<double>& lambdas,
                                   const std::vector<double>& mus, std::size_t samples, std::uint64_t seed) {
  if (a.dimension() != b.dimension()) throw ConfigError("operator dimensions differ");
  if (lambdas.empty() || mus.empty() || samples == 0) throw ConfigError("acute-angle check needs parameters and samples");
  for (double l : lambdas) {
    if (!(l > 0.0)) throw ConfigError("acute-angle parameters must be positive");
  }
  for (double m : mus) {
    if (!(m > 0.0)) throw ConfigError("acute-angle parameters must be positive");
  }

  DiagnosticReport rep;
  rep.name = "acute-angle";
  rep.samples = samples;
  rep.tolerance = kAcuteAngleTol;
  rep.comparison = ">=";
  rep.worst_value = kPlusInfinity;
  double worst_lambda = 0.0;
  double worst_mu = 0.0;
  std::mt19937_64 scale_rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> log_scale(-2.0, 1.0);
  for (std::size_t s = 0; s < samples; ++s) {
    // Magnitudes spread over 10^-2 .. 10^1 to probe nonlinear graphs at several scales.
    Vector u = random_vector(a.dimension(), seed + s, a.grid() ? a.grid() : b.grid());
    u *= std::pow(10.0, log_scale(scale_rng));
    for (double l : lambdas) {
      const Vector au = yosida(a, l, u);
      for (double m : mus) {
        const double v = inner(au, yosida(b, m, u));
        if (v < rep.worst_value) {
          rep.worst_value = v;
          rep.witness = u;
          worst_lambda = l;
          worst_mu = m;
        }
      }
    }
  }
  rep.pass = rep.worst_value >= -rep.tolerance;
  std::ostringstream d;
  d << "min <<A_l u, B_m u>> = " << rep.worst_value << " at lambda=" << worst_lambda << ", mu=" << worst_mu;
  rep.detail = d.str();
  return rep;
}

DiagnosticReport boundedness_diagnostic(const OperatorSpec& a, const OperatorSpec& b, const Vector& w,
                                        const FilterPath& path, double tol) {
  DiagnosticReport rep;
  rep.name = "boundedness";
  rep.tolerance = kBoundednessSlopeTol;
  rep.comparison = "<=";

  std::vector<double> log_inv_mu;
  std::vector<double> norms;
  const Vector* warm = nullptr;
  Vector last;
  for (const PathPoint& p : path.points()) {
    if (!(p.mu > 0.0)) continue;
    last = regularized_resolvent(a, b, 0.0, p.mu, w, tol, warm, 1.0);
    warm = &last;
    const double n = norm(yosida(b, p.mu, last));
    rep.trace.emplace_back(p.mu, n);
    log_inv_mu.push_back(-std::log(p.mu));
    norms.push_back(n);
  }
  if (norms.size() < 2) throw ConfigError("boundedness diagnostic needs at least two path points with mu > 0");
  rep.samples = norms.size();
  rep.witness = last;

  const std::size_t window = std::min(kBoundednessWindow, norms.size());
  const std::size_t first = norms.size() - window;
  const double peak = *std::max_element(norms.begin() + static_cast<std::ptrdiff_t>(first), norms.end());
  double slope = 0.0;
  if (peak > 0.0) {
    // Least-squares slope of log ||B_mu u_mu|| against log(1/mu).
    const double floor = peak * 1e-300;
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = first; i < norms.size(); ++i) {
      mx += log_inv_mu[i];
      my += std::log(std::max(norms[i], floor));
    }
    mx /= static_cast<double>(window);
    my /= static_cast<double>(window);
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = first; i < norms.size(); ++i) {
      const double dx = log_inv_mu[i] - mx;
      sxy += dx * (std::log(std::max(norms[i], floor)) - my);
      sxx += dx * dx;
    }
    slope = sxy / sxx;
  }
  rep.worst_value = slope;
  rep.pass = slope <= rep.tolerance;
  std::ostringstream d;
  d << "log-log slope of ||B_mu u_mu|| over last " << window << " points = " << slope
    << ", max norm = " << *std::max_element(norms.begin(), norms.end());
  rep.detail = d.str();
  return rep;
}

}  // namespace vsum
