#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "vsum/examples.hpp"

namespace vsum {

GridSpec GridSpec::make(int dim, std::size_t n) {
  if (dim != 1 && dim != 2) throw ConfigError("grid dimension must be 1 or 2");
  if (n < 2) throw ConfigError("grid needs at least 2 points per axis");
  return GridSpec{dim, n};
}

std::array<double, 2> GridSpec::node(std::size_t k) const {
  const double hh = h();
  if (dim == 1) return {hh * static_cast<double>(k + 1), 0.0};
  return {hh * static_cast<double>(k % n + 1), hh * static_cast<double>(k / n + 1)};
}

SymSparseMatrix build_laplacian(const GridSpec& g) {
  const double s = 1.0 / (g.h() * g.h());
  const std::size_t n = g.n;
  std::vector<Triplet> t;
  if (g.dim == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      t.push_back({i, i, 2.0 * s});
      if (i + 1 < n) t.push_back({i, i + 1, -s});
    }
  } else {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k = j * n + i;
        t.push_back({k, k, 4.0 * s});
        if (i + 1 < n) t.push_back({k, k + 1, -s});
        if (j + 1 < n) t.push_back({k, k + n, -s});
      }
    }
  }
  return SymSparseMatrix(g.unknowns(), t, true);
}

const std::vector<std::string>& reaction_presets() {
  static const std::vector<std::string> names = {"cubic", "linear-ramp", "saturating", "sign-graph",
                                                 "normal-cone-nonneg"};
  return names;
}

ScalarMonotoneGraph make_reaction_graph(const std::string& name) {
  if (name == "cubic") {
    return ScalarMonotoneGraph::smooth(name, [](double u) { return u * u * u; }, [](double u) { return 3.0 * u * u; });
  }
  if (name == "linear-ramp") return ScalarMonotoneGraph::piecewise(name, {{0.0, 0.0, 0.0}}, 0.0, 1.0);
  if (name == "saturating") {
    // u - u^3/3 on [-1, 1], flat at +-2/3 beyond: C1 and bounded.
    return ScalarMonotoneGraph::smooth(
        name,
        [](double u) {
          const double c = std::clamp(u, -1.0, 1.0);
          return c - c * c * c / 3.0;
        },
        [](double u) { return std::abs(u) >= 1.0 ? 0.0 : 1.0 - u * u; });
  }
  if (name == "sign-graph") return ScalarMonotoneGraph::piecewise(name, {{0.0, -1.0, 1.0}}, 0.0, 0.0);
  if (name == "normal-cone-nonneg") return ScalarMonotoneGraph::normal_cone(name, 0.0, kPlusInfinity);
  throw ConfigError("unknown reaction preset '" + name + "'");
}

std::vector<std::array<double, 2>> dyadic_centers(int dim, std::size_t k) {
  std::vector<std::array<double, 2>> out;
  for (std::size_t q = 2; out.size() < k; q *= 2) {
    const double dq = static_cast<double>(q);
    if (dim == 1) {
      for (std::size_t a = 1; a < q && out.size() < k; a += 2) out.push_back({a / dq, 0.0});
    } else {
      for (std::size_t a = 1; a < q && out.size() < k; a += 2) {
        for (std::size_t b = 1; b < q && out.size() < k; b += 2) out.push_back({a / dq, b / dq});
      }
    }
  }
  return out;
}

PotentialSpec PotentialSpec::defaults(int dim, std::size_t k) {
  if (dim != 1 && dim != 2) throw ConfigError("potential dimension must be 1 or 2");
  PotentialSpec p;
  p.dim = dim;
  p.exponent = dim == 1 ? 0.6 : 1.2;
  p.centers = dyadic_centers(dim, k);
  return p;
}

void PotentialSpec::validate() const {
  if (dim != 1 && dim != 2) throw ConfigError("potential dimension must be 1 or 2");
  if (centers.empty()) throw ConfigError("potential needs at least one center");
  if (!(exponent > 0.0)) throw ConfigError("potential exponent must be positive");
  if (!(cutoff > 0.0)) throw ConfigError("potential cutoff must be positive");
  if (!(offset >= 0.0)) throw ConfigError("potential offset must be nonnegative");
  for (const auto& c : centers) {
    for (int i = 0; i < dim; ++i) {
      if (c[i] < 0.0 || c[i] > 1.0) throw ConfigError("potential centers must lie in the closed unit domain");
    }
  }
}

double potential_at(const PotentialSpec& p, std::array<double, 2> x, double cap_radius) {
  double q = 0.0;
  for (std::size_t k = 0; k < p.centers.size(); ++k) {
    const double dx = x[0] - p.centers[k][0];
    const double dy = p.dim == 2 ? x[1] - p.centers[k][1] : 0.0;
    double r = std::hypot(dx, dy);
    if (r > p.cutoff) continue;
    if (r < 1e-12) r = cap_radius;
    const double kk = static_cast<double>(k + 1);
    q += (std::pow(r, -p.exponent) + p.offset) / (kk * kk);
  }
  return q;
}

Vector sample_potential(const PotentialSpec& p, const GridSpec& g) {
  p.validate();
  if (p.dim != g.dim) throw ConfigError("potential and grid dimensions differ");
  Vector q(std::vector<double>(g.unknowns()), g.meta());
  for (std::size_t k = 0; k < q.size(); ++k) q[k] = potential_at(p, g.node(k), 0.5 * g.h());
  return q;
}

PotentialProxies potential_proxies(const Vector& q) {
  PotentialProxies out;
  for (double v : q) {
    out.l1 += std::abs(v);
    out.l2 += v * v;
  }
  out.l1 *= q.weight();
  out.l2 *= q.weight();
  return out;
}

OperatorSpec build_form_sum(const GridSpec& g, const Vector& q) {
  if (q.size() != g.unknowns()) throw ConfigError("potential length does not match the grid");
  Vector qq = q;
  qq.set_grid(g.meta());
  return OperatorSpec::form_sum(build_laplacian(g), std::move(qq));
}

OperatorSpec build_form_sum(const GridSpec& g, const PotentialSpec& p) {
  return build_form_sum(g, sample_potential(p, g));
}

const std::vector<std::string>& forcing_presets() {
  static const std::vector<std::string> names = {"zero", "ones", "bump", "pulse"};
  return names;
}

Forcing make_forcing(const std::string& name, const GridSpec& g, double horizon) {
  const std::size_t n = g.unknowns();
  if (name == "zero") return Forcing::zero(n, g.meta());
  if (name == "ones") return Forcing::constant(Vector(std::vector<double>(n, 1.0), g.meta()), "ones");
  if (name == "bump") {
    Vector v(std::vector<double>(n), g.meta());
    for (std::size_t k = 0; k < n; ++k) {
      const auto x = g.node(k);
      v[k] = std::sin(std::numbers::pi * x[0]) * (g.dim == 2 ? std::sin(std::numbers::pi * x[1]) : 1.0);
    }
    return Forcing::constant(std::move(v), "bump");
  }
  if (name == "pulse") {
    if (!(horizon > 0.0)) throw ConfigError("pulse forcing needs a positive horizon");
    return Forcing::table({0.0, 0.5 * horizon, horizon},
                          {Vector(std::vector<double>(n, 1.0), g.meta()), Vector(std::vector<double>(n, 0.0), g.meta())});
  }
  throw ConfigError("unknown forcing preset '" + name + "'");
}

EvolutionProblem reaction_diffusion_problem(const GridSpec& g, const std::string& reaction, const std::string& forcing,
                                            double horizon, SumStrategy strategy) {
  OperatorSpec a = OperatorSpec::linear(build_laplacian(g));
  a.with_grid(g.meta());
  OperatorSpec b = OperatorSpec::separable(make_reaction_graph(reaction), g.unknowns());
  b.with_grid(g.meta());
  return EvolutionProblem::make(std::move(a), std::move(b), make_forcing(forcing, g, horizon), horizon, strategy);
}

EvolutionProblem form_sum_problem(const GridSpec& g, const PotentialSpec& p, const std::string& forcing,
                                  double horizon) {
  OperatorSpec a = build_form_sum(g, p);
  OperatorSpec b = OperatorSpec::zero(g.unknowns());
  b.with_grid(g.meta());
  return EvolutionProblem::make(std::move(a), std::move(b), make_forcing(forcing, g, horizon), horizon,
                                SumStrategy::kFormSum);
}

NewtonResult solve_semilinear(const GridSpec& g, const ScalarMonotoneGraph& f_graph, double mu, const Vector& f,
                              double tol) {
  if (!f_graph.single_valued()) throw CapabilityError("solve_semilinear needs a single-valued reaction");
  if (!(mu >= 0.0)) throw ConfigError("mu must be nonnegative");
  if (f.size() != g.unknowns()) throw ConfigError("right-hand side length does not match the grid");
  const SymSparseMatrix l = build_laplacian(g);
  NewtonSystem sys;
  sys.residual = [&](const Vector& u) {
    Vector r = l.apply(u, mu);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += f_graph.value(u[i])->lo - f[i];
    return r;
  };
  sys.jacobian = [&](const Vector& u) {
    std::vector<double> d(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) d[i] = f_graph.slope(u[i]);
    return LinearOperator{u.size(), [&l, mu, d = std::move(d)](std::span<const double> x, std::span<double> y) {
                            l.apply(x, y, mu);
                            for (std::size_t i = 0; i < x.size(); ++i) y[i] += d[i] * x[i];
                          }};
  };
  Vector x0(std::vector<double>(g.unknowns(), 0.0), g.meta());
  NewtonResult r = guarded_newton(sys, x0, tol);
  r.x.set_grid(g.meta());
  return r;
}

double form_sum_conditioning(const GridSpec& g, const PotentialSpec& p, double lambda, double mu) {
  const std::size_t n = g.unknowns();
  if (n > kDenseOracleLimit) throw CapabilityError("conditioning study is dense; grid too large");
  const std::vector<double> dl = build_laplacian(g).dense();
  const Vector q = sample_potential(p, g);
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a(i, j) += lambda * dl[i * n + j];
  }
  Eigen::VectorXd b(n);
  for (std::size_t i = 0; i < n; ++i) b(i) = 1.0 + mu * q[i];
  const Eigen::MatrixXd prod = a * b.asDiagonal();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(prod);
  const auto& s = svd.singularValues();
  return s(0) / s(s.size() - 1);
}

}  // namespace vsum
