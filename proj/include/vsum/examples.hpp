#pragma once
// Concrete instances: Dirichlet Laplacians on the unit interval/square,
// monotone reaction graphs, singular potentials and the Schroedinger form sum.

#include <array>
#include <string>
#include <vector>

#include "vsum/evolution.hpp"

namespace vsum {

struct GridSpec {
  int dim = 1;
  std::size_t n = 2;  // points per axis

  // Throws ConfigError unless dim is 1 or 2 and n >= 2.
  static GridSpec make(int dim, std::size_t n);

  double h() const { return 1.0 / static_cast<double>(n + 1); }
  std::size_t unknowns() const { return dim == 1 ? n : n * n; }
  GridMeta meta() const { return GridMeta{dim, n, h()}; }
  // Coordinates of node k (lexicographic, x fastest); second entry 0 in 1D.
  std::array<double, 2> node(std::size_t k) const;
};

// (2d+1)-point Dirichlet Laplacian scaled by 1/h^2.
SymSparseMatrix build_laplacian(const GridSpec& g);

// cubic, linear-ramp, saturating, sign-graph, normal-cone-nonneg.
ScalarMonotoneGraph make_reaction_graph(const std::string& name);
const std::vector<std::string>& reaction_presets();

// G(x) = |x|^-p + offset for |x| <= cutoff, 0 beyond;
// Q(x) = sum_{k=1..K} G(x - alpha_k) / k^2.
struct PotentialSpec {
  int dim = 1;
  double exponent = 0.6;
  double cutoff = 1.0;
  double offset = 0.0;
  std::vector<std::array<double, 2>> centers;  // size K

  // Dyadic centers, K = 16; p = 0.6 in 1D, 1.2 in 2D.
  static PotentialSpec defaults(int dim, std::size_t k = 16);
  std::size_t terms() const { return centers.size(); }
  void validate() const;
};

// Dyadic rationals of increasing level: 1D 1/2, 1/4, 3/4, 1/8, ...;
// 2D (1/2,1/2), then the odd/4 pairs, odd/8 pairs, ...
std::vector<std::array<double, 2>> dyadic_centers(int dim, std::size_t k);

// Q at a point; a center closer than 1e-12 contributes G(cap_radius).
double potential_at(const PotentialSpec& p, std::array<double, 2> x, double cap_radius);
// Q at the grid nodes, capped at G(h/2) on exact hits.
Vector sample_potential(const PotentialSpec& p, const GridSpec& g);

// Discrete L1 and L2 proxies: h^d sum Q_i and h^d sum Q_i^2.
struct PotentialProxies {
  double l1 = 0.0;
  double l2 = 0.0;
};
PotentialProxies potential_proxies(const Vector& q);

OperatorSpec build_form_sum(const GridSpec& g, const PotentialSpec& p);
OperatorSpec build_form_sum(const GridSpec& g, const Vector& q);

// Forcing presets: zero, ones, bump (product of sines), pulse (ones on [0, T/2], zero after).
Forcing make_forcing(const std::string& name, const GridSpec& g, double horizon);
const std::vector<std::string>& forcing_presets();

EvolutionProblem reaction_diffusion_problem(const GridSpec& g, const std::string& reaction, const std::string& forcing,
                                            double horizon, SumStrategy strategy = SumStrategy::kAlgebraic);
EvolutionProblem form_sum_problem(const GridSpec& g, const PotentialSpec& p, const std::string& forcing,
                                  double horizon);

// mu u + L u + F(u) = f by guarded Newton; F must be single-valued (smooth or piecewise).
NewtonResult solve_semilinear(const GridSpec& g, const ScalarMonotoneGraph& f_graph, double mu, const Vector& f,
                              double tol);

// 2-norm condition number of (I + lambda L)(I + mu diag Q) at the given grid.
double form_sum_conditioning(const GridSpec& g, const PotentialSpec& p, double lambda, double mu);

}  // namespace vsum
