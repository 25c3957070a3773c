#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "vsum/examples.hpp"

namespace {

using namespace vsum;

TEST(GridSpec, Validation) {
  EXPECT_THROW(GridSpec::make(3, 4), ConfigError);
  EXPECT_THROW(GridSpec::make(1, 1), ConfigError);
  EXPECT_EQ(GridSpec::make(2, 5).unknowns(), 25u);
  EXPECT_DOUBLE_EQ(GridSpec::make(1, 4).h(), 0.2);
}

TEST(Laplacian, TwoPointStencil) {
  const auto d = build_laplacian(GridSpec::make(1, 2)).dense();
  EXPECT_NEAR(d[0], 18.0, 1e-12);
  EXPECT_NEAR(d[1], -9.0, 1e-12);
  EXPECT_NEAR(d[2], -9.0, 1e-12);
  EXPECT_NEAR(d[3], 18.0, 1e-12);
}

TEST(Laplacian, SmallestEigenvalue1D) {
  const GridSpec g = GridSpec::make(1, 16);
  const double h = g.h();
  const double exact = 4.0 / (h * h) * std::pow(std::sin(std::numbers::pi * h / 2.0), 2);
  EXPECT_NEAR(dense_eigs(build_laplacian(g)).front().value, exact, 1e-9);
}

TEST(Laplacian, TensorStructure2D) {
  const auto e1 = dense_eigs(build_laplacian(GridSpec::make(1, 4)));
  const auto e2 = dense_eigs(build_laplacian(GridSpec::make(2, 4)));
  std::vector<double> sums;
  for (const auto& a : e1) {
    for (const auto& b : e1) sums.push_back(a.value + b.value);
  }
  std::sort(sums.begin(), sums.end());
  ASSERT_EQ(sums.size(), e2.size());
  for (std::size_t i = 0; i < sums.size(); ++i) EXPECT_NEAR(e2[i].value, sums[i], 1e-9);
}

TEST(Laplacian, DiagonallyDominant) {
  const auto l = build_laplacian(GridSpec::make(2, 6));
  for (std::size_t i = 0; i < l.dimension(); ++i) {
    double off = 0.0;
    for (std::size_t j = 0; j < l.dimension(); ++j) {
      if (j != i) off += std::abs(l.at(i, j));
    }
    EXPECT_GE(l.at(i, i), off);
  }
}

TEST(ReactionGraph, Presets) {
  EXPECT_EQ(make_reaction_graph("cubic").value(2.0)->lo, 8.0);
  EXPECT_EQ(*make_reaction_graph("sign-graph").value(0.0), (Interval{-1.0, 1.0}));
  EXPECT_THROW(make_reaction_graph("quintic"), ConfigError);
  for (const auto& name : reaction_presets()) EXPECT_TRUE(make_reaction_graph(name).normalized()) << name;
}

TEST(ReactionGraph, MonotonicitySampler) {
  std::mt19937_64 rng(0);
  std::uniform_real_distribution<double> u(-3.0, 3.0), s(0.0, 1.0);
  for (const auto& name : reaction_presets()) {
    const auto g = make_reaction_graph(name);
    for (int k = 0; k < 1000; ++k) {
      const double x1 = u(rng), x2 = u(rng);
      const auto v1 = g.value(x1), v2 = g.value(x2);
      if (!v1 || !v2) continue;
      const double y1 = v1->lo + s(rng) * (std::isfinite(v1->hi - v1->lo) ? v1->hi - v1->lo : 1.0);
      const double y2 = v2->lo + s(rng) * (std::isfinite(v2->hi - v2->lo) ? v2->hi - v2->lo : 1.0);
      EXPECT_GE((x1 - x2) * (y1 - y2), 0.0) << name;
    }
  }
}

TEST(Potential, SeriesExamples) {
  PotentialSpec p;
  p.dim = 1;
  p.exponent = 0.5;
  p.centers = {{0.0, 0.0}};
  EXPECT_NEAR(potential_at(p, {0.25, 0.0}, 1e-3), 2.0, 1e-14);
  p.centers = {{0.0, 0.0}, {0.5, 0.0}};
  EXPECT_NEAR(potential_at(p, {0.25, 0.0}, 1e-3), 2.5, 1e-14);
}

TEST(Potential, CapsExactHits) {
  PotentialSpec p;
  p.dim = 1;
  p.exponent = 0.5;
  p.centers = {{0.25, 0.0}};
  const GridSpec g = GridSpec::make(1, 3);  // nodes 1/4, 1/2, 3/4
  const Vector q = sample_potential(p, g);
  EXPECT_NEAR(q[0], std::pow(g.h() / 2, -0.5), 1e-12);
  for (double v : q) EXPECT_GT(v, 0.0);
}

TEST(Potential, DyadicCenters) {
  const auto c1 = dyadic_centers(1, 4);
  EXPECT_EQ(c1[0][0], 0.5);
  EXPECT_EQ(c1[1][0], 0.25);
  EXPECT_EQ(c1[2][0], 0.75);
  EXPECT_EQ(c1[3][0], 0.125);
  const auto c2 = dyadic_centers(2, 6);
  EXPECT_EQ(c2[0], (std::array<double, 2>{0.5, 0.5}));
  EXPECT_EQ(c2[1], (std::array<double, 2>{0.25, 0.25}));
  EXPECT_EQ(c2[5], (std::array<double, 2>{0.125, 0.125}));
}

TEST(Potential, RefinementProxiesMatchOracle) {
  // numpy oracle, tests/oracles/oracles.py
  const double l1_1d[] = {5.148947814824214, 5.350361584361051, 5.495115478163131,
                          5.600491395797974, 5.678058528126733, 5.735652246506455};
  const double l2_1d[] = {33.83028517365771, 39.24627089522041, 45.1943005898925,
                          51.82387337431746, 59.28757551816107, 67.74706194536536};
  const double l1_2d[] = {7.082100276216689, 7.273303230383402, 7.377900283654202,
                          7.43496375377952, 7.465979352338419, 7.4828811255702306};
  const double l2_2d[] = {112.80917626270035, 147.04501174949905, 191.8402394494755,
                          250.77447037280356, 328.464567340798, 430.9511073089017};
  for (int m = 5; m <= 10; ++m) {
    const std::size_t n = std::size_t{1} << m;
    const auto p1 = potential_proxies(sample_potential(PotentialSpec::defaults(1), GridSpec::make(1, n)));
    EXPECT_NEAR(p1.l1, l1_1d[m - 5], 1e-9 * l1_1d[m - 5]);
    EXPECT_NEAR(p1.l2, l2_1d[m - 5], 1e-9 * l2_1d[m - 5]);
    const auto p2 = potential_proxies(sample_potential(PotentialSpec::defaults(2), GridSpec::make(2, n)));
    EXPECT_NEAR(p2.l1, l1_2d[m - 5], 1e-9 * l1_2d[m - 5]);
    EXPECT_NEAR(p2.l2, l2_2d[m - 5], 1e-9 * l2_2d[m - 5]);
  }
}

TEST(FormSum, ZeroPotentialIsLaplacian) {
  const GridSpec g = GridSpec::make(1, 6);
  const auto t = build_form_sum(g, Vector(std::vector<double>(6, 0.0)));
  const Vector u = random_vector(6, 1, g.meta());
  EXPECT_LE(max_abs(apply(t, u) - build_laplacian(g).apply(u)), 1e-12);
}

TEST(FormSum, QuadraticFormIdentity) {
  const GridSpec g = GridSpec::make(2, 8);
  const Vector q = sample_potential(PotentialSpec::defaults(2), g);
  const auto t = build_form_sum(g, q);
  const SymSparseMatrix l = build_laplacian(g);
  for (unsigned s = 0; s < 10; ++s) {
    const Vector u = random_vector(g.unknowns(), s, g.meta());
    double qq = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) qq += q[i] * u[i] * u[i];
    const double lhs = inner(apply(t, u), u);
    const double rhs = inner(l.apply(u), u) + qq * g.h() * g.h();
    EXPECT_NEAR(lhs, rhs, 1e-12 * std::abs(lhs));
  }
}

TEST(FormSum, ResolventAgreesWithCg) {
  const GridSpec g = GridSpec::make(1, 20);
  const auto t = build_form_sum(g, PotentialSpec::defaults(1));
  const Vector w = random_vector(20, 2, g.meta());
  const auto m = matrix_of(t);
  ASSERT_TRUE(m.has_value());
  EXPECT_LE(max_abs(resolvent(t, 1.0, w) - cg_solve(*m, 1.0, w)), 1e-10);
}

TEST(FormSum, SymmetricNonnegativeSpectrum) {
  const GridSpec g = GridSpec::make(2, 6);
  const auto m = matrix_of(build_form_sum(g, PotentialSpec::defaults(2)));
  for (const auto& e : dense_eigs(*m)) EXPECT_GE(e.value, 0.0);
}

TEST(ReactionDiffusion, ZeroForcing) {
  const auto p = reaction_diffusion_problem(GridSpec::make(2, 5), "sign-graph", "zero", 1.0);
  for (const auto& s : implicit_euler_solve(p, 10, 1e-10).states) EXPECT_EQ(max_abs(s), 0.0);
}

TEST(ReactionDiffusion, ApproachesStationarySolution) {
  const GridSpec g = GridSpec::make(1, 16);
  const auto p = reaction_diffusion_problem(g, "cubic", "bump", 5.0);
  const Trajectory tr = implicit_euler_solve(p, 200, 1e-12);
  const Vector f = p.forcing.at(5.0);
  const NewtonResult stat = solve_semilinear(g, make_reaction_graph("cubic"), 0.0, f, 1e-12);
  EXPECT_LE(max_abs(tr.states.back() - stat.x), 1e-8);
}

TEST(ReactionDiffusion, SemilinearSolvable) {
  const GridSpec g = GridSpec::make(1, 32);
  const Vector f = make_forcing("bump", g, 1.0).at(0.5);
  for (double mu : {1.0, 0.1, 0.01}) {
    const NewtonResult r = solve_semilinear(g, make_reaction_graph("cubic"), mu, f, 1e-10);
    EXPECT_LE(r.residual_norm, 1e-10);
  }
}

TEST(FormSumProblem, ZeroEverything) {
  const GridSpec g = GridSpec::make(1, 8);
  PotentialSpec p = PotentialSpec::defaults(1);
  const auto prob = build_form_sum(g, Vector(std::vector<double>(8, 0.0)));
  const auto e = EvolutionProblem::make(prob, OperatorSpec::zero(8), make_forcing("zero", g, 1.0), 1.0,
                                        SumStrategy::kFormSum);
  for (const auto& s : implicit_euler_solve(e, 10, 1e-12).states) EXPECT_EQ(max_abs(s), 0.0);
  EXPECT_EQ(form_sum_problem(g, p, "zero", 1.0).strategy, SumStrategy::kFormSum);
}

TEST(FormSumProblem, ScalarReductionDecay) {
  // One unknown with potential q: u' + (L + q) u = 0 from u0 = 1 -> exp(-(L + q) t)
  const auto a = OperatorSpec::form_sum(SymSparseMatrix::diagonal(Vector{0.5}, true), Vector{1.5});
  const auto p = EvolutionProblem::make(a, OperatorSpec::zero(1), Forcing::zero(1), 1.0, SumStrategy::kFormSum, Vector{1.0});
  const Trajectory tr = implicit_euler_solve(p, 1000, 1e-12);
  // implicit Euler closed form (1 + 2 tau)^-N, and the exact decay exp(-2) to first order
  EXPECT_NEAR(tr.states.back()[0], std::pow(1.0 + 2e-3, -1000.0), 1e-6);
  EXPECT_NEAR(tr.states.back()[0], std::exp(-2.0), 1e-3);
}

TEST(FormSumProblem, SpectralReference) {
  const GridSpec g = GridSpec::make(1, 10);
  const auto prob = form_sum_problem(g, PotentialSpec::defaults(1), "ones", 0.5);
  const auto m = matrix_of(prob.a);
  const auto eig = dense_eigs(*m);
  const Vector f = prob.forcing.at(0.0);
  // u(T) = sum_k (1 - exp(-theta_k T)) / theta_k <f, v_k> v_k
  Vector exact = zeros_like(f);
  for (const auto& e : eig) axpy((1.0 - std::exp(-e.value * 0.5)) / e.value * dot(e.vector, f), e.vector, exact);
  double prev = kPlusInfinity;
  for (std::size_t steps : {100u, 200u, 400u}) {
    const double err = max_abs(implicit_euler_solve(prob, steps, 1e-12).states.back() - exact);
    EXPECT_LT(err, prev);
    if (prev < kPlusInfinity) EXPECT_NEAR(prev / err, 2.0, 0.2);
    prev = err;
  }
}

TEST(ExamplesProperties, DiscreteBrezisInequality) {
  std::mt19937_64 rng(0);
  for (int dim : {1, 2}) {
    const GridSpec g = GridSpec::make(dim, dim == 1 ? 32 : 8);
    const SymSparseMatrix l = build_laplacian(g);
    for (const auto& name : reaction_presets()) {
      const auto b = OperatorSpec::separable(make_reaction_graph(name), g.unknowns());
      for (double lam : {1.0, 0.1, 0.01}) {
        for (unsigned s = 0; s < 40; ++s) {
          Vector u = random_vector(g.unknowns(), 1000 * dim + s, g.meta());
          u *= 2.0;
          EXPECT_GE(inner(l.apply(u), yosida(b, lam, u)), -1e-12) << name;
        }
      }
    }
  }
}

TEST(ExamplesProperties, ConditioningDegradesUnderRefinement) {
  double prev = 0.0;
  for (std::size_t n : {4u, 8u, 16u}) {
    const double c = form_sum_conditioning(GridSpec::make(1, n), PotentialSpec::defaults(1), 1.0, 1.0);
    EXPECT_GT(c, prev);
    prev = c;
  }
}

}  // namespace
