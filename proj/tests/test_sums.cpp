#include <cmath>

#include <gtest/gtest.h>

#include "vsum/examples.hpp"

namespace {

using namespace vsum;

OperatorSpec half_square(std::size_t n = 1) {
  return OperatorSpec::subdifferential(ConvexFunctionSpec::preset("quadratic"), n);
}
OperatorSpec nonneg_cone(std::size_t n = 1) {
  return OperatorSpec::separable(make_reaction_graph("normal-cone-nonneg"), n);
}

TEST(FilterPath, Invariants) {
  const auto d = FilterPath::diagonal();
  EXPECT_EQ(d.size(), 21u);
  EXPECT_EQ(d.label(), "default");
  EXPECT_LE(std::max(d.points().back().lambda, d.points().back().mu), 1e-6);
  EXPECT_THROW(FilterPath::make("bad", {{0.0, 0.0}}), ConfigError);
  EXPECT_THROW(FilterPath::make("bad", {{1.0, 1.0}, {1.0, 0.5}, {1e-7, 0.0}}), ConfigError);
  EXPECT_THROW(FilterPath::make("bad", {{1.0, 1.0}, {0.5, 0.5}}), ConfigError);
  EXPECT_THROW(FilterPath::make("bad", {{1.0, -1.0}, {1e-7, 0.0}}), ConfigError);
  EXPECT_THROW(FilterPath::named("nope"), ConfigError);
  EXPECT_NO_THROW(FilterPath::make("ok", {{1.0, 0.0}, {0.0, 1e-7}}));
}

TEST(RegularizedResolvent, ZeroOperators) {
  const Vector u = regularized_resolvent(OperatorSpec::zero(2), OperatorSpec::zero(2), 0.5, 0.5, Vector{1, -2}, 1e-12);
  EXPECT_EQ(u[0], 1.0);
  EXPECT_EQ(u[1], -2.0);
}

TEST(RegularizedResolvent, IdentityYosida) {
  for (double mu : {0.0, 0.3, 7.0}) {
    const Vector u = regularized_resolvent(OperatorSpec::identity(1), OperatorSpec::zero(1), 1.0, mu, Vector{3.0}, 1e-12);
    EXPECT_NEAR(u[0], 2.0, 1e-11);
  }
}

TEST(RegularizedResolvent, QuadraticPlusConeAtTinyParameters) {
  // argmin_{v >= 0} v^2/2 + (v - w)^2/2 = max(w, 0)/2
  EXPECT_NEAR(regularized_resolvent(half_square(), nonneg_cone(), 1e-6, 1e-6, Vector{-3.0}, 1e-12)[0], 0.0, 1e-5);
  EXPECT_NEAR(regularized_resolvent(half_square(), nonneg_cone(), 1e-6, 1e-6, Vector{4.0}, 1e-12)[0], 2.0, 1e-5);
}

TEST(RegularizedResolvent, RejectsOriginOfParameterSpace) {
  EXPECT_THROW(regularized_resolvent(half_square(), nonneg_cone(), 0.0, 0.0, Vector{1.0}, 1e-12), ConfigError);
}

TEST(VariationalSum, ZeroOperatorsConvergeImmediately) {
  auto [u, rep] = variational_sum_resolvent(OperatorSpec::zero(2), OperatorSpec::zero(2), Vector{1, 2},
                                            FilterPath::diagonal(), 1e-6);
  EXPECT_TRUE(rep.converged);
  // the very first difference already satisfies the Cauchy test
  EXPECT_EQ(rep.converged_at, 1);
  EXPECT_EQ(u[0], 1.0);
  EXPECT_EQ(u[1], 2.0);
}

TEST(VariationalSum, QuadraticPlusCone) {
  for (auto [w, expected] : {std::pair{-3.0, 0.0}, std::pair{4.0, 2.0}}) {
    auto [u, rep] = variational_sum_resolvent(half_square(), nonneg_cone(), Vector{w}, FilterPath::diagonal(), 1e-4);
    EXPECT_TRUE(rep.converged) << rep.verdict;
    EXPECT_NEAR(u[0], expected, 1e-5);
    const auto f = ConvexFunctionSpec::preset("quadratic") + ConvexFunctionSpec::preset("indicator_nonneg");
    EXPECT_NEAR(u[0], f.prox(1.0, Vector{w})[0], 1e-5);
  }
}

TEST(VariationalSum, ReportShape) {
  auto [u, rep] = variational_sum_resolvent(half_square(), nonneg_cone(), Vector{4.0}, FilterPath::diagonal(), 1e-4);
  ASSERT_EQ(rep.records.size(), 21u);
  EXPECT_TRUE(std::isnan(rep.records.front().diff));
  EXPECT_EQ(rep.records[3].lambda, 0.125);
  EXPECT_TRUE(rep.extrapolated.has_value());
  EXPECT_EQ(rep.limit.values(), u.values());
  // The limit is the last iterate, never the extrapolation.
  EXPECT_LE(rep.records.back().diff, rep.tolerance * (1 + norm(rep.limit)));
}

TEST(VariationalSum, DivergenceIsReportedNotThrown) {
  // Too short a path to see three small steps.
  const FilterPath p = FilterPath::make("short", {{1.0, 1.0}, {1e-3, 1e-3}, {1e-7, 1e-7}});
  auto [u, rep] = variational_sum_resolvent(half_square(), nonneg_cone(), Vector{4.0}, p, 1e-12);
  EXPECT_FALSE(rep.converged);
  EXPECT_EQ(rep.records.size(), 3u);
}

TEST(VariationalSum, LaplacianCubicMatchesDirectSolve) {
  const GridSpec g = GridSpec::make(1, 16);
  auto a = OperatorSpec::linear(build_laplacian(g));
  a.with_grid(g.meta());
  const auto b = OperatorSpec::separable(make_reaction_graph("cubic"), 16);
  const Vector w = random_vector(16, 0, g.meta());
  auto [u, rep] = variational_sum_resolvent(a, b, w, FilterPath::diagonal(), 1e-6);
  const NewtonResult direct = solve_semilinear(g, make_reaction_graph("cubic"), 1.0, w, 1e-13);
  EXPECT_LE(norm(u - direct.x), 1e-6);
}

TEST(AlgebraicSum, Zero) {
  const Vector u = algebraic_sum_resolvent(OperatorSpec::zero(2), OperatorSpec::zero(2), Vector{3, 4}, 1e-12);
  EXPECT_EQ(u[0], 3.0);
  EXPECT_EQ(u[1], 4.0);
}

TEST(AlgebraicSum, DiagonalPlusAbs) {
  const auto a = OperatorSpec::linear(SymSparseMatrix::diagonal(Vector{1.0}, true));
  const auto b = OperatorSpec::separable(make_reaction_graph("sign-graph"), 1);
  EXPECT_NEAR(algebraic_sum_resolvent(a, b, Vector{3.0}, 1e-12)[0], 1.0, 1e-10);
  EXPECT_NEAR(algebraic_sum_resolvent(a, b, Vector{0.5}, 1e-12)[0], 0.0, 1e-10);
  EXPECT_NEAR(algebraic_sum_resolvent(a, b, Vector{-3.0}, 1e-12)[0], -1.0, 1e-10);
}

TEST(AlgebraicSum, AgreesWithVariationalForLaplacianCubic) {
  const GridSpec g = GridSpec::make(1, 16);
  auto a = OperatorSpec::linear(build_laplacian(g));
  a.with_grid(g.meta());
  const auto b = OperatorSpec::separable(make_reaction_graph("cubic"), 16);
  const Vector w = random_vector(16, 0, g.meta());
  const Vector alg = algebraic_sum_resolvent(a, b, w, 1e-12);
  auto [u, rep] = variational_sum_resolvent(a, b, w, FilterPath::diagonal(), 1e-6);
  EXPECT_LE(norm(alg - u), 1e-6);
}

TEST(Commutation, DiagonalPairCommutesToRoundoff) {
  const auto a = OperatorSpec::linear(SymSparseMatrix::diagonal(Vector{1, 2, 3}, true));
  const auto b = OperatorSpec::linear(SymSparseMatrix::diagonal(Vector{5, 0, 1}, true));
  const auto r = check_resolvent_commutation(a, b, {1.0, 0.1}, {1.0, 0.5}, 5, 1e-14);
  EXPECT_TRUE(r.pass);
  EXPECT_LE(r.worst_value, 1e-15);
}

TEST(Commutation, LaplacianAndItsSquare) {
  const SymSparseMatrix l = build_laplacian(GridSpec::make(1, 12));
  const auto r = check_resolvent_commutation(OperatorSpec::linear(l), OperatorSpec::linear(multiply(l, l)),
                                             {1.0, 0.01}, {1.0, 1e-3}, 4, 1e-9);
  EXPECT_TRUE(r.pass) << r.worst_value;
}

TEST(Commutation, LaplacianAndGenericDiagonalFails) {
  const SymSparseMatrix l = build_laplacian(GridSpec::make(1, 16));
  Vector q = random_vector(16, 0);
  for (auto& v : q) v = 1.0 + std::abs(v);
  const auto r = check_resolvent_commutation(OperatorSpec::linear(l), OperatorSpec::linear(SymSparseMatrix::diagonal(q, true)),
                                             {1.0, 0.1, 0.01}, {1.0, 0.1, 0.01}, 8, 1e-9, 0);
  EXPECT_FALSE(r.pass);
  EXPECT_GT(r.worst_value, 1e-3);
  EXPECT_EQ(r.witness.size(), 16u);
  // Reproducible at a fixed seed.
  const auto again = check_resolvent_commutation(OperatorSpec::linear(l), OperatorSpec::linear(SymSparseMatrix::diagonal(q, true)),
                                                 {1.0, 0.1, 0.01}, {1.0, 0.1, 0.01}, 8, 1e-9, 0);
  EXPECT_EQ(r.worst_value, again.worst_value);
  EXPECT_EQ(r.witness.values(), again.witness.values());
}

TEST(Commutation, NonlinearSpecIsACapabilityError) {
  EXPECT_THROW(check_resolvent_commutation(OperatorSpec::identity(2),
                                           OperatorSpec::separable(make_reaction_graph("cubic"), 2), {1.0}, {1.0}, 1,
                                           1e-9),
               CapabilityError);
}

TEST(AcuteAngle, IdentityPair) {
  const auto r = check_acute_angle(OperatorSpec::identity(4), OperatorSpec::identity(4), {1.0, 0.1}, {1.0, 0.1}, 10);
  EXPECT_TRUE(r.pass);
  EXPECT_GE(r.worst_value, 0.0);
}

TEST(AcuteAngle, LaplacianCubic) {
  const GridSpec g = GridSpec::make(1, 16);
  auto a = OperatorSpec::linear(build_laplacian(g));
  a.with_grid(g.meta());
  const auto r = check_acute_angle(a, OperatorSpec::separable(make_reaction_graph("cubic"), 16), {1.0, 0.1, 0.01},
                                   {1.0, 0.1, 0.01}, 50);
  EXPECT_TRUE(r.pass) << r.worst_value;
}

TEST(AcuteAngle, SkewCouplingFailsWithWitness) {
  const auto a = OperatorSpec::linear(SymSparseMatrix::diagonal(Vector{1.0, 0.0}, true));
  const double eps = 0.05;
  const auto b = OperatorSpec::nonsymmetric_linear(2, {eps, 1.0, -1.0, eps});
  const auto r = check_acute_angle(a, b, {1.0, 0.1}, {1.0, 0.1}, 50);
  EXPECT_FALSE(r.pass);
  EXPECT_LT(r.worst_value, -1e-10);
  ASSERT_EQ(r.witness.size(), 2u);
  EXPECT_GT(norm(r.witness), 0.0);
}

TEST(Boundedness, ZeroB) {
  const auto r = boundedness_diagnostic(OperatorSpec::identity(3), OperatorSpec::zero(3), Vector{1, 2, 3},
                                        FilterPath::mu_only());
  EXPECT_TRUE(r.pass);
  for (const auto& [mu, v] : r.trace) EXPECT_EQ(v, 0.0);
}

TEST(Boundedness, LaplacianCubic) {
  const GridSpec g = GridSpec::make(1, 16);
  auto a = OperatorSpec::linear(build_laplacian(g));
  a.with_grid(g.meta());
  const auto r = boundedness_diagnostic(a, OperatorSpec::separable(make_reaction_graph("cubic"), 16),
                                        random_vector(16, 0, g.meta()), FilterPath::diagonal());
  EXPECT_TRUE(r.pass) << r.detail;
}

TEST(Boundedness, ConeAtNegativeData) {
  // u_mu = -mu/(1+mu), B_mu u_mu = -1/(1+mu)
  const auto r = boundedness_diagnostic(OperatorSpec::zero(1), nonneg_cone(), Vector{-1.0}, FilterPath::mu_only());
  EXPECT_TRUE(r.pass);
  for (const auto& [mu, v] : r.trace) {
    EXPECT_NEAR(v, 1.0 / (1.0 + mu), 1e-9);
    EXPECT_LE(v, 1.0);
  }
}

TEST(Boundedness, UnboundedFamilyFails) {
  // D(A) = (-inf, 0] and D(B) = [1, inf) are disjoint, so B_mu u_mu blows up.
  const auto a = OperatorSpec::separable(ScalarMonotoneGraph::normal_cone("le0", -kPlusInfinity, 0.0), 1);
  const auto b = OperatorSpec::separable(ScalarMonotoneGraph::normal_cone("ge1", 1.0, kPlusInfinity), 1);
  const auto r = boundedness_diagnostic(a, b, Vector{0.0}, FilterPath::mu_only());
  EXPECT_FALSE(r.pass) << r.detail;
}

TEST(SumsProperties, PathIndependenceAndTheorem23) {
  struct Pair {
    ConvexFunctionSpec phi, psi;
  };
  const std::vector<Pair> pairs = {
      {ConvexFunctionSpec::preset("quadratic"), ConvexFunctionSpec::preset("indicator_nonneg")},
      {ConvexFunctionSpec::preset("quadratic"), ConvexFunctionSpec::preset("abs")},
      {ConvexFunctionSpec::preset("power4"), ConvexFunctionSpec::preset("abs")},
  };
  const double tol = 1e-5;
  for (const auto& p : pairs) {
    const auto a = OperatorSpec::subdifferential(p.phi, 3);
    const auto b = OperatorSpec::subdifferential(p.psi, 3);
    const Vector w{-2.5, 0.3, 4.0};
    auto [u1, r1] = variational_sum_resolvent(a, b, w, FilterPath::diagonal(), tol);
    auto [u2, r2] = variational_sum_resolvent(a, b, w, FilterPath::skewed(), tol);
    const Vector prox = (p.phi + p.psi).prox(1.0, w);
    EXPECT_LE(max_abs(u1 - u2), 10 * tol);
    EXPECT_LE(max_abs(u1 - prox), 10 * tol);
  }
}

TEST(SumsProperties, SingleParameterConsistency) {
  const auto a = half_square();
  const auto b = nonneg_cone();
  auto [u, rep] = variational_sum_resolvent(a, b, Vector{4.0}, FilterPath::lambda_only(), 1e-4);
  auto [v, rep2] = variational_sum_resolvent(a, b, Vector{4.0}, FilterPath::diagonal(), 1e-4);
  EXPECT_LE(std::abs(u[0] - v[0]), 1e-5);
}

TEST(SumsProperties, SumResolventFirmlyNonexpansive) {
  const GridSpec g = GridSpec::make(1, 8);
  auto a = OperatorSpec::linear(build_laplacian(g));
  const auto b = OperatorSpec::separable(make_reaction_graph("sign-graph"), 8);
  for (unsigned s = 0; s < 5; ++s) {
    const Vector w1 = random_vector(8, 2 * s), w2 = random_vector(8, 2 * s + 1);
    const Vector d = algebraic_sum_resolvent(a, b, w1, 1e-12) - algebraic_sum_resolvent(a, b, w2, 1e-12);
    EXPECT_LE(dot(d, d), dot(d, w1 - w2) + 1e-8);
  }
}

TEST(Diagnostics, RandomVectorReproducible) {
  EXPECT_EQ(random_vector(10, 3).values(), random_vector(10, 3).values());
  EXPECT_NE(random_vector(10, 3).values(), random_vector(10, 4).values());
}

}  // namespace
