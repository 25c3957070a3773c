#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "vsum/examples.hpp"

namespace {

using namespace vsum;

ScalarMonotoneGraph sign_graph() { return make_reaction_graph("sign-graph"); }

double grid_argmin(const std::function<double(double)>& f, double lo, double hi, int m = 400001) {
  double best = lo;
  double fbest = f(lo);
  for (int i = 1; i < m; ++i) {
    const double v = lo + (hi - lo) * i / (m - 1);
    const double fv = f(v);
    if (fv < fbest) {
      fbest = fv;
      best = v;
    }
  }
  return best;
}

TEST(Resolvent, ZeroOperatorIsIdentity) {
  const Vector u = resolvent(OperatorSpec::zero(2), 3.7, Vector{1.5, -2.0});
  EXPECT_EQ(u[0], 1.5);
  EXPECT_EQ(u[1], -2.0);
}

TEST(Resolvent, IdentityHalves) {
  const Vector u = resolvent(OperatorSpec::identity(3), 1.0, Vector{3.0, 0.0, 0.0});
  EXPECT_NEAR(u[0], 1.5, 1e-14);
  EXPECT_EQ(u[1], 0.0);
}

TEST(Resolvent, AbsSoftThresholdMatchesGridMinimization) {
  const OperatorSpec t = OperatorSpec::separable(sign_graph(), 1);
  for (double w : {2.0, 0.2}) {
    const double oracle = grid_argmin([w](double v) { return 0.5 * std::abs(v) + 0.5 * (v - w) * (v - w); }, -3, 3);
    const double u = resolvent(t, 0.5, Vector{w})[0];
    EXPECT_NEAR(u, oracle, 1e-4);
  }
  EXPECT_NEAR(resolvent(t, 0.5, Vector{2.0})[0], 1.5, 1e-12);
  EXPECT_EQ(resolvent(t, 0.5, Vector{0.2})[0], 0.0);
}

TEST(Resolvent, SubdifferentialProxMatchesSeparable) {
  const OperatorSpec s = OperatorSpec::subdifferential(ConvexFunctionSpec::preset("abs"), 1);
  EXPECT_NEAR(resolvent(s, 0.5, Vector{2.0})[0], 1.5, 1e-12);
  EXPECT_NEAR(resolvent(s, 0.5, Vector{-0.3})[0], 0.0, 1e-12);
}

TEST(Resolvent, DimensionMismatch) { EXPECT_THROW(resolvent(OperatorSpec::identity(2), 1.0, Vector{1.0}), ConfigError); }

TEST(Resolvent, NonPositiveLambda) { EXPECT_THROW(resolvent(OperatorSpec::identity(1), 0.0, Vector{1.0}), ConfigError); }

TEST(Yosida, ZeroOperator) {
  const Vector y = yosida(OperatorSpec::zero(2), 0.3, Vector{4.0, -1.0});
  EXPECT_EQ(y[0], 0.0);
  EXPECT_EQ(y[1], 0.0);
}

TEST(Yosida, IdentityClosedForm) {
  EXPECT_NEAR(yosida(OperatorSpec::identity(1), 1.0, Vector{3.0})[0], 1.5, 1e-14);
  EXPECT_NEAR(yosida(OperatorSpec::identity(1), 0.25, Vector{3.0})[0], 3.0 / 1.25, 1e-14);
}

TEST(Yosida, AbsInsideDeadZone) {
  const double y = yosida(OperatorSpec::separable(sign_graph(), 1), 0.5, Vector{0.2})[0];
  EXPECT_NEAR(y, 0.4, 1e-14);
  EXPECT_LE(std::abs(y), 1.0);
}

TEST(MoreauEnvelope, Zero) {
  const auto f = ConvexFunctionSpec::preset("zero");
  for (double l : {0.1, 1.0, 10.0}) EXPECT_EQ(moreau_envelope(f, l, Vector{3.0, -2.0}), 0.0);
}

TEST(MoreauEnvelope, HuberRegime) {
  const auto f = ConvexFunctionSpec::preset("abs");
  const double oracle_v = grid_argmin([](double v) { return std::abs(v) + 0.5 * (0.5 - v) * (0.5 - v); }, -2, 2);
  const double oracle = std::abs(oracle_v) + 0.5 * (0.5 - oracle_v) * (0.5 - oracle_v);
  EXPECT_NEAR(moreau_envelope(f, 1.0, Vector{0.5}), 0.125, 1e-14);
  EXPECT_NEAR(moreau_envelope(f, 1.0, Vector{0.5}), oracle, 1e-9);
}

TEST(MoreauEnvelope, IndicatorIsHalfSquaredDistance) {
  const auto f = ConvexFunctionSpec::preset("indicator_nonneg");
  EXPECT_TRUE(is_plus_infinity(f.value(Vector{-2.0})));
  EXPECT_NEAR(moreau_envelope(f, 1.0, Vector{-2.0}), 2.0, 1e-14);
}

TEST(MinimalSection, Examples) {
  EXPECT_EQ(minimal_section_norm(sign_graph(), 0.0), 0.0);
  EXPECT_EQ(minimal_section_norm(sign_graph(), 2.0), 1.0);
  EXPECT_EQ(minimal_section_norm(make_reaction_graph("cubic"), 2.0), 8.0);
  EXPECT_EQ(minimal_section_norm(make_reaction_graph("normal-cone-nonneg"), 0.0), 0.0);
  EXPECT_THROW(minimal_section_norm(make_reaction_graph("normal-cone-nonneg"), -1.0), DomainError);
}

TEST(ScalarGraph, RejectsNonMonotoneInput) {
  EXPECT_THROW(ScalarMonotoneGraph::piecewise("bad", {{0.0, 1.0, -1.0}}, 0.0, 0.0), ConfigError);
  EXPECT_THROW(ScalarMonotoneGraph::piecewise("bad", {{0.0, 0.0, 0.0}, {1.0, -1.0, -1.0}}, 0.0, 0.0), ConfigError);
  EXPECT_THROW(ScalarMonotoneGraph::piecewise("bad", {{0.0, 0.0, 0.0}}, -1.0, 0.0), ConfigError);
  EXPECT_THROW(ScalarMonotoneGraph::normal_cone("bad", 1.0, 0.0), ConfigError);
}

TEST(ScalarGraph, CompositeResolventSolvesInclusion) {
  // sign + cubic
  const auto g = ScalarMonotoneGraph::sum("sum", {sign_graph(), make_reaction_graph("cubic")});
  for (double w : {-5.0, -1.0, -0.3, 0.0, 0.7, 3.0}) {
    const double u = g.resolvent(0.5, w);
    const auto v = g.value(u);
    ASSERT_TRUE(v.has_value());
    EXPECT_TRUE((Interval{u + 0.5 * v->lo, u + 0.5 * v->hi}.contains(w, 1e-10))) << w;
  }
}

TEST(ConvexFunction, PresetsAndUnknownName) {
  EXPECT_NEAR(ConvexFunctionSpec::preset("power4").scalar_value(2.0), 4.0, 1e-15);
  EXPECT_NEAR(ConvexFunctionSpec::preset("quadratic").scalar_value(3.0), 4.5, 1e-15);
  EXPECT_THROW(ConvexFunctionSpec::preset("nope"), ConfigError);
}

// Operator variants used by the property suites.
std::vector<OperatorSpec> sample_specs(std::size_t n) {
  std::vector<OperatorSpec> specs;
  specs.push_back(OperatorSpec::zero(n));
  if (n >= 2) {
    specs.push_back(OperatorSpec::linear(build_laplacian(GridSpec::make(1, n))));
    specs.push_back(build_form_sum(GridSpec::make(1, n), PotentialSpec::defaults(1)));
  }
  for (const auto& name : reaction_presets()) specs.push_back(OperatorSpec::separable(make_reaction_graph(name), n));
  specs.push_back(OperatorSpec::subdifferential(ConvexFunctionSpec::preset("abs") + ConvexFunctionSpec::preset("power4"), n));
  specs.push_back(OperatorSpec::subdifferential(ConvexFunctionSpec::box_indicator(-0.5, 1.0), n));
  if (n >= 2) {
    specs.push_back(OperatorSpec::subdifferential(
        ConvexFunctionSpec::quadratic_form(build_laplacian(GridSpec::make(1, n))) + ConvexFunctionSpec::preset("abs"), n));
  }
  return specs;
}

TEST(MonotoneProperties, FirmNonexpansivenessAndYosidaLipschitz) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> lam(-3.0, 1.0);
  for (std::size_t n : {1u, 5u, 16u}) {
    for (const auto& t : sample_specs(n)) {
      for (unsigned k = 0; k < 6; ++k) {
        const double l = std::pow(10.0, lam(rng));
        Vector w1 = random_vector(n, 10 * k + n);
        Vector w2 = random_vector(n, 10 * k + n + 1);
        w1 *= 3.0;
        const Vector j1 = resolvent(t, l, w1), j2 = resolvent(t, l, w2);
        const Vector dj = j1 - j2, dw = w1 - w2;
        EXPECT_LE(dot(dj, dj), dot(dj, dw) + 1e-8) << t.describe();
        const Vector y1 = yosida(t, l, w1), y2 = yosida(t, l, w2);
        EXPECT_LE(norm2(y1 - y2), norm2(dw) / l + 1e-8) << t.describe();
        EXPECT_GE(dot(y1 - y2, dw), -1e-8) << t.describe();
      }
    }
  }
}

TEST(MonotoneProperties, GraphInclusionForSeparableSpecs) {
  for (const auto& name : reaction_presets()) {
    const auto g = make_reaction_graph(name);
    for (double l : {1.0, 0.1, 1e-3}) {
      for (double w : {-3.0, -0.4, 0.0, 0.25, 2.0}) {
        const double j = g.resolvent(l, w);
        const double y = g.yosida(l, w);
        const auto v = g.value(j);
        ASSERT_TRUE(v.has_value()) << name;
        EXPECT_TRUE(v->contains(y, 1e-9)) << name << " w=" << w;
      }
    }
  }
}

TEST(MonotoneProperties, YosidaApproachesMinimalSection) {
  for (const auto& name : reaction_presets()) {
    const auto g = make_reaction_graph(name);
    for (double x : {-1.5, -0.2, 0.0, 0.3, 2.0}) {
      if (!g.value(x)) continue;
      const double bound = minimal_section_norm(g, x);
      double prev = 0.0;
      for (int k = 0; k <= 20; ++k) {
        const double l = std::ldexp(1.0, -k);
        const double v = std::abs(g.yosida(l, x));
        EXPECT_GE(v, prev - 1e-9) << name << " x=" << x << " k=" << k;
        EXPECT_LE(v, bound + 1e-9) << name << " x=" << x;
        prev = v;
      }
    }
  }
}

TEST(MonotoneProperties, EnvelopeGradientIsYosida) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0), lam(0.05, 2.0);
  const std::vector<ConvexFunctionSpec> fs = {ConvexFunctionSpec::preset("power4"),
                                              ConvexFunctionSpec::preset("quadratic", 2.0),
                                              ConvexFunctionSpec::preset("power4") + ConvexFunctionSpec::preset("quadratic")};
  for (int trial = 0; trial < 30; ++trial) {
    const auto& f = fs[trial % fs.size()];
    const double l = lam(rng);
    const double x = u(rng);
    const double h = 1e-6;
    const double fd = (moreau_envelope(f, l, Vector{x + h}) - moreau_envelope(f, l, Vector{x - h})) / (2 * h);
    const double y = yosida(OperatorSpec::subdifferential(f, 1), l, Vector{x})[0];
    EXPECT_LE(std::abs(fd - y), 1e-5 * std::max(1.0, std::abs(y))) << f.describe() << " x=" << x;
  }
}

TEST(MonotoneProperties, QuadraticFunctionalMatchesLinearResolvent) {
  const SymSparseMatrix l = build_laplacian(GridSpec::make(2, 5));
  const auto phi = OperatorSpec::subdifferential(ConvexFunctionSpec::quadratic_form(l), l.dimension());
  const auto lin = OperatorSpec::linear(l);
  for (double lam : {1.0, 0.01}) {
    const Vector w = random_vector(l.dimension(), 3);
    EXPECT_LE(max_abs(resolvent(phi, lam, w) - resolvent(lin, lam, w)), 1e-9);
  }
}

TEST(MonotoneProperties, ConvexityOnSamples) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0), t(0.0, 1.0);
  for (const char* name : {"abs", "indicator_nonneg", "power4", "quadratic", "zero"}) {
    const auto f = ConvexFunctionSpec::preset(name);
    for (int k = 0; k < 200; ++k) {
      double x = u(rng), y = u(rng);
      if (std::string(name) == "indicator_nonneg") {
        x = std::abs(x);
        y = std::abs(y);
      }
      const double s = t(rng);
      EXPECT_LE(f.scalar_value(s * x + (1 - s) * y), s * f.scalar_value(x) + (1 - s) * f.scalar_value(y) + 1e-10);
    }
  }
}

TEST(NonsymmetricLinear, RejectsNonMonotone) {
  EXPECT_THROW(OperatorSpec::nonsymmetric_linear(2, {0.0, 2.0, 0.0, -1.0}), MonotonicityError);
  const auto t = OperatorSpec::nonsymmetric_linear(2, {0.1, 1.0, -1.0, 0.1});
  EXPECT_FALSE(t.selfadjoint());
  // (I + A) u = w for A = [[.1, 1], [-1, .1]], w = (1.1, -1) -> u = (1, 0)... check by substitution
  const Vector u = resolvent(t, 1.0, Vector{1.1, -1.0});
  EXPECT_NEAR(1.1 * u[0] + u[1], 1.1, 1e-12);
  EXPECT_NEAR(-u[0] + 1.1 * u[1], -1.0, 1e-12);
}

}  // namespace
