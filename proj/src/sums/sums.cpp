#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "vsum/sums.hpp"

namespace vsum {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// One side of a regularized equation: T itself (param == 0) or its Yosida
// approximation T_param.
struct Term {
  const OperatorSpec& op;
  double param;

  bool differentiable() const { return param > 0.0 ? op.has_yosida_jacobian() : op.has_jacobian(); }

  Vector value(const Vector& u, double tol) const { return param > 0.0 ? yosida(op, param, u, tol) : apply(op, u); }

  LinearOperator derivative(const Vector& u, double tol) const {
    return param > 0.0 ? yosida_jacobian(op, param, u, tol) : jacobian(op, u);
  }

  // J^{scale * term}_t. For the Yosida approximation this uses
  // (I + t T_p)^{-1} x = p/(p+t) x + t/(p+t) J^T_{p+t} x.
  Vector resolvent_of(double t, const Vector& x, double tol) const {
    if (param == 0.0) return resolvent(op, t, x, tol);
    const double s = param + t;
    Vector out = resolvent(op, s, x, tol);
    out *= t / s;
    axpy(param / s, x, out);
    return out;
  }

  // Coordinate-wise scalar graph of the term, when the operator is separable.
  std::optional<ScalarMonotoneGraph> scalar() const {
    std::optional<ScalarMonotoneGraph> g;
    if (const auto* s = std::get_if<OperatorSpec::Separable>(&op.variant())) {
      g = s->graph;
    } else if (const auto* f = std::get_if<OperatorSpec::Subdifferential>(&op.variant())) {
      if (!f->function.quadratic()) g = f->function.separable_subdifferential();
    } else if (const auto* l = std::get_if<OperatorSpec::Linear>(&op.variant())) {
      if (l->matrix.nonzeros() == 0) g = ScalarMonotoneGraph::piecewise("zero", {{0.0, 0.0, 0.0}}, 0.0, 0.0);
    }
    if (!g || param == 0.0) return g;
    const double p = param;
    return ScalarMonotoneGraph::smooth(
        g->name() + "_yosida", [g = *g, p](double x) { return g.yosida(p, x); },
        [g = *g, p](double x) { return g.yosida_slope(p, x); });
  }
};

bool is_zero_operator(const OperatorSpec& t) {
  const auto* l = std::get_if<OperatorSpec::Linear>(&t.variant());
  return l != nullptr && l->matrix.nonzeros() == 0;
}

SumSolve solve_two_terms(const Term& a, const Term& b, const Vector& w, double tol, const Vector* warm, double scale) {
  if (a.op.dimension() != w.size() || b.op.dimension() != w.size()) {
    throw ConfigError("operator dimensions do not match the right-hand side");
  }
  const double abs_tol = tol * (1.0 + norm2(w));
  // Inner linear solves run well below the outer tolerance.
  const double inner_tol = 1e-13;

  // Separable pairs decouple into scalar inclusions w_i in u + scale (g_a + g_b)(u).
  if (const auto ga = a.scalar(), gb = b.scalar(); ga && gb) {
    const ScalarMonotoneGraph sum = ScalarMonotoneGraph::sum("sum", {*ga, *gb});
    Vector u = zeros_like(w);
    for (std::size_t i = 0; i < w.size(); ++i) u[i] = sum.resolvent(scale, w[i]);
    return {std::move(u), 0.0, 0};
  }

  if (a.differentiable() && b.differentiable()) {
    NewtonSystem sys;
    sys.residual = [&](const Vector& u) {
      Vector r = a.value(u, inner_tol);
      r += b.value(u, inner_tol);
      r *= scale;
      r += u;
      r -= w;
      return r;
    };
    sys.jacobian = [&](const Vector& u) {
      LinearOperator ja = a.derivative(u, inner_tol);
      LinearOperator jb = b.derivative(u, inner_tol);
      const std::size_t n = u.size();
      return LinearOperator{n, [ja = std::move(ja), jb = std::move(jb), scale, n](std::span<const double> x,
                                                                                  std::span<double> y) {
                              std::vector<double> tmp(n);
                              ja.apply(x, y);
                              jb.apply(x, tmp);
                              for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + scale * (y[i] + tmp[i]);
                            }};
    };
    // Generalized Jacobians can mislead Newton at kinks of a Yosida term;
    // splitting below is the fallback.
    try {
      const NewtonResult nr = guarded_newton(sys, warm ? *warm : w, abs_tol);
      Vector u = nr.x;
      u.set_grid(w.grid());
      return {std::move(u), nr.residual_norm, nr.iterations};
    } catch (const NonConvergenceError&) {
    }
  }

  const ResolventFn ja = [&](double t, const Vector& x) { return a.resolvent_of(t, x, inner_tol); };
  const ResolventFn jb = [&](double t, const Vector& x) { return b.resolvent_of(t, x, inner_tol); };
  SplittingResult sr = douglas_rachford(ja, jb, w, scale, abs_tol);
  sr.u.set_grid(w.grid());
  return {std::move(sr.u), sr.residual, sr.iterations};
}

}  // namespace

Vector regularized_resolvent(const OperatorSpec& a, const OperatorSpec& b, double lambda, double mu, const Vector& w,
                             double tol, const Vector* warm, double scale) {
  if (!(lambda >= 0.0) || !(mu >= 0.0) || lambda + mu == 0.0) {
    throw ConfigError("regularization parameters must satisfy lambda, mu >= 0 and lambda + mu != 0");
  }
  if (!(tol > 0.0) || !(scale > 0.0)) throw ConfigError("tolerance and scale must be positive");
  return solve_two_terms(Term{a, lambda}, Term{b, mu}, w, tol, warm, scale).u;
}

std::pair<Vector, ConvergenceReport> variational_sum_resolvent(const OperatorSpec& a, const OperatorSpec& b,
                                                               const Vector& w, const FilterPath& path, double tol,
                                                               const Vector* warm, double scale) {
  if (!(tol > 0.0)) throw ConfigError("tolerance must be positive");
  ConvergenceReport rep;
  rep.label = path.label();
  rep.tolerance = tol;
  const double inner_tol = std::max(std::min(1e-3 * tol, 1e-9), 1e-12);

  std::vector<Vector> iterates;
  iterates.reserve(path.size());
  std::vector<bool> satisfied;
  for (const PathPoint& p : path.points()) {
    const Vector* start = iterates.empty() ? warm : &iterates.back();
    Vector u = regularized_resolvent(a, b, p.lambda, p.mu, w, inner_tol, start, scale);
    ConvergenceRecord rec{p.lambda, p.mu, norm(u), kNaN};
    if (!iterates.empty()) {
      rec.diff = norm(u - iterates.back());
      satisfied.push_back(rec.diff <= tol * (1.0 + norm(iterates.back())));
    }
    rep.records.push_back(rec);
    iterates.push_back(std::move(u));
  }

  // Length of the trailing run of satisfied Cauchy steps.
  std::size_t run = 0;
  while (run < satisfied.size() && satisfied[satisfied.size() - 1 - run]) ++run;
  rep.converged = run >= static_cast<std::size_t>(kSustainedSteps);
  if (rep.converged) rep.converged_at = static_cast<int>(satisfied.size() - run) + 1;

  rep.limit = iterates.back();
  rep.rate = kNaN;
  std::ostringstream verdict;
  if (iterates.size() >= 2) {
    const auto& pts = path.points();
    const std::size_t k = pts.size() - 1;
    const double s1 = std::max(pts[k - 1].lambda, pts[k - 1].mu);
    const double s2 = std::max(pts[k].lambda, pts[k].mu);
    Vector step = iterates[k] - iterates[k - 1];
    Vector extrapolated = iterates[k];
    axpy(s2 / (s1 - s2), step, extrapolated);
    rep.extrapolated = std::move(extrapolated);
    if (rep.records.size() >= 3) {
      const double d1 = rep.records[k - 1].diff;
      const double d2 = rep.records[k].diff;
      if (d1 > 0.0 && d2 > 0.0) rep.rate = std::log(d1 / d2) / std::log(s1 / s2);
    }
  }
  const double final_diff = rep.records.size() >= 2 ? rep.records.back().diff : 0.0;
  if (rep.converged) {
    verdict << "converged: Cauchy criterion held for the last " << run << " steps (from step " << rep.converged_at
            << "), final difference " << final_diff;
  } else {
    verdict << "not converged: " << run << " trailing Cauchy-satisfied steps (need " << kSustainedSteps
            << "), final difference " << final_diff << " vs tolerance " << tol;
  }
  rep.verdict = verdict.str();
  return {rep.limit, rep};
}

SumSolve algebraic_sum_resolvent_detailed(const OperatorSpec& a, const OperatorSpec& b, const Vector& w, double tol,
                                          const Vector* warm, double scale) {
  if (!(tol > 0.0) || !(scale > 0.0)) throw ConfigError("tolerance and scale must be positive");
  if (is_zero_operator(b)) return {resolvent(a, scale, w), 0.0, 0};
  if (is_zero_operator(a)) return {resolvent(b, scale, w), 0.0, 0};
  const auto ma = matrix_of(a);
  const auto mb = matrix_of(b);
  if (ma && mb) {
    const SymSparseMatrix sum = *ma + *mb;
    CgResult r = cg_solve_detailed(sum, 1.0 / scale, (1.0 / scale) * w, std::min(tol, 1e-12));
    r.x.set_grid(w.grid());
    return {std::move(r.x), r.relative_residual * norm2(w), static_cast<int>(r.iterations)};
  }
  return solve_two_terms(Term{a, 0.0}, Term{b, 0.0}, w, tol, warm, scale);
}

Vector algebraic_sum_resolvent(const OperatorSpec& a, const OperatorSpec& b, const Vector& w, double tol,
                               const Vector* warm, double scale) {
  return algebraic_sum_resolvent_detailed(a, b, w, tol, warm, scale).u;
}

}  // namespace vsum
