#include <algorithm>
#include <cmath>
#include <string>

#include "vsum/kernels.hpp"
#include "vsum/linalg.hpp"

namespace vsum {
namespace {


struct CgOutcome {
  std::size_t iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
  bool curvature_failure = false;
};

// Plain CG with a true-residual check before accepting convergence. `apply`
// writes A p into q.
template <typename Apply>
CgOutcome conjugate_gradient(Apply&& apply, std::span<const double> b, std::span<double> x, double tol,
                             std::size_t max_iterations, bool warm) {
  const std::size_t n = b.size();
  const double bnorm = std::sqrt(kernels::dot(b, b));
  CgOutcome out;
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    out.converged = true;
    return out;
  }
  std::vector<double> r(n), p(n), q(n);
  auto true_residual = [&] {
    if (warm || out.iterations > 0) {
      apply(std::span<const double>(x.data(), n), std::span<double>(q));
      for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
    } else {
      std::copy(b.begin(), b.end(), r.begin());
    }
    return std::sqrt(kernels::dot(r, r));
  };
  if (!warm) std::fill(x.begin(), x.end(), 0.0);

  double rnorm = true_residual();
  while (true) {
    out.relative_residual = rnorm / bnorm;
    if (out.relative_residual <= tol) {
      out.converged = true;
      return out;
    }
    if (out.iterations >= max_iterations) return out;

    std::copy(r.begin(), r.end(), p.begin());
    double rr = rnorm * rnorm;
    bool restart = false;
    while (out.iterations < max_iterations) {
      apply(std::span<const double>(p), std::span<double>(q));
      ++out.iterations;
      const double pq = kernels::dot(p, q);
      const double pp = kernels::dot(p, p);
      if (!(pq > 1e-300 * pp) || !std::isfinite(pq)) {
        out.curvature_failure = true;
        return out;
      }
      const double alpha = rr / pq;
      kernels::axpy(alpha, p, x);
      kernels::axpy(-alpha, q, r);
      const double rr_new = kernels::dot(r, r);
      if (std::sqrt(rr_new) <= tol * bnorm) {
        restart = true;
        break;
      }
      kernels::xpby(r, rr_new / rr, p);
      rr = rr_new;
    }
    rnorm = true_residual();
    if (!restart && rnorm / bnorm > tol) {
      out.relative_residual = rnorm / bnorm;
      return out;
    }
  }
}

}  // namespace

CgResult cg_solve_detailed(const SymSparseMatrix& m, double shift, const Vector& b, double tol) {
  if (b.size() != m.dimension()) throw ConfigError("cg_solve: right-hand side length mismatch");
  if (!(shift >= 0.0)) throw ConfigError("cg_solve: shift must be nonnegative");
  if (!(tol > 0.0)) throw ConfigError("cg_solve: tolerance must be positive");
  CgResult res{zeros_like(b), 0, 0.0};
  const std::size_t cap = 10 * m.dimension();
  auto apply = [&](std::span<const double> in, std::span<double> out) { m.apply(in, out, shift); };
  const CgOutcome o = conjugate_gradient(apply, b.span(), res.x.span(), tol, cap, false);
  res.iterations = o.iterations;
  res.relative_residual = o.relative_residual;
  if (!o.converged) {
    throw IterationLimitError("cg_solve did not reach tolerance (relative residual " +
                                  std::to_string(o.relative_residual) + " after " + std::to_string(o.iterations) +
                                  " iterations)",
                              o.relative_residual);
  }
  return res;
}

Vector cg_solve(const SymSparseMatrix& m, double shift, const Vector& b, double tol) {
  return cg_solve_detailed(m, shift, b, tol).x;
}

CgResult cg_solve(const LinearOperator& op, const Vector& b, double tol, std::size_t max_iterations,
                  const Vector* x0) {
  if (b.size() != op.n) throw ConfigError("cg_solve: operator size mismatch");
  CgResult res{x0 ? *x0 : zeros_like(b), 0, 0.0};
  const CgOutcome o = conjugate_gradient(op.apply, b.span(), res.x.span(), tol, max_iterations, x0 != nullptr);
  res.iterations = o.iterations;
  res.relative_residual = o.relative_residual;
  if (o.curvature_failure) throw MonotonicityError("operator is not positive definite (nonpositive curvature in CG)");
  if (!o.converged) {
    throw IterationLimitError("matrix-free CG did not reach tolerance", o.relative_residual);
  }
  return res;
}

NewtonResult guarded_newton(const NewtonSystem& sys, const Vector& x0, double tol) {
  if (!(tol > 0.0)) throw ConfigError("guarded_newton: tolerance must be positive");
  NewtonResult res{x0, 0.0, 0};
  Vector r = sys.residual(res.x);
  res.residual_norm = norm2(r);
  const std::size_t n = x0.size();

  for (; res.iterations < kNewtonMaxIterations; ++res.iterations) {
    if (res.residual_norm <= tol) return res;

    const LinearOperator jac = sys.jacobian(res.x);
    Vector rhs = -1.0 * r;
    Vector step;
    try {
      step = cg_solve(jac, rhs, 1e-13, 20 * n + 100).x;
    } catch (const IterationLimitError&) {
      // An inexact direction can still reduce the residual; try it anyway.
      step = rhs;
    }

    double t = 1.0;
    bool accepted = false;
    for (int halving = 0; halving <= kNewtonMaxHalvings; ++halving, t *= 0.5) {
      Vector trial = res.x;
      axpy(t, step, trial);
      Vector rt = sys.residual(trial);
      const double rtn = norm2(rt);
      if (rtn < res.residual_norm) {
        res.x = std::move(trial);
        r = std::move(rt);
        res.residual_norm = rtn;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      throw NonConvergenceError("guarded_newton stalled at residual " + std::to_string(res.residual_norm),
                                res.residual_norm, res.x.values());
    }
  }
  if (res.residual_norm <= tol) return res;
  throw NonConvergenceError("guarded_newton: " + std::to_string(kNewtonMaxIterations) +
                                " iterations without meeting tolerance (residual " +
                                std::to_string(res.residual_norm) + ")",
                            res.residual_norm, res.x.values());
}

}  // namespace vsum
