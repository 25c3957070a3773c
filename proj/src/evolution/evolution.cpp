#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "vsum/evolution.hpp"

namespace vsum {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct StepOutcome {
  Vector u;
  double residual;
};

StepOutcome step_resolvent(const EvolutionProblem& p, double tau, const Vector& x, const Vector& warm, double tol,
                           std::size_t steps) {
  switch (p.strategy) {
    case SumStrategy::kAlgebraic: {
      SumSolve s = algebraic_sum_resolvent_detailed(p.a, p.b, x, tol, &warm, tau);
      return {std::move(s.u), s.residual};
    }
    case SumStrategy::kVariational: {
      const double step_tol = tol / static_cast<double>(steps);
      auto [u, rep] = variational_sum_resolvent(p.a, p.b, x, p.path, step_tol, &warm, tau);
      if (!rep.converged) throw Error("filter limit did not converge: " + rep.verdict);
      return {std::move(u), rep.records.back().diff};
    }
    case SumStrategy::kFormSum: {
      const auto ma = matrix_of(p.a);
      const auto mb = matrix_of(p.b);
      if (!ma || !mb) throw CapabilityError("form_sum strategy needs selfadjoint linear operators");
      const SymSparseMatrix m = *ma + *mb;
      CgResult r = cg_solve_detailed(m, 1.0 / tau, (1.0 / tau) * x, std::min(tol, 1e-12));
      r.x.set_grid(x.grid());
      return {std::move(r.x), r.relative_residual * norm2(x)};
    }
  }
  throw Error("unknown sum strategy");
}

}  // namespace

std::string to_string(SumStrategy s) {
  switch (s) {
    case SumStrategy::kAlgebraic: return "algebraic";
    case SumStrategy::kVariational: return "variational";
    case SumStrategy::kFormSum: return "form_sum";
  }
  return "?";
}

SumStrategy parse_strategy(const std::string& s) {
  if (s == "algebraic") return SumStrategy::kAlgebraic;
  if (s == "variational") return SumStrategy::kVariational;
  if (s == "form_sum") return SumStrategy::kFormSum;
  throw ConfigError("unknown sum strategy '" + s + "' (expected algebraic, variational, form_sum)");
}

Forcing Forcing::zero(std::size_t n, std::optional<GridMeta> grid) {
  Forcing f;
  f.n_ = n;
  f.label_ = "zero";
  f.fn_ = [v = Vector(std::vector<double>(n, 0.0), grid)](double) { return v; };
  return f;
}

Forcing Forcing::constant(Vector value, std::string label) {
  Forcing f;
  f.n_ = value.size();
  f.label_ = std::move(label);
  f.fn_ = [v = std::move(value)](double) { return v; };
  return f;
}

Forcing Forcing::table(std::vector<double> times, std::vector<Vector> values) {
  if (times.size() != values.size() + 1 || values.empty()) {
    throw ConfigError("forcing table needs one more time node than values");
  }
  if (times.front() != 0.0) throw ConfigError("forcing table must start at t = 0");
  for (std::size_t j = 1; j < times.size(); ++j) {
    if (!(times[j] > times[j - 1])) throw ConfigError("forcing table times must increase");
  }
  for (const auto& v : values) {
    if (v.size() != values.front().size()) throw ConfigError("forcing table values differ in length");
  }
  Forcing f;
  f.n_ = values.front().size();
  f.label_ = "table";
  f.coverage_ = times.back();
  f.fn_ = [times = std::move(times), values = std::move(values)](double t) {
    // Cell (t_j, t_{j+1}] owns its right endpoint; t = 0 belongs to the first cell.
    auto it = std::lower_bound(times.begin() + 1, times.end(), t);
    if (it == times.end()) throw DomainError("forcing table does not cover t = " + std::to_string(t));
    return values[static_cast<std::size_t>(it - times.begin()) - 1];
  };
  return f;
}

Forcing Forcing::function(std::size_t n, std::function<Vector(double)> fn, std::string label, double horizon) {
  Forcing f;
  f.n_ = n;
  f.label_ = std::move(label);
  f.coverage_ = horizon;
  f.fn_ = std::move(fn);
  return f;
}

Vector Forcing::at(double t) const {
  Vector v = fn_(t);
  if (v.size() != n_) throw ConfigError("forcing returned a vector of the wrong length");
  return v;
}

EvolutionProblem EvolutionProblem::make(OperatorSpec a, OperatorSpec b, Forcing forcing, double horizon,
                                        SumStrategy strategy, std::optional<Vector> initial, FilterPath path) {
  const std::size_t n = a.dimension();
  if (b.dimension() != n) throw ConfigError("operators A and B have different dimensions");
  if (forcing.dimension() != n) throw ConfigError("forcing dimension does not match the operators");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ConfigError("horizon T must be positive");
  if (forcing.coverage() < horizon * (1.0 - 1e-12)) throw ConfigError("forcing does not cover [0, T]");
  Vector u0 = initial ? *initial : Vector(std::vector<double>(n, 0.0), a.grid() ? a.grid() : b.grid());
  if (u0.size() != n) throw ConfigError("initial state dimension does not match the operators");
  return EvolutionProblem{std::move(a), std::move(b), std::move(forcing), horizon, std::move(u0), strategy,
                          std::move(path)};
}

Trajectory implicit_euler_solve(const EvolutionProblem& p, std::size_t steps, double tol) {
  if (steps == 0) throw ConfigError("implicit_euler_solve needs at least one step");
  if (!(tol > 0.0)) throw ConfigError("tolerance must be positive");
  Trajectory tr;
  tr.step = p.horizon / static_cast<double>(steps);
  tr.tolerance = tol;
  tr.strategy = p.strategy;
  tr.times.reserve(steps + 1);
  tr.states.reserve(steps + 1);
  tr.times.push_back(0.0);
  tr.states.push_back(p.initial);
  for (std::size_t i = 0; i < steps; ++i) {
    // Last node is exactly T.
    const double t_next = i + 1 == steps ? p.horizon : tr.step * static_cast<double>(i + 1);
    const Vector& u = tr.states.back();
    try {
      Vector x = u;
      axpy(tr.step, p.forcing.at(t_next), x);
      StepOutcome out = step_resolvent(p, tr.step, x, u, tol, steps);
      tr.times.push_back(t_next);
      tr.states.push_back(std::move(out.u));
      tr.residuals.push_back(out.residual);
    } catch (const Error& e) {
      throw EvolutionStepError("step " + std::to_string(i) + " failed: " + e.what(), tr, i);
    }
  }
  return tr;
}

namespace {

ConvergenceReport study_against(const EvolutionProblem& p, const std::vector<std::size_t>& steps_list,
                                const Vector& reference, double tol, const std::string& label) {
  if (steps_list.empty()) throw ConfigError("step study needs a nonempty steps list");
  ConvergenceReport rep;
  rep.label = label;
  rep.tolerance = tol;
  rep.limit = reference;
  std::vector<double> errors;
  for (std::size_t s : steps_list) {
    const Trajectory tr = implicit_euler_solve(p, s, tol);
    const double err = norm(tr.states.back() - reference);
    errors.push_back(err);
    rep.records.push_back({tr.step, 0.0, norm(tr.states.back()), err});
  }
  rep.rate = kNaN;
  if (errors.size() >= 2) {
    const std::size_t k = errors.size() - 1;
    if (errors[k] > 0.0 && errors[k - 1] > 0.0) {
      rep.rate = std::log(errors[k - 1] / errors[k]) /
                 std::log(static_cast<double>(steps_list[k]) / static_cast<double>(steps_list[k - 1]));
    }
  }
  rep.converged = errors.back() <= tol * (1.0 + norm(reference));
  if (rep.converged) rep.converged_at = static_cast<int>(errors.size()) - 1;
  std::ostringstream v;
  v << "observed order " << rep.rate << "; final error " << errors.back();
  rep.verdict = v.str();
  return rep;
}

}  // namespace

ConvergenceReport step_convergence_study(const EvolutionProblem& p, const std::vector<std::size_t>& steps_list,
                                         std::size_t reference_steps, double tol) {
  if (steps_list.empty()) throw ConfigError("step study needs a nonempty steps list");
  const std::size_t max_steps = *std::max_element(steps_list.begin(), steps_list.end());
  if (reference_steps < 4 * max_steps) throw ConfigError("reference_steps must be at least 4 * max(steps_list)");
  const Trajectory ref = implicit_euler_solve(p, reference_steps, tol);
  return study_against(p, steps_list, ref.states.back(), tol, "steps vs reference(" + std::to_string(reference_steps) + ")");
}

ConvergenceReport step_convergence_study(const EvolutionProblem& p, const std::vector<std::size_t>& steps_list,
                                         const Vector& exact_final, double tol) {
  if (exact_final.size() != p.dimension()) throw ConfigError("exact final state has the wrong dimension");
  return study_against(p, steps_list, exact_final, tol, "steps vs exact");
}

DiagnosticReport flow_nonexpansiveness_check(const EvolutionProblem& p, const Vector& u0_a, const Vector& u0_b,
                                             std::size_t steps, double tol) {
  EvolutionProblem pa = p;
  EvolutionProblem pb = p;
  pa.initial = u0_a;
  pb.initial = u0_b;
  if (u0_a.size() != p.dimension() || u0_b.size() != p.dimension()) {
    throw ConfigError("initial states must match the problem dimension");
  }
  const Trajectory ta = implicit_euler_solve(pa, steps, tol);
  const Trajectory tb = implicit_euler_solve(pb, steps, tol);

  DiagnosticReport rep;
  rep.name = "flow-nonexpansiveness";
  rep.samples = steps;
  rep.tolerance = kFlowSlack;
  rep.comparison = "<=";
  rep.worst_value = -kPlusInfinity;
  double prev = norm(ta.states[0] - tb.states[0]);
  rep.trace.emplace_back(0.0, prev);
  rep.witness = ta.states[0] - tb.states[0];
  for (std::size_t i = 1; i < ta.states.size(); ++i) {
    const Vector d = ta.states[i] - tb.states[i];
    const double cur = norm(d);
    rep.trace.emplace_back(ta.times[i], cur);
    if (cur - prev > rep.worst_value) {
      rep.worst_value = cur - prev;
      rep.witness = d;
    }
    prev = cur;
  }
  rep.pass = rep.worst_value <= rep.tolerance;
  std::ostringstream d;
  d << "largest one-step increase of ||u^a - u^b|| = " << rep.worst_value;
  rep.detail = d.str();
  return rep;
}

}  // namespace vsum
