#pragma once
// Implicit Euler for u' + A u + B u ∋ f, u(0) = u0 (zero by default). Each
// step is one resolvent of tau (A + B), realized by the chosen sum strategy.

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "vsum/sums.hpp"

namespace vsum {

enum class SumStrategy { kAlgebraic, kVariational, kFormSum };

std::string to_string(SumStrategy s);
SumStrategy parse_strategy(const std::string& s);

// Time-dependent right-hand side with values in R^n.
class Forcing {
 public:
  static Forcing zero(std::size_t n, std::optional<GridMeta> grid = std::nullopt);
  static Forcing constant(Vector value, std::string label = "constant");
  // values[j] holds on the cell (times[j], times[j+1]]; times[0] = 0.
  static Forcing table(std::vector<double> times, std::vector<Vector> values);
  static Forcing function(std::size_t n, std::function<Vector(double)> fn, std::string label, double horizon);

  Vector at(double t) const;
  std::size_t dimension() const { return n_; }
  const std::string& label() const { return label_; }
  // Largest time at which the forcing is defined.
  double coverage() const { return coverage_; }

 private:
  Forcing() = default;
  std::size_t n_ = 0;
  std::string label_;
  double coverage_ = kPlusInfinity;
  std::function<Vector(double)> fn_;
};

struct EvolutionProblem {
  OperatorSpec a;
  OperatorSpec b;
  Forcing forcing;
  double horizon;
  Vector initial;
  SumStrategy strategy;
  // Filter path used by the variational strategy.
  FilterPath path;

  // Validates dimensions, horizon, and forcing coverage; the initial state
  // defaults to zero.
  static EvolutionProblem make(OperatorSpec a, OperatorSpec b, Forcing forcing, double horizon,
                               SumStrategy strategy = SumStrategy::kAlgebraic,
                               std::optional<Vector> initial = std::nullopt,
                               FilterPath path = FilterPath::diagonal());

  std::size_t dimension() const { return a.dimension(); }
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<double> residuals;  // one per step; residuals[i] belongs to states[i + 1]
  double step = 0.0;
  double tolerance = 0.0;
  SumStrategy strategy = SumStrategy::kAlgebraic;
};

class EvolutionStepError : public Error {
 public:
  EvolutionStepError(const std::string& what, Trajectory partial, std::size_t step_index)
      : Error(what), partial_(std::move(partial)), step_index_(step_index) {}
  const Trajectory& partial() const { return partial_; }
  std::size_t step_index() const { return step_index_; }

 private:
  Trajectory partial_;
  std::size_t step_index_;
};

// u_{i+1} = J^{A+B}_tau (u_i + tau f(t_{i+1})), tau = T / steps.
Trajectory implicit_euler_solve(const EvolutionProblem& p, std::size_t steps, double tol);

// Errors at T against a reference run with `reference_steps` steps.
ConvergenceReport step_convergence_study(const EvolutionProblem& p, const std::vector<std::size_t>& steps_list,
                                         std::size_t reference_steps, double tol);
// Same, against a known final state.
ConvergenceReport step_convergence_study(const EvolutionProblem& p, const std::vector<std::size_t>& steps_list,
                                         const Vector& exact_final, double tol);

inline constexpr double kFlowSlack = 1e-10;

// Runs two trajectories that differ only in the initial state; passes when
// ||u_i^a - u_i^b|| never increases by more than 1e-10.
DiagnosticReport flow_nonexpansiveness_check(const EvolutionProblem& p, const Vector& u0_a, const Vector& u0_b,
                                             std::size_t steps, double tol = 1e-10);

}  // namespace vsum
