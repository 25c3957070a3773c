#pragma once
// Sums of maximal monotone operators: the variational sum computed as a
// filter limit of doubly regularized resolvent equations
//   u + A_lambda u + B_mu u = w,   (lambda, mu) -> (0, 0),
// the algebraic sum, and diagnostics that decide when the two agree.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vsum/monotone.hpp"

namespace vsum {

struct PathPoint {
  double lambda;
  double mu;
};

// Pairs in {lambda, mu >= 0, lambda + mu != 0}; max(lambda, mu) strictly
// decreasing and at most 1e-6 at the end.
class FilterPath {
 public:
  static FilterPath make(std::string label, std::vector<PathPoint> points);
  // lambda_k = mu_k = 2^-k, k = 0..last.
  static FilterPath diagonal(int last = 20);
  // lambda_k = 2^-k, mu_k = 4^-k.
  static FilterPath skewed(int last = 20);
  // lambda_k = 2^-k, mu_k = 0 (single-parameter regularization of A only).
  static FilterPath lambda_only(int last = 20);
  // lambda_k = 0, mu_k = 2^-k.
  static FilterPath mu_only(int last = 20);
  // "default", "alternate", "lambda_only", "mu_only".
  static FilterPath named(const std::string& label, int last = 20);

  const std::string& label() const { return label_; }
  const std::vector<PathPoint>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }

 private:
  FilterPath(std::string label, std::vector<PathPoint> points) : label_(std::move(label)), points_(std::move(points)) {}
  std::string label_;
  std::vector<PathPoint> points_;
};

struct ConvergenceRecord {
  double lambda = 0.0;
  double mu = 0.0;
  double norm = 0.0;
  double diff = 0.0;  // NaN for the first record
};

// Evidence for a limit: one record per parameter value.
struct ConvergenceReport {
  std::string label;
  std::vector<ConvergenceRecord> records;
  bool converged = false;
  // Index of the first record of the final run of Cauchy-satisfied steps; -1 if none.
  int converged_at = -1;
  Vector limit;
  // Richardson extrapolation from the last two iterates; reported, never returned.
  std::optional<Vector> extrapolated;
  double rate = 0.0;  // NaN when undefined
  double tolerance = 0.0;
  std::string verdict;
};

// Consecutive Cauchy-satisfied steps required to declare a filter limit.
inline constexpr int kSustainedSteps = 3;

struct DiagnosticReport {
  std::string name;
  std::size_t samples = 0;
  Vector witness;
  double worst_value = 0.0;
  double tolerance = 0.0;
  // "<=": pass iff worst_value <= tolerance; ">=": pass iff worst_value >= -tolerance.
  std::string comparison = "<=";
  bool pass = false;
  std::string detail;
  std::vector<std::pair<double, double>> trace;  // (parameter, value), optional
};

// Unique u with u + scale (A~ u + B~ u) = w where A~ = A_lambda for lambda > 0
// and A itself for lambda = 0 (same for B with mu). Residual <= tol (1 + ||w||).
Vector regularized_resolvent(const OperatorSpec& a, const OperatorSpec& b, double lambda, double mu, const Vector& w,
                             double tol, const Vector* warm = nullptr, double scale = 1.0);

// Filter limit of regularized_resolvent along `path`: the resolvent of the
// variational sum, J^{(A+B)_v}_scale w. The returned vector is the last
// iterate; non-convergence is reported, not thrown.
std::pair<Vector, ConvergenceReport> variational_sum_resolvent(const OperatorSpec& a, const OperatorSpec& b,
                                                               const Vector& w, const FilterPath& path, double tol,
                                                               const Vector* warm = nullptr, double scale = 1.0);

struct SumSolve {
  Vector u;
  double residual = 0.0;
  int iterations = 0;
};

// u with w in u + scale (A u + B u): Newton when both actions are smooth,
// Douglas-Rachford otherwise. Throws NonConvergenceError.
Vector algebraic_sum_resolvent(const OperatorSpec& a, const OperatorSpec& b, const Vector& w, double tol,
                               const Vector* warm = nullptr, double scale = 1.0);
SumSolve algebraic_sum_resolvent_detailed(const OperatorSpec& a, const OperatorSpec& b, const Vector& w, double tol,
                                          const Vector* warm = nullptr, double scale = 1.0);

// || J^A_l J^B_m w - J^B_m J^A_l w || / ||w|| over samples and parameter grids.
DiagnosticReport check_resolvent_commutation(const OperatorSpec& a, const OperatorSpec& b,
                                             const std::vector<double>& lambdas, const std::vector<double>& mus,
                                             std::size_t samples, double tol, std::uint64_t seed = 0);

inline constexpr double kAcuteAngleTol = 1e-10;

// min << A_l u, B_m u >> (mesh-weighted) over samples and parameter grids.
DiagnosticReport check_acute_angle(const OperatorSpec& a, const OperatorSpec& b, const std::vector<double>& lambdas,
                                   const std::vector<double>& mus, std::size_t samples, std::uint64_t seed = 0);

inline constexpr double kBoundednessSlopeTol = 0.05;
inline constexpr std::size_t kBoundednessWindow = 5;

// Solves u_mu + A u_mu + B_mu u_mu = w along the mu-components of `path`
// and tests whether ||B_mu u_mu|| stays bounded (log-log slope over the last
// five points <= 0.05).
DiagnosticReport boundedness_diagnostic(const OperatorSpec& a, const OperatorSpec& b, const Vector& w,
                                        const FilterPath& path, double tol = 1e-10);

// Reproducible standard-normal vector carrying the operator's grid metadata.
Vector random_vector(std::size_t n, std::uint64_t seed, const std::optional<GridMeta>& grid = std::nullopt);

}  // namespace vsum
