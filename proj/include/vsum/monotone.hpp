#pragma once
// Maximal monotone operators in finite dimensions: resolvents, Yosida
// approximations, Moreau envelopes and proximal maps.
//
// Convention: A = subdifferential of phi (the quadratic functional of a
// selfadjoint operator), B = subdifferential of psi.

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "vsum/linalg.hpp"

namespace vsum {

// Value of a convex function outside its effective domain.
inline constexpr double kPlusInfinity = std::numeric_limits<double>::infinity();
inline bool is_plus_infinity(double v) { return v == kPlusInfinity; }

inline constexpr double kDefaultResolventTol = 1e-12;

// Closed interval [lo, hi]; endpoints may be infinite.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double y, double slack = 0.0) const { return y >= lo - slack && y <= hi + slack; }
  bool operator==(const Interval&) const = default;
};

// Nondecreasing, possibly multivalued graph on the real line.
class ScalarMonotoneGraph {
 public:
  // Single-valued, everywhere defined, C1.
  struct Smooth {
    std::function<double(double)> f;
    std::function<double(double)> df;
  };
  // Vertical segment [y_lo, y_hi] allowed at each breakpoint; linear in between,
  // linear with the given slopes beyond the first/last breakpoint.
  struct Breakpoint {
    double x;
    double y_lo;
    double y_hi;
  };
  struct Piecewise {
    std::vector<Breakpoint> points;
    double left_slope = 0.0;
    double right_slope = 0.0;
  };
  // Subdifferential of the indicator of [a, b].
  struct NormalCone {
    double a;
    double b;
  };
  // Pointwise (Minkowski) sum of graphs.
  struct Composite {
    std::vector<ScalarMonotoneGraph> parts;
  };

  static ScalarMonotoneGraph smooth(std::string name, std::function<double(double)> f,
                                    std::function<double(double)> df);
  static ScalarMonotoneGraph piecewise(std::string name, std::vector<Breakpoint> points, double left_slope,
                                       double right_slope);
  static ScalarMonotoneGraph normal_cone(std::string name, double a, double b);
  static ScalarMonotoneGraph sum(std::string name, std::vector<ScalarMonotoneGraph> parts);

  const std::string& name() const { return name_; }
  const auto& representation() const { return rep_; }

  // Graph value at x; nullopt outside the domain.
  std::optional<Interval> value(double x) const;
  Interval domain() const;
  // Single-valued and everywhere defined (no vertical segments, full domain).
  bool single_valued() const;
  // Generalized derivative of a single-valued graph (right derivative at kinks).
  double slope(double x) const;
  // 0 in g(0).
  bool normalized() const;

  // Unique u with w in u + lambda g(u).
  double resolvent(double lambda, double w) const;
  // (w - resolvent) / lambda, snapped into g(resolvent).
  double yosida(double lambda, double w) const;
  // Derivative of w -> yosida(lambda, w) (slope of the active branch).
  double yosida_slope(double lambda, double w) const;

  // Abscissae where the graph is multivalued or nondifferentiable.
  std::vector<double> kinks() const;

 private:
  ScalarMonotoneGraph(std::string name, std::variant<Smooth, Piecewise, NormalCone, Composite> rep)
      : name_(std::move(name)), rep_(std::move(rep)) {}

  std::string name_;
  std::variant<Smooth, Piecewise, NormalCone, Composite> rep_;
};

// min{|y| : y in g(x)}; DomainError when x is outside the domain.
double minimal_section_norm(const ScalarMonotoneGraph& g, double x);

enum class ConvexPreset { kZero, kAbs, kIndicatorNonneg, kIndicatorBox, kPower4, kQuadratic };

// weight * f(x) for one coordinate; box bounds only used by kIndicatorBox.
struct ConvexTerm {
  ConvexPreset kind = ConvexPreset::kZero;
  double weight = 1.0;
  double lo = 0.0;
  double hi = 0.0;
};

// Proper convex lower semicontinuous function on R^n made of a separable part
// sum_i sum_terms term(x_i) and an optional quadratic form 1/2 <Mx, x>.
// Presets: "zero", "abs" (|x|), "indicator_nonneg", "power4" (x^4/4),
// "quadratic" (x^2/2); indicator_box is built with box_indicator().
class ConvexFunctionSpec {
 public:
  ConvexFunctionSpec() = default;

  static ConvexFunctionSpec preset(std::string_view name, double weight = 1.0);
  static ConvexFunctionSpec box_indicator(double lo, double hi);
  static ConvexFunctionSpec quadratic_form(SymSparseMatrix m);

  ConvexFunctionSpec operator+(const ConvexFunctionSpec& other) const;

  const std::vector<ConvexTerm>& terms() const { return terms_; }
  const std::optional<SymSparseMatrix>& quadratic() const { return quadratic_; }
  bool has_separable_part() const;

  // +infinity outside the effective domain.
  double value(const Vector& x) const;
  double scalar_value(double v) const;

  // Subdifferential of the separable part, coordinate-wise.
  ScalarMonotoneGraph separable_subdifferential() const;

  // Gradient exists and is Lipschitz everywhere.
  bool smooth() const;

  // argmin_v { lambda f(v) + 1/2 ||v - x||^2 }.
  Vector prox(double lambda, const Vector& x, double tol = kDefaultResolventTol) const;

  std::string describe() const;

 private:
  std::vector<ConvexTerm> terms_;
  std::optional<SymSparseMatrix> quadratic_;
};

double moreau_envelope(const ConvexFunctionSpec& f, double lambda, const Vector& x, double tol = kDefaultResolventTol);

// Declarative maximal monotone operator on R^n.
class OperatorSpec {
 public:
  struct Linear {
    SymSparseMatrix matrix;
  };
  struct Separable {
    ScalarMonotoneGraph graph;
  };
  struct Subdifferential {
    ConvexFunctionSpec function;
  };
  // -Laplacian + diag(Q), assembled from the sum of the two quadratic forms.
  struct FormSum {
    SymSparseMatrix laplacian;
    Vector potential;
    SymSparseMatrix combined;
  };
  // Monotone (PSD symmetric part) but not selfadjoint. Dense, small only.
  struct NonsymmetricLinear {
    std::vector<double> rows;  // row-major n*n
  };
  using Variant = std::variant<Linear, Separable, Subdifferential, FormSum, NonsymmetricLinear>;

  static OperatorSpec zero(std::size_t n);
  static OperatorSpec identity(std::size_t n);
  static OperatorSpec linear(SymSparseMatrix m);
  static OperatorSpec separable(ScalarMonotoneGraph g, std::size_t n);
  static OperatorSpec subdifferential(ConvexFunctionSpec f, std::size_t n);
  static OperatorSpec form_sum(SymSparseMatrix laplacian, Vector potential);
  static OperatorSpec nonsymmetric_linear(std::size_t n, std::vector<double> rows);

  std::size_t dimension() const { return n_; }
  bool selfadjoint() const;
  bool is_linear() const;
  // Single-valued everywhere-defined action with a symmetric generalized Jacobian.
  bool has_jacobian() const;
  // The Yosida approximation has a usable symmetric generalized Jacobian.
  bool has_yosida_jacobian() const;
  std::string kind_name() const;
  std::string describe() const;

  const Variant& variant() const { return rep_; }

  // Grid attached to vectors produced for this operator.
  const std::optional<GridMeta>& grid() const { return grid_; }
  OperatorSpec& with_grid(std::optional<GridMeta> g) {
    grid_ = g;
    return *this;
  }

 private:
  OperatorSpec(std::size_t n, Variant rep) : n_(n), rep_(std::move(rep)) {}
  std::size_t n_ = 0;
  Variant rep_;
  std::optional<GridMeta> grid_;
};

// Unique u with w in u + lambda T(u).
Vector resolvent(const OperatorSpec& t, double lambda, const Vector& w, double tol = kDefaultResolventTol);
// T_lambda w = (w - J_lambda w) / lambda, evaluated in a cancellation-free form where possible.
Vector yosida(const OperatorSpec& t, double lambda, const Vector& w, double tol = kDefaultResolventTol);

// Matrix of a selfadjoint linear spec (Linear, FormSum, quadratic-only Subdifferential).
std::optional<SymSparseMatrix> matrix_of(const OperatorSpec& t);

// Action and generalized Jacobian; require has_jacobian().
Vector apply(const OperatorSpec& t, const Vector& u);
LinearOperator jacobian(const OperatorSpec& t, const Vector& u);
// Generalized Jacobian of w -> T_lambda w; requires has_yosida_jacobian().
LinearOperator yosida_jacobian(const OperatorSpec& t, double lambda, const Vector& w,
                               double tol = kDefaultResolventTol);

// Resolvent callback used by splitting schemes: (step, point) -> J_step(point).
using ResolventFn = std::function<Vector(double, const Vector&)>;

struct SplittingResult {
  Vector u;
  double residual = 0.0;
  int iterations = 0;
};

inline constexpr int kSplittingMaxIterations = 200000;

// Solves w in u + scale (P u + Q u) by Douglas-Rachford (Peaceman-Rachford
// averaged with factor 1/2) on the balanced split
// T1 = (I - w)/2 + scale P, T2 = (I - w)/2 + scale Q.
// Stops when the fixed-point residual is <= tol; throws NonConvergenceError.
SplittingResult douglas_rachford(const ResolventFn& jp, const ResolventFn& jq, const Vector& w, double scale,
                                 double tol, int max_iterations = kSplittingMaxIterations);

}  // namespace vsum
