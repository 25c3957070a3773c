#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "vsum/monotone.hpp"

namespace vsum {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Eigen::MatrixXd to_eigen(std::size_t n, const std::vector<double>& rows) {
  Eigen::MatrixXd m(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) m(r, c) = rows[r * n + c];
  }
  return m;
}

Vector dense_apply(std::size_t n, const std::vector<double>& rows, const Vector& x) {
  Vector y = zeros_like(x);
  for (std::size_t r = 0; r < n; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < n; ++c) s += rows[r * n + c] * x[c];
    y[r] = s;
  }
  return y;
}

// (I + lambda M)^{-1} w as (I/lambda + M) x = w / lambda: well conditioned as lambda -> 0.
Vector linear_resolvent(const SymSparseMatrix& m, double lambda, const Vector& w, double tol) {
  if (m.nonzeros() == 0) return w;
  return cg_solve(m, 1.0 / lambda, (1.0 / lambda) * w, tol);
}

Vector map_coordinates(const Vector& w, auto&& fn) {
  Vector out = w;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fn(w[i]);
  return out;
}

LinearOperator diagonal_operator(Vector d) {
  const std::size_t n = d.size();
  return {n, [d = std::move(d)](std::span<const double> x, std::span<double> y) {
            for (std::size_t i = 0; i < x.size(); ++i) y[i] = d[i] * x[i];
          }};
}

LinearOperator matrix_operator(SymSparseMatrix m) {
  const std::size_t n = m.dimension();
  return {n, [m = std::move(m)](std::span<const double> x, std::span<double> y) { m.apply(x, y); }};
}

bool subdiff_is_linear(const ConvexFunctionSpec& f) {
  for (const auto& t : f.terms()) {
    if (t.kind != ConvexPreset::kZero && t.kind != ConvexPreset::kQuadratic) return false;
  }
  return true;
}

void require_size(const OperatorSpec& t, const Vector& w) {
  if (w.size() != t.dimension()) {
    throw ConfigError("vector of length " + std::to_string(w.size()) + " applied to operator of dimension " +
                      std::to_string(t.dimension()));
  }
}

}  // namespace

OperatorSpec OperatorSpec::zero(std::size_t n) { return linear(SymSparseMatrix::zero(n)); }

OperatorSpec OperatorSpec::identity(std::size_t n) { return linear(SymSparseMatrix::identity(n)); }

OperatorSpec OperatorSpec::linear(SymSparseMatrix m) {
  if (!m.psd()) throw ConfigError("linear operator spec requires a matrix flagged PSD (monotone)");
  const std::size_t n = m.dimension();
  return OperatorSpec(n, Linear{std::move(m)});
}

OperatorSpec OperatorSpec::separable(ScalarMonotoneGraph g, std::size_t n) {
  if (n == 0) throw ConfigError("operator dimension must be positive");
  return OperatorSpec(n, Separable{std::move(g)});
}

OperatorSpec OperatorSpec::subdifferential(ConvexFunctionSpec f, std::size_t n) {
  if (n == 0) throw ConfigError("operator dimension must be positive");
  if (f.quadratic() && f.quadratic()->dimension() != n) throw ConfigError("quadratic form dimension mismatch");
  return OperatorSpec(n, Subdifferential{std::move(f)});
}

OperatorSpec OperatorSpec::form_sum(SymSparseMatrix laplacian, Vector potential) {
  if (potential.size() != laplacian.dimension()) throw ConfigError("potential length does not match the Laplacian");
  for (double q : potential) {
    if (!(q >= 0.0) || !std::isfinite(q)) throw ConfigError("form-sum potential must be finite and nonnegative");
  }
  SymSparseMatrix combined = laplacian + SymSparseMatrix::diagonal(potential, true);
  const std::size_t n = laplacian.dimension();
  OperatorSpec spec(n, FormSum{std::move(laplacian), potential, std::move(combined)});
  spec.grid_ = potential.grid();
  return spec;
}

OperatorSpec OperatorSpec::nonsymmetric_linear(std::size_t n, std::vector<double> rows) {
  if (n == 0 || rows.size() != n * n) throw ConfigError("nonsymmetric linear operator needs n*n entries");
  if (n > kDenseOracleLimit) throw CapabilityError("nonsymmetric linear operators are dense; n too large");
  const Eigen::MatrixXd m = to_eigen(n, rows);
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (es.eigenvalues()(0) < -1e-10 * scale) {
    throw MonotonicityError("nonsymmetric linear operator is not monotone (symmetric part has eigenvalue " +
                            std::to_string(es.eigenvalues()(0)) + ")");
  }
  return OperatorSpec(n, NonsymmetricLinear{std::move(rows)});
}

bool OperatorSpec::selfadjoint() const { return matrix_of(*this).has_value(); }

bool OperatorSpec::is_linear() const {
  return matrix_of(*this).has_value() || std::holds_alternative<NonsymmetricLinear>(rep_);
}

bool OperatorSpec::has_jacobian() const {
  return std::visit(Overloaded{[](const Linear&) { return true; }, [](const FormSum&) { return true; },
                               [](const Separable& s) { return s.graph.single_valued(); },
                               [](const Subdifferential& s) { return s.function.smooth(); },
                               [](const NonsymmetricLinear&) { return false; }},
                    rep_);
}

bool OperatorSpec::has_yosida_jacobian() const {
  return std::visit(Overloaded{[](const Linear&) { return true; }, [](const FormSum&) { return true; },
                               [](const Separable&) { return true; },
                               [](const Subdifferential& s) {
                                 return !(s.function.quadratic() && s.function.has_separable_part());
                               },
                               [](const NonsymmetricLinear&) { return false; }},
                    rep_);
}

std::string OperatorSpec::kind_name() const {
  return std::visit(Overloaded{[](const Linear&) { return "linear"; }, [](const Separable&) { return "separable"; },
                               [](const Subdifferential&) { return "subdifferential"; },
                               [](const FormSum&) { return "form_sum"; },
                               [](const NonsymmetricLinear&) { return "nonsymmetric_linear"; }},
                    rep_);
}

std::string OperatorSpec::describe() const {
  const std::string dim = "(n=" + std::to_string(n_) + ")";
  return std::visit(
      Overloaded{[&](const Linear& l) { return "linear" + dim + " nnz=" + std::to_string(l.matrix.nonzeros()); },
                 [&](const Separable& s) { return "separable" + dim + " graph=" + s.graph.name(); },
                 [&](const Subdifferential& s) { return "subdifferential" + dim + " of " + s.function.describe(); },
                 [&](const FormSum&) { return "form_sum" + dim; },
                 [&](const NonsymmetricLinear&) { return "nonsymmetric_linear" + dim; }},
      rep_);
}

std::optional<SymSparseMatrix> matrix_of(const OperatorSpec& t) {
  return std::visit(Overloaded{[](const OperatorSpec::Linear& l) -> std::optional<SymSparseMatrix> { return l.matrix; },
                               [](const OperatorSpec::FormSum& f) -> std::optional<SymSparseMatrix> {
                                 return f.combined;
                               },
                               [&](const OperatorSpec::Subdifferential& s) -> std::optional<SymSparseMatrix> {
                                 if (!subdiff_is_linear(s.function)) return std::nullopt;
                                 double diag = 0.0;
                                 for (const auto& term : s.function.terms()) {
                                   if (term.kind == ConvexPreset::kQuadratic) diag += term.weight;
                                 }
                                 SymSparseMatrix m = diag * SymSparseMatrix::identity(t.dimension());
                                 if (s.function.quadratic()) m = m + *s.function.quadratic();
                                 return m;
                               },
                               [](const auto&) -> std::optional<SymSparseMatrix> { return std::nullopt; }},
                    t.variant());
}

Vector resolvent(const OperatorSpec& t, double lambda, const Vector& w, double tol) {
  if (!(lambda > 0.0)) throw ConfigError("resolvent parameter must be positive");
  require_size(t, w);
  return std::visit(
      Overloaded{[&](const OperatorSpec::Linear& l) { return linear_resolvent(l.matrix, lambda, w, tol); },
                 [&](const OperatorSpec::FormSum& f) { return linear_resolvent(f.combined, lambda, w, tol); },
                 [&](const OperatorSpec::Separable& s) {
                   return map_coordinates(w, [&](double v) { return s.graph.resolvent(lambda, v); });
                 },
                 [&](const OperatorSpec::Subdifferential& s) { return s.function.prox(lambda, w, tol); },
                 [&](const OperatorSpec::NonsymmetricLinear& d) {
                   const std::size_t n = t.dimension();
                   const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n) + lambda * to_eigen(n, d.rows);
                   const Eigen::VectorXd x = m.partialPivLu().solve(Eigen::Map<const Eigen::VectorXd>(w.span().data(), n));
                   Vector out = w;
                   for (std::size_t i = 0; i < n; ++i) out[i] = x(i);
                   return out;
                 }},
      t.variant());
}

Vector yosida(const OperatorSpec& t, double lambda, const Vector& w, double tol) {
  if (!(lambda > 0.0)) throw ConfigError("Yosida parameter must be positive");
  require_size(t, w);
  // Linear case: A (I + lambda A)^{-1} w avoids dividing a small difference by lambda.
  if (const auto m = matrix_of(t)) return m->apply(linear_resolvent(*m, lambda, w, tol));
  return std::visit(
      Overloaded{[&](const OperatorSpec::Separable& s) {
                   return map_coordinates(w, [&](double v) { return s.graph.yosida(lambda, v); });
                 },
                 [&](const OperatorSpec::Subdifferential& s) {
                   if (!s.function.quadratic()) {
                     const auto g = s.function.separable_subdifferential();
                     return map_coordinates(w, [&](double v) { return g.yosida(lambda, v); });
                   }
                   Vector y = w - s.function.prox(lambda, w, tol);
                   return (1.0 / lambda) * std::move(y);
                 },
                 [&](const OperatorSpec::NonsymmetricLinear& d) {
                   return dense_apply(t.dimension(), d.rows, resolvent(t, lambda, w, tol));
                 },
                 [&](const auto&) -> Vector { throw Error("unreachable yosida branch"); }},
      t.variant());
}

Vector apply(const OperatorSpec& t, const Vector& u) {
  require_size(t, u);
  if (const auto* d = std::get_if<OperatorSpec::NonsymmetricLinear>(&t.variant())) {
    return dense_apply(t.dimension(), d->rows, u);
  }
  if (!t.has_jacobian()) throw CapabilityError("operator " + t.describe() + " has no single-valued action");
  if (const auto m = matrix_of(t)) return m->apply(u);
  return std::visit(Overloaded{[&](const OperatorSpec::Separable& s) {
                                 return map_coordinates(u, [&](double v) { return s.graph.value(v)->lo; });
                               },
                               [&](const OperatorSpec::Subdifferential& s) {
                                 const auto g = s.function.separable_subdifferential();
                                 Vector out = map_coordinates(u, [&](double v) { return g.value(v)->lo; });
                                 if (s.function.quadratic()) out += s.function.quadratic()->apply(u);
                                 return out;
                               },
                               [&](const auto&) -> Vector { throw Error("unreachable apply branch"); }},
                    t.variant());
}

LinearOperator jacobian(const OperatorSpec& t, const Vector& u) {
  require_size(t, u);
  if (!t.has_jacobian()) throw CapabilityError("operator " + t.describe() + " has no symmetric Jacobian");
  if (auto m = matrix_of(t)) return matrix_operator(std::move(*m));
  return std::visit(Overloaded{[&](const OperatorSpec::Separable& s) {
                                 return diagonal_operator(map_coordinates(u, [&](double v) { return s.graph.slope(v); }));
                               },
                               [&](const OperatorSpec::Subdifferential& s) {
                                 const auto g = s.function.separable_subdifferential();
                                 Vector d = map_coordinates(u, [&](double v) { return g.slope(v); });
                                 if (!s.function.quadratic()) return diagonal_operator(std::move(d));
                                 const SymSparseMatrix m = *s.function.quadratic() + SymSparseMatrix::diagonal(d, true);
                                 return matrix_operator(m);
                               },
                               [&](const auto&) -> LinearOperator { throw Error("unreachable jacobian branch"); }},
                    t.variant());
}

LinearOperator yosida_jacobian(const OperatorSpec& t, double lambda, const Vector& w, double tol) {
  require_size(t, w);
  if (!t.has_yosida_jacobian()) throw CapabilityError("operator " + t.describe() + " has no Yosida Jacobian");
  if (auto m = matrix_of(t)) {
    // A (I + lambda A)^{-1}: symmetric because the two factors commute.
    const std::size_t n = m->dimension();
    return {n, [m = std::move(*m), lambda, tol](std::span<const double> x, std::span<double> y) {
              Vector in(std::vector<double>(x.begin(), x.end()));
              const Vector r = linear_resolvent(m, lambda, in, tol);
              m.apply(r.span(), y);
            }};
  }
  return std::visit(
      Overloaded{[&](const OperatorSpec::Separable& s) {
                   return diagonal_operator(map_coordinates(w, [&](double v) { return s.graph.yosida_slope(lambda, v); }));
                 },
                 [&](const OperatorSpec::Subdifferential& s) {
                   const auto g = s.function.separable_subdifferential();
                   return diagonal_operator(map_coordinates(w, [&](double v) { return g.yosida_slope(lambda, v); }));
                 },
                 [&](const auto&) -> LinearOperator { throw Error("unreachable yosida_jacobian branch"); }},
      t.variant());
}

}  // namespace vsum
