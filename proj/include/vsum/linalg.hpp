#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "vsum/errors.hpp"

namespace vsum {

// Uniform grid on the unit interval/square with homogeneous Dirichlet data.
struct GridMeta {
  int dim = 1;
  std::size_t points_per_axis = 0;
  double h = 0.0;

  // Quadrature weight of one node: h^dim.
  double cell_volume() const { return dim == 1 ? h : h * h; }
  bool operator==(const GridMeta&) const = default;
};

class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t n, double fill = 0.0) : data_(n, fill) {}
  Vector(std::initializer_list<double> values) : data_(values) {}
  explicit Vector(std::vector<double> values, std::optional<GridMeta> grid = std::nullopt)
      : data_(std::move(values)), grid_(grid) {}

  std::size_t size() const { return data_.size(); }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> span() { return data_; }
  std::span<const double> span() const { return data_; }
  const std::vector<double>& values() const { return data_; }

  const std::optional<GridMeta>& grid() const { return grid_; }
  void set_grid(std::optional<GridMeta> g) { grid_ = g; }

  // Weight applied by inner(): h^d on grid vectors, 1 otherwise.
  double weight() const { return grid_ ? grid_->cell_volume() : 1.0; }

  Vector& operator+=(const Vector& o);
  Vector& operator-=(const Vector& o);
  Vector& operator*=(double s);

  auto begin() { return data_.begin(); }
  auto end() { return data_.end(); }
  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }

 private:
  std::vector<double> data_;
  std::optional<GridMeta> grid_;
};

Vector operator+(Vector a, const Vector& b);
Vector operator-(Vector a, const Vector& b);
Vector operator*(double s, Vector a);

// Plain Euclidean quantities (solver internals).
double dot(const Vector& a, const Vector& b);
double norm2(const Vector& a);
double max_abs(const Vector& a);
void axpy(double a, const Vector& x, Vector& y);

// Mesh-weighted inner product h^d * sum(u_i v_i); the discrete L2 pairing.
double inner(const Vector& a, const Vector& b);
double norm(const Vector& a);

// Copy of `like` with every coordinate replaced; keeps grid metadata.
Vector zeros_like(const Vector& like);

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

// Symmetric sparse matrix. Input triplets are summed per position, then every
// off-diagonal entry is mirrored. A mirrored position that was given with a
// different value is rejected. Stored as CSR.
class SymSparseMatrix {
 public:
  SymSparseMatrix() = default;
  SymSparseMatrix(std::size_t n, const std::vector<Triplet>& entries, bool psd);

  static SymSparseMatrix zero(std::size_t n);
  static SymSparseMatrix identity(std::size_t n);
  static SymSparseMatrix diagonal(const Vector& d, bool psd);

  std::size_t dimension() const { return n_; }
  bool psd() const { return psd_; }
  std::size_t nonzeros() const { return vals_.size(); }

  // y = shift * x + M x
  void apply(std::span<const double> x, std::span<double> y, double shift = 0.0) const;
  Vector apply(const Vector& x, double shift = 0.0) const;

  double max_abs_entry() const;
  double at(std::size_t i, std::size_t j) const;
  std::vector<Triplet> triplets() const;
  std::vector<double> dense() const;  // row-major n*n
  Vector diagonal_entries() const;

  // Throws MonotonicityError when some eigenvalue is below -1e-10 * max|entry|.
  // Only available up to the dense oracle limit.
  void verify_psd() const;

  friend SymSparseMatrix operator+(const SymSparseMatrix& a, const SymSparseMatrix& b);
  friend SymSparseMatrix operator*(double s, const SymSparseMatrix& a);
  friend SymSparseMatrix multiply(const SymSparseMatrix& a, const SymSparseMatrix& b);

 private:
  std::size_t n_ = 0;
  bool psd_ = false;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> cols_;
  std::vector<double> vals_;
};

// Product of two symmetric matrices. Only symmetric when they commute; the
// result is rejected otherwise.
SymSparseMatrix multiply(const SymSparseMatrix& a, const SymSparseMatrix& b);

// Matrix-free symmetric operator.
struct LinearOperator {
  std::size_t n = 0;
  std::function<void(std::span<const double>, std::span<double>)> apply;
};

struct CgResult {
  Vector x;
  std::size_t iterations = 0;
  double relative_residual = 0.0;
};

inline constexpr double kDefaultCgTol = 1e-12;

// Solves (shift I + M) x = b to ||r|| <= tol ||b||, at most 10 n iterations.
// Throws IterationLimitError carrying the last relative residual.
Vector cg_solve(const SymSparseMatrix& m, double shift, const Vector& b, double tol = kDefaultCgTol);
CgResult cg_solve_detailed(const SymSparseMatrix& m, double shift, const Vector& b, double tol = kDefaultCgTol);

// CG on a matrix-free operator. Nonpositive curvature raises MonotonicityError.
CgResult cg_solve(const LinearOperator& op, const Vector& b, double tol, std::size_t max_iterations,
                  const Vector* x0 = nullptr);

inline constexpr std::size_t kDenseOracleLimit = 512;

struct EigenPair {
  double value;
  Vector vector;
};

// Full symmetric eigendecomposition, eigenvalues ascending.
std::vector<EigenPair> dense_eigs(const SymSparseMatrix& m);

// Residual map with Jacobian access for guarded_newton. The Jacobian must be
// symmetric positive definite along the iterate path.
struct NewtonSystem {
  std::function<Vector(const Vector&)> residual;
  std::function<LinearOperator(const Vector&)> jacobian;
};

struct NewtonResult {
  Vector x;
  double residual_norm = 0.0;
  int iterations = 0;
};

inline constexpr int kNewtonMaxIterations = 50;
inline constexpr int kNewtonMaxHalvings = 30;

// Newton with step halving. Stops at ||residual|| <= tol (Euclidean).
NewtonResult guarded_newton(const NewtonSystem& sys, const Vector& x0, double tol);

}  // namespace vsum
