#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "vsum/kernels.hpp"
#include "vsum/linalg.hpp"

namespace vsum {
namespace {

using EntryMap = std::map<std::pair<std::size_t, std::size_t>, double>;

kernels::CsrView view(const std::vector<std::size_t>& rp, const std::vector<std::size_t>& c,
                      const std::vector<double>& v) {
  return {rp, c, v};
}

}  // namespace

SymSparseMatrix::SymSparseMatrix(std::size_t n, const std::vector<Triplet>& entries, bool psd) : n_(n), psd_(psd) {
  if (n == 0) throw ConfigError("matrix dimension must be positive");
  EntryMap given;
  for (const Triplet& t : entries) {
    if (t.row >= n || t.col >= n) {
      throw ConfigError("matrix entry (" + std::to_string(t.row) + "," + std::to_string(t.col) +
                        ") outside dimension " + std::to_string(n));
    }
    if (!std::isfinite(t.value)) throw ConfigError("matrix entry is not finite");
    given[{t.row, t.col}] += t.value;
  }
  EntryMap closed = given;
  for (const auto& [pos, v] : given) {
    if (pos.first == pos.second) continue;
    const auto mirror = std::make_pair(pos.second, pos.first);
    auto it = given.find(mirror);
    if (it == given.end()) {
      closed[mirror] = v;
    } else if (std::abs(it->second - v) > 1e-14 * std::max({1.0, std::abs(v), std::abs(it->second)})) {
      throw ConfigError("entries (" + std::to_string(pos.first) + "," + std::to_string(pos.second) +
                        ") and its mirror disagree");
    }
  }
  row_ptr_.assign(n + 1, 0);
  cols_.reserve(closed.size());
  vals_.reserve(closed.size());
  for (const auto& [pos, v] : closed) {
    if (v == 0.0) continue;
    ++row_ptr_[pos.first + 1];
    cols_.push_back(pos.second);
    vals_.push_back(v);
  }
  for (std::size_t r = 0; r < n; ++r) row_ptr_[r + 1] += row_ptr_[r];
  // Cheap enough to check eagerly for small matrices; larger ones are checked on request.
  if (psd_ && n_ <= 128) verify_psd();
}

SymSparseMatrix SymSparseMatrix::zero(std::size_t n) { return SymSparseMatrix(n, {}, true); }

SymSparseMatrix SymSparseMatrix::identity(std::size_t n) {
  std::vector<Triplet> t;
  t.reserve(n);
  for (std::size_t i = 0; i < n; ++i) t.push_back({i, i, 1.0});
  return SymSparseMatrix(n, t, true);
}

SymSparseMatrix SymSparseMatrix::diagonal(const Vector& d, bool psd) {
  std::vector<Triplet> t;
  t.reserve(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) t.push_back({i, i, d[i]});
  return SymSparseMatrix(d.size(), t, psd);
}

void SymSparseMatrix::apply(std::span<const double> x, std::span<double> y, double shift) const {
  if (x.size() != n_ || y.size() != n_) throw ConfigError("matrix-vector size mismatch");
  kernels::spmv(view(row_ptr_, cols_, vals_), shift, x, y);
}

Vector SymSparseMatrix::apply(const Vector& x, double shift) const {
  Vector y = zeros_like(x);
  apply(x.span(), y.span(), shift);
  return y;
}

double SymSparseMatrix::max_abs_entry() const {
  double m = 0.0;
  for (double v : vals_) m = std::max(m, std::abs(v));
  return m;
}

double SymSparseMatrix::at(std::size_t i, std::size_t j) const {
  for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
    if (cols_[k] == j) return vals_[k];
  }
  return 0.0;
}

std::vector<Triplet> SymSparseMatrix::triplets() const {
  std::vector<Triplet> out;
  out.reserve(vals_.size());
  for (std::size_t r = 0; r < n_; ++r) {
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) out.push_back({r, cols_[k], vals_[k]});
  }
  return out;
}

std::vector<double> SymSparseMatrix::dense() const {
  std::vector<double> d(n_ * n_, 0.0);
  for (std::size_t r = 0; r < n_; ++r) {
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) d[r * n_ + cols_[k]] = vals_[k];
  }
  return d;
}

Vector SymSparseMatrix::diagonal_entries() const {
  Vector d(n_);
  for (std::size_t i = 0; i < n_; ++i) d[i] = at(i, i);
  return d;
}

void SymSparseMatrix::verify_psd() const {
  const auto pairs = dense_eigs(*this);
  const double floor = -1e-10 * max_abs_entry();
  if (!pairs.empty() && pairs.front().value < floor) {
    throw MonotonicityError("matrix declared PSD has eigenvalue " + std::to_string(pairs.front().value));
  }
}

SymSparseMatrix operator+(const SymSparseMatrix& a, const SymSparseMatrix& b) {
  if (a.n_ != b.n_) throw ConfigError("matrix sum dimension mismatch");
  auto t = a.triplets();
  auto tb = b.triplets();
  t.insert(t.end(), tb.begin(), tb.end());
  // Both inputs are already closed, so every mirror is present with an equal sum.
  return SymSparseMatrix(a.n_, t, a.psd_ && b.psd_);
}

SymSparseMatrix operator*(double s, const SymSparseMatrix& a) {
  auto t = a.triplets();
  for (auto& e : t) e.value *= s;
  return SymSparseMatrix(a.n_, t, a.psd_ && s >= 0.0);
}

SymSparseMatrix multiply(const SymSparseMatrix& a, const SymSparseMatrix& b) {
  if (a.n_ != b.n_) throw ConfigError("matrix product dimension mismatch");
  EntryMap prod;
  for (std::size_t i = 0; i < a.n_; ++i) {
    for (std::size_t ka = a.row_ptr_[i]; ka < a.row_ptr_[i + 1]; ++ka) {
      const std::size_t k = a.cols_[ka];
      for (std::size_t kb = b.row_ptr_[k]; kb < b.row_ptr_[k + 1]; ++kb) {
        prod[{i, b.cols_[kb]}] += a.vals_[ka] * b.vals_[kb];
      }
    }
  }
  std::vector<Triplet> t;
  t.reserve(prod.size());
  for (const auto& [pos, v] : prod) t.push_back({pos.first, pos.second, v});
  return SymSparseMatrix(a.n_, t, a.psd_ && b.psd_);
}

std::vector<EigenPair> dense_eigs(const SymSparseMatrix& m) {
  const std::size_t n = m.dimension();
  if (n > kDenseOracleLimit) {
    throw CapabilityError("dense_eigs limited to n <= " + std::to_string(kDenseOracleLimit) + ", got " +
                          std::to_string(n));
  }
  const auto d = m.dense();
  Eigen::MatrixXd mat(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) mat(r, c) = d[r * n + c];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(mat);
  if (solver.info() != Eigen::Success) throw Error("symmetric eigensolver failed");
  std::vector<EigenPair> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    Vector v(n);
    for (std::size_t r = 0; r < n; ++r) v[r] = solver.eigenvectors()(r, k);
    out.push_back({solver.eigenvalues()(k), std::move(v)});
  }
  return out;
}

}  // namespace vsum
